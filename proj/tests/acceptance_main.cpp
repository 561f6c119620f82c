// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Exit status is the number
// of failed criteria. argv[1] is the path to the CLI binary (used for the
// exit-code criterion); remaining args filter by criterion tag (c1..c9).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "thinfilm/checkpoint.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/ellipticity.hpp"
#include "thinfilm/parallel.hpp"
#include "thinfilm/polyroots.hpp"
#include "thinfilm/runner.hpp"
#include "thinfilm/stability.hpp"

using namespace thinfilm;
namespace fs = std::filesystem;
using Complex = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& tag, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << tag << ": " << detail << std::endl;
    if (!pass)
        ++g_failures;
}

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::current_path() / "acceptance_artifacts" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// C1 + C2: scenario S1 conservation and dissipation structure
// ---------------------------------------------------------------------------
void criteria_1_2() {
    const auto t0 = Clock::now();
    const RunConfig cfg = s1_preset(); // L=1, n=256, 5% cosines, D=1, beta=1, t_end=1
    const RunResult r = run_simulation(cfg, work_dir("s1"));
    const double elapsed = seconds_since(t0);

    bool mass_ok = r.status == ExitCode::ok && r.accepted_steps > 0;
    mass_ok = mass_ok && r.mass_h_max_drift_rel <= 1e-12 && r.mass_gamma_max_drift_rel <= 1e-12;
    const bool time_ok = elapsed < 60.0;
    {
        std::ostringstream os;
        os << "mass conservation on S1: max rel drift h " << r.mass_h_max_drift_rel << ", gamma "
           << r.mass_gamma_max_drift_rel << " (<= 1e-12) over " << r.accepted_steps
           << " steps, runtime " << elapsed << " s" << (time_ok ? "" : " [over 60 s budget]");
        report("C1", mass_ok && time_ok, os.str());
    }

    bool energy_ok = r.energy_monotone_violations == 0;
    double worst_term = -1.0;
    for (const auto& row : r.series.rows)
        for (double term : row.diss)
            worst_term = std::max(worst_term, term);
    const bool terms_ok = worst_term <= 1e-12;
    {
        std::ostringstream os;
        os << "energy dissipation on S1: monotone violations " << r.energy_monotone_violations
           << " (tol 1e-10*(1+|E|)), max dissipation term " << worst_term << " (<= 1e-12)";
        report("C2", energy_ok && terms_ok, os.str());
    }
}

// ---------------------------------------------------------------------------
// C3: dissipation identity convergence over the refinement ladder
// ---------------------------------------------------------------------------
double ladder_defect(int n, double dt) {
    RunConfig cfg = s1_preset();
    cfg.grid_n = n;
    cfg.time_dt_init = dt;
    cfg.time_dt_min = dt;
    cfg.time_dt_max = dt;
    cfg.time_t_end = 100.0 * dt;
    const RunResult r = run_simulation(cfg, work_dir("ladder_" + std::to_string(n)));
    if (r.status != ExitCode::ok || r.series.rows.empty())
        return std::numeric_limits<double>::quiet_NaN();

    double defect = 0.0;
    double e_prev = r.energy_initial;
    for (const auto& row : r.series.rows) {
        defect = std::max(defect, std::abs((row.energy - e_prev) / row.dt - row.diss_total));
        e_prev = row.energy;
    }
    return defect;
}

void criterion_3() {
    const double d64 = ladder_defect(64, 4e-6);
    const double d128 = ladder_defect(128, 2e-6);
    const double d256 = ladder_defect(256, 1e-6);
    const double r1 = d64 / d128;
    const double r2 = d128 / d256;
    // Halving both dt and dx: first order in dt and second in dx both demand
    // at least a factor ~2 per rung.
    const bool ok = std::isfinite(d64) && std::isfinite(d128) && std::isfinite(d256) &&
                    r1 >= 1.8 && r2 >= 1.8;
    std::ostringstream os;
    os << "dissipation identity defect over (n, dt) ladder: " << d64 << " -> " << d128 << " -> "
       << d256 << " (rung ratios " << r1 << ", " << r2 << ", needed >= 1.8; orders "
       << std::log2(r1) << ", " << std::log2(r2) << ")";
    report("C3", ok, os.str());
}

// ---------------------------------------------------------------------------
// C4: randomized parameter-ellipticity certification
// ---------------------------------------------------------------------------
void criterion_4() {
    const auto t0 = Clock::now();
    constexpr long kDraws = 10000;
    const double rays[5] = {0.0, 0.5 * 1.5707963267948966, -0.5 * 1.5707963267948966,
                            1.5707963267948966, -1.5707963267948966};
    const double moduli[3] = {0.1, 1.0, 10.0};
    const double xis[3] = {0.1, 1.0, 10.0};

    std::vector<long> violations(kDraws, 0);
    parallel_for(kDraws, 0, [&](long idx) {
        std::mt19937_64 rng(0x51e77ull + static_cast<unsigned long long>(idx));
        const auto d = test::draw_admissible(rng);
        long bad = 0;
        FrozenCoefficients c;
        try {
            c = freeze(d.h, d.gamma, d.sigma_prime, d.diffusion);
        } catch (const std::exception&) {
            ++bad;
            violations[idx] = bad;
            return;
        }
        for (double xi : xis) {
            const C1Roots r = c1_roots(c, xi);
            if (!(r.discriminant >= 0.0) || !(r.lambda_plus < 0.0) || !(r.lambda_minus < 0.0))
                ++bad;
        }
        for (double ang : rays) {
            for (double mod : moduli) {
                const Complex lambda = std::polar(mod, ang);
                const CharPolyAnalysis a = sextic_split(c, lambda);
                double zmax = 0.0;
                for (const Complex& z : a.roots_z)
                    zmax = std::max(zmax, std::abs(z));
                for (const Complex& z : a.roots_z)
                    if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, zmax) &&
                        z.real() <= 1e-10 * std::max(1.0, zmax))
                        ++bad;
                if (a.n_pos != 3 || a.n_neg != 3)
                    ++bad;
                else {
                    try {
                        const Complex det = boundary_solvability(a);
                        if (boundary_det_scaled(a, det) <= 1e-10)
                            ++bad;
                    } catch (const std::exception&) {
                        ++bad;
                    }
                }
            }
        }
        violations[idx] = bad;
    });

    long total = 0;
    for (long v : violations)
        total += v;
    const double elapsed = seconds_since(t0);
    const bool ok = total == 0 && elapsed < 120.0;
    std::ostringstream os;
    os << "randomized (C1)/(C2) certification: " << kDraws << " draws x 15 lambda x 3 xi, "
       << total << " violations, runtime " << elapsed << " s"
       << (elapsed < 120.0 ? "" : " [over 120 s budget]");
    report("C4", ok, os.str());
}

// ---------------------------------------------------------------------------
// C5: oracle equivalence (roots and Jacobian)
// ---------------------------------------------------------------------------
void criterion_5() {
    double worst_root = 0.0;
    std::mt19937_64 rng(0xacce55ull);
    const Complex lambdas[6] = {{1.0, 0.0},  {0.0, 1.0}, {10.0, 0.0},
                                {0.1, 0.0},  {3.0, 3.0}, {0.0, -2.5}};
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = test::draw_admissible(rng);
        const FrozenCoefficients c = freeze(d.h, d.gamma, d.sigma_prime, d.diffusion);

        for (double xi : {0.1, 1.0, 10.0}) {
            const C1Roots r = c1_roots(c, xi);
            const double xi2 = xi * xi, xi4 = xi2 * xi2;
            const std::array<Complex, 3> quad = {Complex(c.det() * xi4 * xi2),
                                                 Complex(c.a11 * xi4 + c.a22 * xi2), Complex(1.0)};
            worst_root = std::max(
                worst_root, test::max_relative_root_distance(
                                {Complex(r.lambda_plus), Complex(r.lambda_minus)},
                                test::dk_roots(quad)));
        }
        for (const Complex& lambda : lambdas) {
            const auto zc = cubic_roots(c, lambda);
            const std::array<Complex, 4> cub = {-lambda * lambda, lambda * c.a22,
                                                -lambda * c.a11, Complex(c.det())};
            worst_root = std::max(worst_root,
                                  test::max_relative_root_distance(
                                      {zc.begin(), zc.end()}, test::dk_roots(cub)));

            const CharPolyAnalysis a = sextic_split(c, lambda);
            const double d0 = c.det();
            const std::vector<Complex> sext = {-lambda * lambda / d0, 0.0, lambda * c.a22 / d0,
                                               0.0, -lambda * c.a11 / d0, 0.0, 1.0};
            worst_root = std::max(
                worst_root,
                test::max_relative_root_distance(
                    {a.roots_cap_lambda.begin(), a.roots_cap_lambda.end()}, test::dk_roots(sext)));
        }
    }
    const bool roots_ok = worst_root <= 1e-8;

    // Jacobian vs central finite differences, column-wise relative 1e-5.
    PhysicalParams p;
    p.diffusion = 0.8;
    p.model = SurfactantModel::linear(1.0, 1.5, 1.0);
    p.grid = Grid::make(1.0, 24);
    State s;
    s.h.resize(24);
    s.gamma.resize(24);
    for (int j = 0; j < 24; ++j) {
        const double x = p.grid.cell_center(j);
        s.h[j] = 1.0 + 0.2 * std::cos(3.14159265358979323846 * x);
        s.gamma[j] = 1.0 + 0.3 * std::cos(2.0 * 3.14159265358979323846 * x);
    }
    const BandedMatrix jac = jacobian(s, 10.0, p);
    double worst_col = 0.0;
    for (int col = 0; col < 48; ++col) {
        const auto fd = test::fd_jacobian_column(s, 10.0, p, col);
        double scale = 0.0;
        for (int i = 0; i < 48; ++i)
            scale = std::max(scale, std::abs(jac.get(i, col)));
        for (int i = 0; i < 48; ++i)
            worst_col = std::max(worst_col, std::abs(jac.get(i, col) - fd[i]) / (scale + 1.0));
    }
    const bool jac_ok = worst_col <= 1e-5;

    std::ostringstream os;
    os << "oracle equivalence: analyzer roots vs independent Durand-Kerner oracle, max rel diff "
       << worst_root << " (<= 1e-8); Jacobian vs finite differences, max column rel diff "
       << worst_col << " (<= 1e-5)";
    report("C5", roots_ok && jac_ok, os.str());
}

// ---------------------------------------------------------------------------
// C6: linear stability at small Gamma*
// ---------------------------------------------------------------------------
void criterion_6() {
    PhysicalParams p;
    p.diffusion = 1.0;
    p.model = SurfactantModel::linear(1.0, 1.0, 1.0);
    p.grid = Grid::make(1.0, 128);

    bool ok = true;
    std::ostringstream os;
    os << "linear stability:";
    for (double gamma_star : {1e-3, 1e-2}) {
        const StabilityReport rep =
            spectral_bound(Equilibrium{1.0, gamma_star}, p, p.grid, 1.0);
        const Grid fine = Grid::make(1.0, 256);
        const StabilityReport rep_fine =
            spectral_bound(Equilibrium{1.0, gamma_star}, p, fine, 1.0);
        const double change = std::abs(rep_fine.spectral_bound - rep.spectral_bound) /
                              std::abs(rep_fine.spectral_bound);
        const bool here = rep.spectral_bound < 0.0 && change < 0.05 && rep.aq_definite &&
                          std::abs(rep.q_window_hi - 16.0 / 3.0) < 1e-12;
        ok = ok && here;
        os << " [Gamma*=" << gamma_star << ": bound " << rep.spectral_bound << ", n128->n256 "
           << change * 100.0 << "%, A_q(q=1) " << (rep.aq_definite ? "PD" : "not PD")
           << ", window (0, " << rep.q_window_hi << ")]";
    }
    report("C6", ok, os.str());
}

// ---------------------------------------------------------------------------
// C7: nonlinear decay rate vs the spectral prediction
// ---------------------------------------------------------------------------
void criterion_7() {
    RunConfig cfg = s1_preset();
    cfg.ic_h_amp = 0.01;
    cfg.ic_gamma_amp = 0.01;
    const RunResult r = run_simulation(cfg, work_dir("s1_small"));

    PhysicalParams p = make_params(cfg);
    const StabilityReport rep = spectral_bound(Equilibrium{1.0, 1.0}, p,
                                               Grid::make(1.0, 256), 1.0);
    const double omega_pred = rep.omega_pred;

    bool ok = r.status == ExitCode::ok && r.decay.has_value() && omega_pred > 0.0;
    double ratio = 0.0, r2 = 0.0;
    if (ok) {
        ratio = r.decay->omega / omega_pred;
        r2 = r.decay->r2;
        ok = ratio > 0.5 && ratio < 2.0 && r2 >= 0.99;
    }
    std::ostringstream os;
    os << "nonlinear decay vs linear prediction: omega_fit "
       << (r.decay ? r.decay->omega : 0.0) << ", omega_pred " << omega_pred << ", ratio "
       << ratio << " (in (0.5, 2)), r2 " << r2 << " (>= 0.99)";
    report("C7", ok, os.str());
}

// ---------------------------------------------------------------------------
// C8: degeneracy handling through the CLI
// ---------------------------------------------------------------------------
void criterion_8(const std::string& cli) {
    const fs::path dir = work_dir("degeneracy");
    const fs::path cfg_path = dir / "degenerate.cfg";
    {
        // Strong Marangoni shear over a film touching h = 1e-6: the minimum
        // is driven below 1e-9 around t ~ 7.4, where no admissible step
        // >= dt_min can hold positivity.
        std::ofstream out(cfg_path);
        out << "ic.kind = cosine\n"
               "ic.h_base = 0.300001\n"
               "ic.h_amp = 0.3\n"
               "ic.h_k = 1\n"
               "ic.gamma_base = 1.0\n"
               "ic.gamma_amp = 0.9\n"
               "ic.gamma_k = 2\n"
               "sigma.beta = 80\n"
               "sigma.sigma0 = 81\n"
               "physics.D = 1e-4\n"
               "grid.n = 32\n"
               "time.dt_init = 3e-5\n"
               "time.dt_min = 3e-5\n"
               "time.dt_max = 1e-3\n"
               "time.t_end = 10\n"
               "newton.max_iters = 8\n"
               "output.prefix = deg\n";
    }
    const fs::path outdir = dir / "out";
    const std::string cmd = "\"" + cli + "\" simulate \"" + cfg_path.string() + "\" --out-dir \"" +
                            outdir.string() + "\" > \"" + (dir / "stdout.json").string() +
                            "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int raw = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;

    bool ok = exit_code == 3;
    std::string detail = "degeneracy run exit code " + std::to_string(exit_code) + " (want 3)";

    const fs::path ckpt = outdir / "deg_final.ckpt";
    if (ok) {
        try {
            const Checkpoint ck = load_checkpoint(ckpt.string());
            State s = state_from_checkpoint(ck);
            double min_h = s.h.empty() ? 0.0 : s.h[0];
            for (double v : s.h)
                min_h = std::min(min_h, v);
            ok = state_positive(s) && state_finite(s) && ck.t > 1.0 && min_h < 1e-6;
            std::ostringstream ds;
            ds << "; final checkpoint valid (t = " << ck.t << ", min h = " << min_h
               << " after being driven down from 1e-6)";
            detail += ds.str();
        } catch (const std::exception& e) {
            ok = false;
            detail += std::string("; checkpoint load failed: ") + e.what();
        }
        for (const char* name : {"deg_series.csv", "deg_summary.json"}) {
            const std::string content = slurp(outdir / name);
            if (content.empty() || content.find("nan") != std::string::npos ||
                content.find("-nan") != std::string::npos) {
                ok = false;
                detail += std::string("; NaN or empty artifact: ") + name;
            }
        }
    }
    report("C8", ok, detail);
}

// ---------------------------------------------------------------------------
// C9: reproducibility plumbing
// ---------------------------------------------------------------------------
void criterion_9() {
    bool ok = true;
    std::ostringstream os;

    // Config round-trip.
    RunConfig cfg = s1_preset();
    cfg.sigma_beta = 0.73;
    cfg.time_dt_init = 2.5e-7;
    const bool cfg_ok = parse_config(emit_config(cfg)) == cfg;
    ok = ok && cfg_ok;
    os << "config round-trip " << (cfg_ok ? "ok" : "FAILED");

    // Checkpoint bitwise round-trip.
    const fs::path dir = work_dir("repro");
    Checkpoint ck;
    ck.length = 1.0;
    ck.n = 64;
    ck.t = 0.1234567890123456789;
    ck.dt_next = 1e-7;
    ck.step_index = 17;
    ck.config_hash = config_hash(cfg);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(1e-9, 3.0);
    for (int i = 0; i < 64; ++i) {
        ck.h.push_back(dist(rng));
        ck.gamma.push_back(dist(rng));
    }
    save_checkpoint((dir / "a.ckpt").string(), ck);
    const Checkpoint back = load_checkpoint((dir / "a.ckpt").string());
    const bool ck_ok = back.t == ck.t && back.dt_next == ck.dt_next &&
                       std::memcmp(back.h.data(), ck.h.data(), 64 * 8) == 0 &&
                       std::memcmp(back.gamma.data(), ck.gamma.data(), 64 * 8) == 0;
    ok = ok && ck_ok;
    os << "; checkpoint bitwise " << (ck_ok ? "ok" : "FAILED");

    // Rerun determinism (bitwise CSV) and resume equivalence to 1e-12.
    RunConfig mini = s1_preset();
    mini.grid_n = 128;
    mini.time_t_end = 0.05;
    mini.output_checkpoint_every = 25;
    const RunResult a = run_simulation(mini, dir / "a");
    const RunResult b = run_simulation(mini, dir / "b");
    const bool rerun_ok = a.status == ExitCode::ok &&
                          slurp(dir / "a" / "run_series.csv") == slurp(dir / "b" / "run_series.csv");
    ok = ok && rerun_ok;
    os << "; bitwise rerun " << (rerun_ok ? "ok" : "FAILED");

    fs::path mid;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("run_0000") && name.ends_with(".ckpt")) {
            mid = entry.path();
            break;
        }
    }
    bool resume_ok = false;
    if (!mid.empty()) {
        const RunResult res = resume_run(mid, std::nullopt, dir / "resumed");
        const Checkpoint fa = load_checkpoint((dir / "a" / "run_final.ckpt").string());
        const Checkpoint fr = load_checkpoint((dir / "resumed" / "run_final.ckpt").string());
        resume_ok = res.status == ExitCode::ok && fa.n == fr.n &&
                    std::abs(fa.t - fr.t) <= 1e-12;
        for (int j = 0; resume_ok && j < fa.n; ++j)
            resume_ok = std::abs(fa.h[j] - fr.h[j]) <= 1e-12 &&
                        std::abs(fa.gamma[j] - fr.gamma[j]) <= 1e-12;
    }
    ok = ok && resume_ok;
    os << "; resume equivalence (1e-12) " << (resume_ok ? "ok" : "FAILED");

    report("C9", ok, os.str());
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-thinfilm-cli> [c1 .. c9]\n";
        return 64;
    }
    const std::string cli = argv[1];
    std::vector<std::string> filter;
    for (int i = 2; i < argc; ++i)
        filter.emplace_back(argv[i]);
    auto wanted = [&](const std::string& tag) {
        if (filter.empty())
            return true;
        for (const auto& f : filter)
            if (f == tag)
                return true;
        return false;
    };

    if (wanted("c1") || wanted("c2"))
        criteria_1_2();
    if (wanted("c3"))
        criterion_3();
    if (wanted("c4"))
        criterion_4();
    if (wanted("c5"))
        criterion_5();
    if (wanted("c6"))
        criterion_6();
    if (wanted("c7"))
        criterion_7();
    if (wanted("c8"))
        criterion_8(cli);
    if (wanted("c9"))
        criterion_9();

    if (g_failures == 0)
        std::cout << "acceptance: all criteria passed" << std::endl;
    else
        std::cout << "acceptance: " << g_failures << " criterion(s) failed" << std::endl;
    return g_failures;
}
