// Command-line front end: simulate / analyze / stability / sweep / resume.
// Exit codes: 0 success, 2 config error, 3 degeneracy stop, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thinfilm/checkpoint.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/ellipticity.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/runner.hpp"
#include "thinfilm/stability.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace thinfilm;

namespace {

json json_num(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr;
}

void emit_json(const json& j) { std::cout << j.dump(2) << std::endl; }

int fail(ExitCode code, const std::string& kind, const std::string& message) {
    json j;
    j["error"] = {{"code", static_cast<int>(code)}, {"kind", kind}, {"message", message}};
    emit_json(j);
    std::cerr << "error: " << message << "\n";
    return static_cast<int>(code);
}

fs::path resolve_outdir(const std::string& flag_dir, const std::string& cfg_dir) {
    fs::path dir = flag_dir.empty() ? fs::path(cfg_dir) : fs::path(flag_dir);
    if (dir.is_absolute())
        return dir;
    return output_root() / dir;
}

json violations_to_json(const std::vector<Violation>& violations) {
    json arr = json::array();
    for (const auto& v : violations) {
        arr.push_back({{"check", check_name(v.kind)},
                       {"lambda_re", v.lambda.real()},
                       {"lambda_im", v.lambda.imag()},
                       {"xi", v.xi},
                       {"detail", v.detail}});
    }
    return arr;
}

json coefficients_to_json(const FrozenCoefficients& c) {
    return {{"a11", c.a11}, {"a12", c.a12}, {"a21", c.a21}, {"a22", c.a22}, {"det", c.det()}};
}

void write_report(const json& j, const std::string& out_path) {
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << j.dump(2) << '\n';
    }
    emit_json(j);
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = parse_config_file(config_path);
    const RunResult r = run_simulation(cfg, resolve_outdir(out_dir, cfg.output_dir));
    json j;
    j["exit"] = static_cast<int>(r.status);
    j["summary"] = r.summary_path.string();
    j["csv"] = r.csv_path.string();
    j["final_checkpoint"] = r.final_checkpoint.string();
    j["accepted_steps"] = r.accepted_steps;
    j["final_t"] = json_num(r.final_t);
    if (!r.message.empty())
        j["error"] = {{"code", static_cast<int>(r.status)}, {"message", r.message}};
    emit_json(j);
    return static_cast<int>(r.status);
}

int run_resume(const std::string& ckpt_path, const std::string& config_path,
               const std::string& out_dir) {
    std::optional<fs::path> cfg;
    if (!config_path.empty())
        cfg = fs::path(config_path);
    fs::path outdir = out_dir.empty() ? fs::path(ckpt_path).parent_path() / "resume"
                                      : resolve_outdir(out_dir, out_dir);
    const RunResult r = resume_run(ckpt_path, cfg, outdir);
    json j;
    j["exit"] = static_cast<int>(r.status);
    j["summary"] = r.summary_path.string();
    if (!r.message.empty())
        j["error"] = {{"code", static_cast<int>(r.status)}, {"message", r.message}};
    emit_json(j);
    return static_cast<int>(r.status);
}

int run_analyze(const std::string& input, const std::string& config_path, double h, double gamma,
                double sigma_prime, double diffusion, const SectorScanConfig& scan_cfg,
                const std::string& out_path) {
    json report;
    report["scan"] = {{"alpha", scan_cfg.alpha},
                      {"n_lambda", scan_cfg.n_lambda},
                      {"n_xi", scan_cfg.n_xi},
                      {"lambda_modulus", {scan_cfg.lambda_mod_min, scan_cfg.lambda_mod_max}},
                      {"xi_range", {scan_cfg.xi_min, scan_cfg.xi_max}}};

    if (input.empty()) {
        // Point mode from flags.
        const FrozenCoefficients c = freeze(h, gamma, sigma_prime, diffusion);
        const SectorScanReport r = sector_scan(c, scan_cfg);
        report["mode"] = "point";
        report["input"] = {{"h", h},
                           {"gamma", gamma},
                           {"sigma_prime", sigma_prime},
                           {"D", diffusion}};
        report["coefficients"] = coefficients_to_json(c);
        report["samples"] = {{"lambda", r.samples_lambda}, {"xi", r.samples_xi}};
        report["marginal_count"] = r.marginal_count;
        report["certified"] = r.certified();
        report["violations"] = violations_to_json(r.violations);
        write_report(report, out_path);
        return r.certified() ? 0 : static_cast<int>(ExitCode::numerical_failure);
    }

    // File mode: checkpoint (scan every cell) or config (scan its initial data).
    State state;
    RunConfig cfg;
    if (is_checkpoint_file(input)) {
        const Checkpoint ck = load_checkpoint(input);
        fs::path cp = config_path.empty()
                          ? fs::path(input).parent_path() / "config.resolved"
                          : fs::path(config_path);
        if (!fs::exists(cp))
            throw ConfigError("analyze: need --config (or config.resolved beside the checkpoint) "
                              "for model parameters");
        cfg = parse_config_file(cp.string());
        state = state_from_checkpoint(ck);
        report["mode"] = "checkpoint";
    } else {
        cfg = parse_config_file(input);
        const Grid grid = Grid::make(cfg.grid_length, cfg.grid_n);
        state = initial_condition(cfg, grid);
        report["mode"] = "config";
    }
    const PhysicalParams params = make_params(cfg);
    const auto cells = certify_state(state, params, scan_cfg);

    long violations_total = 0;
    long marginal_total = 0;
    double min_det = std::numeric_limits<double>::infinity();
    json offenders = json::array();
    for (const auto& cc : cells) {
        violations_total += cc.violations;
        marginal_total += cc.marginal;
        min_det = std::min(min_det, cc.coefficients.det());
        if (cc.violations > 0)
            offenders.push_back({{"cell", cc.cell},
                                 {"violations", cc.violations},
                                 {"coefficients", coefficients_to_json(cc.coefficients)}});
    }
    report["source"] = input;
    report["cells"] = static_cast<long>(cells.size());
    report["min_det"] = json_num(min_det);
    report["violations_total"] = violations_total;
    report["marginal_total"] = marginal_total;
    report["certified"] = violations_total == 0;
    report["cells_with_violations"] = offenders;
    write_report(report, out_path);
    return violations_total == 0 ? 0 : static_cast<int>(ExitCode::numerical_failure);
}

int run_stability(double h_star, double gamma_star, double diffusion, double sigma0, double beta,
                  double length, int n, double q, const std::vector<double>& gamma_scan,
                  const std::string& out_path) {
    PhysicalParams p;
    p.diffusion = diffusion;
    p.model = SurfactantModel::linear(sigma0, beta);
    p.grid = Grid::make(length, n);

    const StabilityReport rep = spectral_bound(Equilibrium{h_star, gamma_star}, p, p.grid, q);
    json j;
    j["h_star"] = rep.h_star;
    j["gamma_star"] = rep.gamma_star;
    j["n_grid"] = rep.n_grid;
    j["spectral_bound"] = json_num(rep.spectral_bound);
    j["omega_pred"] = json_num(rep.omega_pred);
    j["spectral_bound_coarse"] = json_num(rep.spectral_bound_coarse);
    j["rel_change"] = json_num(rep.rel_change);
    j["q_used"] = rep.q_used;
    j["aq_positive_definite"] = rep.aq_definite;
    j["aq_eigenvalues"] = {json_num(rep.aq_eigenvalues[0]), json_num(rep.aq_eigenvalues[1])};
    j["q_window"] = {0.0, json_num(rep.q_window_hi)};
    j["q_window_determinant"] = {0.0, json_num(rep.q_window_det_hi)};
    j["q_windows_agree"] = rep.q_windows_agree;

    if (!gamma_scan.empty()) {
        const auto rows = gamma_threshold_scan(h_star, p, p.grid, gamma_scan[0], gamma_scan[1],
                                               static_cast<int>(gamma_scan[2]));
        json scan = json::array();
        for (const auto& r : rows)
            scan.push_back({{"gamma_star", r.gamma_star}, {"bound", json_num(r.bound)}});
        j["gamma_scan"] = scan;
        j["largest_stable_gamma"] = json_num(largest_stable_gamma(rows));
    }
    write_report(j, out_path);
    return 0;
}

std::vector<SweepAxis> parse_axes(const std::vector<std::string>& specs) {
    std::vector<SweepAxis> axes;
    for (const auto& spec : specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("sweep spec must look like block.key=v1,v2,... got '" + spec + "'");
        SweepAxis axis;
        axis.key = spec.substr(0, eq);
        std::string rest = spec.substr(eq + 1);
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const std::size_t comma = rest.find(',', pos);
            axis.values.push_back(rest.substr(pos, comma == std::string::npos ? comma : comma - pos));
            pos = comma == std::string::npos ? comma : comma + 1;
        }
        if (axis.values.empty() || axis.key.empty())
            throw ConfigError("sweep spec has no values: '" + spec + "'");
        axes.push_back(std::move(axis));
    }
    return axes;
}

int run_sweep_cmd(const std::string& template_path, const std::vector<std::string>& specs,
                  const std::string& out_dir, int jobs) {
    const RunConfig base = parse_config_file(template_path);
    const auto axes = parse_axes(specs);
    const SweepResult r =
        run_sweep(base, axes, resolve_outdir(out_dir.empty() ? "sweep" : out_dir, "sweep"), jobs);
    long failures = 0;
    for (const auto& row : r.rows)
        if (row.status != ExitCode::ok)
            ++failures;
    json j;
    j["exit"] = 0;
    j["table"] = r.table_path.string();
    j["rows"] = static_cast<long>(r.rows.size());
    j["failed_rows"] = failures;
    emit_json(j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-film with insoluble surfactant: simulation and certification lab"};
    app.require_subcommand(1);
    // --h is a physics flag on `analyze`, so help lives on --help alone.
    app.set_help_flag("--help", "print help and exit");

    // simulate
    std::string sim_config, sim_outdir;
    auto* sim = app.add_subcommand("simulate", "run a simulation from a config file");
    sim->add_option("config", sim_config, "configuration file")->required();
    sim->add_option("--out-dir", sim_outdir, "output directory (overrides output.dir)");

    // analyze
    std::string an_input, an_config, an_out;
    double an_h = 1.0, an_gamma = 1.0, an_sp = -1.0, an_d = 1.0;
    SectorScanConfig scan_cfg;
    auto* an = app.add_subcommand("analyze",
                                  "certify parameter ellipticity and the boundary condition");
    an->set_help_flag("--help", "print help and exit"); // frees -h for the film height
    an->add_option("input", an_input, "config file or checkpoint (omit for point mode)");
    an->add_option("--config", an_config, "config file for checkpoint inputs");
    an->add_option("--h", an_h, "film height (point mode)");
    an->add_option("--gamma", an_gamma, "surfactant concentration (point mode)");
    an->add_option("--sigma-prime", an_sp, "sigma'(Gamma) (point mode)");
    an->add_option("--D", an_d, "surface diffusion coefficient (point mode)");
    an->add_option("--alpha", scan_cfg.alpha, "sector half-angle (default pi/2)");
    an->add_option("--n-lambda", scan_cfg.n_lambda, "lambda moduli per ray");
    an->add_option("--n-xi", scan_cfg.n_xi, "xi samples");
    an->add_option("--threads", scan_cfg.threads, "scan worker threads (0 = auto)");
    an->add_option("--out", an_out, "write the JSON report here as well");

    // stability
    double st_h = 1.0, st_g = 0.01, st_d = 1.0, st_sigma0 = 1.0, st_beta = 1.0, st_len = 1.0,
           st_q = 1.0;
    int st_n = 128;
    std::vector<double> st_scan;
    std::string st_out;
    auto* st = app.add_subcommand("stability", "spectral bound of the linearized operator");
    st->add_option("--h-star", st_h, "equilibrium film height");
    st->add_option("--gamma-star", st_g, "equilibrium surfactant concentration");
    st->add_option("--D", st_d, "surface diffusion coefficient");
    st->add_option("--sigma0", st_sigma0, "surface tension at zero concentration");
    st->add_option("--beta", st_beta, "linear sigma slope");
    st->add_option("--L", st_len, "domain length");
    st->add_option("--n", st_n, "grid cells (dense path, <= 512)");
    st->add_option("--q", st_q, "energy weight q for the A_q check");
    st->add_option("--gamma-scan", st_scan, "Gamma* scan: MIN MAX COUNT")->expected(3);
    st->add_option("--out", st_out, "write the JSON report here as well");

    // sweep
    std::string sw_template, sw_outdir;
    std::vector<std::string> sw_specs;
    int sw_jobs = 0;
    auto* sw = app.add_subcommand("sweep", "cartesian parameter sweep of simulations");
    sw->add_option("template", sw_template, "template configuration file")->required();
    sw->add_option("spec", sw_specs, "axis specs: block.key=v1,v2,...")->required();
    sw->add_option("--jobs", sw_jobs, "concurrent runs (0 = hardware)");
    sw->add_option("--out-dir", sw_outdir, "sweep output directory");

    // resume
    std::string rs_ckpt, rs_config, rs_outdir;
    auto* rs = app.add_subcommand("resume", "continue a run from a checkpoint");
    rs->add_option("checkpoint", rs_ckpt, "checkpoint file")->required();
    rs->add_option("--config", rs_config, "config file (default: config.resolved beside it)");
    rs->add_option("--out-dir", rs_outdir, "output directory");

    for (CLI::App* sub : {sim, an, st, sw, rs})
        sub->set_help_flag("--help", "print help and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(sim_config, sim_outdir);
        if (an->parsed())
            return run_analyze(an_input, an_config, an_h, an_gamma, an_sp, an_d, scan_cfg, an_out);
        if (st->parsed())
            return run_stability(st_h, st_g, st_d, st_sigma0, st_beta, st_len, st_n, st_q, st_scan,
                                 st_out);
        if (sw->parsed())
            return run_sweep_cmd(sw_template, sw_specs, sw_outdir, sw_jobs);
        if (rs->parsed())
            return run_resume(rs_ckpt, rs_config, rs_outdir);
    } catch (const ConfigError& e) {
        return fail(ExitCode::config_error, "config_error", e.what());
    } catch (const DegeneracyStop& e) {
        return fail(ExitCode::degeneracy_stop, "degeneracy_stop", e.what());
    } catch (const PositivityError& e) {
        return fail(ExitCode::config_error, "positivity_error", e.what());
    } catch (const NumericalError& e) {
        return fail(ExitCode::numerical_failure, "numerical_error", e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::numerical_failure, "error", e.what());
    }
    return 0;
}
