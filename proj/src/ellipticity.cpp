#include "thinfilm/ellipticity.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "thinfilm/parallel.hpp"
#include "thinfilm/polyroots.hpp"

namespace thinfilm {

FrozenCoefficients freeze(double h, double gamma, double sigma_prime, double diffusion) {
    if (!(h > 0.0) || !(gamma > 0.0))
        throw PositivityError("freeze: h and Gamma must be positive");
    if (!(diffusion > 0.0))
        throw PositivityError("freeze: diffusion coefficient must be positive");
    FrozenCoefficients c;
    c.a11 = h * h * h / 3.0;
    c.a12 = -0.5 * h * h * sigma_prime;
    c.a21 = 0.5 * h * h * gamma;
    c.a22 = -(h * gamma * sigma_prime - diffusion);
    if (!(c.det() > 0.0))
        throw NumericalError("freeze: symbol determinant is not positive (d = " +
                             std::to_string(c.det()) + ")");
    return c;
}

bool DouglisNirenbergOrders::consistent() const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (kInteriorOrder[i][j] > l[i] + m[j])
                return false;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 2; ++k) {
            if (r[i] + m[k] < 0) {
                if (kBoundaryOrder[i][k] >= 0)
                    return false; // entry must be absent
            } else if (kBoundaryOrder[i][k] > r[i] + m[k]) {
                return false;
            }
        }
    }
    return true;
}

Eigen::Matrix2d symbol_matrix(const FrozenCoefficients& c, double xi) {
    const double xi2 = xi * xi;
    const double xi4 = xi2 * xi2;
    Eigen::Matrix2d m;
    m << -c.a11 * xi4, -c.a12 * xi2, -c.a21 * xi4, -c.a22 * xi2;
    return m;
}

C1Roots c1_roots(const FrozenCoefficients& c, double xi) {
    if (xi == 0.0)
        throw std::invalid_argument("c1_roots: xi must be nonzero");
    const double xi2 = xi * xi;
    const double xi4 = xi2 * xi2;
    const double b = c.a11 * xi4 + c.a22 * xi2; // -(trace of the symbol)
    const double det = c.det() * xi4 * xi2;     // d * xi^6

    // Discriminant equals (a11 xi^4 - a22 xi^2)^2/4 + a12 a21 xi^6; evaluate
    // in that form so it stays nonnegative under rounding.
    const double disc =
        0.25 * (c.a11 * xi4 - c.a22 * xi2) * (c.a11 * xi4 - c.a22 * xi2) + c.a12 * c.a21 * xi4 * xi2;
    const double sq = std::sqrt(std::max(0.0, disc));

    C1Roots r;
    r.discriminant = disc;
    // b > 0 for admissible coefficients; take the well-conditioned root first
    // and recover the other from the product.
    const double big = -0.5 * b - sq;
    r.lambda_minus = big;
    r.lambda_plus = (big != 0.0) ? det / big : -0.5 * b + sq;
    if (r.lambda_plus < r.lambda_minus)
        std::swap(r.lambda_plus, r.lambda_minus);
    return r;
}

std::array<Complex, 3> cubic_roots(const FrozenCoefficients& c, Complex lambda) {
    if (lambda == Complex(0.0, 0.0))
        throw std::invalid_argument("cubic_roots: lambda must be nonzero");
    const std::array<Complex, 4> coeffs = {-lambda * lambda, lambda * c.a22, -lambda * c.a11,
                                           Complex(c.det(), 0.0)};
    const auto roots = poly_roots(coeffs);
    std::array<Complex, 3> out{};
    std::copy_n(roots.begin(), 3, out.begin());
    // Deterministic order for reporting and cross-checks.
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

CharPolyAnalysis sextic_split(const FrozenCoefficients& c, Complex lambda) {
    CharPolyAnalysis out;
    out.lambda = lambda;
    out.roots_z = cubic_roots(c, lambda);

    double max_abs = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Complex s = std::sqrt(out.roots_z[i]); // principal branch, Re >= 0
        out.roots_cap_lambda[2 * i] = s;
        out.roots_cap_lambda[2 * i + 1] = -s;
        max_abs = std::max(max_abs, std::abs(s));
    }

    const double marginal_tol = 1e-9 * std::max(1.0, max_abs);
    const double strict_tol = 1e-10 * std::max(1.0, max_abs);
    for (const Complex& lam : out.roots_cap_lambda) {
        if (std::abs(lam.real()) < marginal_tol)
            out.marginal = true;
        if (lam.real() > strict_tol)
            ++out.n_pos;
        else if (lam.real() < -strict_tol)
            ++out.n_neg;
    }
    return out;
}

Complex boundary_solvability(const CharPolyAnalysis& analysis) {
    if (analysis.n_neg != 3)
        throw std::invalid_argument("boundary_solvability: need exactly three decaying roots");

    std::array<Complex, 3> lam{};
    int k = 0;
    double max_abs = 0.0;
    for (const Complex& l : analysis.roots_cap_lambda) {
        if (l.real() < 0.0 && k < 3)
            lam[k++] = l;
        max_abs = std::max(max_abs, std::abs(l));
    }
    if (k != 3)
        throw std::invalid_argument("boundary_solvability: decaying roots not found");

    const double sep_tol = 1e-12 * std::max(1.0, max_abs);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(lam[i] - lam[j]) <= sep_tol)
                throw ConfluentRootsError("boundary_solvability: repeated decaying roots");

    // Rows (L, L^3, L^5); direct cofactor expansion.
    std::array<Complex, 3> r1{}, r3{}, r5{};
    for (int i = 0; i < 3; ++i) {
        r1[i] = lam[i];
        r3[i] = lam[i] * lam[i] * lam[i];
        r5[i] = r3[i] * lam[i] * lam[i];
    }
    return r1[0] * (r3[1] * r5[2] - r3[2] * r5[1]) - r1[1] * (r3[0] * r5[2] - r3[2] * r5[0]) +
           r1[2] * (r3[0] * r5[1] - r3[1] * r5[0]);
}

double boundary_det_scaled(const CharPolyAnalysis& analysis, Complex det) {
    std::array<Complex, 3> lam{};
    int k = 0;
    for (const Complex& l : analysis.roots_cap_lambda)
        if (l.real() < 0.0 && k < 3)
            lam[k++] = l;
    // Hadamard bound: product of the Euclidean row norms of (L^p) entries.
    double scale = 1.0;
    for (int p : {1, 3, 5}) {
        double row = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double a = std::pow(std::abs(lam[i]), static_cast<double>(p));
            row += a * a;
        }
        scale *= std::sqrt(row);
    }
    if (!(scale > 0.0))
        return 0.0;
    return std::abs(det) / scale;
}

const char* check_name(CheckKind k) {
    switch (k) {
    case CheckKind::c1_roots_real: return "c1_roots_real";
    case CheckKind::c1_roots_negative: return "c1_roots_negative";
    case CheckKind::cubic_negative_real_root: return "cubic_negative_real_root";
    case CheckKind::sextic_split_count: return "sextic_split_count";
    case CheckKind::boundary_determinant: return "boundary_determinant";
    case CheckKind::confluent_roots: return "confluent_roots";
    }
    return "unknown";
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        v[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    return v;
}

struct SampleResult {
    std::vector<Violation> violations;
    long marginal = 0;
};

void check_lambda_sample(const FrozenCoefficients& c, Complex lambda, SampleResult& out) {
    CharPolyAnalysis analysis;
    analysis = sextic_split(c, lambda);
    if (analysis.marginal)
        ++out.marginal;

    // p(z) must have no roots on (-inf, 0]; zero is excluded by lambda != 0.
    double zmax = 0.0;
    for (const Complex& z : analysis.roots_z)
        zmax = std::max(zmax, std::abs(z));
    const double ztol = 1e-10 * std::max(1.0, zmax);
    for (const Complex& z : analysis.roots_z) {
        if (std::abs(z.imag()) <= ztol && z.real() <= ztol) {
            out.violations.push_back({CheckKind::cubic_negative_real_root, lambda, 0.0,
                                      "z = " + std::to_string(z.real())});
        }
    }

    if (!analysis.marginal && (analysis.n_pos != 3 || analysis.n_neg != 3)) {
        out.violations.push_back({CheckKind::sextic_split_count, lambda, 0.0,
                                  "split " + std::to_string(analysis.n_pos) + "/" +
                                      std::to_string(analysis.n_neg)});
    }

    if (analysis.n_neg == 3) {
        try {
            const Complex det = boundary_solvability(analysis);
            if (boundary_det_scaled(analysis, det) <= 1e-10) {
                out.violations.push_back({CheckKind::boundary_determinant, lambda, 0.0,
                                          "|det| scaled = " +
                                              std::to_string(boundary_det_scaled(analysis, det))});
            }
        } catch (const ConfluentRootsError&) {
            out.violations.push_back(
                {CheckKind::confluent_roots, lambda, 0.0, "repeated decaying roots"});
        }
    }
}

void check_xi_sample(const FrozenCoefficients& c, double xi, SampleResult& out) {
    const C1Roots r = c1_roots(c, xi);
    const double scale = std::max({1.0, std::abs(r.lambda_plus), std::abs(r.lambda_minus)});
    if (r.discriminant < -1e-12 * scale * scale) {
        out.violations.push_back({CheckKind::c1_roots_real, Complex(0.0, 0.0), xi,
                                  "discriminant = " + std::to_string(r.discriminant)});
    }
    if (!(r.lambda_plus < 0.0) || !(r.lambda_minus < 0.0)) {
        out.violations.push_back({CheckKind::c1_roots_negative, Complex(0.0, 0.0), xi,
                                  "lambda+ = " + std::to_string(r.lambda_plus)});
    }
}

} // namespace

SectorScanReport sector_scan(const FrozenCoefficients& c, const SectorScanConfig& cfg) {
    SectorScanReport report;
    report.coefficients = c;
    report.config = cfg;

    std::vector<double> angles = {0.0, 0.5 * cfg.alpha, -0.5 * cfg.alpha, cfg.alpha, -cfg.alpha};
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    const auto moduli = log_spaced(cfg.lambda_mod_min, cfg.lambda_mod_max, cfg.n_lambda);
    const auto xis = log_spaced(cfg.xi_min, cfg.xi_max, cfg.n_xi);

    std::vector<Complex> lambdas;
    lambdas.reserve(angles.size() * moduli.size());
    for (double ang : angles)
        for (double mod : moduli)
            lambdas.push_back(std::polar(mod, ang));

    const long n_lambda = static_cast<long>(lambdas.size());
    const long n_xi = static_cast<long>(xis.size());
    report.samples_lambda = n_lambda;
    report.samples_xi = n_xi;

    std::vector<SampleResult> results(static_cast<std::size_t>(n_lambda + n_xi));
    parallel_for(n_lambda + n_xi, cfg.threads, [&](long i) {
        if (i < n_lambda)
            check_lambda_sample(c, lambdas[static_cast<std::size_t>(i)],
                                results[static_cast<std::size_t>(i)]);
        else
            check_xi_sample(c, xis[static_cast<std::size_t>(i - n_lambda)],
                            results[static_cast<std::size_t>(i)]);
    });

    for (const auto& r : results) {
        report.marginal_count += r.marginal;
        report.violations.insert(report.violations.end(), r.violations.begin(),
                                 r.violations.end());
    }
    return report;
}

std::vector<CellCertification> certify_state(const State& s, const PhysicalParams& p,
                                             const SectorScanConfig& cfg) {
    const int n = s.n();
    require_positive(s, "certify_state");
    std::vector<CellCertification> cells(static_cast<std::size_t>(n));

    SectorScanConfig cell_cfg = cfg;
    cell_cfg.threads = 1; // parallelism lives at the cell level here
    parallel_for(n, cfg.threads, [&](long j) {
        CellCertification& cc = cells[static_cast<std::size_t>(j)];
        cc.cell = static_cast<int>(j);
        const double gamma = s.gamma[static_cast<std::size_t>(j)];
        cc.coefficients = freeze(s.h[static_cast<std::size_t>(j)], gamma,
                                 p.model.sigma_prime(gamma), p.diffusion);
        const SectorScanReport r = sector_scan(cc.coefficients, cell_cfg);
        cc.violations = static_cast<long>(r.violations.size());
        cc.marginal = r.marginal_count;
    });
    return cells;
}

} // namespace thinfilm
