#include "thinfilm/stability.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "thinfilm/errors.hpp"
#include "thinfilm/fluxes.hpp"
#include "thinfilm/parallel.hpp"

namespace thinfilm {

namespace {

constexpr int kDenseCap = 512;

void require_equilibrium(const Equilibrium& eq) {
    if (!(eq.h_star > 0.0) || !(eq.gamma_star > 0.0))
        throw PositivityError("equilibrium values must be positive");
}

double max_real_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense eigensolver failed on the projected operator");
    double bound = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        bound = std::max(bound, solver.eigenvalues()(i).real());
    return bound;
}

double projected_bound(const Equilibrium& eq, const PhysicalParams& p, const Grid& grid) {
    return max_real_eigenvalue(project_zero_mean(assemble_linearized(eq, p, grid)));
}

} // namespace

Eigen::MatrixXd assemble_linearized(const Equilibrium& eq, const PhysicalParams& p,
                                    const Grid& grid) {
    require_equilibrium(eq);
    p.validate();
    const int n = grid.n;
    if (n > kDenseCap)
        throw ConfigError("dense spectral path is capped at n = 512; reduce grid.n or use the "
                          "nonlinear simulation route");

    const double h = eq.h_star;
    const double g = eq.gamma_star;
    const double sp = p.model.sigma_prime(g);
    const double c11 = h * h * h / 3.0;
    const double c12 = 0.5 * h * h * sp;
    const double c21 = 0.5 * h * h * g;
    const double c22 = h * g * sp - p.diffusion;

    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    const double inv_dx4 = inv_dx2 * inv_dx2;

    Eigen::MatrixXd d4 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
    constexpr int kD4Offset[5] = {-2, -1, 0, 1, 2};
    constexpr double kD4Coeff[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    constexpr int kD2Offset[3] = {-1, 0, 1};
    constexpr double kD2Coeff[3] = {1.0, -2.0, 1.0};
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < 5; ++k)
            d4(j, reflect_index(j + kD4Offset[k], n)) += kD4Coeff[k] * inv_dx4;
        for (int k = 0; k < 3; ++k)
            d2(j, reflect_index(j + kD2Offset[k], n)) += kD2Coeff[k] * inv_dx2;
    }

    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = -c11 * d4;
    m.topRightCorner(n, n) = -c12 * d2;
    m.bottomLeftCorner(n, n) = -c21 * d4;
    m.bottomRightCorner(n, n) = -c22 * d2;
    return m;
}

Eigen::MatrixXd zero_mean_basis(int n) {
    // Householder reflection mapping ones(n)/sqrt(n) to e_0; columns 1..n-1
    // are an orthonormal basis of the zero-mean subspace.
    Eigen::VectorXd a = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    Eigen::VectorXd w = a;
    w(0) -= 1.0;
    const double norm = w.norm();
    Eigen::MatrixXd basis(n, n - 1);
    if (norm == 0.0) {
        basis.setZero(); // n == 1 cannot happen for valid grids
        return basis;
    }
    w /= norm;
    for (int k = 1; k < n; ++k) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        col(k) = 1.0;
        col -= 2.0 * w(k) * w;
        basis.col(k - 1) = col;
    }
    return basis;
}

Eigen::MatrixXd project_zero_mean(const Eigen::MatrixXd& op) {
    const int n2 = static_cast<int>(op.rows());
    if (op.cols() != n2 || n2 % 2 != 0)
        throw std::invalid_argument("project_zero_mean: need a square 2n x 2n operator");
    const int n = n2 / 2;
    const Eigen::MatrixXd q = zero_mean_basis(n);
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2 * n, 2 * (n - 1));
    big.topLeftCorner(n, n - 1) = q;
    big.bottomRightCorner(n, n - 1) = q;
    return big.transpose() * op * big;
}

Eigen::VectorXd project_zero_mean(const Eigen::VectorXd& v) {
    const int n2 = static_cast<int>(v.size());
    if (n2 % 2 != 0)
        throw std::invalid_argument("project_zero_mean: need a stacked 2n vector");
    const int n = n2 / 2;
    Eigen::VectorXd out = v;
    out.head(n).array() -= v.head(n).mean();
    out.tail(n).array() -= v.tail(n).mean();
    return out;
}

AqCheck aq_check(const Equilibrium& eq, const PhysicalParams& p, double q) {
    // Gamma* = 0 is admitted here: the window bounds are stated for
    // A_q(h*, 0) and then perturbed to small positive Gamma*.
    if (!(eq.h_star > 0.0) || !(eq.gamma_star >= 0.0))
        throw PositivityError("aq_check: need h* > 0 and Gamma* >= 0");
    if (!(q > 0.0))
        throw ConfigError("q must be positive");
    const double h = eq.h_star;
    const double g = eq.gamma_star;
    const double sp = p.model.sigma_prime(g);

    AqCheck out;
    out.entry_diag1 = q * h * h * h / 3.0;
    out.entry_offdiag = 0.25 * (q * h * h * sp + h * h * h * g);
    out.entry_diag2 = h * p.diffusion - h * h * g * sp;

    const double a = out.entry_diag1;
    const double b = out.entry_offdiag;
    const double c = out.entry_diag2;
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    out.eigenvalues = {mid - rad, mid + rad};
    out.positive_definite = (a > 0.0) && (a * c - b * b > 0.0);
    return out;
}

StabilityReport spectral_bound(const Equilibrium& eq, const PhysicalParams& p, const Grid& grid,
                               double q) {
    StabilityReport rep;
    rep.h_star = eq.h_star;
    rep.gamma_star = eq.gamma_star;
    rep.n_grid = grid.n;
    rep.q_used = q;

    rep.spectral_bound = projected_bound(eq, p, grid);
    rep.omega_pred = -rep.spectral_bound;

    if (grid.n / 2 >= 8) {
        const Grid coarse = Grid::make(grid.length, grid.n / 2);
        rep.spectral_bound_coarse = projected_bound(eq, p, coarse);
        rep.rel_change = std::abs(rep.spectral_bound - rep.spectral_bound_coarse) /
                         std::max(1e-300, std::abs(rep.spectral_bound));
    } else {
        rep.spectral_bound_coarse = std::numeric_limits<double>::quiet_NaN();
        rep.rel_change = std::numeric_limits<double>::quiet_NaN();
    }

    const AqCheck aq = aq_check(eq, p, q);
    rep.aq_definite = aq.positive_definite;
    rep.aq_eigenvalues = aq.eigenvalues;

    const double sp0 = std::abs(p.model.sigma_prime(0.0));
    const double inf = std::numeric_limits<double>::infinity();
    rep.q_window_hi = sp0 > 0.0 ? 16.0 * p.diffusion / (3.0 * sp0) : inf;
    rep.q_window_det_hi = sp0 > 0.0 ? 16.0 * p.diffusion / (3.0 * sp0 * sp0) : inf;
    rep.q_windows_agree =
        rep.q_window_hi == rep.q_window_det_hi ||
        std::abs(rep.q_window_hi - rep.q_window_det_hi) <=
            1e-12 * std::max(rep.q_window_hi, rep.q_window_det_hi);
    return rep;
}

std::vector<GammaScanRow> gamma_threshold_scan(double h_star, const PhysicalParams& p,
                                               const Grid& grid, double gamma_min,
                                               double gamma_max, int count) {
    if (!(h_star > 0.0) || !(gamma_min > 0.0) || !(gamma_max >= gamma_min) || count < 1)
        throw ConfigError("gamma_threshold_scan: need h* > 0 and a positive gamma range");

    std::vector<GammaScanRow> rows(static_cast<std::size_t>(count));
    const double llo = std::log(gamma_min);
    const double lhi = std::log(gamma_max);
    parallel_for(count, 0, [&](long i) {
        const double g =
            count == 1 ? gamma_min : std::exp(llo + (lhi - llo) * double(i) / (count - 1));
        Equilibrium eq{h_star, g};
        rows[static_cast<std::size_t>(i)] = {g, projected_bound(eq, p, grid)};
    });
    return rows;
}

double largest_stable_gamma(const std::vector<GammaScanRow>& rows) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows)
        if (r.bound < 0.0 && (!(best > 0.0) || r.gamma_star > best))
            best = r.gamma_star;
    return best;
}

} // namespace thinfilm
