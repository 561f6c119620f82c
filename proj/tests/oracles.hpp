#pragma once

// Test-only oracles, deliberately independent of the production code paths
// they check: a Durand-Kerner polynomial root finder in extended precision, a
// finite-difference Jacobian, the closed-form modal spectrum of the constant
// coefficient linearized operator, and hand-differentiated manufactured
// right-hand sides.

#include <array>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "thinfilm/ellipticity.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/stability.hpp"

namespace thinfilm::test {

/// Durand-Kerner simultaneous iteration on the monic polynomial, run in
/// complex<long double>. Shares no code with the companion/QR production path.
std::vector<std::complex<double>> dk_roots(std::span<const std::complex<double>> coeffs);

/// Greedy multiset match: for every a in `a` find the closest element of `b`;
/// returns the largest relative mismatch.
double max_relative_root_distance(std::vector<std::complex<double>> a,
                                  std::vector<std::complex<double>> b);

/// Column `col` of the residual Jacobian by central differences.
std::vector<double> fd_jacobian_column(const State& s, double dt, const PhysicalParams& p,
                                       int col, double step_scale = 1e-6);

/// Closed-form eigenvalues of the discrete linearized operator on the
/// zero-mean subspace: per Fourier-cosine mode k = 1..n-1 the Neumann
/// Laplacian eigenvalue is mu_k = -(2/dx^2)(1 - cos(pi k / n)) and the
/// fourth-difference block contributes exactly mu_k^2, so the spectrum is the
/// union of 2x2 eigenvalue pairs.
std::vector<std::complex<double>> modal_spectrum(const Equilibrium& eq, const PhysicalParams& p,
                                                 const Grid& grid);

/// Manufactured cosine fields h = hb + ha cos(k pi x / L),
/// Gamma = gb + ga cos(kg pi x / L) with the linear sigma law: analytic
/// right-hand sides of the divergence-form system at a point.
struct ManufacturedCase {
    double hb = 1.0, ha = 0.1, gb = 1.0, ga = 0.2;
    int k = 1, kg = 2;
    double beta = 1.0, diffusion = 1.0, length = 1.0;

    double h(double x) const;
    double gamma(double x) const;
    double rhs_h(double x) const;
    double rhs_gamma(double x) const;
};

/// Admissible random coefficient draw (h, Gamma in [0.1, 10], D in [0.01, 10],
/// sigma' in [-10, 0]).
struct AdmissibleDraw {
    double h, gamma, sigma_prime, diffusion;
};
AdmissibleDraw draw_admissible(std::mt19937_64& rng);

} // namespace thinfilm::test
