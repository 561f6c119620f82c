#pragma once

#include <array>
#include <span>
#include <vector>

#include "thinfilm/fluxes.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/integrator.hpp"

namespace thinfilm {

/// One accepted step of recorded diagnostics. dist_h_h1 is kept for the
/// H1-weighted decay fit and is not part of the CSV schema.
struct StepDiagnostics {
    double t = 0.0;
    double dt = 0.0;
    double mass_h = 0.0;
    double mass_gamma = 0.0;
    double energy = 0.0;
    std::array<double, 5> diss{}; // each recorded with its (negative) sign
    double diss_total = 0.0;
    double dist_h_l2 = 0.0;
    double dist_gamma_l2 = 0.0;
    double dist_linf = 0.0;
    int newton_iters = 0;
    double dist_h_h1 = 0.0;
};

struct TimeSeries {
    std::vector<StepDiagnostics> rows;
};

/// Midpoint-rule mean (1/L) * sum f_j dx; exact for cell-centered linears.
double mean(std::span<const double> field, const Grid& grid);

/// E = (1/2) int |dx h|^2 + int Phi(Gamma), with the gradient by face
/// differences on the even extension (boundary faces contribute zero).
double energy(const State& s, const SurfactantModel& model, const Grid& grid);

/// The five dissipation integrals, face-quadrature with the same stencils as
/// compute_fluxes, each returned with its negative sign:
///   [0] -(3/2) int (h^{3/2}/3 h_xxx + h^{1/2}/2 sigma(Gamma)_x)^2
///   [1] -(1/2) int (h^{3/2}/2 h_xxx + h^{1/2}  sigma(Gamma)_x)^2
///   [2] -(1/24) int h^3 (h_xxx)^2
///   [3] -(1/8)  int h (sigma(Gamma)_x)^2
///   [4] -D      int Phi''(Gamma) (Gamma_x)^2
std::array<double, 5> dissipation_terms(const State& s, const PhysicalParams& p);

/// Per-step diagnostics relative to the flat equilibrium (h_star, gamma_star).
StepDiagnostics compute_step_diagnostics(const State& s, const PhysicalParams& p, double h_star,
                                         double gamma_star, double dt, int newton_iters);

struct DecayEstimate {
    double omega = 0.0;     // fitted decay rate (1/time)
    double prefactor = 1.0; // fitted amplitude, floored at 1
    double t_start = 0.0;
    double t_end = 0.0;
    double r2 = 0.0;
    int n_samples = 0;
};

enum class DecayNorm { zero_mean_l2, h1_weighted, linf };

/// Least-squares line through (t, ln ||u - u*||) on the window [t0, t1];
/// omega = -slope. Requires at least 10 samples with positive norm values.
DecayEstimate fit_decay(const TimeSeries& series, DecayNorm norm, double t0, double t1);

} // namespace thinfilm
