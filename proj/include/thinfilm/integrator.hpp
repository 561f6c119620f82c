#pragma once

#include <functional>
#include <span>

#include "thinfilm/banded.hpp"
#include "thinfilm/fluxes.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

struct IntegratorConfig {
    double dt_init = 1e-6;
    double dt_min = 1e-12;
    double dt_max = 1e-3;
    double t_end = 1.0;
    // Convergence threshold in state units: met by the scaled defect
    // max|dt R| or by the max-norm of the Newton update, whichever first.
    double newton_tol = 1e-10;
    int newton_max_iters = 12;
    double safety = 1.0; // growth factor on easy acceptance is 1 + safety
    int easy_iters = 4;  // acceptance with at most this many Newton iterations grows dt

    void validate() const;
};

struct StepReport {
    bool accepted = false;
    double dt_used = 0.0;
    int newton_iters = 0;
    double residual_norm = 0.0;
    bool positivity_ok = false;
};

/// Backward-Euler residual R = (s_new - s_old)/dt - rhs(s_new), interleaved
/// as [R_h0, R_gamma0, R_h1, ...]. Zero iff s_new solves the implicit step.
void residual(const State& s_new, const State& s_old, double dt, const PhysicalParams& p,
              FluxWorkspace& ws, std::span<double> out);

/// Exact analytic Jacobian of the residual with respect to s_new, in band
/// storage (interleaved ordering; the coupling stencil spans 5 cells in h and
/// 3 in gamma, giving scalar bandwidth 5).
BandedMatrix jacobian(const State& s, double dt, const PhysicalParams& p);

struct NewtonResult {
    State state;
    StepReport report;
};

/// Damped Newton on the backward-Euler residual with banded LU. On failure
/// (iteration budget, stalled residual, or candidates that cannot be kept in
/// the positivity cone) the report comes back with accepted == false and the
/// caller halves dt. A singular factorization throws NumericalError.
NewtonResult newton_solve(const State& s_old, double dt, const PhysicalParams& p,
                          const IntegratorConfig& cfg);

/// Invoked after every accepted step with the new state, the step report and
/// the step size the loop intends to use next (what a checkpoint must record
/// for an exact resume).
using StepCallback = std::function<void(const State&, const StepReport&, double dt_next)>;

/// Adaptive backward-Euler loop: halve dt on a rejected step, grow it after
/// easy acceptances, stop at t_end. Step-size underflow throws DegeneracyStop
/// (the discrete stand-in for a finite maximal existence time); the last
/// accepted state has already been handed to the callback at that point.
State advance(State s, const PhysicalParams& p, const IntegratorConfig& cfg,
              const StepCallback& on_accept);

} // namespace thinfilm
