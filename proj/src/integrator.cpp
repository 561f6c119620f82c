#include "thinfilm/integrator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

void IntegratorConfig::validate() const {
    if (!(dt_min > 0.0) || !(dt_init >= dt_min) || !(dt_max >= dt_init))
        throw ConfigError("time steps must satisfy 0 < dt_min <= dt_init <= dt_max");
    if (!(newton_tol > 0.0))
        throw ConfigError("newton.tol must be positive");
    if (newton_max_iters < 1)
        throw ConfigError("newton.max_iters must be at least 1");
    if (!(safety > 0.0) || safety > 1.0)
        throw ConfigError("time.safety must lie in (0, 1]");
}

void residual(const State& s_new, const State& s_old, double dt, const PhysicalParams& p,
              FluxWorkspace& ws, std::span<double> out) {
    const int n = p.grid.n;
    if (s_new.n() != n || s_old.n() != n)
        throw std::invalid_argument("residual: states do not match the grid");
    assert(static_cast<int>(out.size()) == 2 * n);

    static thread_local FluxPair flux;
    static thread_local std::vector<double> rhs_h, rhs_g;
    flux.resize(n);
    rhs_h.assign(n, 0.0);
    rhs_g.assign(n, 0.0);

    compute_fluxes(s_new, p, ws, flux);
    divergence(flux, p.grid, rhs_h, rhs_g);

    const double inv_dt = 1.0 / dt;
    for (int j = 0; j < n; ++j) {
        out[2 * j] = (s_new.h[j] - s_old.h[j]) * inv_dt - rhs_h[j];
        out[2 * j + 1] = (s_new.gamma[j] - s_old.gamma[j]) * inv_dt - rhs_g[j];
    }
}

BandedMatrix jacobian(const State& s, double dt, const PhysicalParams& p) {
    const int n = p.grid.n;
    if (s.n() != n)
        throw std::invalid_argument("jacobian: state does not match the grid");
    require_positive(s, "jacobian");

    constexpr int kBand = 5;
    BandedMatrix jac(2 * n, kBand, kBand);

    const double inv_dt = 1.0 / dt;
    for (int i = 0; i < 2 * n; ++i)
        jac(i, i) = inv_dt;

    ExtendedField h_ext, g_ext;
    ghost_extend(s.h, h_ext);
    ghost_extend(s.gamma, g_ext);
    const double* he = h_ext.cells();
    const double* ge = g_ext.cells();

    const double inv_dx = 1.0 / p.grid.dx;
    const double inv_dx3 = inv_dx * inv_dx * inv_dx;
    const bool linear_model = p.model.kind() == SurfactantModel::Kind::linear;

    // Flux at face f couples to cells f-2..f+1 (h) and f-1, f (gamma), with
    // ghost indices reflected back into the interior.
    for (int f = 1; f < n; ++f) {
        const double hl = he[f - 1];
        const double hr = he[f];
        double hf, dh_left, dh_right;
        if (p.harmonic_mobility) {
            const double sum = hl + hr;
            hf = 2.0 * hl * hr / sum;
            dh_left = 2.0 * hr * hr / (sum * sum);
            dh_right = 2.0 * hl * hl / (sum * sum);
        } else {
            hf = 0.5 * (hl + hr);
            dh_left = 0.5;
            dh_right = 0.5;
        }
        const double gf = 0.5 * (ge[f - 1] + ge[f]);
        const double t3 = (-he[f - 2] + 3.0 * he[f - 1] - 3.0 * he[f] + he[f + 1]) * inv_dx3;
        const double gx = (ge[f] - ge[f - 1]) * inv_dx;
        const double sp = linear_model ? -p.model.beta() : p.model.sigma_prime(gf);
        const double spp = linear_model ? 0.0 : p.model.sigma_second(gf);

        // Partials of the two face fluxes with respect to face quantities.
        const double djh_dH = hf * hf * t3 + hf * sp * gx;
        const double djh_dT = hf * hf * hf / 3.0;
        const double djh_dG = 0.5 * hf * hf * spp * gx;
        const double djh_dgx = 0.5 * hf * hf * sp;
        const double djg_dH = hf * gf * t3 + gf * sp * gx;
        const double djg_dT = 0.5 * hf * hf * gf;
        const double djg_dG = 0.5 * hf * hf * t3 + hf * (sp + gf * spp) * gx;
        const double djg_dgx = hf * gf * sp - p.diffusion;

        // Unique interior h-cells with accumulated T and H sensitivities.
        int hcell[4];
        double dT[4], dH[4];
        int n_h = 0;
        auto add_h = [&](int cell, double t_coeff, double h_coeff) {
            for (int k = 0; k < n_h; ++k) {
                if (hcell[k] == cell) {
                    dT[k] += t_coeff;
                    dH[k] += h_coeff;
                    return;
                }
            }
            hcell[n_h] = cell;
            dT[n_h] = t_coeff;
            dH[n_h] = h_coeff;
            ++n_h;
        };
        add_h(reflect_index(f - 2, n), -inv_dx3, 0.0);
        add_h(reflect_index(f - 1, n), 3.0 * inv_dx3, dh_left);
        add_h(reflect_index(f, n), -3.0 * inv_dx3, dh_right);
        add_h(reflect_index(f + 1, n), inv_dx3, 0.0);

        const int row_h_left = 2 * (f - 1);
        const int row_h_right = 2 * f;
        const int row_g_left = 2 * (f - 1) + 1;
        const int row_g_right = 2 * f + 1;

        for (int k = 0; k < n_h; ++k) {
            const int col = 2 * hcell[k];
            const double djh = djh_dT * dT[k] + djh_dH * dH[k];
            const double djg = djg_dT * dT[k] + djg_dH * dH[k];
            jac(row_h_left, col) += inv_dx * djh;
            jac(row_h_right, col) -= inv_dx * djh;
            jac(row_g_left, col) += inv_dx * djg;
            jac(row_g_right, col) -= inv_dx * djg;
        }

        // Gamma cells f-1 and f (never reflected for interior faces).
        const int gcell[2] = {f - 1, f};
        const double dG[2] = {0.5, 0.5};
        const double dgx[2] = {-inv_dx, inv_dx};
        for (int k = 0; k < 2; ++k) {
            const int col = 2 * gcell[k] + 1;
            const double djh = djh_dG * dG[k] + djh_dgx * dgx[k];
            const double djg = djg_dG * dG[k] + djg_dgx * dgx[k];
            jac(row_h_left, col) += inv_dx * djh;
            jac(row_h_right, col) -= inv_dx * djh;
            jac(row_g_left, col) += inv_dx * djg;
            jac(row_g_right, col) -= inv_dx * djg;
        }
    }

    return jac;
}

namespace {

double scaled_residual_norm(std::span<const double> r, double dt) {
    double m = 0.0;
    for (double v : r)
        m = std::max(m, std::abs(v));
    return dt * m;
}

bool finite(std::span<const double> r) {
    for (double v : r)
        if (!std::isfinite(v))
            return false;
    return true;
}

} // namespace

NewtonResult newton_solve(const State& s_old, double dt, const PhysicalParams& p,
                          const IntegratorConfig& cfg) {
    const int n = p.grid.n;
    const int size = 2 * n;

    NewtonResult out;
    out.state = s_old;
    out.report.dt_used = dt;

    FluxWorkspace ws;
    ws.resize(n);
    std::vector<double> res(size), step(size), cand_res(size);
    State candidate = s_old;

    residual(out.state, s_old, dt, p, ws, res);
    double norm = scaled_residual_norm(res, dt);

    auto accept = [&](int iters, double defect) {
        out.report.accepted = true;
        out.report.newton_iters = iters;
        out.report.residual_norm = defect;
        out.report.positivity_ok = true;
        out.state.t = s_old.t + dt;
    };

    for (int iter = 0; iter < cfg.newton_max_iters; ++iter) {
        // Either convergence measure is in state units: the scaled defect
        // dt*||R|| or the Newton update itself. The raw residual bottoms out
        // at ||d rhs/du|| * ulp(state), so the update norm is the reliable
        // fine-grained criterion.
        if (norm <= cfg.newton_tol) {
            accept(iter, norm);
            return out;
        }

        BandedLU lu(jacobian(out.state, dt, p)); // throws NumericalError if singular
        for (int i = 0; i < size; ++i)
            step[i] = -res[i];
        lu.solve_in_place(step);

        double step_norm = 0.0;
        for (double v : step)
            step_norm = std::max(step_norm, std::abs(v));
        if (step_norm <= cfg.newton_tol) {
            // Converged: take the full polishing step if it stays admissible.
            for (int j = 0; j < n; ++j) {
                candidate.h[j] = out.state.h[j] + step[2 * j];
                candidate.gamma[j] = out.state.gamma[j] + step[2 * j + 1];
            }
            if (state_positive(candidate)) {
                out.state.h.swap(candidate.h);
                out.state.gamma.swap(candidate.gamma);
            }
            accept(iter + 1, step_norm);
            return out;
        }

        // Backtracking line search on the residual norm; candidates must stay
        // strictly inside the positivity cone.
        double alpha = 1.0;
        bool moved = false;
        for (int bt = 0; bt <= 8; ++bt) {
            for (int j = 0; j < n; ++j) {
                candidate.h[j] = out.state.h[j] + alpha * step[2 * j];
                candidate.gamma[j] = out.state.gamma[j] + alpha * step[2 * j + 1];
            }
            if (state_positive(candidate)) {
                bool ok = true;
                double cand_norm = std::numeric_limits<double>::infinity();
                try {
                    residual(candidate, s_old, dt, p, ws, cand_res);
                } catch (const std::out_of_range&) {
                    ok = false; // tabulated sigma left its range; shrink the step
                }
                if (ok && finite(cand_res)) {
                    cand_norm = scaled_residual_norm(cand_res, dt);
                    if (cand_norm < norm || cand_norm <= cfg.newton_tol) {
                        out.state.h.swap(candidate.h);
                        out.state.gamma.swap(candidate.gamma);
                        res.swap(cand_res);
                        norm = cand_norm;
                        moved = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if (!moved)
            break; // stalled: no admissible decreasing candidate

        out.report.newton_iters = iter + 1;
    }

    if (norm <= cfg.newton_tol) {
        accept(out.report.newton_iters, norm);
        return out;
    }

    // Reject: caller halves dt.
    out.report.accepted = false;
    out.report.residual_norm = norm;
    out.report.positivity_ok = state_positive(out.state);
    out.state = s_old;
    return out;
}

State advance(State s, const PhysicalParams& p, const IntegratorConfig& cfg,
              const StepCallback& on_accept) {
    cfg.validate();
    p.validate();
    require_positive(s, "advance(initial data)");
    if (!(cfg.t_end > s.t))
        throw ConfigError("time.t_end must exceed the initial time");

    const double t_tiny = 1e-14 * std::max(1.0, std::abs(cfg.t_end));
    double dt = std::clamp(cfg.dt_init, cfg.dt_min, cfg.dt_max);

    while (cfg.t_end - s.t > t_tiny) {
        const double dt_step = std::min(dt, cfg.t_end - s.t);
        NewtonResult r = newton_solve(s, dt_step, p, cfg);
        if (r.report.accepted) {
            s = std::move(r.state);
            if (r.report.newton_iters <= cfg.easy_iters)
                dt = std::min(dt * (1.0 + cfg.safety), cfg.dt_max);
            if (on_accept)
                on_accept(s, r.report, dt);
        } else {
            dt = 0.5 * dt_step;
            if (dt < cfg.dt_min)
                throw DegeneracyStop(s.t, dt);
        }
    }
    return s;
}

} // namespace thinfilm
