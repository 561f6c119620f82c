#include "thinfilm/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "thinfilm/errors.hpp"
#include "thinfilm/kernels.hpp"

namespace thinfilm {

double mean(std::span<const double> field, const Grid& grid) {
    double acc = 0.0;
    for (double v : field)
        acc += v;
    return acc * grid.dx / grid.length;
}

double energy(const State& s, const SurfactantModel& model, const Grid& grid) {
    const int n = grid.n;
    for (double g : s.gamma)
        if (!(g > 0.0))
            throw std::domain_error("energy: Gamma must be positive");

    ExtendedField h_ext;
    ghost_extend(s.h, h_ext);
    const std::size_t faces = static_cast<std::size_t>(n) + 1;
    std::vector<double> hx(faces, 0.0);
    kernels::face_diff(h_ext.cells(), faces, 1.0 / grid.dx, hx.data());

    double grad = 0.0;
    for (std::size_t f = 1; f < faces - 1; ++f)
        grad += hx[f] * hx[f];
    double pot = 0.0;
    for (int j = 0; j < n; ++j)
        pot += model.phi(s.gamma[j]);
    return 0.5 * grad * grid.dx + pot * grid.dx;
}

std::array<double, 5> dissipation_terms(const State& s, const PhysicalParams& p) {
    const int n = p.grid.n;
    require_positive(s, "dissipation_terms");

    FluxWorkspace ws;
    ws.resize(n);
    ghost_extend(s.h, ws.h_ext);
    ghost_extend(s.gamma, ws.g_ext);

    const double dx = p.grid.dx;
    const double inv_dx = 1.0 / dx;
    const std::size_t faces = static_cast<std::size_t>(n) + 1;
    kernels::face_average(ws.h_ext.cells(), faces, ws.h_face.data());
    kernels::face_average(ws.g_ext.cells(), faces, ws.g_face.data());
    kernels::face_diff(ws.g_ext.cells(), faces, inv_dx, ws.gx_face.data());
    kernels::face_third_diff(ws.h_ext.cells(), faces, inv_dx * inv_dx * inv_dx,
                             ws.t3_face.data());

    std::array<double, 5> terms{};
    for (std::size_t f = 1; f < faces - 1; ++f) {
        const double hf = ws.h_face[f];
        const double gf = ws.g_face[f];
        const double t3 = ws.t3_face[f];
        const double sigx = p.model.sigma_prime(gf) * ws.gx_face[f]; // d/dx sigma(Gamma)
        const double h12 = std::sqrt(hf);
        const double h32 = hf * h12;

        const double q1 = h32 / 3.0 * t3 + 0.5 * h12 * sigx;
        const double q2 = 0.5 * h32 * t3 + h12 * sigx;
        terms[0] -= 1.5 * q1 * q1;
        terms[1] -= 0.5 * q2 * q2;
        terms[2] -= (1.0 / 24.0) * (h32 * t3) * (h32 * t3);
        terms[3] -= 0.125 * hf * sigx * sigx;
        terms[4] -= p.diffusion * p.model.phi_second(gf) * ws.gx_face[f] * ws.gx_face[f];
    }
    for (double& t : terms)
        t *= dx;
    return terms;
}

StepDiagnostics compute_step_diagnostics(const State& s, const PhysicalParams& p, double h_star,
                                         double gamma_star, double dt, int newton_iters) {
    const int n = p.grid.n;
    StepDiagnostics d;
    d.t = s.t;
    d.dt = dt;
    d.newton_iters = newton_iters;
    d.mass_h = mean(s.h, p.grid);
    d.mass_gamma = mean(s.gamma, p.grid);
    d.energy = energy(s, p.model, p.grid);
    d.diss = dissipation_terms(s, p);
    d.diss_total = d.diss[0] + d.diss[1] + d.diss[2] + d.diss[3] + d.diss[4];

    double hh = 0.0, gg = 0.0, linf = 0.0;
    for (int j = 0; j < n; ++j) {
        const double eh = s.h[j] - h_star;
        const double eg = s.gamma[j] - gamma_star;
        hh += eh * eh;
        gg += eg * eg;
        linf = std::max(linf, std::max(std::abs(eh), std::abs(eg)));
    }
    d.dist_h_l2 = std::sqrt(hh * p.grid.dx);
    d.dist_gamma_l2 = std::sqrt(gg * p.grid.dx);
    d.dist_linf = linf;

    // H1-weighted surrogate: L2 distance plus the height-gradient seminorm.
    ExtendedField h_ext;
    ghost_extend(s.h, h_ext);
    const std::size_t faces = static_cast<std::size_t>(n) + 1;
    std::vector<double> hx(faces, 0.0);
    kernels::face_diff(h_ext.cells(), faces, 1.0 / p.grid.dx, hx.data());
    double grad = 0.0;
    for (std::size_t f = 1; f < faces - 1; ++f)
        grad += hx[f] * hx[f];
    d.dist_h_h1 = std::sqrt(hh * p.grid.dx + grad * p.grid.dx);
    return d;
}

DecayEstimate fit_decay(const TimeSeries& series, DecayNorm norm, double t0, double t1) {
    std::vector<double> ts, logs;
    for (const auto& row : series.rows) {
        if (row.t < t0 || row.t > t1)
            continue;
        double value = 0.0;
        switch (norm) {
        case DecayNorm::zero_mean_l2:
            value = std::sqrt(row.dist_h_l2 * row.dist_h_l2 +
                              row.dist_gamma_l2 * row.dist_gamma_l2);
            break;
        case DecayNorm::h1_weighted:
            value = std::sqrt(row.dist_h_h1 * row.dist_h_h1 +
                              row.dist_gamma_l2 * row.dist_gamma_l2);
            break;
        case DecayNorm::linf:
            value = row.dist_linf;
            break;
        }
        if (!(value > 0.0))
            throw std::domain_error(
                "fit_decay: nonpositive norm in window (already converged to round-off)");
        ts.push_back(row.t);
        logs.push_back(std::log(value));
    }
    if (ts.size() < 10)
        throw std::domain_error("fit_decay: need at least 10 samples in the fit window");

    const std::size_t m = ts.size();
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        st += ts[i];
        sy += logs[i];
    }
    const double tbar = st / m;
    const double ybar = sy / m;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dt_ = ts[i] - tbar;
        const double dy = logs[i] - ybar;
        stt += dt_ * dt_;
        sty += dt_ * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0))
        throw std::domain_error("fit_decay: degenerate time window");

    const double slope = sty / stt;
    const double intercept = ybar - slope * tbar;

    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = logs[i] - (intercept + slope * ts[i]);
        ss_res += r * r;
    }

    DecayEstimate est;
    est.omega = -slope;
    est.prefactor = std::max(1.0, std::exp(intercept));
    est.t_start = ts.front();
    est.t_end = ts.back();
    est.r2 = (syy > 0.0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    est.n_samples = static_cast<int>(m);
    return est;
}

} // namespace thinfilm
