#include "thinfilm/fluxes.hpp"

#include <cassert>
#include <stdexcept>

#include "thinfilm/errors.hpp"
#include "thinfilm/kernels.hpp"

namespace thinfilm {

void ghost_extend(std::span<const double> cell_values, ExtendedField& out) {
    const int n = static_cast<int>(cell_values.size());
    if (out.n() != n)
        out.resize(n);
    double* c = out.cells();
    for (int i = 0; i < n; ++i)
        c[i] = cell_values[i];
    for (int g = 1; g <= kGhostCells; ++g) {
        c[-g] = cell_values[g - 1];
        c[n - 1 + g] = cell_values[n - g];
    }
}

void FluxWorkspace::resize(int n) {
    const std::size_t faces = static_cast<std::size_t>(n) + 1;
    h_ext.resize(n);
    g_ext.resize(n);
    h_face.assign(faces, 0.0);
    g_face.assign(faces, 0.0);
    t3_face.assign(faces, 0.0);
    gx_face.assign(faces, 0.0);
    sp_face.assign(faces, 0.0);
}

void third_derivative_at_faces(const ExtendedField& ext, double dx, std::span<double> out) {
    const std::size_t faces = static_cast<std::size_t>(ext.n()) + 1;
    assert(out.size() == faces);
    const double inv_dx3 = 1.0 / (dx * dx * dx);
    kernels::face_third_diff(ext.cells(), faces, inv_dx3, out.data());
}

void compute_fluxes(const State& s, const PhysicalParams& p, FluxWorkspace& ws, FluxPair& out) {
    const int n = s.n();
    if (n != p.grid.n || static_cast<int>(s.gamma.size()) != n)
        throw std::invalid_argument("compute_fluxes: state does not match grid");
    require_positive(s, "compute_fluxes");

    const std::size_t faces = static_cast<std::size_t>(n) + 1;
    if (static_cast<int>(ws.h_face.size()) != n + 1)
        ws.resize(n);
    if (static_cast<int>(out.jh.size()) != n + 1)
        out.resize(n);

    ghost_extend(s.h, ws.h_ext);
    ghost_extend(s.gamma, ws.g_ext);

    const double inv_dx = 1.0 / p.grid.dx;
    const double inv_dx3 = inv_dx * inv_dx * inv_dx;

    if (p.harmonic_mobility) {
        const double* he = ws.h_ext.cells();
        for (std::size_t f = 0; f < faces; ++f) {
            const double a = he[static_cast<std::ptrdiff_t>(f) - 1];
            const double b = he[f];
            ws.h_face[f] = 2.0 * a * b / (a + b);
        }
    } else {
        kernels::face_average(ws.h_ext.cells(), faces, ws.h_face.data());
    }
    kernels::face_average(ws.g_ext.cells(), faces, ws.g_face.data());
    kernels::face_diff(ws.g_ext.cells(), faces, inv_dx, ws.gx_face.data());
    kernels::face_third_diff(ws.h_ext.cells(), faces, inv_dx3, ws.t3_face.data());

    if (p.model.kind() == SurfactantModel::Kind::linear) {
        const double sp = -p.model.beta();
        std::fill(ws.sp_face.begin(), ws.sp_face.end(), sp);
    } else {
        for (std::size_t f = 0; f < faces; ++f)
            ws.sp_face[f] = p.model.sigma_prime(ws.g_face[f]);
    }

    kernels::flux_height(ws.h_face.data(), ws.t3_face.data(), ws.sp_face.data(),
                         ws.gx_face.data(), faces, out.jh.data());
    kernels::flux_surfactant(ws.h_face.data(), ws.g_face.data(), ws.t3_face.data(),
                             ws.sp_face.data(), ws.gx_face.data(), p.diffusion, faces,
                             out.jgamma.data());

    // No-flux boundaries, exact.
    out.jh.front() = 0.0;
    out.jh.back() = 0.0;
    out.jgamma.front() = 0.0;
    out.jgamma.back() = 0.0;
}

FluxPair compute_fluxes(const State& s, const PhysicalParams& p) {
    FluxWorkspace ws;
    FluxPair out;
    compute_fluxes(s, p, ws, out);
    return out;
}

void divergence(const FluxPair& flux, const Grid& grid, std::span<double> rhs_h,
                std::span<double> rhs_gamma) {
    const std::size_t n = static_cast<std::size_t>(grid.n);
    assert(flux.jh.size() == n + 1 && flux.jgamma.size() == n + 1);
    assert(rhs_h.size() == n && rhs_gamma.size() == n);
    const double inv_dx = 1.0 / grid.dx;
    kernels::cell_divergence(flux.jh.data(), n, inv_dx, rhs_h.data());
    kernels::cell_divergence(flux.jgamma.data(), n, inv_dx, rhs_gamma.data());
}

} // namespace thinfilm
