#pragma once

#include <cstddef>
#include <string>

namespace thinfilm::kernels {

/// Which implementation backs the face-sweep kernels.
///
/// All backends are required to produce bit-identical results: the SIMD
/// variants evaluate exactly the same expression tree per element as the
/// scalar reference, and the build disables FP contraction. Equivalence is
/// enforced by tests, so runtime selection never changes physics output.
enum class Backend {
    scalar,
    avx2,
};

/// Backend chosen at startup (CPU detection, overridable via the
/// THINFILM_KERNELS environment variable: "scalar", "avx2" or "auto").
Backend active_backend();

/// Force a backend; throws std::invalid_argument if unsupported on this CPU.
void set_backend(Backend b);

bool backend_supported(Backend b);
const char* backend_name(Backend b);

// ---------------------------------------------------------------------------
// Face sweeps. `ext` points at cell 0 of a ghost-extended array, so indices
// ext[-3] .. ext[n+2] are valid; face f (0..n) sits between cells f-1 and f.
// ---------------------------------------------------------------------------

/// out[f] = 0.5*(ext[f-1] + ext[f])
void face_average(const double* ext, std::size_t n_faces, double* out);

/// out[f] = (ext[f] - ext[f-1]) * inv_dx
void face_diff(const double* ext, std::size_t n_faces, double inv_dx, double* out);

/// Third derivative at faces from the 4-point stencil
/// (-ext[f-2] + 3 ext[f-1] - 3 ext[f] + ext[f+1]) * inv_dx3,
/// evaluated via nested first differences to keep cancellation error at the
/// level of rounding in the differences themselves.
void face_third_diff(const double* ext, std::size_t n_faces, double inv_dx3, double* out);

/// Height flux at faces: out = (1/3) h^3 t3 + (1/2) h^2 sp gx
/// (h = face-averaged height, t3 = third derivative, sp = sigma'(Gamma) at the
/// face, gx = face gradient of Gamma).
void flux_height(const double* h, const double* t3, const double* sp, const double* gx,
                 std::size_t n_faces, double* out);

/// Surfactant flux at faces: out = (1/2) h^2 g t3 + h g sp gx - diffusion * gx
void flux_surfactant(const double* h, const double* g, const double* t3, const double* sp,
                     const double* gx, double diffusion, std::size_t n_faces, double* out);

/// Conservative divergence: out[j] = (flux[j] - flux[j+1]) * inv_dx for j < n_cells.
void cell_divergence(const double* flux, std::size_t n_cells, double inv_dx, double* out);

} // namespace thinfilm::kernels
