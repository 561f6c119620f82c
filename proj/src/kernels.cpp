#include "thinfilm/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

#if defined(__x86_64__) || defined(_M_X64)
#define THINFILM_X86 1
#include <immintrin.h>
#else
#define THINFILM_X86 0
#endif

namespace thinfilm::kernels {

// ===========================================================================
// Scalar reference kernels
// ===========================================================================

namespace scalar_impl {

void face_average(const double* ext, std::size_t n_faces, double* out) {
    for (std::size_t f = 0; f < n_faces; ++f)
        out[f] = 0.5 * (ext[static_cast<std::ptrdiff_t>(f) - 1] + ext[f]);
}

void face_diff(const double* ext, std::size_t n_faces, double inv_dx, double* out) {
    for (std::size_t f = 0; f < n_faces; ++f)
        out[f] = (ext[f] - ext[static_cast<std::ptrdiff_t>(f) - 1]) * inv_dx;
}

void face_third_diff(const double* ext, std::size_t n_faces, double inv_dx3, double* out) {
    // (-a + 3b - 3c + d) grouped as (d - a) + 3(b - c): small differences of
    // nearby values keep cancellation at rounding level, and the grouping
    // negates exactly under mirror reflection, so even-symmetric data yields
    // bitwise-antisymmetric output.
    for (std::size_t f = 0; f < n_faces; ++f) {
        const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(f);
        const double wide = ext[i + 1] - ext[i - 2];
        const double narrow = ext[i - 1] - ext[i];
        out[f] = (wide + 3.0 * narrow) * inv_dx3;
    }
}

void flux_height(const double* h, const double* t3, const double* sp, const double* gx,
                 std::size_t n_faces, double* out) {
    for (std::size_t f = 0; f < n_faces; ++f) {
        const double hf = h[f];
        const double h2 = hf * hf;
        out[f] = (1.0 / 3.0) * (h2 * hf) * t3[f] + (0.5 * h2) * (sp[f] * gx[f]);
    }
}

void flux_surfactant(const double* h, const double* g, const double* t3, const double* sp,
                     const double* gx, double diffusion, std::size_t n_faces, double* out) {
    for (std::size_t f = 0; f < n_faces; ++f) {
        const double hf = h[f];
        const double gf = g[f];
        const double h2 = hf * hf;
        out[f] = (0.5 * (h2 * gf)) * t3[f] + (hf * gf) * (sp[f] * gx[f]) - diffusion * gx[f];
    }
}

void cell_divergence(const double* flux, std::size_t n_cells, double inv_dx, double* out) {
    for (std::size_t j = 0; j < n_cells; ++j)
        out[j] = (flux[j] - flux[j + 1]) * inv_dx;
}

} // namespace scalar_impl

// ===========================================================================
// AVX2 variants. Same expression tree per lane as the scalar reference; no
// FMA, so results are bit-identical.
// ===========================================================================

#if THINFILM_X86

namespace avx2_impl {

__attribute__((target("avx2"))) void face_average(const double* ext, std::size_t n_faces,
                                                  double* out) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t f = 0;
    for (; f + 4 <= n_faces; f += 4) {
        const __m256d a = _mm256_loadu_pd(ext + f - 1);
        const __m256d b = _mm256_loadu_pd(ext + f);
        _mm256_storeu_pd(out + f, _mm256_mul_pd(half, _mm256_add_pd(a, b)));
    }
    for (; f < n_faces; ++f)
        out[f] = 0.5 * (ext[static_cast<std::ptrdiff_t>(f) - 1] + ext[f]);
}

__attribute__((target("avx2"))) void face_diff(const double* ext, std::size_t n_faces,
                                               double inv_dx, double* out) {
    const __m256d w = _mm256_set1_pd(inv_dx);
    std::size_t f = 0;
    for (; f + 4 <= n_faces; f += 4) {
        const __m256d a = _mm256_loadu_pd(ext + f - 1);
        const __m256d b = _mm256_loadu_pd(ext + f);
        _mm256_storeu_pd(out + f, _mm256_mul_pd(_mm256_sub_pd(b, a), w));
    }
    for (; f < n_faces; ++f)
        out[f] = (ext[f] - ext[static_cast<std::ptrdiff_t>(f) - 1]) * inv_dx;
}

__attribute__((target("avx2"))) void face_third_diff(const double* ext, std::size_t n_faces,
                                                     double inv_dx3, double* out) {
    const __m256d w = _mm256_set1_pd(inv_dx3);
    const __m256d three = _mm256_set1_pd(3.0);
    std::size_t f = 0;
    for (; f + 4 <= n_faces; f += 4) {
        const __m256d m2 = _mm256_loadu_pd(ext + f - 2);
        const __m256d m1 = _mm256_loadu_pd(ext + f - 1);
        const __m256d c0 = _mm256_loadu_pd(ext + f);
        const __m256d p1 = _mm256_loadu_pd(ext + f + 1);
        const __m256d wide = _mm256_sub_pd(p1, m2);
        const __m256d narrow = _mm256_sub_pd(m1, c0);
        const __m256d t = _mm256_add_pd(wide, _mm256_mul_pd(three, narrow));
        _mm256_storeu_pd(out + f, _mm256_mul_pd(t, w));
    }
    for (; f < n_faces; ++f) {
        const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(f);
        const double wide = ext[i + 1] - ext[i - 2];
        const double narrow = ext[i - 1] - ext[i];
        out[f] = (wide + 3.0 * narrow) * inv_dx3;
    }
}

__attribute__((target("avx2"))) void flux_height(const double* h, const double* t3,
                                                 const double* sp, const double* gx,
                                                 std::size_t n_faces, double* out) {
    const __m256d third = _mm256_set1_pd(1.0 / 3.0);
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t f = 0;
    for (; f + 4 <= n_faces; f += 4) {
        const __m256d hf = _mm256_loadu_pd(h + f);
        const __m256d h2 = _mm256_mul_pd(hf, hf);
        const __m256d cap = _mm256_mul_pd(_mm256_mul_pd(third, _mm256_mul_pd(h2, hf)),
                                          _mm256_loadu_pd(t3 + f));
        const __m256d mar = _mm256_mul_pd(
            _mm256_mul_pd(half, h2),
            _mm256_mul_pd(_mm256_loadu_pd(sp + f), _mm256_loadu_pd(gx + f)));
        _mm256_storeu_pd(out + f, _mm256_add_pd(cap, mar));
    }
    for (; f < n_faces; ++f) {
        const double hf = h[f];
        const double h2 = hf * hf;
        out[f] = (1.0 / 3.0) * (h2 * hf) * t3[f] + (0.5 * h2) * (sp[f] * gx[f]);
    }
}

__attribute__((target("avx2"))) void flux_surfactant(const double* h, const double* g,
                                                     const double* t3, const double* sp,
                                                     const double* gx, double diffusion,
                                                     std::size_t n_faces, double* out) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d dif = _mm256_set1_pd(diffusion);
    std::size_t f = 0;
    for (; f + 4 <= n_faces; f += 4) {
        const __m256d hf = _mm256_loadu_pd(h + f);
        const __m256d gf = _mm256_loadu_pd(g + f);
        const __m256d gxf = _mm256_loadu_pd(gx + f);
        const __m256d h2 = _mm256_mul_pd(hf, hf);
        const __m256d adv = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_mul_pd(h2, gf)),
                                          _mm256_loadu_pd(t3 + f));
        const __m256d mar = _mm256_mul_pd(_mm256_mul_pd(hf, gf),
                                          _mm256_mul_pd(_mm256_loadu_pd(sp + f), gxf));
        const __m256d res =
            _mm256_sub_pd(_mm256_add_pd(adv, mar), _mm256_mul_pd(dif, gxf));
        _mm256_storeu_pd(out + f, res);
    }
    for (; f < n_faces; ++f) {
        const double hf = h[f];
        const double gf = g[f];
        const double h2 = hf * hf;
        out[f] = (0.5 * (h2 * gf)) * t3[f] + (hf * gf) * (sp[f] * gx[f]) - diffusion * gx[f];
    }
}

__attribute__((target("avx2"))) void cell_divergence(const double* flux, std::size_t n_cells,
                                                     double inv_dx, double* out) {
    const __m256d w = _mm256_set1_pd(inv_dx);
    std::size_t j = 0;
    for (; j + 4 <= n_cells; j += 4) {
        const __m256d a = _mm256_loadu_pd(flux + j);
        const __m256d b = _mm256_loadu_pd(flux + j + 1);
        _mm256_storeu_pd(out + j, _mm256_mul_pd(_mm256_sub_pd(a, b), w));
    }
    for (; j < n_cells; ++j)
        out[j] = (flux[j] - flux[j + 1]) * inv_dx;
}

} // namespace avx2_impl

#endif // THINFILM_X86

// ===========================================================================
// Dispatch
// ===========================================================================

namespace {

struct KernelTable {
    void (*face_average)(const double*, std::size_t, double*);
    void (*face_diff)(const double*, std::size_t, double, double*);
    void (*face_third_diff)(const double*, std::size_t, double, double*);
    void (*flux_height)(const double*, const double*, const double*, const double*, std::size_t,
                        double*);
    void (*flux_surfactant)(const double*, const double*, const double*, const double*,
                            const double*, double, std::size_t, double*);
    void (*cell_divergence)(const double*, std::size_t, double, double*);
};

constexpr KernelTable kScalarTable = {
    scalar_impl::face_average,   scalar_impl::face_diff,       scalar_impl::face_third_diff,
    scalar_impl::flux_height,    scalar_impl::flux_surfactant, scalar_impl::cell_divergence,
};

#if THINFILM_X86
constexpr KernelTable kAvx2Table = {
    avx2_impl::face_average,   avx2_impl::face_diff,       avx2_impl::face_third_diff,
    avx2_impl::flux_height,    avx2_impl::flux_surfactant, avx2_impl::cell_divergence,
};
#endif

bool cpu_has_avx2() {
#if THINFILM_X86
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend detect_backend() {
    const char* env = std::getenv("THINFILM_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0)
            return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2())
            return Backend::avx2;
        // "auto" or anything unrecognized falls through to detection
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

struct DispatchState {
    Backend backend;
    const KernelTable* table;

    DispatchState() { select(detect_backend()); }

    void select(Backend b) {
        backend = b;
#if THINFILM_X86
        table = (b == Backend::avx2) ? &kAvx2Table : &kScalarTable;
#else
        table = &kScalarTable;
#endif
    }
};

DispatchState& dispatch() {
    static DispatchState state;
    return state;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
    switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument(std::string("kernel backend not supported on this CPU: ") +
                                    backend_name(b));
    dispatch().select(b);
}

void face_average(const double* ext, std::size_t n_faces, double* out) {
    dispatch().table->face_average(ext, n_faces, out);
}

void face_diff(const double* ext, std::size_t n_faces, double inv_dx, double* out) {
    dispatch().table->face_diff(ext, n_faces, inv_dx, out);
}

void face_third_diff(const double* ext, std::size_t n_faces, double inv_dx3, double* out) {
    dispatch().table->face_third_diff(ext, n_faces, inv_dx3, out);
}

void flux_height(const double* h, const double* t3, const double* sp, const double* gx,
                 std::size_t n_faces, double* out) {
    dispatch().table->flux_height(h, t3, sp, gx, n_faces, out);
}

void flux_surfactant(const double* h, const double* g, const double* t3, const double* sp,
                     const double* gx, double diffusion, std::size_t n_faces, double* out) {
    dispatch().table->flux_surfactant(h, g, t3, sp, gx, diffusion, n_faces, out);
}

void cell_divergence(const double* flux, std::size_t n_cells, double inv_dx, double* out) {
    dispatch().table->cell_divergence(flux, n_cells, inv_dx, out);
}

} // namespace thinfilm::kernels
