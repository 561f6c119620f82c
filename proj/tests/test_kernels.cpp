#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "thinfilm/kernels.hpp"

using namespace thinfilm;

namespace {

// Extended array with 3 ghosts per side; returns pointer to cell 0.
struct Ext {
    std::vector<double> buf;
    int n;
    explicit Ext(int n) : buf(n + 6, 0.0), n(n) {}
    double* cells() { return buf.data() + 3; }
};

Ext random_ext(int n, unsigned seed) {
    Ext e(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.25, 4.0);
    for (auto& v : e.buf)
        v = dist(rng);
    return e;
}

} // namespace

TEST_CASE("third difference annihilates constants and is exact on cubics") {
    const int n = 32;
    const double dx = 0.01;
    Ext e(n);
    for (int i = -3; i < n + 3; ++i)
        e.cells()[i] = 7.5;
    std::vector<double> out(n + 1, 1.0);
    kernels::face_third_diff(e.cells(), n + 1, 1.0 / (dx * dx * dx), out.data());
    for (double v : out)
        CHECK(v == 0.0);

    // h = x^3 sampled at cell centers: the 4-point face stencil is exact.
    for (int i = -3; i < n + 3; ++i) {
        const double x = (i + 0.5) * dx;
        e.cells()[i] = x * x * x;
    }
    kernels::face_third_diff(e.cells(), n + 1, 1.0 / (dx * dx * dx), out.data());
    for (int f = 2; f < n - 1; ++f)
        CHECK(out[f] == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("face average and difference") {
    const int n = 8;
    Ext e = random_ext(n, 11);
    std::vector<double> avg(n + 1), diff(n + 1);
    kernels::face_average(e.cells(), n + 1, avg.data());
    kernels::face_diff(e.cells(), n + 1, 2.0, diff.data());
    for (int f = 0; f <= n; ++f) {
        CHECK(avg[f] == 0.5 * (e.cells()[f - 1] + e.cells()[f]));
        CHECK(diff[f] == (e.cells()[f] - e.cells()[f - 1]) * 2.0);
    }
}

TEST_CASE("scalar and SIMD backends are bit-identical") {
    if (!kernels::backend_supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 not supported on this CPU; dispatch test skipped");
        return;
    }

    // Odd lengths exercise the vector tail.
    for (int n : {5, 16, 257, 1000}) {
        Ext h = random_ext(n, 100 + n);
        Ext g = random_ext(n, 200 + n);
        std::vector<double> t3(n + 1), sp(n + 1), gx(n + 1), havg(n + 1), gavg(n + 1);
        std::mt19937_64 rng(300 + n);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (auto& v : sp)
            v = dist(rng);

        auto run_all = [&](std::vector<std::vector<double>>& outs) {
            outs.assign(6, std::vector<double>(n + 1, 0.0));
            outs[5].assign(n, 0.0);
            kernels::face_average(h.cells(), n + 1, outs[0].data());
            kernels::face_diff(g.cells(), n + 1, 3.7, outs[1].data());
            kernels::face_third_diff(h.cells(), n + 1, 11.3, outs[2].data());
            kernels::face_average(g.cells(), n + 1, gavg.data());
            kernels::face_diff(g.cells(), n + 1, 3.7, gx.data());
            kernels::face_third_diff(h.cells(), n + 1, 11.3, t3.data());
            kernels::face_average(h.cells(), n + 1, havg.data());
            kernels::flux_height(havg.data(), t3.data(), sp.data(), gx.data(), n + 1,
                                 outs[3].data());
            kernels::flux_surfactant(havg.data(), gavg.data(), t3.data(), sp.data(), gx.data(),
                                     0.37, n + 1, outs[4].data());
            kernels::flux_height(havg.data(), t3.data(), sp.data(), gx.data(), n + 1,
                                 outs[3].data());
            std::vector<double> flux(outs[3]);
            kernels::cell_divergence(flux.data(), n, 256.0, outs[5].data());
        };

        std::vector<std::vector<double>> scalar_out, simd_out;
        kernels::set_backend(kernels::Backend::scalar);
        run_all(scalar_out);
        kernels::set_backend(kernels::Backend::avx2);
        run_all(simd_out);
        kernels::set_backend(kernels::Backend::scalar);

        for (std::size_t k = 0; k < scalar_out.size(); ++k) {
            REQUIRE(scalar_out[k].size() == simd_out[k].size());
            CHECK(std::memcmp(scalar_out[k].data(), simd_out[k].data(),
                              scalar_out[k].size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("backend selection") {
    CHECK(kernels::backend_supported(kernels::Backend::scalar));
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(std::string(kernels::backend_name(kernels::Backend::avx2)) == "avx2");
}
