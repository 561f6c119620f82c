#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/surfactant.hpp"

using namespace thinfilm;

namespace {

SurfactantModel exp_table_model(double phi_offset = 0.0) {
    // sigma(s) = e^{-s} tabulated on [0, 10].
    std::vector<double> s, sig;
    for (int i = 0; i <= 400; ++i) {
        const double x = 10.0 * i / 400.0;
        s.push_back(x);
        sig.push_back(std::exp(-x));
    }
    return SurfactantModel::tabulated(std::move(s), std::move(sig), phi_offset);
}

} // namespace

TEST_CASE("sigma evaluation, linear law") {
    CHECK(SurfactantModel::linear(1.0, 0.0).sigma(5.0) == 1.0);
    CHECK(SurfactantModel::linear(1.0, 0.5).sigma(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(SurfactantModel::linear(2.0, 1.0).sigma(0.0) == 2.0);
    CHECK_THROWS_AS(SurfactantModel::linear(1.0, 1.0).sigma(-1.0), std::domain_error);
}

TEST_CASE("sigma prime, linear and tabulated") {
    CHECK(SurfactantModel::linear(1.0, 0.0).sigma_prime(3.0) == 0.0);
    CHECK(SurfactantModel::linear(1.0, 0.5).sigma_prime(0.7) == -0.5);
    CHECK(SurfactantModel::linear(1.0, 0.5).sigma_prime(123.0) == -0.5);

    const auto table = exp_table_model();
    // Finite-difference oracle on the table itself (one-sided, second order).
    const double d = 10.0 / 400.0;
    const double fd0 = (-3.0 * std::exp(0.0) + 4.0 * std::exp(-d) - std::exp(-2 * d)) / (2 * d);
    CHECK(table.sigma_prime(0.0) == doctest::Approx(fd0).epsilon(1e-3));
    CHECK(table.sigma_prime(0.0) == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(table.sigma_prime(2.0) == doctest::Approx(-std::exp(-2.0)).epsilon(1e-5));
    CHECK_THROWS_AS(table.sigma(11.0), std::out_of_range);
}

TEST_CASE("monotonicity is enforced for tables") {
    std::vector<double> s = {0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> sig = {1.0, 0.8, 0.9, 0.5, 0.4}; // bump upward at s=2
    CHECK_THROWS_AS(SurfactantModel::tabulated(std::move(s), std::move(sig)), ConfigError);
}

TEST_CASE("phi closed form for the linear law") {
    CHECK(SurfactantModel::linear(1.0, 0.0, 0.1).phi(7.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(SurfactantModel::linear(1.0, 1.0, 0.0).phi(1.0) == doctest::Approx(0.0));
    CHECK(SurfactantModel::linear(1.0, 1.0, 0.0).phi(std::exp(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(SurfactantModel::linear(1.0, 1.0).phi(0.0), std::domain_error);
    CHECK_THROWS_AS(SurfactantModel::linear(1.0, 1.0).phi(-2.0), std::domain_error);
}

TEST_CASE("phi is an antiderivative: Simpson double-integration oracle") {
    // Psi(s) = int_1^s int_1^r -sigma'(u)/u du dr rebuilt from sigma_prime
    // alone on a fine grid, then compared against phi - offset. Grid chosen so
    // the normalization point s = 1 and all probes land on grid nodes.
    for (bool tabulated : {false, true}) {
        const SurfactantModel model =
            tabulated ? exp_table_model(0.25) : SurfactantModel::linear(1.0, 0.7, 0.25);
        auto phipp = [&](double u) { return -model.sigma_prime(u) / u; };

        const double lo = 0.05;
        const int cells = 16000;
        const double dh = 5e-4; // covers [0.05, 8.05]
        std::vector<double> phip(cells + 1), phi(cells + 1);
        auto integrate = [&](auto&& f, std::vector<double>& out) {
            out[0] = 0.0;
            for (int i = 0; i < cells; ++i) {
                const double a = lo + i * dh;
                out[i + 1] = out[i] + dh / 6.0 * (f(a) + 4.0 * f(a + 0.5 * dh) + f(a + dh));
            }
        };
        integrate(phipp, phip);
        const int i1 = 1900; // s = 1
        const double shift = phip[i1];
        for (auto& v : phip)
            v -= shift;
        auto phip_at = [&](double u) {
            const double pos = (u - lo) / dh;
            const int i = std::clamp(static_cast<int>(pos), 0, cells - 1);
            const double w = pos - i;
            return (1.0 - w) * phip[i] + w * phip[i + 1];
        };
        integrate(phip_at, phi);
        const double phi_shift = phi[i1];

        for (double s : {0.1, 0.3, 1.0, 2.5, 7.0}) {
            const int i = static_cast<int>(std::lround((s - lo) / dh));
            const double oracle = phi[i] - phi_shift;
            CHECK(model.phi(s) - model.phi_offset() ==
                  doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("phi second difference matches -sigma'/s on a log-spaced sample") {
    const SurfactantModel model = SurfactantModel::linear(1.0, 1.3, 0.5);
    // Log-spaced sample of (1e-6, 10]. Fourth-order central second difference
    // with a relative step; below s ~ 1e-4 the double-precision oracle floor
    // (cancellation against the O(1) value of phi) dominates, so the
    // tolerance widens there while the identity itself stays exact.
    for (int i = 1; i <= 24; ++i) {
        const double s = std::pow(10.0, -6.0 + 7.0 * i / 24.0);
        const double delta = 0.03 * s;
        const double d2 =
            (-model.phi(s + 2 * delta) + 16.0 * model.phi(s + delta) - 30.0 * model.phi(s) +
             16.0 * model.phi(s - delta) - model.phi(s - 2 * delta)) /
            (12.0 * delta * delta);
        const double expected = -model.sigma_prime(s) / s;
        const double tol = s >= 1e-4 ? 1e-6 : 1e-4;
        CHECK(d2 == doctest::Approx(expected).epsilon(tol));
        CHECK(model.phi_second(s) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("sigma prime nonpositive and phi positive on sampled range") {
    const auto table = exp_table_model(1.0);
    for (int i = 0; i <= 60; ++i) {
        const double s = std::pow(10.0, -4.0 + 5.0 * i / 60.0);
        if (s > table.range_max())
            break;
        if (s < table.range_min())
            continue;
        CHECK(table.sigma_prime(s) <= 1e-12);
        CHECK(table.phi(s) > 0.0);
    }
    CHECK(std::abs(table.phi_infimum()) <= 1e-10); // unshifted minimum sits at s = 1
}
