#include "thinfilm/surfactant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thinfilm/banded.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kGaussN; ++i)
        acc += kGaussW[i] * f(mid + half * kGaussX[i]);
    return acc * half;
}

} // namespace

// ===========================================================================
// CubicSpline
// ===========================================================================

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 4 || y_.size() != x_.size())
        throw std::invalid_argument("cubic spline needs at least 4 matching knots");
    for (int i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i]))
            throw std::invalid_argument("spline knots must be strictly increasing");
    }

    // Solve for the second derivatives with not-a-knot end conditions.
    BandedMatrix a(n, 2, 2);
    std::vector<double> rhs(n, 0.0);
    auto h = [&](int i) { return x_[i + 1] - x_[i]; };

    a(0, 0) = h(1);
    a(0, 1) = -(h(0) + h(1));
    a(0, 2) = h(0);
    for (int i = 1; i + 1 < n; ++i) {
        a(i, i - 1) = h(i - 1) / 6.0;
        a(i, i) = (h(i - 1) + h(i)) / 3.0;
        a(i, i + 1) = h(i) / 6.0;
        rhs[i] = (y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1);
    }
    a(n - 1, n - 3) = h(n - 2);
    a(n - 1, n - 2) = -(h(n - 3) + h(n - 2));
    a(n - 1, n - 1) = h(n - 3);

    m_ = BandedLU(std::move(a)).solve(rhs);
}

int CubicSpline::segment(double s) const {
    if (!(s >= x_.front() && s <= x_.back()))
        throw std::out_of_range("spline evaluation outside table range");
    const auto it = std::upper_bound(x_.begin(), x_.end(), s);
    int i = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
}

double CubicSpline::eval(double s) const {
    const int i = segment(s);
    const double h = x_[i + 1] - x_[i];
    const double u = x_[i + 1] - s;
    const double v = s - x_[i];
    return m_[i] * u * u * u / (6.0 * h) + m_[i + 1] * v * v * v / (6.0 * h) +
           (y_[i] - m_[i] * h * h / 6.0) * u / h + (y_[i + 1] - m_[i + 1] * h * h / 6.0) * v / h;
}

double CubicSpline::deriv(double s) const {
    const int i = segment(s);
    const double h = x_[i + 1] - x_[i];
    const double u = x_[i + 1] - s;
    const double v = s - x_[i];
    return -m_[i] * u * u / (2.0 * h) + m_[i + 1] * v * v / (2.0 * h) + (y_[i + 1] - y_[i]) / h -
           (m_[i + 1] - m_[i]) * h / 6.0;
}

double CubicSpline::deriv2(double s) const {
    const int i = segment(s);
    const double h = x_[i + 1] - x_[i];
    return m_[i] * (x_[i + 1] - s) / h + m_[i + 1] * (s - x_[i]) / h;
}

// ===========================================================================
// SurfactantModel
// ===========================================================================

SurfactantModel SurfactantModel::linear(double sigma0, double beta, double phi_offset) {
    if (!(sigma0 > 0.0))
        throw ConfigError("sigma.sigma0 must be positive");
    if (!(beta >= 0.0))
        throw ConfigError("sigma.beta must be nonnegative");
    if (!(phi_offset >= 0.0))
        throw ConfigError("sigma.phi_offset must be nonnegative");
    SurfactantModel m(Kind::linear);
    m.sigma0_ = sigma0;
    m.beta_ = beta;
    m.phi_offset_ = phi_offset;
    m.phi_infimum_ = 0.0; // beta (s ln s - s + 1) >= 0 with minimum 0 at s = 1
    return m;
}

SurfactantModel SurfactantModel::tabulated(std::vector<double> s, std::vector<double> sigma,
                                           double phi_offset) {
    if (!(phi_offset >= 0.0))
        throw ConfigError("sigma.phi_offset must be nonnegative");
    SurfactantModel m(Kind::tabulated);
    m.phi_offset_ = phi_offset;
    m.spline_ = CubicSpline(std::move(s), std::move(sigma));

    const auto& knots = m.spline_.knots();
    if (!(knots.front() >= 0.0))
        throw ConfigError("sigma table must cover nonnegative concentrations only");
    m.sigma0_ = m.spline_.eval(knots.front());
    if (!(m.sigma0_ > 0.0))
        throw ConfigError("sigma table must start positive");

    // sigma' <= 0 at knots and midpoints, otherwise the table is rejected.
    constexpr double kMonotoneTol = 1e-12;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        double at = knots[i];
        if (m.spline_.deriv(at) > kMonotoneTol)
            throw ConfigError("sigma table is not non-increasing at s = " + std::to_string(at));
        if (i + 1 < knots.size()) {
            at = 0.5 * (knots[i] + knots[i + 1]);
            if (m.spline_.deriv(at) > kMonotoneTol)
                throw ConfigError("sigma table is not non-increasing at s = " +
                                  std::to_string(at));
        }
    }
    m.beta_ = -m.spline_.deriv(knots.front());

    // Phi and Phi' accumulated along the knots from the normalization point.
    const int nk = static_cast<int>(knots.size());
    m.phi_ref_ = std::clamp(1.0, knots.front(), knots.back());
    if (!(m.phi_ref_ > 0.0))
        throw ConfigError("sigma table must reach positive concentrations to normalize Phi");

    auto phipp = [&](double r) { return -m.spline_.deriv(r) / r; };
    m.phi_prime_knots_.assign(nk, 0.0);
    // March right and left of the reference point.
    int iref = 0;
    while (iref + 1 < nk && knots[iref + 1] <= m.phi_ref_)
        ++iref;
    m.phi_prime_knots_[iref] = gauss16(phipp, m.phi_ref_, knots[iref]);
    for (int i = iref + 1; i < nk; ++i)
        m.phi_prime_knots_[i] = m.phi_prime_knots_[i - 1] + gauss16(phipp, knots[i - 1], knots[i]);
    for (int i = iref - 1; i >= 0; --i)
        m.phi_prime_knots_[i] = m.phi_prime_knots_[i + 1] - gauss16(phipp, knots[i], knots[i + 1]);

    auto phip = [&](double r) { return m.phi_prime_tab(r); };
    m.phi_knots_.assign(nk, 0.0);
    m.phi_knots_[iref] = gauss16(phip, m.phi_ref_, knots[iref]);
    for (int i = iref + 1; i < nk; ++i)
        m.phi_knots_[i] = m.phi_knots_[i - 1] + gauss16(phip, knots[i - 1], knots[i]);
    for (int i = iref - 1; i >= 0; --i)
        m.phi_knots_[i] = m.phi_knots_[i + 1] - gauss16(phip, knots[i], knots[i + 1]);

    double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nk; ++i) {
        inf = std::min(inf, m.phi_knots_[i]);
        if (i + 1 < nk) {
            const double mid = 0.5 * (knots[i] + knots[i + 1]);
            if (mid > 0.0)
                inf = std::min(inf, m.phi_knots_[i] + gauss16(phip, knots[i], mid));
        }
    }
    m.phi_infimum_ = inf;
    return m;
}

double SurfactantModel::range_min() const {
    return kind_ == Kind::linear ? 0.0 : spline_.x_min();
}

double SurfactantModel::range_max() const {
    return kind_ == Kind::linear ? std::numeric_limits<double>::infinity() : spline_.x_max();
}

double SurfactantModel::sigma(double s) const {
    if (kind_ == Kind::linear) {
        if (!(s >= 0.0))
            throw std::domain_error("sigma(s) requires s >= 0");
        return sigma0_ - beta_ * s;
    }
    return spline_.eval(s);
}

double SurfactantModel::sigma_prime(double s) const {
    if (kind_ == Kind::linear) {
        if (!(s >= 0.0))
            throw std::domain_error("sigma'(s) requires s >= 0");
        return -beta_;
    }
    return spline_.deriv(s);
}

double SurfactantModel::sigma_second(double s) const {
    if (kind_ == Kind::linear) {
        if (!(s >= 0.0))
            throw std::domain_error("sigma''(s) requires s >= 0");
        return 0.0;
    }
    return spline_.deriv2(s);
}

double SurfactantModel::phi_prime_tab(double s) const {
    const auto& knots = spline_.knots();
    const auto it = std::upper_bound(knots.begin(), knots.end(), s);
    int i = std::clamp(static_cast<int>(it - knots.begin()) - 1, 0,
                       static_cast<int>(knots.size()) - 2);
    auto phipp = [&](double r) { return -spline_.deriv(r) / r; };
    return phi_prime_knots_[i] + gauss16(phipp, knots[i], s);
}

double SurfactantModel::phi(double s) const {
    if (!(s > 0.0))
        throw std::domain_error("Phi(s) requires s > 0");
    if (kind_ == Kind::linear)
        return beta_ * (s * std::log(s) - s + 1.0) + phi_offset_;

    const auto& knots = spline_.knots();
    if (!(s >= knots.front() && s <= knots.back()))
        throw std::out_of_range("Phi(s) outside sigma table range");
    const auto it = std::upper_bound(knots.begin(), knots.end(), s);
    int i = std::clamp(static_cast<int>(it - knots.begin()) - 1, 0,
                       static_cast<int>(knots.size()) - 2);
    auto phip = [&](double r) { return phi_prime_tab(r); };
    return phi_knots_[i] + gauss16(phip, knots[i], s) + phi_offset_;
}

double SurfactantModel::phi_second(double s) const {
    if (!(s > 0.0))
        throw std::domain_error("Phi''(s) requires s > 0");
    return -sigma_prime(s) / s;
}

} // namespace thinfilm
