#pragma once

#include <vector>

namespace thinfilm {

/// Not-a-knot cubic spline through strictly increasing knots.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double eval(double s) const;
    double deriv(double s) const;
    double deriv2(double s) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& knots() const { return x_; }

private:
    int segment(double s) const; // throws std::out_of_range outside [x_min, x_max]

    std::vector<double> x_, y_;
    std::vector<double> m_; // second derivatives at knots
};

/// Constitutive law sigma(Gamma) together with the entropy-like potential Phi
/// defined by Phi'' (s) = -sigma'(s)/s, normalized so Phi(1) = Phi'(1) = 0 and
/// shifted by phi_offset. The additive offset never enters dissipation or
/// energy differences; it is recorded in run summaries so absolute energies
/// are comparable across runs.
///
/// Immutable after construction; safe to share across concurrent readers.
class SurfactantModel {
public:
    enum class Kind { linear, tabulated };

    SurfactantModel() : SurfactantModel(linear(1.0, 1.0, 1.0)) {}

    /// sigma(s) = sigma0 - beta * s with beta >= 0; Phi = beta (s ln s - s + 1) + offset.
    static SurfactantModel linear(double sigma0, double beta, double phi_offset = 1.0);

    /// Spline through (s_i, sigma_i). Monotonicity sigma' <= 0 is validated at
    /// knots and interval midpoints; violations reject the table.
    static SurfactantModel tabulated(std::vector<double> s, std::vector<double> sigma,
                                     double phi_offset = 1.0);

    Kind kind() const { return kind_; }
    double sigma0() const { return sigma0_; }
    double beta() const { return beta_; }
    double phi_offset() const { return phi_offset_; }

    double sigma(double s) const;
    double sigma_prime(double s) const;
    double sigma_second(double s) const;

    /// Phi(s) for s > 0 (domain error otherwise; range error outside a table).
    double phi(double s) const;
    double phi_second(double s) const; // -sigma'(s)/s, s > 0

    /// Infimum of the unshifted potential over the working range; Phi > 0
    /// everywhere iff phi_offset exceeds its negative.
    double phi_infimum() const { return phi_infimum_; }

    /// Upper end of the validated evaluation range (table end, or a large
    /// sentinel for the linear law).
    double range_max() const;
    double range_min() const;

private:
    SurfactantModel(Kind k) : kind_(k) {}

    double phi_prime_tab(double s) const;

    Kind kind_;
    double sigma0_ = 1.0;
    double beta_ = 0.0;
    double phi_offset_ = 1.0;
    double phi_infimum_ = 0.0;

    CubicSpline spline_;
    double phi_ref_ = 1.0;                 // normalization point for the table
    std::vector<double> phi_knots_;        // cumulative Phi at spline knots
    std::vector<double> phi_prime_knots_;  // cumulative Phi' at spline knots
};

} // namespace thinfilm
