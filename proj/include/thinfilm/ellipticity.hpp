#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thinfilm/errors.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

using Complex = std::complex<double>;

/// Frozen-coefficient entries of the leading-order symbol:
///   a11 = h^3/3,  a12 = -(h^2/2) sigma'(Gamma),
///   a21 = (h^2/2) Gamma,  a22 = -(h Gamma sigma'(Gamma) - D).
/// For admissible inputs (h, Gamma, D > 0, sigma' <= 0) all of a11, a21, a22
/// are positive, a12 >= 0, and det = a11 a22 - a12 a21 >= (1/4) a11 a22 > 0.
struct FrozenCoefficients {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
};

/// Builds and validates FrozenCoefficients from point values. Throws
/// PositivityError for nonpositive h or Gamma and NumericalError if the
/// determinant fails to be positive.
FrozenCoefficients freeze(double h, double gamma, double sigma_prime, double diffusion);

/// Douglis-Nirenberg weights for this system and the order bookkeeping
/// ord A_ij <= l_i + m_j, ord B_ik <= r_i + m_k (B_ik absent if negative).
struct DouglisNirenbergOrders {
    std::array<int, 2> l{0, 0};
    std::array<int, 2> m{4, 2};
    std::array<int, 3> r{-3, -1, -1};

    static constexpr int kInteriorOrder[2][2] = {{4, 2}, {4, 2}};
    // Boundary rows dxh, dxGamma, dxxxh; -1 marks an absent entry.
    static constexpr int kBoundaryOrder[3][2] = {{1, -1}, {-1, 1}, {3, -1}};

    bool consistent() const;
};

/// Principal symbol a_pi(xi) = -[[a11 xi^4, a12 xi^2], [a21 xi^4, a22 xi^2]].
Eigen::Matrix2d symbol_matrix(const FrozenCoefficients& c, double xi);

struct C1Roots {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double discriminant = 0.0;
};

/// The two roots of det(lambda - a_pi(xi)) for xi != 0; both are real (the
/// discriminant is a sum of squares) and strictly negative for admissible
/// coefficients.
C1Roots c1_roots(const FrozenCoefficients& c, double xi);

/// Roots of p(z) = d z^3 - lambda a11 z^2 + lambda a22 z - lambda^2 via the
/// companion matrix; lambda must be nonzero.
std::array<Complex, 3> cubic_roots(const FrozenCoefficients& c, Complex lambda);

struct CharPolyAnalysis {
    Complex lambda;
    std::array<Complex, 3> roots_z{};
    std::array<Complex, 6> roots_cap_lambda{};
    int n_pos = 0;
    int n_neg = 0;
    bool marginal = false; // some root within 1e-9 (scaled) of the imaginary axis
    Complex boundary_det{0.0, 0.0};
};

/// Root structure of the sextic characteristic polynomial: the six roots are
/// the two square roots of each cubic root; the contract in the closed right
/// half plane (lambda != 0) is a strict 3/3 split by sign of the real part.
CharPolyAnalysis sextic_split(const FrozenCoefficients& c, Complex lambda);

/// Thrown when the three decaying roots are numerically confluent; reported,
/// never silently perturbed.
class ConfluentRootsError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Determinant of the 3x3 matrix with rows (L_k, L_k^3, L_k^5) over the three
/// decaying roots; nonzero means the boundary ODE system is uniquely solvable
/// for every data vector g. Requires n_neg == 3.
Complex boundary_solvability(const CharPolyAnalysis& analysis);

/// Scaled magnitude used to decide "nonzero": |det| divided by the Hadamard
/// bound of the row norms.
double boundary_det_scaled(const CharPolyAnalysis& analysis, Complex det);

enum class CheckKind {
    c1_roots_real,
    c1_roots_negative,
    cubic_negative_real_root,
    sextic_split_count,
    boundary_determinant,
    confluent_roots,
};

const char* check_name(CheckKind k);

struct Violation {
    CheckKind kind;
    Complex lambda;
    double xi = 0.0;
    std::string detail;
};

struct SectorScanConfig {
    double alpha = 1.5707963267948966; // pi/2
    int n_lambda = 64;                 // log-spaced moduli per ray
    int n_xi = 32;
    double lambda_mod_min = 1e-2;
    double lambda_mod_max = 1e2;
    double xi_min = 0.1;
    double xi_max = 10.0;
    int threads = 0; // 0 = hardware default
};

struct SectorScanReport {
    FrozenCoefficients coefficients;
    SectorScanConfig config;
    long samples_lambda = 0;
    long samples_xi = 0;
    long marginal_count = 0;
    std::vector<Violation> violations;

    bool certified() const { return violations.empty(); }
};

/// Samples lambda on the rays arg = {0, +-alpha/2, +-alpha} at log-spaced
/// moduli and xi log-spaced, running all four checks. Violations are report
/// content, not exceptions; the scan parallelizes over samples with a
/// deterministic merge order.
SectorScanReport sector_scan(const FrozenCoefficients& c, const SectorScanConfig& cfg);

struct CellCertification {
    int cell = 0;
    FrozenCoefficients coefficients;
    long violations = 0;
    long marginal = 0;
};

/// Freezes coefficients at every grid cell of a state and scans each.
std::vector<CellCertification> certify_state(const State& s, const PhysicalParams& p,
                                             const SectorScanConfig& cfg);

} // namespace thinfilm
