#pragma once

#include <complex>
#include <span>
#include <vector>

namespace thinfilm {

/// All roots of c[0] + c[1] z + ... + c[d] z^d with complex coefficients,
/// computed as eigenvalues of the companion matrix (degree <= 6 in this
/// project, but the routine is general). Leading zero coefficients are
/// stripped; a polynomial that is identically zero or constant has no roots
/// and raises std::invalid_argument.
std::vector<std::complex<double>> poly_roots(std::span<const std::complex<double>> coeffs);

} // namespace thinfilm
