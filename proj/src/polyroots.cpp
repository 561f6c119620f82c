#include "thinfilm/polyroots.hpp"

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace thinfilm {

std::vector<std::complex<double>> poly_roots(std::span<const std::complex<double>> coeffs) {
    std::size_t degree = coeffs.size() > 0 ? coeffs.size() - 1 : 0;
    while (degree > 0 && std::abs(coeffs[degree]) == 0.0)
        --degree;
    if (degree == 0)
        throw std::invalid_argument("poly_roots: polynomial has no roots (degree 0)");

    const std::complex<double> lead = coeffs[degree];
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (std::size_t i = 1; i < degree; ++i)
        companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < degree; ++i)
        companion(i, degree - 1) = -coeffs[i] / lead;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("poly_roots: companion eigenvalue iteration failed");

    std::vector<std::complex<double>> roots(degree);
    for (std::size_t i = 0; i < degree; ++i)
        roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    return roots;
}

} // namespace thinfilm
