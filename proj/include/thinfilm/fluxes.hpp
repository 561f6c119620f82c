#pragma once

#include <span>
#include <vector>

#include "thinfilm/grid.hpp"

namespace thinfilm {

/// Ghost cells per side. Even reflection about the boundary faces realizes
/// all four no-flux conditions at once: every odd derivative of the extension
/// vanishes there by symmetry.
inline constexpr int kGhostCells = 3;

/// Maps an extended cell index (possibly in the ghost range) to the interior
/// cell it mirrors: -1 -> 0, -2 -> 1, -3 -> 2; n -> n-1, n+1 -> n-2, ...
inline int reflect_index(int i, int n) {
    if (i < 0)
        return -1 - i;
    if (i >= n)
        return 2 * n - 1 - i;
    return i;
}

/// Cell field with kGhostCells ghosts per side; cells()[i] is valid for
/// i in [-kGhostCells, n + kGhostCells).
class ExtendedField {
public:
    ExtendedField() = default;
    explicit ExtendedField(int n) { resize(n); }

    void resize(int n) {
        n_ = n;
        buf_.assign(static_cast<std::size_t>(n) + 2 * kGhostCells, 0.0);
    }

    int n() const { return n_; }
    double* cells() { return buf_.data() + kGhostCells; }
    const double* cells() const { return buf_.data() + kGhostCells; }

private:
    int n_ = 0;
    std::vector<double> buf_;
};

/// Even reflection of cell values into the ghost range.
void ghost_extend(std::span<const double> cell_values, ExtendedField& out);

/// Face fluxes of both fields; index f in [0, n], boundary entries exactly 0.
struct FluxPair {
    std::vector<double> jh;
    std::vector<double> jgamma;

    void resize(int n) {
        jh.assign(static_cast<std::size_t>(n) + 1, 0.0);
        jgamma.assign(static_cast<std::size_t>(n) + 1, 0.0);
    }
};

/// Scratch arrays reused across flux/residual/Jacobian evaluations.
struct FluxWorkspace {
    ExtendedField h_ext, g_ext;
    std::vector<double> h_face, g_face, t3_face, gx_face, sp_face;

    void resize(int n);
};

/// Third derivative at the n+1 faces from the centered 4-point stencil on an
/// even-reflected field; boundary faces evaluate to exactly zero.
void third_derivative_at_faces(const ExtendedField& ext, double dx, std::span<double> out);

void compute_fluxes(const State& s, const PhysicalParams& p, FluxWorkspace& ws, FluxPair& out);
FluxPair compute_fluxes(const State& s, const PhysicalParams& p);

/// rhs_j = -(flux_{j+1} - flux_j)/dx for each field; the cell sums telescope
/// to the boundary fluxes, so total mass is conserved exactly.
void divergence(const FluxPair& flux, const Grid& grid, std::span<double> rhs_h,
                std::span<double> rhs_gamma);

} // namespace thinfilm
