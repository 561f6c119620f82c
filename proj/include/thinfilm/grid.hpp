#pragma once

#include <span>
#include <vector>

#include "thinfilm/surfactant.hpp"

namespace thinfilm {

/// Uniform cell-centered grid on (0, L): cell j spans [j dx, (j+1) dx].
struct Grid {
    double length = 1.0;
    int n = 0;
    double dx = 0.0;

    static Grid make(double length, int n);

    double cell_center(int j) const { return (j + 0.5) * dx; }
};

/// Film height and surfactant concentration sampled at cell centers.
struct State {
    std::vector<double> h;
    std::vector<double> gamma;
    double t = 0.0;

    int n() const { return static_cast<int>(h.size()); }
};

struct PhysicalParams {
    double diffusion = 1.0; // surface diffusion coefficient D > 0
    SurfactantModel model;
    Grid grid;
    bool harmonic_mobility = false; // face mobility averaging: arithmetic unless set

    void validate() const;
};

bool state_positive(const State& s);
bool state_finite(const State& s);

/// Throws PositivityError naming `where` if the state leaves the cone
/// h > 0, gamma > 0 (or contains non-finite entries).
void require_positive(const State& s, const char* where);

} // namespace thinfilm
