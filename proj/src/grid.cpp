#include "thinfilm/grid.hpp"

#include <cmath>
#include <string>

#include "thinfilm/errors.hpp"

namespace thinfilm {

Grid Grid::make(double length, int n) {
    if (!(length > 0.0))
        throw ConfigError("grid.L must be positive");
    if (n < 8)
        throw ConfigError("grid.n must be at least 8 so all stencils fit");
    Grid g;
    g.length = length;
    g.n = n;
    g.dx = length / n;
    return g;
}

void PhysicalParams::validate() const {
    if (!(diffusion > 0.0))
        throw ConfigError("physics.D must be positive");
}

bool state_positive(const State& s) {
    for (double v : s.h)
        if (!(v > 0.0))
            return false;
    for (double v : s.gamma)
        if (!(v > 0.0))
            return false;
    return true;
}

bool state_finite(const State& s) {
    for (double v : s.h)
        if (!std::isfinite(v))
            return false;
    for (double v : s.gamma)
        if (!std::isfinite(v))
            return false;
    return std::isfinite(s.t);
}

void require_positive(const State& s, const char* where) {
    if (!state_positive(s))
        throw PositivityError(std::string(where) +
                              ": state outside the positivity cone (h > 0, gamma > 0)");
}

} // namespace thinfilm
