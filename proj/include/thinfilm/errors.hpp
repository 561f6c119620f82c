#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

/// Process exit codes shared by the CLI and the run summaries.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    degeneracy_stop = 3,
    numerical_failure = 4,
};

/// Malformed or inconsistent run configuration (bad key, bad value, bad file).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state left the positivity cone (h > 0, gamma > 0) where it must not.
class PositivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hard numerical failure: singular factorization, eigensolver breakdown, NaN.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step-size underflow: the practical proxy for finite-time degeneracy.
/// Carries the last valid time so the caller can persist a checkpoint.
class DegeneracyStop : public std::runtime_error {
public:
    DegeneracyStop(double t_reached, double dt_last)
        : std::runtime_error("time step underflow at t = " + std::to_string(t_reached) +
                             " (dt = " + std::to_string(dt_last) + " below dt_min)"),
          t_reached(t_reached),
          dt_last(dt_last) {}

    double t_reached;
    double dt_last;
};

} // namespace thinfilm
