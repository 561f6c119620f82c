#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinfilm/grid.hpp"

namespace thinfilm {

/// Binary checkpoint: 8-byte magic, version, header (L, n, t, next dt, step
/// index, config hash), then the raw little-endian float64 arrays. Round-trips
/// bitwise so a resumed run continues the interrupted one exactly.
struct Checkpoint {
    std::uint32_t version = 1;
    double length = 0.0;
    std::int64_t n = 0;
    double t = 0.0;
    double dt_next = 0.0;
    std::int64_t step_index = 0;
    std::uint64_t config_hash = 0;
    std::vector<double> h;
    std::vector<double> gamma;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);

/// Throws ConfigError on bad magic, unknown version, or a size that does not
/// match the recorded length.
Checkpoint load_checkpoint(const std::string& path);

/// True if the file starts with the checkpoint magic.
bool is_checkpoint_file(const std::string& path);

Checkpoint make_checkpoint(const State& s, const Grid& grid, double dt_next,
                           std::int64_t step_index, std::uint64_t config_hash);

State state_from_checkpoint(const Checkpoint& ck);

} // namespace thinfilm
