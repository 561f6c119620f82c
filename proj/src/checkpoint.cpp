#include "thinfilm/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr char kMagic[8] = {'T', 'F', 'C', 'H', 'K', 'P', 'T', '1'};
constexpr std::size_t kHeaderSize = 64;
constexpr std::int64_t kMaxCells = 1 << 26;

static_assert(sizeof(double) == 8, "checkpoint format assumes 64-bit doubles");

void put(std::ofstream& out, const void* p, std::size_t size) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(size));
}

void get(std::ifstream& in, void* p, std::size_t size) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(size));
    if (!in)
        throw ConfigError("checkpoint: truncated file");
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    if (ck.n != static_cast<std::int64_t>(ck.h.size()) ||
        ck.n != static_cast<std::int64_t>(ck.gamma.size()))
        throw ConfigError("checkpoint: array lengths do not match n");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("checkpoint: cannot open for writing: " + path);

    const std::uint32_t flags = 0;
    put(out, kMagic, sizeof kMagic);
    put(out, &ck.version, 4);
    put(out, &flags, 4);
    put(out, &ck.length, 8);
    put(out, &ck.n, 8);
    put(out, &ck.t, 8);
    put(out, &ck.dt_next, 8);
    put(out, &ck.step_index, 8);
    put(out, &ck.config_hash, 8);
    put(out, ck.h.data(), 8 * ck.h.size());
    put(out, ck.gamma.data(), 8 * ck.gamma.size());
    out.flush();
    if (!out)
        throw ConfigError("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        throw ConfigError("checkpoint: cannot open: " + path);
    const auto file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);

    char magic[8];
    get(in, magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ConfigError("checkpoint: bad magic (not a checkpoint file): " + path);

    Checkpoint ck;
    std::uint32_t flags = 0;
    get(in, &ck.version, 4);
    get(in, &flags, 4);
    if (ck.version != 1)
        throw ConfigError("checkpoint: unrecognized format version " +
                          std::to_string(ck.version));
    get(in, &ck.length, 8);
    get(in, &ck.n, 8);
    get(in, &ck.t, 8);
    get(in, &ck.dt_next, 8);
    get(in, &ck.step_index, 8);
    get(in, &ck.config_hash, 8);

    if (ck.n < 1 || ck.n > kMaxCells)
        throw ConfigError("checkpoint: corrupt length field (n = " + std::to_string(ck.n) + ")");
    const std::uint64_t expected = kHeaderSize + 16ull * static_cast<std::uint64_t>(ck.n);
    if (file_size != expected)
        throw ConfigError("checkpoint: size mismatch (expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(file_size) + ")");

    ck.h.resize(static_cast<std::size_t>(ck.n));
    ck.gamma.resize(static_cast<std::size_t>(ck.n));
    get(in, ck.h.data(), 8 * ck.h.size());
    get(in, ck.gamma.data(), 8 * ck.gamma.size());
    return ck;
}

bool is_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    char magic[8];
    in.read(magic, sizeof magic);
    return in && std::memcmp(magic, kMagic, sizeof kMagic) == 0;
}

Checkpoint make_checkpoint(const State& s, const Grid& grid, double dt_next,
                           std::int64_t step_index, std::uint64_t config_hash) {
    Checkpoint ck;
    ck.length = grid.length;
    ck.n = grid.n;
    ck.t = s.t;
    ck.dt_next = dt_next;
    ck.step_index = step_index;
    ck.config_hash = config_hash;
    ck.h = s.h;
    ck.gamma = s.gamma;
    return ck;
}

State state_from_checkpoint(const Checkpoint& ck) {
    State s;
    s.h = ck.h;
    s.gamma = ck.gamma;
    s.t = ck.t;
    return s;
}

} // namespace thinfilm
