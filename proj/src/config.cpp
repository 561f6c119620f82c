#include "thinfilm/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "thinfilm/checkpoint.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse integer from '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Strings are emitted quoted so empty values survive the round trip.
std::string quoted(const std::string& s) { return "\"" + s + "\""; }

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"sigma.kind", [](RunConfig& c, const std::string&, const std::string& v) { c.sigma_kind = unquote(v); }},
        {"sigma.sigma0", [](RunConfig& c, const std::string& k, const std::string& v) { c.sigma_sigma0 = parse_double(k, v); }},
        {"sigma.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.sigma_beta = parse_double(k, v); }},
        {"sigma.table_path", [](RunConfig& c, const std::string&, const std::string& v) { c.sigma_table_path = unquote(v); }},
        {"sigma.phi_offset", [](RunConfig& c, const std::string& k, const std::string& v) { c.sigma_phi_offset = parse_double(k, v); }},
        {"physics.D", [](RunConfig& c, const std::string& k, const std::string& v) { c.physics_diffusion = parse_double(k, v); }},
        {"physics.harmonic_mobility", [](RunConfig& c, const std::string& k, const std::string& v) { c.physics_harmonic_mobility = parse_bool(k, v); }},
        {"grid.L", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_length = parse_double(k, v); }},
        {"grid.n", [](RunConfig& c, const std::string& k, const std::string& v) { c.grid_n = parse_int(k, v); }},
        {"time.dt_init", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_dt_init = parse_double(k, v); }},
        {"time.dt_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_dt_min = parse_double(k, v); }},
        {"time.dt_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_dt_max = parse_double(k, v); }},
        {"time.t_end", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_t_end = parse_double(k, v); }},
        {"time.safety", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_safety = parse_double(k, v); }},
        {"newton.tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_tol = parse_double(k, v); }},
        {"newton.max_iters", [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_max_iters = parse_int(k, v); }},
        {"ic.kind", [](RunConfig& c, const std::string&, const std::string& v) { c.ic_kind = unquote(v); }},
        {"ic.h_base", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_h_base = parse_double(k, v); }},
        {"ic.h_amp", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_h_amp = parse_double(k, v); }},
        {"ic.h_k", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_h_k = parse_int(k, v); }},
        {"ic.gamma_base", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_gamma_base = parse_double(k, v); }},
        {"ic.gamma_amp", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_gamma_amp = parse_double(k, v); }},
        {"ic.gamma_k", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_gamma_k = parse_int(k, v); }},
        {"ic.droplet_width", [](RunConfig& c, const std::string& k, const std::string& v) { c.ic_droplet_width = parse_double(k, v); }},
        {"ic.file_path", [](RunConfig& c, const std::string&, const std::string& v) { c.ic_file_path = unquote(v); }},
        {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = unquote(v); }},
        {"output.prefix", [](RunConfig& c, const std::string&, const std::string& v) { c.output_prefix = unquote(v); }},
        {"output.checkpoint_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_checkpoint_every = parse_int(k, v); }},
        {"output.stability", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_stability = parse_bool(k, v); }},
        {"output.stability_n", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_stability_n = parse_int(k, v); }},
        {"output.q", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_q = parse_double(k, v); }},
        {"fit.norm", [](RunConfig& c, const std::string&, const std::string& v) { c.fit_norm = unquote(v); }},
        {"fit.window_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.fit_window_fraction = parse_double(k, v); }},
    };
    return table;
}

} // namespace

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        try {
            apply_config_override(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream out;
    out << "sigma.kind = " << quoted(c.sigma_kind) << "\n";
    out << "sigma.sigma0 = " << fmt(c.sigma_sigma0) << "\n";
    out << "sigma.beta = " << fmt(c.sigma_beta) << "\n";
    out << "sigma.table_path = " << quoted(c.sigma_table_path) << "\n";
    out << "sigma.phi_offset = " << fmt(c.sigma_phi_offset) << "\n";
    out << "physics.D = " << fmt(c.physics_diffusion) << "\n";
    out << "physics.harmonic_mobility = " << (c.physics_harmonic_mobility ? "true" : "false")
        << "\n";
    out << "grid.L = " << fmt(c.grid_length) << "\n";
    out << "grid.n = " << c.grid_n << "\n";
    out << "time.dt_init = " << fmt(c.time_dt_init) << "\n";
    out << "time.dt_min = " << fmt(c.time_dt_min) << "\n";
    out << "time.dt_max = " << fmt(c.time_dt_max) << "\n";
    out << "time.t_end = " << fmt(c.time_t_end) << "\n";
    out << "time.safety = " << fmt(c.time_safety) << "\n";
    out << "newton.tol = " << fmt(c.newton_tol) << "\n";
    out << "newton.max_iters = " << c.newton_max_iters << "\n";
    out << "ic.kind = " << quoted(c.ic_kind) << "\n";
    out << "ic.h_base = " << fmt(c.ic_h_base) << "\n";
    out << "ic.h_amp = " << fmt(c.ic_h_amp) << "\n";
    out << "ic.h_k = " << c.ic_h_k << "\n";
    out << "ic.gamma_base = " << fmt(c.ic_gamma_base) << "\n";
    out << "ic.gamma_amp = " << fmt(c.ic_gamma_amp) << "\n";
    out << "ic.gamma_k = " << c.ic_gamma_k << "\n";
    out << "ic.droplet_width = " << fmt(c.ic_droplet_width) << "\n";
    out << "ic.file_path = " << quoted(c.ic_file_path) << "\n";
    out << "output.dir = " << quoted(c.output_dir) << "\n";
    out << "output.prefix = " << quoted(c.output_prefix) << "\n";
    out << "output.checkpoint_every = " << c.output_checkpoint_every << "\n";
    out << "output.stability = " << (c.output_stability ? "true" : "false") << "\n";
    out << "output.stability_n = " << c.output_stability_n << "\n";
    out << "output.q = " << fmt(c.output_q) << "\n";
    out << "fit.norm = " << quoted(c.fit_norm) << "\n";
    out << "fit.window_fraction = " << fmt(c.fit_window_fraction) << "\n";
    return out.str();
}

void RunConfig::validate() const {
    if (sigma_kind != "linear" && sigma_kind != "tabulated")
        throw ConfigError("sigma.kind must be 'linear' or 'tabulated'");
    if (!(sigma_sigma0 > 0.0))
        throw ConfigError("sigma.sigma0 must be positive");
    if (!(sigma_beta >= 0.0))
        throw ConfigError("sigma.beta must be nonnegative");
    if (!(sigma_phi_offset >= 0.0))
        throw ConfigError("sigma.phi_offset must be nonnegative");
    if (sigma_kind == "tabulated" && sigma_table_path.empty())
        throw ConfigError("sigma.table_path is required for tabulated sigma");
    if (!(physics_diffusion > 0.0))
        throw ConfigError("physics.D must be positive");
    if (!(grid_length > 0.0))
        throw ConfigError("grid.L must be positive");
    if (grid_n < 8)
        throw ConfigError("grid.n must be at least 8");
    if (!(time_dt_min > 0.0) || !(time_dt_init >= time_dt_min) || !(time_dt_max >= time_dt_init))
        throw ConfigError("time block must satisfy 0 < time.dt_min <= time.dt_init <= time.dt_max");
    if (!(time_t_end > 0.0))
        throw ConfigError("time.t_end must be positive");
    if (!(time_safety > 0.0) || time_safety > 1.0)
        throw ConfigError("time.safety must lie in (0, 1]");
    if (!(newton_tol > 0.0))
        throw ConfigError("newton.tol must be positive");
    if (newton_max_iters < 1)
        throw ConfigError("newton.max_iters must be at least 1");
    if (ic_kind != "flat" && ic_kind != "cosine" && ic_kind != "droplet" && ic_kind != "file")
        throw ConfigError("ic.kind must be one of flat, cosine, droplet, file");
    if (ic_kind == "cosine" && (ic_h_k < 1 || ic_gamma_k < 1))
        throw ConfigError("ic.h_k and ic.gamma_k must be integers >= 1");
    if (ic_kind == "droplet" && !(ic_droplet_width > 0.0))
        throw ConfigError("ic.droplet_width must be positive");
    if (ic_kind == "file" && ic_file_path.empty())
        throw ConfigError("ic.file_path is required for ic.kind = file");
    if (output_checkpoint_every < 0)
        throw ConfigError("output.checkpoint_every must be nonnegative");
    if (output_stability_n < 8 || output_stability_n > 512)
        throw ConfigError("output.stability_n must lie in [8, 512]");
    if (!(output_q > 0.0))
        throw ConfigError("output.q must be positive");
    if (fit_norm != "zero_mean_l2" && fit_norm != "h1_weighted" && fit_norm != "linf")
        throw ConfigError("fit.norm must be zero_mean_l2, h1_weighted or linf");
    if (!(fit_window_fraction > 0.0) || fit_window_fraction > 1.0)
        throw ConfigError("fit.window_fraction must lie in (0, 1]");
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = emit_config(cfg);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig s1_preset() { return RunConfig{}; }

SurfactantModel make_model(const RunConfig& cfg) {
    if (cfg.sigma_kind == "linear")
        return SurfactantModel::linear(cfg.sigma_sigma0, cfg.sigma_beta, cfg.sigma_phi_offset);

    std::ifstream in(cfg.sigma_table_path);
    if (!in)
        throw ConfigError("cannot open sigma.table_path: " + cfg.sigma_table_path);
    std::vector<double> s, sig;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::istringstream row(line);
        double a, b;
        if (!(row >> a >> b))
            throw ConfigError("sigma table line " + std::to_string(line_no) +
                              ": expected two columns");
        s.push_back(a);
        sig.push_back(b);
    }
    try {
        return SurfactantModel::tabulated(std::move(s), std::move(sig), cfg.sigma_phi_offset);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("sigma table: " + std::string(e.what()));
    }
}

PhysicalParams make_params(const RunConfig& cfg) {
    PhysicalParams p;
    p.diffusion = cfg.physics_diffusion;
    p.model = make_model(cfg);
    p.grid = Grid::make(cfg.grid_length, cfg.grid_n);
    p.harmonic_mobility = cfg.physics_harmonic_mobility;
    return p;
}

IntegratorConfig make_integrator_config(const RunConfig& cfg) {
    IntegratorConfig ic;
    ic.dt_init = cfg.time_dt_init;
    ic.dt_min = cfg.time_dt_min;
    ic.dt_max = cfg.time_dt_max;
    ic.t_end = cfg.time_t_end;
    ic.newton_tol = cfg.newton_tol;
    ic.newton_max_iters = cfg.newton_max_iters;
    ic.safety = cfg.time_safety;
    return ic;
}

DecayNorm parse_decay_norm(const std::string& name) {
    if (name == "zero_mean_l2")
        return DecayNorm::zero_mean_l2;
    if (name == "h1_weighted")
        return DecayNorm::h1_weighted;
    if (name == "linf")
        return DecayNorm::linf;
    throw ConfigError("unknown fit.norm: " + name);
}

State initial_condition(const RunConfig& cfg, const Grid& grid) {
    State s;
    s.h.resize(grid.n);
    s.gamma.resize(grid.n);
    s.t = 0.0;

    constexpr double kPi = 3.14159265358979323846;
    if (cfg.ic_kind == "flat") {
        std::fill(s.h.begin(), s.h.end(), cfg.ic_h_base);
        std::fill(s.gamma.begin(), s.gamma.end(), cfg.ic_gamma_base);
    } else if (cfg.ic_kind == "cosine") {
        for (int j = 0; j < grid.n; ++j) {
            const double x = grid.cell_center(j);
            s.h[j] = cfg.ic_h_base + cfg.ic_h_amp * std::cos(cfg.ic_h_k * kPi * x / grid.length);
            s.gamma[j] = cfg.ic_gamma_base +
                         cfg.ic_gamma_amp * std::cos(cfg.ic_gamma_k * kPi * x / grid.length);
        }
    } else if (cfg.ic_kind == "droplet") {
        const double w = cfg.ic_droplet_width * grid.length;
        for (int j = 0; j < grid.n; ++j) {
            const double x = grid.cell_center(j) - 0.5 * grid.length;
            const double bump = std::exp(-0.5 * (x / w) * (x / w));
            s.h[j] = cfg.ic_h_base + cfg.ic_h_amp * bump;
            s.gamma[j] = cfg.ic_gamma_base + cfg.ic_gamma_amp * bump;
        }
    } else if (cfg.ic_kind == "file") {
        const Checkpoint ck = load_checkpoint(cfg.ic_file_path);
        if (ck.n != grid.n || std::abs(ck.length - grid.length) > 1e-12 * grid.length)
            throw ConfigError("ic.file_path grid does not match grid.L/grid.n");
        s.h = ck.h;
        s.gamma = ck.gamma;
    } else {
        throw ConfigError("ic.kind must be one of flat, cosine, droplet, file");
    }

    if (!state_positive(s))
        throw ConfigError("initial condition leaves the positivity cone (h > 0, gamma > 0)");
    return s;
}

} // namespace thinfilm
