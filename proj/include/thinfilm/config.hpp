#pragma once

#include <cstdint>
#include <string>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/integrator.hpp"

namespace thinfilm {

/// Run configuration: flat `block.key = value` lines with `#` comments.
/// Unknown keys are hard errors; an empty file yields the default scenario
/// (flat film and surfactant with a 5% k=1 cosine perturbation on the unit
/// domain, linear sigma with beta = 1, D = 1, t_end = 1).
struct RunConfig {
    // sigma block
    std::string sigma_kind = "linear"; // linear | tabulated
    double sigma_sigma0 = 1.0;
    double sigma_beta = 1.0;
    std::string sigma_table_path;
    double sigma_phi_offset = 1.0;

    // physics block
    double physics_diffusion = 1.0;
    bool physics_harmonic_mobility = false;

    // grid block
    double grid_length = 1.0;
    int grid_n = 256;

    // time block
    double time_dt_init = 1e-6;
    double time_dt_min = 1e-12;
    double time_dt_max = 1e-3;
    double time_t_end = 1.0;
    double time_safety = 1.0;

    // newton block
    double newton_tol = 1e-10;
    int newton_max_iters = 12;

    // ic block
    std::string ic_kind = "cosine"; // flat | cosine | droplet | file
    double ic_h_base = 1.0;
    double ic_h_amp = 0.05;
    int ic_h_k = 1;
    double ic_gamma_base = 1.0;
    double ic_gamma_amp = 0.05;
    int ic_gamma_k = 1;
    double ic_droplet_width = 0.25;
    std::string ic_file_path;

    // output block
    std::string output_dir = "out";
    std::string output_prefix = "run";
    int output_checkpoint_every = 0; // 0 = final checkpoint only
    bool output_stability = false;
    int output_stability_n = 128;
    double output_q = 1.0;

    // fit block
    std::string fit_norm = "zero_mean_l2"; // zero_mean_l2 | h1_weighted | linf
    double fit_window_fraction = 0.5;      // final fraction of the series

    bool operator==(const RunConfig&) const = default;

    void validate() const; // throws ConfigError naming the offending key
};

/// Parses configuration text; syntax errors carry the line number, constraint
/// violations the key name.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Canonical emission; parse(emit(c)) == c exactly (17 significant digits).
std::string emit_config(const RunConfig& cfg);

/// Applies a single `block.key = value` override (shared with sweep).
void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// FNV-1a hash of the canonical emission; stored in checkpoints.
std::uint64_t config_hash(const RunConfig& cfg);

/// The built-in default scenario (equal to an empty config file).
RunConfig s1_preset();

SurfactantModel make_model(const RunConfig& cfg);
PhysicalParams make_params(const RunConfig& cfg);
IntegratorConfig make_integrator_config(const RunConfig& cfg);
DecayNorm parse_decay_norm(const std::string& name);

/// Builds the configured initial data on the grid; the result is validated to
/// lie in the positivity cone (config error otherwise).
State initial_condition(const RunConfig& cfg, const Grid& grid);

} // namespace thinfilm
