#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/config.hpp"
#include "thinfilm/diagnostics.hpp"
#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Root directory under which relative output directories are created;
/// honors the THINFILM_OUT_ROOT environment variable, else the working dir.
std::filesystem::path output_root();

struct ResumeInfo {
    State state;
    double dt_next = 0.0;
    std::int64_t step_index = 0;
};

struct RunResult {
    ExitCode status = ExitCode::ok;
    std::string message;
    std::filesystem::path directory;
    std::filesystem::path summary_path;
    std::filesystem::path csv_path;
    std::filesystem::path final_checkpoint;
    long accepted_steps = 0;
    double final_t = 0.0;
    double energy_initial = 0.0;
    double energy_final = 0.0;
    double mass_h_max_drift_rel = 0.0;
    double mass_gamma_max_drift_rel = 0.0;
    long energy_monotone_violations = 0;
    std::optional<DecayEstimate> decay;
    std::optional<double> spectral_bound; // present when output.stability is on
    TimeSeries series;                    // in-memory copy of the CSV rows
};

/// Executes one simulation: writes the resolved config, the CSV time series,
/// periodic + final checkpoints, a gnuplot script, and a JSON summary into
/// `outdir`. Never throws for degeneracy or numerical failures; those are
/// reported through the exit status and summary.
RunResult run_simulation(const RunConfig& cfg, const std::filesystem::path& outdir,
                         const ResumeInfo* resume = nullptr);

/// One key with the list of values it sweeps over.
struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepRow {
    long index = 0;
    std::vector<std::pair<std::string, std::string>> assignment;
    ExitCode status = ExitCode::ok;
    std::string message;
    std::filesystem::path directory;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::filesystem::path table_path;
};

/// Cartesian sweep over the axes (at most 10^4 combinations), each run in an
/// isolated subdirectory; per-row failures are recorded and the sweep
/// continues. Rows are ordered by combination index regardless of scheduling.
SweepResult run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                      const std::filesystem::path& outdir, int jobs = 0);

/// Loads a checkpoint plus its config (explicit path, or `config.resolved`
/// next to the checkpoint), verifies the config hash, and continues the run.
RunResult resume_run(const std::filesystem::path& checkpoint_path,
                     const std::optional<std::filesystem::path>& config_path,
                     const std::filesystem::path& outdir);

} // namespace thinfilm
