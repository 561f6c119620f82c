#include "thinfilm/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "thinfilm/checkpoint.hpp"
#include "thinfilm/kernels.hpp"
#include "thinfilm/parallel.hpp"
#include "thinfilm/stability.hpp"

namespace thinfilm {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json json_num(double v) {
    if (std::isfinite(v))
        return v;
    return nullptr; // inf/NaN have no JSON representation
}

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool row_finite(const StepDiagnostics& d) {
    const double vals[] = {d.t,          d.dt,           d.mass_h,    d.mass_gamma,
                           d.energy,     d.diss[0],      d.diss[1],   d.diss[2],
                           d.diss[3],    d.diss[4],      d.diss_total, d.dist_h_l2,
                           d.dist_gamma_l2, d.dist_linf, d.dist_h_h1};
    for (double v : vals)
        if (!std::isfinite(v))
            return false;
    return true;
}

void write_csv_header(std::ofstream& out) {
    out << "t,dt,mass_h,mass_gamma,energy,diss1,diss2,diss3,diss4,diss5,diss_total,"
           "dist_h_l2,dist_gamma_l2,dist_linf,newton_iters\n";
}

void write_csv_row(std::ofstream& out, const StepDiagnostics& d) {
    out << fmt17(d.t) << ',' << fmt17(d.dt) << ',' << fmt17(d.mass_h) << ','
        << fmt17(d.mass_gamma) << ',' << fmt17(d.energy) << ',' << fmt17(d.diss[0]) << ','
        << fmt17(d.diss[1]) << ',' << fmt17(d.diss[2]) << ',' << fmt17(d.diss[3]) << ','
        << fmt17(d.diss[4]) << ',' << fmt17(d.diss_total) << ',' << fmt17(d.dist_h_l2) << ','
        << fmt17(d.dist_gamma_l2) << ',' << fmt17(d.dist_linf) << ',' << d.newton_iters << '\n';
}

void write_plot_script(const fs::path& path, const std::string& prefix) {
    std::ofstream out(path);
    out << "# renders diagnostics from " << prefix << "_series.csv (run: gnuplot " << prefix
        << "_plots.gp)\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 900,600\n"
        << "set xlabel 't'\n"
        << "set output '" << prefix << "_energy.png'\n"
        << "plot '" << prefix << "_series.csv' every ::1 using 1:5 with lines title 'energy'\n"
        << "set output '" << prefix << "_mass.png'\n"
        << "plot '" << prefix << "_series.csv' every ::1 using 1:3 with lines title 'mass h', \\\n"
        << "     '" << prefix << "_series.csv' every ::1 using 1:4 with lines title 'mass gamma'\n"
        << "set output '" << prefix << "_decay.png'\n"
        << "set logscale y\n"
        << "plot '" << prefix
        << "_series.csv' every ::1 using 1:(sqrt($12**2 + $13**2)) with lines title "
           "'zero-mean L2 distance'\n";
}

json stability_to_json(const StabilityReport& r) {
    json j;
    j["h_star"] = r.h_star;
    j["gamma_star"] = r.gamma_star;
    j["n_grid"] = r.n_grid;
    j["spectral_bound"] = json_num(r.spectral_bound);
    j["omega_pred"] = json_num(r.omega_pred);
    j["spectral_bound_coarse"] = json_num(r.spectral_bound_coarse);
    j["rel_change"] = json_num(r.rel_change);
    j["q_used"] = r.q_used;
    j["aq_positive_definite"] = r.aq_definite;
    j["aq_eigenvalues"] = {json_num(r.aq_eigenvalues[0]), json_num(r.aq_eigenvalues[1])};
    j["q_window"] = {0.0, json_num(r.q_window_hi)};
    j["q_window_determinant"] = {0.0, json_num(r.q_window_det_hi)};
    j["q_windows_agree"] = r.q_windows_agree;
    return j;
}

} // namespace

fs::path output_root() {
    if (const char* env = std::getenv("THINFILM_OUT_ROOT"); env != nullptr && env[0] != '\0')
        return fs::path(env);
    return fs::current_path();
}

RunResult run_simulation(const RunConfig& cfg, const fs::path& outdir, const ResumeInfo* resume) {
    cfg.validate();
    RunResult result;
    result.directory = outdir;
    fs::create_directories(outdir);

    {
        std::ofstream rc(outdir / "config.resolved");
        rc << emit_config(cfg);
    }

    const PhysicalParams params = make_params(cfg);
    IntegratorConfig icfg = make_integrator_config(cfg);
    const std::uint64_t hash = config_hash(cfg);
    const std::string prefix = cfg.output_prefix;

    State state = resume ? resume->state : initial_condition(cfg, params.grid);
    if (resume)
        icfg.dt_init = std::clamp(resume->dt_next, icfg.dt_min, icfg.dt_max);

    const double h_star = mean(state.h, params.grid);
    const double gamma_star = mean(state.gamma, params.grid);
    const double mass_h0 = h_star;
    const double mass_gamma0 = gamma_star;
    result.energy_initial = energy(state, params.model, params.grid);

    result.csv_path = outdir / (prefix + "_series.csv");
    std::ofstream csv(result.csv_path);
    write_csv_header(csv);

    TimeSeries& series = result.series;
    std::vector<fs::path> checkpoints;
    std::int64_t step_index = resume ? resume->step_index : 0;
    double last_dt_next = icfg.dt_init;
    State last_state = state;

    double energy_prev = result.energy_initial;
    double max_energy_increase = 0.0;

    const auto on_accept = [&](const State& s, const StepReport& rep, double dt_next) {
        StepDiagnostics d =
            compute_step_diagnostics(s, params, h_star, gamma_star, rep.dt_used, rep.newton_iters);
        if (!row_finite(d) || !state_finite(s))
            throw NumericalError("non-finite diagnostics at t = " + std::to_string(s.t));
        series.rows.push_back(d);
        write_csv_row(csv, d);
        csv.flush();

        result.mass_h_max_drift_rel =
            std::max(result.mass_h_max_drift_rel,
                     std::abs(d.mass_h - mass_h0) / std::max(std::abs(mass_h0), 1e-300));
        result.mass_gamma_max_drift_rel =
            std::max(result.mass_gamma_max_drift_rel,
                     std::abs(d.mass_gamma - mass_gamma0) / std::max(std::abs(mass_gamma0), 1e-300));
        const double allowed = 1e-10 * (1.0 + std::abs(energy_prev));
        if (d.energy - energy_prev > allowed) {
            ++result.energy_monotone_violations;
            max_energy_increase = std::max(max_energy_increase, d.energy - energy_prev);
        }
        energy_prev = d.energy;

        ++step_index;
        last_dt_next = dt_next;
        last_state = s;
        if (cfg.output_checkpoint_every > 0 && step_index % cfg.output_checkpoint_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "%s_%08lld.ckpt", prefix.c_str(),
                          static_cast<long long>(step_index));
            const fs::path p = outdir / name;
            save_checkpoint(p.string(), make_checkpoint(s, params.grid, dt_next, step_index, hash));
            checkpoints.push_back(p);
        }
    };

    std::string failure_message;
    try {
        state = advance(std::move(state), params, icfg, on_accept);
        last_state = state;
        result.status = ExitCode::ok;
    } catch (const DegeneracyStop& e) {
        result.status = ExitCode::degeneracy_stop;
        failure_message = e.what();
    } catch (const NumericalError& e) {
        result.status = ExitCode::numerical_failure;
        failure_message = e.what();
    }
    result.message = failure_message;
    result.accepted_steps = static_cast<long>(series.rows.size());
    result.final_t = last_state.t;
    result.energy_final = series.rows.empty() ? result.energy_initial : series.rows.back().energy;

    // The last valid state is always persisted, including after a stop.
    result.final_checkpoint = outdir / (prefix + "_final.ckpt");
    save_checkpoint(result.final_checkpoint.string(),
                    make_checkpoint(last_state, params.grid, last_dt_next, step_index, hash));
    checkpoints.push_back(result.final_checkpoint);

    write_plot_script(outdir / (prefix + "_plots.gp"), prefix);

    // Decay fit over the trailing window of the series.
    std::string decay_error;
    if (series.rows.size() >= 2) {
        const double t_lo = series.rows.front().t;
        const double t_hi = series.rows.back().t;
        const double t0 = t_hi - cfg.fit_window_fraction * (t_hi - t_lo);
        try {
            result.decay = fit_decay(series, parse_decay_norm(cfg.fit_norm), t0, t_hi);
        } catch (const std::domain_error& e) {
            decay_error = e.what();
        }
    } else {
        decay_error = "time series too short for a decay fit";
    }

    json j;
    switch (result.status) {
    case ExitCode::ok: j["status"] = "ok"; break;
    case ExitCode::degeneracy_stop: j["status"] = "degeneracy_stop"; break;
    case ExitCode::numerical_failure: j["status"] = "numerical_failure"; break;
    default: j["status"] = "error"; break;
    }
    if (!failure_message.empty())
        j["error"] = {{"code", static_cast<int>(result.status)}, {"message", failure_message}};
    j["config_hash"] = hex_hash(hash);
    j["kernel_backend"] = kernels::backend_name(kernels::active_backend());
    j["grid"] = {{"L", cfg.grid_length}, {"n", cfg.grid_n}};
    j["physics"] = {{"D", cfg.physics_diffusion},
                    {"sigma_kind", cfg.sigma_kind},
                    {"sigma_beta", params.model.beta()},
                    {"phi_offset", params.model.phi_offset()},
                    {"phi_infimum", params.model.phi_infimum()}};
    j["equilibrium"] = {{"h_star", h_star}, {"gamma_star", gamma_star}};
    j["steps"] = {{"accepted", result.accepted_steps},
                  {"final_t", json_num(result.final_t)},
                  {"final_dt", json_num(series.rows.empty() ? 0.0 : series.rows.back().dt)}};
    j["conservation"] = {{"mass_h_initial", mass_h0},
                         {"mass_gamma_initial", mass_gamma0},
                         {"mass_h_max_drift_rel", json_num(result.mass_h_max_drift_rel)},
                         {"mass_gamma_max_drift_rel", json_num(result.mass_gamma_max_drift_rel)}};
    j["energy"] = {{"initial", json_num(result.energy_initial)},
                   {"final", json_num(result.energy_final)},
                   {"monotone_violations", result.energy_monotone_violations},
                   {"max_increase", json_num(max_energy_increase)}};
    if (result.decay) {
        j["decay"] = {{"norm", cfg.fit_norm},
                      {"omega", json_num(result.decay->omega)},
                      {"prefactor", json_num(result.decay->prefactor)},
                      {"r2", json_num(result.decay->r2)},
                      {"window", {json_num(result.decay->t_start), json_num(result.decay->t_end)}},
                      {"n_samples", result.decay->n_samples}};
    } else {
        j["decay"] = nullptr;
        j["decay_error"] = decay_error;
    }
    if (cfg.output_stability) {
        try {
            const Grid sgrid = Grid::make(cfg.grid_length, cfg.output_stability_n);
            const StabilityReport rep =
                spectral_bound(Equilibrium{h_star, gamma_star}, params, sgrid, cfg.output_q);
            j["stability"] = stability_to_json(rep);
            result.spectral_bound = rep.spectral_bound;
        } catch (const std::exception& e) {
            j["stability"] = nullptr;
            j["stability_error"] = e.what();
        }
    }
    if (resume)
        j["resume"] = {{"from_t", json_num(resume->state.t)},
                       {"from_step", resume->step_index}};
    json artifact_list = json::array();
    for (const auto& p : checkpoints)
        artifact_list.push_back(p.filename().string());
    j["artifacts"] = {{"csv", result.csv_path.filename().string()},
                      {"checkpoints", artifact_list},
                      {"plot_script", prefix + "_plots.gp"}};

    result.summary_path = outdir / (prefix + "_summary.json");
    std::ofstream summary(result.summary_path);
    summary << j.dump(2) << '\n';
    return result;
}

SweepResult run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                      const fs::path& outdir, int jobs) {
    long combos = 1;
    for (const auto& axis : axes) {
        if (axis.values.empty())
            throw ConfigError("sweep axis '" + axis.key + "' has no values");
        combos *= static_cast<long>(axis.values.size());
        if (combos > 10000)
            throw ConfigError("sweep exceeds 10^4 combinations");
    }
    fs::create_directories(outdir);

    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(combos));
    std::vector<json> row_json(static_cast<std::size_t>(combos));

    parallel_for(combos, jobs, [&](long idx) {
        SweepRow& row = result.rows[static_cast<std::size_t>(idx)];
        row.index = idx;

        long rem = idx;
        RunConfig cfg = base;
        json assignment;
        std::string error;
        try {
            for (const auto& axis : axes) {
                const long k = rem % static_cast<long>(axis.values.size());
                rem /= static_cast<long>(axis.values.size());
                apply_config_override(cfg, axis.key, axis.values[static_cast<std::size_t>(k)]);
                row.assignment.emplace_back(axis.key, axis.values[static_cast<std::size_t>(k)]);
                assignment[axis.key] = axis.values[static_cast<std::size_t>(k)];
            }
            cfg.validate();
        } catch (const std::exception& e) {
            row.status = ExitCode::config_error;
            row.message = e.what();
            error = e.what();
        }

        json rj;
        rj["index"] = idx;
        rj["params"] = assignment;
        if (row.status == ExitCode::ok) {
            char name[32];
            std::snprintf(name, sizeof name, "combo_%04ld", idx);
            row.directory = outdir / name;
            try {
                const RunResult r = run_simulation(cfg, row.directory);
                row.status = r.status;
                row.message = r.message;
                rj["status"] = static_cast<int>(r.status);
                rj["accepted_steps"] = r.accepted_steps;
                rj["final_t"] = json_num(r.final_t);
                rj["energy_final"] = json_num(r.energy_final);
                rj["mass_h_max_drift_rel"] = json_num(r.mass_h_max_drift_rel);
                if (r.decay) {
                    rj["omega_fit"] = json_num(r.decay->omega);
                    rj["fit_r2"] = json_num(r.decay->r2);
                }
                if (r.spectral_bound)
                    rj["spectral_bound"] = json_num(*r.spectral_bound);
                rj["dir"] = row.directory.filename().string();
            } catch (const std::exception& e) {
                row.status = ExitCode::numerical_failure;
                row.message = e.what();
            }
        }
        if (!row.message.empty()) {
            rj["status"] = static_cast<int>(row.status);
            rj["error"] = row.message;
        }
        row_json[static_cast<std::size_t>(idx)] = std::move(rj);
    });

    json table = json::array();
    for (auto& rj : row_json)
        table.push_back(std::move(rj));
    result.table_path = outdir / "sweep.json";
    std::ofstream out(result.table_path);
    out << table.dump(2) << '\n';
    return result;
}

RunResult resume_run(const fs::path& checkpoint_path,
                     const std::optional<fs::path>& config_path, const fs::path& outdir) {
    const Checkpoint ck = load_checkpoint(checkpoint_path.string());

    fs::path cfg_path;
    if (config_path) {
        cfg_path = *config_path;
    } else {
        cfg_path = checkpoint_path.parent_path() / "config.resolved";
        if (!fs::exists(cfg_path))
            throw ConfigError("no config given and no config.resolved next to the checkpoint");
    }
    const RunConfig cfg = parse_config_file(cfg_path.string());
    if (config_hash(cfg) != ck.config_hash)
        throw ConfigError("checkpoint was produced by a different configuration (hash mismatch)");
    if (ck.n != cfg.grid_n)
        throw ConfigError("checkpoint grid does not match the configuration");

    ResumeInfo info;
    info.state = state_from_checkpoint(ck);
    info.dt_next = ck.dt_next;
    info.step_index = ck.step_index;
    return run_simulation(cfg, outdir, &info);
}

} // namespace thinfilm
