// Command-line front end for the coupled-waveguide solver: run a scenario,
// sweep the inter-soliton phase difference, or run a refinement study
// against a closed-form reference.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcnls/errors.hpp"
#include "lcnls/scenario.hpp"

namespace {

struct ConfigSource {
    std::string config_path;
    std::string preset;
};

void add_source_options(CLI::App* cmd, ConfigSource& src) {
    auto* cfg = cmd->add_option("--config", src.config_path, "Config file (key = value)")
                    ->check(CLI::ExistingFile);
    cmd->add_option("--preset", src.preset, "Built-in scenario preset")->excludes(cfg);
}

lcnls::ScenarioConfig resolve(const ConfigSource& src) {
    if (!src.config_path.empty()) return lcnls::load_config(src.config_path);
    if (!src.preset.empty()) return lcnls::preset_config(src.preset);
    throw lcnls::ConfigInvalid("need either --config or --preset");
}

// single-soliton baselines for the refinement verbs; coarse on purpose so
// three halvings stay cheap
lcnls::ScenarioConfig oracle_config(const std::string& name) {
    lcnls::ScenarioConfig cfg;
    cfg.model.alpha1 = 0.75;
    cfg.model.gamma = lcnls::cplx(0.175, 0.0);
    cfg.grid = lcnls::Grid{30.0, 30.0, 300, 0.04};
    cfg.t_final = 10.0;
    lcnls::SolitonSetup s;
    s.spec.n_psi = s.spec.n_phi = -1.5;
    if (name == "translate") {
        s.family = lcnls::SolitonFamily::Circular;
        s.spec.X = -10.0;
        s.spec.c = 1.0;
    } else if (name == "breathing") {
        s.family = lcnls::SolitonFamily::Linear;
        s.spec.X = 0.0;
        s.spec.c = 0.0;
    } else {
        throw lcnls::ConfigInvalid("unknown oracle '" + name +
                                   "' (expected translate or breathing)");
    }
    cfg.solitons = {s};
    return cfg;
}

int run_cmd(const ConfigSource& src, double phase_diff, const std::string& out_dir,
            const std::vector<double>& snapshot_times, int series_every,
            double t_final, const std::string& mode) {
    lcnls::ScenarioConfig cfg = resolve(src);
    if (phase_diff != 0.0) lcnls::apply_phase_difference(cfg, phase_diff);
    if (!out_dir.empty()) cfg.output.out_dir = out_dir;
    if (!snapshot_times.empty()) cfg.output.snapshot_times = snapshot_times;
    if (series_every > 0) cfg.output.series_every = series_every;
    if (t_final > 0.0) cfg.t_final = t_final;
    if (mode == "coupled") cfg.ctrl.mode = lcnls::CouplingMode::Coupled;
    else if (mode == "lagged") cfg.ctrl.mode = lcnls::CouplingMode::Lagged;
    else if (!mode.empty())
        throw lcnls::ConfigInvalid("--mode expects coupled or lagged");

    const lcnls::RunArtifacts art = lcnls::run_scenario(cfg);
    std::fputs(lcnls::format_summary(art.summary).c_str(), stdout);
    for (const std::string& path : art.written)
        std::printf("wrote %s\n", path.c_str());
    return 0;
}

int sweep_cmd(const ConfigSource& src, const std::vector<double>& phase_diffs,
              const std::string& out_dir) {
    lcnls::ScenarioConfig cfg = resolve(src);
    if (!out_dir.empty()) cfg.output.out_dir = out_dir;
    const auto rows = lcnls::run_phase_sweep(cfg, phase_diffs);
    std::printf("%10s %6s %16s %14s %14s %12s\n", "delta_deg", "ok", "energy", "mass",
                "max|P|", "theta_amp");
    for (const auto& r : rows) {
        if (r.ok)
            std::printf("%10g %6s %16.9g %14.9g %14.6g %12.6g\n", r.delta_deg, "yes",
                        r.energy, r.mass, r.max_abs_momentum, r.theta_amplitude);
        else
            std::printf("%10g %6s   %s\n", r.delta_deg, "no", r.error.c_str());
    }
    return 0;
}

int refine_cmd(const ConfigSource& src, const std::string& oracle, int levels) {
    lcnls::ScenarioConfig cfg;
    if (!src.config_path.empty() || !src.preset.empty()) cfg = resolve(src);
    else cfg = oracle_config(oracle.empty() ? "translate" : oracle);
    const auto table = lcnls::run_refinement_study(cfg, levels);
    std::printf("%12s %12s %14s %8s\n", "h", "dtau", "max_error", "order");
    for (const auto& r : table)
        std::printf("%12.6g %12.6g %14.6e %8.3f\n", r.h, r.dtau, r.error, r.order);
    return 0;
}

int presets_cmd() {
    for (const std::string& name : lcnls::preset_names()) {
        std::printf("== %s ==\n", name.c_str());
        std::fputs(lcnls::format_manifest(lcnls::preset_config(name)).c_str(), stdout);
        std::printf("\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled nonlinear Schrodinger solver: soliton collisions in "
                 "linearly coupled waveguides"};
    app.require_subcommand(1);

    ConfigSource run_src, sweep_src, refine_src;
    double phase_diff = 0.0;
    std::string out_dir, mode;
    std::vector<double> snapshot_times;
    int series_every = 0;
    double t_final = 0.0;

    auto* run = app.add_subcommand("run", "Run one scenario and print its summary");
    add_source_options(run, run_src);
    run->add_option("--phase-diff", phase_diff,
                    "Extra phase (degrees) on the rightmost soliton");
    run->add_option("--out", out_dir, "Output directory for CSV/manifest files");
    run->add_option("--snapshot-times", snapshot_times,
                    "Times at which to write field snapshots")
        ->delimiter(',');
    run->add_option("--series-every", series_every, "Diagnostics cadence in steps");
    run->add_option("--t-final", t_final, "Override the final time");
    run->add_option("--mode", mode, "Inner iteration mode: coupled|lagged");

    std::vector<double> phase_diffs;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Run the scenario once per phase difference");
    add_source_options(sweep, sweep_src);
    sweep->add_option("--phase-diffs", phase_diffs, "Phase differences in degrees")
        ->delimiter(',')
        ->required();
    sweep->add_option("--out", sweep_out, "Root output directory (per-run subdirs)");

    std::string oracle;
    int levels = 3;
    auto* refine = app.add_subcommand(
        "refine", "Grid refinement study against a closed-form reference");
    add_source_options(refine, refine_src);
    refine->add_option("--oracle", oracle,
                       "Built-in baseline: translate (moving soliton) or "
                       "breathing (single-component mass exchange)");
    refine->add_option("--levels", levels, "Number of joint (h, dtau) halvings");

    auto* presets = app.add_subcommand("presets", "List built-in scenario presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_cmd(run_src, phase_diff, out_dir, snapshot_times, series_every,
                           t_final, mode);
        if (sweep->parsed()) return sweep_cmd(sweep_src, phase_diffs, sweep_out);
        if (refine->parsed()) return refine_cmd(refine_src, oracle, levels);
        if (presets->parsed()) return presets_cmd();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
