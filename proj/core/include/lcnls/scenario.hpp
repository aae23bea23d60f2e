#pragma once

// Experiment orchestration: configs and presets, the generator -> assembly ->
// stepping -> diagnostics pipeline, refinement studies against closed-form
// references, and phase-difference sweeps.

#include <iosfwd>
#include <string>
#include <vector>

#include "lcnls/diagnostics.hpp"
#include "lcnls/envelope.hpp"
#include "lcnls/model.hpp"
#include "lcnls/stepper.hpp"

namespace lcnls {

inline constexpr const char* kVersion = "0.1.0";

// Which stationary profile seeds a soliton. Circular uses the closed-form
// equal-frequency envelope on both components, Linear puts the closed-form
// single-component envelope on psi only, Elliptic runs the two-point BVP
// continuation in the carrier frequencies.
enum class SolitonFamily { Circular, Linear, Elliptic };

struct SolitonSetup {
    SolitonSpec spec;
    SolitonFamily family = SolitonFamily::Circular;
};

struct OutputSpec {
    std::vector<double> snapshot_times; // must land on time steps
    int series_every = 10;              // diagnostics cadence in steps
    std::string out_dir;                // empty: in-memory results only
};

struct ScenarioConfig {
    ModelParams model;
    Grid grid;
    std::vector<SolitonSetup> solitons;
    IterationControl ctrl;
    OutputSpec output;
    double t_final = 60.0;
    std::string preset;          // informational: the preset this came from
    double phase_diff_deg = 0.0; // informational: applied offset, see below
};

// The built-in scenario presets; throws ConfigInvalid for an unknown name.
//   circular_headon:   equal-frequency pair, c = +-1, X = -+40
//   elliptic_headon:   mixed-frequency pair (n_psi=-1.1, n_phi=-1.5), c = +-1
//   elliptic_takeover: same profiles at c = 1 / 0.8, X = -20 / 0, longer box
ScenarioConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Adds the inter-soliton phase difference (degrees) to both component phases
// of the rightmost soliton and records it in the config.
void apply_phase_difference(ScenarioConfig& config, double degrees);

// Flat key = value config format ('#' comments; keys like grid.m,
// soliton1.X; phases in degrees). Unknown keys raise ConfigInvalid naming
// the key. A run manifest reloads as a config: its provenance annotations
// (info.preset, info.phase_diff_deg) are restored and other info.* keys are
// dropped.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);
std::string format_manifest(const ScenarioConfig& config);

void validate_config(const ScenarioConfig& config);

// Stationary envelope for one soliton on a symmetric window with the grid's
// spacing. Envelope generation works in the beta = 1 normalization; other
// beta values are rejected here.
EnvelopePair build_envelope(const SolitonSetup& setup, const ModelParams& model,
                            double h);

// Assembled superposition of all configured solitons at t = 0.
FieldState initial_state(const ScenarioConfig& config);

struct SeriesRow {
    double t = 0.0;
    double mass = 0.0, mass_psi = 0.0, mass_phi = 0.0; // quadrature masses
    double momentum = 0.0, energy = 0.0;               // discrete invariants
    double theta_left = 0.0, theta_right = 0.0;        // NaN while suspended
    double theta_total = 0.0;
    double x_left = 0.0, x_right = 0.0;
};

struct RunSummary {
    InvariantTriple initial;
    InvariantTriple final_state;
    // max |v(t) - v(0)| / max(|v(0)|, 1) over sampled rows
    double drift_mass = 0.0, drift_momentum = 0.0, drift_energy = 0.0;
    double quad_mass = 0.0;    // quadrature mass at t = 0
    double quad_energy = 0.0;  // continuum-convention energy at t = 0
    double max_abs_momentum = 0.0;
    double breathing_period = 0.0;              // NaN when no oscillation
    double speed_in_left = 0.0, speed_in_right = 0.0;   // fitted over the
    double speed_out_left = 0.0, speed_out_right = 0.0; // first/last stretch
    double theta_total_min = 0.0, theta_total_max = 0.0;
    int median_iterations = 0;
    int max_iterations = 0;
    double wall_seconds = 0.0;
};

struct RunArtifacts {
    ScenarioConfig config;
    std::vector<SeriesRow> series;
    RunSummary summary;
    FieldState final_state;
    std::vector<std::string> written; // paths of files produced, if any
};

// Full pipeline for one scenario. With a nonempty out_dir this writes
// series.csv, snapshot_t*.csv, summary.txt and manifest.txt (all floating
// point at 12 significant digits).
RunArtifacts run_scenario(const ScenarioConfig& config);

std::string format_summary(const RunSummary& summary);
void write_series_csv(const std::vector<SeriesRow>& series, const std::string& path);
void write_snapshot_csv(const FieldState& state, const Grid& grid,
                        const std::string& path);

// Joint (h, dtau) refinement against the closed-form reference of the
// configured soliton: the translated/phase-rotated envelope for the circular
// family, the mass-exchange transform for the linear family. Multi-soliton
// or elliptic configs have no closed form: OracleUnavailable.
struct RefinementRow {
    double h = 0.0, dtau = 0.0;
    double error = 0.0; // max-norm against the closed form at t_final
    double order = 0.0; // log2 ratio to the previous row (NaN on the first)
};
std::vector<RefinementRow> run_refinement_study(const ScenarioConfig& config, int levels);

// One run per phase difference; failures are recorded per row and do not
// stop the sweep. Rows come back in input order regardless of scheduling.
struct SweepRow {
    double delta_deg = 0.0;
    bool ok = false;
    std::string error;
    double energy = 0.0;          // conserved discrete energy
    double mass = 0.0;            // quadrature mass at t = 0
    double max_abs_momentum = 0.0;
    double theta_amplitude = 0.0; // half the swing of the total angle
};
std::vector<SweepRow> run_phase_sweep(const ScenarioConfig& config,
                                      const std::vector<double>& phase_diffs_deg);

} // namespace lcnls
