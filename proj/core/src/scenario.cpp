#include "lcnls/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "lcnls/errors.hpp"
#include "lcnls/initial_data.hpp"

namespace lcnls {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEnvelopeHalfWidth = 30.0;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// times are embedded in filenames and directory suffixes
std::string time_tag(double t) {
    std::string s = fmt(t);
    for (char& ch : s) {
        if (ch == '.') ch = 'p';
        if (ch == '-') ch = 'm';
    }
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("config: key '" + key + "' has non-numeric value '" +
                            value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9)
        throw ConfigInvalid("config: key '" + key + "' expects an integer, got '" +
                            value + "'");
    return i;
}

std::vector<double> parse_time_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        const size_t a = item.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const size_t b = item.find_last_not_of(" \t");
        out.push_back(parse_double(key, item.substr(a, b - a + 1)));
    }
    return out;
}

SolitonFamily parse_family(const std::string& key, const std::string& value) {
    if (value == "circular") return SolitonFamily::Circular;
    if (value == "linear") return SolitonFamily::Linear;
    if (value == "elliptic") return SolitonFamily::Elliptic;
    throw ConfigInvalid("config: key '" + key + "' expects circular|linear|elliptic, got '" +
                        value + "'");
}

const char* family_name(SolitonFamily f) {
    switch (f) {
        case SolitonFamily::Circular: return "circular";
        case SolitonFamily::Linear: return "linear";
        case SolitonFamily::Elliptic: return "elliptic";
    }
    return "circular";
}

// least-squares slope of center positions over rows selected by [t_lo, t_hi];
// rows with a suspended angle (NaN marker) are mid-interaction and excluded
double fit_speed(const std::vector<SeriesRow>& rows, bool left, double t_lo, double t_hi) {
    std::vector<std::pair<double, double>> pts;
    for (const SeriesRow& r : rows) {
        if (r.t < t_lo || r.t > t_hi) continue;
        if (std::isnan(left ? r.theta_left : r.theta_right)) continue;
        pts.emplace_back(r.t, left ? r.x_left : r.x_right);
    }
    if (pts.size() < 5) return nan_value();
    double st = 0.0, sx = 0.0;
    for (auto& [t, x] : pts) { st += t; sx += x; }
    st /= pts.size();
    sx /= pts.size();
    double num = 0.0, den = 0.0;
    for (auto& [t, x] : pts) {
        num += (t - st) * (x - sx);
        den += (t - st) * (t - st);
    }
    return den > 0.0 ? num / den : nan_value();
}

} // namespace

std::vector<std::string> preset_names() {
    return {"circular_headon", "elliptic_headon", "elliptic_takeover"};
}

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg;
    cfg.model.beta = 1.0;
    cfg.model.alpha1 = 0.75;
    cfg.model.gamma = cplx(0.175, 0.0);
    cfg.preset = name;

    SolitonSetup left, right;
    left.spec.delta_psi = left.spec.delta_phi = 0.0;
    right.spec.delta_psi = right.spec.delta_phi = 0.0;

    if (name == "circular_headon") {
        cfg.grid = Grid{60.0, 60.0, 2400, 0.01};
        cfg.t_final = 60.0;
        left.family = right.family = SolitonFamily::Circular;
        left.spec.n_psi = left.spec.n_phi = -1.5;
        right.spec.n_psi = right.spec.n_phi = -1.5;
        left.spec.X = -40.0;
        left.spec.c = 1.0;
        right.spec.X = 40.0;
        right.spec.c = -1.0;
    } else if (name == "elliptic_headon") {
        cfg.grid = Grid{60.0, 60.0, 2400, 0.01};
        cfg.t_final = 60.0;
        left.family = right.family = SolitonFamily::Elliptic;
        left.spec.n_psi = right.spec.n_psi = -1.1;
        left.spec.n_phi = right.spec.n_phi = -1.5;
        left.spec.X = -40.0;
        left.spec.c = 1.0;
        right.spec.X = 40.0;
        right.spec.c = -1.0;
    } else if (name == "elliptic_takeover") {
        // the overtaking pair drifts right for ~100 time units; the box is
        // extended downstream so both quasi-particles stay inside
        cfg.grid = Grid{60.0, 120.0, 3600, 0.01};
        cfg.t_final = 120.0;
        left.family = right.family = SolitonFamily::Elliptic;
        left.spec.n_psi = right.spec.n_psi = -1.1;
        left.spec.n_phi = right.spec.n_phi = -1.5;
        left.spec.X = -20.0;
        left.spec.c = 1.0;
        right.spec.X = 0.0;
        right.spec.c = 0.8;
    } else {
        throw ConfigInvalid("unknown preset '" + name + "'");
    }
    cfg.solitons = {left, right};
    return cfg;
}

void apply_phase_difference(ScenarioConfig& config, double degrees) {
    if (config.solitons.empty())
        throw ConfigInvalid("phase difference: config has no solitons");
    size_t idx = 0;
    for (size_t i = 1; i < config.solitons.size(); ++i)
        if (config.solitons[i].spec.X > config.solitons[idx].spec.X) idx = i;
    const double rad = degrees * kPi / 180.0;
    config.solitons[idx].spec.delta_psi += rad;
    config.solitons[idx].spec.delta_phi += rad;
    config.phase_diff_deg += degrees;
}

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    cfg.solitons.clear();

    auto soliton = [&cfg](int idx) -> SolitonSetup& {
        if (idx < 1 || idx > 2)
            throw ConfigInvalid("config: only soliton1 and soliton2 are supported");
        if (static_cast<int>(cfg.solitons.size()) < idx) cfg.solitons.resize(idx);
        return cfg.solitons[idx - 1];
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("config line " + std::to_string(lineno) +
                                ": expected 'key = value'");
        auto trim = [](std::string s) {
            const size_t x = s.find_first_not_of(" \t");
            if (x == std::string::npos) return std::string();
            const size_t y = s.find_last_not_of(" \t");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        // manifest annotations: the run provenance fields reload so a rerun
        // reproduces the manifest byte for byte; anything else under info.
        // is tolerated and dropped
        if (key == "info.preset") { cfg.preset = value; continue; }
        if (key == "info.phase_diff_deg") {
            cfg.phase_diff_deg = parse_double(key, value);
            continue;
        }
        if (key.rfind("info.", 0) == 0) continue;

        if (key == "model.beta") cfg.model.beta = parse_double(key, value);
        else if (key == "model.alpha1") cfg.model.alpha1 = parse_double(key, value);
        else if (key == "model.gamma_re")
            cfg.model.gamma = cplx(parse_double(key, value), cfg.model.gamma.imag());
        else if (key == "model.gamma_im")
            cfg.model.gamma = cplx(cfg.model.gamma.real(), parse_double(key, value));
        else if (key == "grid.L1") cfg.grid.L1 = parse_double(key, value);
        else if (key == "grid.L2") cfg.grid.L2 = parse_double(key, value);
        else if (key == "grid.m") cfg.grid.m = parse_int(key, value);
        else if (key == "grid.dtau") cfg.grid.dtau = parse_double(key, value);
        else if (key == "run.t_final") cfg.t_final = parse_double(key, value);
        else if (key == "run.series_every") cfg.output.series_every = parse_int(key, value);
        else if (key == "run.snapshot_times")
            cfg.output.snapshot_times = parse_time_list(key, value);
        else if (key == "run.out_dir") cfg.output.out_dir = value;
        else if (key == "iteration.update_tol") cfg.ctrl.update_tol = parse_double(key, value);
        else if (key == "iteration.residual_tol")
            cfg.ctrl.residual_tol = parse_double(key, value);
        else if (key == "iteration.max_iter") cfg.ctrl.max_iter = parse_int(key, value);
        else if (key == "iteration.mode") {
            if (value == "coupled") cfg.ctrl.mode = CouplingMode::Coupled;
            else if (value == "lagged") cfg.ctrl.mode = CouplingMode::Lagged;
            else
                throw ConfigInvalid("config: key 'iteration.mode' expects coupled|lagged, got '" +
                                    value + "'");
        } else if (key.rfind("soliton", 0) == 0 && key.size() > 8 && key[8] == '.') {
            const int idx = key[7] - '0';
            const std::string field = key.substr(9);
            SolitonSetup& s = soliton(idx);
            if (field == "X") s.spec.X = parse_double(key, value);
            else if (field == "c") s.spec.c = parse_double(key, value);
            else if (field == "n_psi") s.spec.n_psi = parse_double(key, value);
            else if (field == "n_phi") s.spec.n_phi = parse_double(key, value);
            else if (field == "delta_psi_deg")
                s.spec.delta_psi = parse_double(key, value) * kPi / 180.0;
            else if (field == "delta_phi_deg")
                s.spec.delta_phi = parse_double(key, value) * kPi / 180.0;
            else if (field == "family") s.family = parse_family(key, value);
            else throw ConfigInvalid("config: unknown key '" + key + "'");
        } else {
            throw ConfigInvalid("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("config: cannot open '" + path + "'");
    return parse_config(in);
}

std::string format_manifest(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "# scenario manifest (reloadable as a config; unknown info.* keys are "
           "dropped on load)\n";
    out << "info.version = " << kVersion << "\n";
    if (!cfg.preset.empty()) out << "info.preset = " << cfg.preset << "\n";
    out << "info.phase_diff_deg = " << fmt(cfg.phase_diff_deg) << "\n";
    out << "model.beta = " << fmt(cfg.model.beta) << "\n";
    out << "model.alpha1 = " << fmt(cfg.model.alpha1) << "\n";
    out << "model.gamma_re = " << fmt(cfg.model.gamma.real()) << "\n";
    out << "model.gamma_im = " << fmt(cfg.model.gamma.imag()) << "\n";
    out << "grid.L1 = " << fmt(cfg.grid.L1) << "\n";
    out << "grid.L2 = " << fmt(cfg.grid.L2) << "\n";
    out << "grid.m = " << cfg.grid.m << "\n";
    out << "grid.dtau = " << fmt(cfg.grid.dtau) << "\n";
    out << "run.t_final = " << fmt(cfg.t_final) << "\n";
    out << "run.series_every = " << cfg.output.series_every << "\n";
    out << "run.snapshot_times = ";
    for (size_t i = 0; i < cfg.output.snapshot_times.size(); ++i)
        out << (i ? "," : "") << fmt(cfg.output.snapshot_times[i]);
    out << "\n";
    out << "iteration.update_tol = " << fmt(cfg.ctrl.update_tol) << "\n";
    out << "iteration.residual_tol = " << fmt(cfg.ctrl.residual_tol) << "\n";
    out << "iteration.max_iter = " << cfg.ctrl.max_iter << "\n";
    out << "iteration.mode = "
        << (cfg.ctrl.mode == CouplingMode::Coupled ? "coupled" : "lagged") << "\n";
    for (size_t i = 0; i < cfg.solitons.size(); ++i) {
        const std::string p = "soliton" + std::to_string(i + 1) + ".";
        const SolitonSetup& s = cfg.solitons[i];
        out << p << "family = " << family_name(s.family) << "\n";
        out << p << "X = " << fmt(s.spec.X) << "\n";
        out << p << "c = " << fmt(s.spec.c) << "\n";
        out << p << "n_psi = " << fmt(s.spec.n_psi) << "\n";
        out << p << "n_phi = " << fmt(s.spec.n_phi) << "\n";
        out << p << "delta_psi_deg = " << fmt(s.spec.delta_psi * 180.0 / kPi) << "\n";
        out << p << "delta_phi_deg = " << fmt(s.spec.delta_phi * 180.0 / kPi) << "\n";
    }
    return out.str();
}

void validate_config(const ScenarioConfig& cfg) {
    if (cfg.solitons.empty() || cfg.solitons.size() > 2)
        throw ConfigInvalid("solitons: need 1 or 2, got " +
                            std::to_string(cfg.solitons.size()));
    if (cfg.model.beta == 0.0) throw ConfigInvalid("model.beta: must be nonzero");
    if (cfg.model.alpha1 <= 0.0) throw ConfigInvalid("model.alpha1: must be positive");
    if (cfg.grid.L1 <= 0.0 || cfg.grid.L2 <= 0.0)
        throw ConfigInvalid("grid.L1/L2: must be positive");
    if (cfg.grid.m < 16) throw ConfigInvalid("grid.m: need at least 16 cells");
    if (cfg.grid.dtau <= 0.0) throw ConfigInvalid("grid.dtau: must be positive");
    if (cfg.t_final <= 0.0) throw ConfigInvalid("run.t_final: must be positive");
    const long steps = std::lround(cfg.t_final / cfg.grid.dtau);
    if (steps < 1 ||
        std::abs(steps * cfg.grid.dtau - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw ConfigInvalid("run.t_final: must be an integer number of time steps");
    if (cfg.output.series_every < 1)
        throw ConfigInvalid("run.series_every: must be at least 1");
    for (double t : cfg.output.snapshot_times)
        if (t < 0.0 || t > cfg.t_final + 1e-12)
            throw ConfigInvalid("run.snapshot_times: " + fmt(t) +
                                " outside [0, t_final]");
    if (cfg.ctrl.update_tol <= 0.0 || cfg.ctrl.residual_tol <= 0.0)
        throw ConfigInvalid("iteration tolerances must be positive");
    if (cfg.ctrl.max_iter < 1) throw ConfigInvalid("iteration.max_iter: must be >= 1");
    for (size_t i = 0; i < cfg.solitons.size(); ++i) {
        const SolitonSetup& s = cfg.solitons[i];
        const std::string p = "soliton" + std::to_string(i + 1);
        if (s.spec.X <= -cfg.grid.L1 || s.spec.X >= cfg.grid.L2)
            throw ConfigInvalid(p + ".X: center outside the grid");
        if (s.family == SolitonFamily::Circular && s.spec.n_psi != s.spec.n_phi)
            throw ConfigInvalid(p + ": circular family requires n_psi == n_phi");
    }
}

EnvelopePair build_envelope(const SolitonSetup& setup, const ModelParams& model,
                            double h) {
    if (model.beta != 1.0)
        throw ConfigInvalid("envelope generation works in the beta = 1 normalization; "
                            "rescale the model first");
    const SolitonSpec& sp = setup.spec;
    const EnvelopeParams params{sp.n_psi, sp.n_phi, sp.c, model.alpha1};
    switch (setup.family) {
        case SolitonFamily::Circular:
            if (sp.n_psi != sp.n_phi)
                throw ConfigInvalid("circular family requires n_psi == n_phi");
            return circular_envelope(params, kEnvelopeHalfWidth, h);
        case SolitonFamily::Linear:
            return linear_envelope(sp.n_psi, sp.c, model.alpha1, kEnvelopeHalfWidth, h);
        case SolitonFamily::Elliptic: {
            const int m_env =
                static_cast<int>(std::lround(2.0 * kEnvelopeHalfWidth / h));
            const Grid egrid{kEnvelopeHalfWidth, kEnvelopeHalfWidth, m_env, 1.0};
            EnvelopePair pair = elliptic_envelope(params, egrid);
            validate_envelope_pair(pair);
            return pair;
        }
    }
    throw ConfigInvalid("unknown soliton family");
}

FieldState initial_state(const ScenarioConfig& cfg) {
    validate_config(cfg);
    std::vector<FieldState> parts;
    parts.reserve(cfg.solitons.size());
    for (const SolitonSetup& s : cfg.solitons)
        parts.push_back(assemble_soliton(build_envelope(s, cfg.model, cfg.grid.h()),
                                         s.spec, cfg.grid));
    return superpose(parts, cfg.grid);
}

void write_series_csv(const std::vector<SeriesRow>& series, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "t,M,M_psi,M_phi,P,E,theta_l,theta_r,theta_total,x_l,x_r\n");
    for (const SeriesRow& r : series)
        std::fprintf(f, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                     r.t, r.mass, r.mass_psi, r.mass_phi, r.momentum, r.energy,
                     r.theta_left, r.theta_right, r.theta_total, r.x_left, r.x_right);
    std::fclose(f);
}

void write_snapshot_csv(const FieldState& state, const Grid& grid,
                        const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "x,re_psi,im_psi,abs_psi,re_phi,im_phi,abs_phi\n");
    for (int i = 0; i < grid.nodes(); ++i)
        std::fprintf(f, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", grid.x(i),
                     state.psi[i].real(), state.psi[i].imag(), std::abs(state.psi[i]),
                     state.phi[i].real(), state.phi[i].imag(), std::abs(state.phi[i]));
    std::fclose(f);
}

std::string format_summary(const RunSummary& s) {
    std::ostringstream out;
    out << "mass_discrete_initial = " << fmt(s.initial.mass) << "\n";
    out << "momentum_discrete_initial = " << fmt(s.initial.momentum) << "\n";
    out << "energy_discrete_initial = " << fmt(s.initial.energy) << "\n";
    out << "mass_discrete_final = " << fmt(s.final_state.mass) << "\n";
    out << "momentum_discrete_final = " << fmt(s.final_state.momentum) << "\n";
    out << "energy_discrete_final = " << fmt(s.final_state.energy) << "\n";
    out << "drift_mass = " << fmt(s.drift_mass) << "\n";
    out << "drift_momentum = " << fmt(s.drift_momentum) << "\n";
    out << "drift_energy = " << fmt(s.drift_energy) << "\n";
    out << "mass_quadrature = " << fmt(s.quad_mass) << "\n";
    out << "energy_quadrature = " << fmt(s.quad_energy) << "\n";
    out << "max_abs_momentum = " << fmt(s.max_abs_momentum) << "\n";
    out << "breathing_period = " << fmt(s.breathing_period) << "\n";
    out << "speed_in_left = " << fmt(s.speed_in_left) << "\n";
    out << "speed_in_right = " << fmt(s.speed_in_right) << "\n";
    out << "speed_out_left = " << fmt(s.speed_out_left) << "\n";
    out << "speed_out_right = " << fmt(s.speed_out_right) << "\n";
    out << "theta_total_min_deg = " << fmt(s.theta_total_min) << "\n";
    out << "theta_total_max_deg = " << fmt(s.theta_total_max) << "\n";
    out << "median_inner_iterations = " << s.median_iterations << "\n";
    out << "max_inner_iterations = " << s.max_iterations << "\n";
    out << "wall_seconds = " << fmt(s.wall_seconds) << "\n";
    return out.str();
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    const auto wall_start = std::chrono::steady_clock::now();
    validate_config(cfg);

    RunArtifacts art;
    art.config = cfg;

    FieldState state = initial_state(cfg);
    Stepper stepper(cfg.model, cfg.grid, cfg.ctrl);

    std::vector<double> centers;
    for (const SolitonSetup& s : cfg.solitons) centers.push_back(s.spec.X);
    std::vector<double> speeds;
    {
        // seed ballistic speeds in center order so coasting starts sensibly
        // even when the windows overlap from the first sample
        std::vector<size_t> order(centers.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return centers[a] < centers[b]; });
        for (size_t i : order) speeds.push_back(cfg.solitons[i].spec.c);
    }
    Tracker tracker(cfg.grid, centers, 15.0, 5.0, speeds);

    const long steps = std::lround(cfg.t_final / cfg.grid.dtau);
    std::map<long, double> snapshot_at;
    for (double t : cfg.output.snapshot_times)
        snapshot_at[std::lround(t / cfg.grid.dtau)] = t;

    const bool writing = !cfg.output.out_dir.empty();
    namespace fs = std::filesystem;
    if (writing) fs::create_directories(cfg.output.out_dir);

    auto snapshot_path = [&cfg](double t) {
        return cfg.output.out_dir + "/snapshot_t" + time_tag(t) + ".csv";
    };

    const InvariantTriple inv0 = discrete_invariants(state, cfg.model, cfg.grid);
    RunSummary& sum = art.summary;
    sum.initial = inv0;
    sum.quad_mass = mass(state, cfg.model, cfg.grid);
    sum.quad_energy = energy(state, cfg.model, cfg.grid);

    auto record_row = [&](const FieldState& st) {
        const InvariantTriple inv = discrete_invariants(st, cfg.model, cfg.grid);
        auto [mp, mf] = component_masses(st, cfg.model, cfg.grid);
        SeriesRow row;
        row.t = st.time;
        row.mass = mp + mf;
        row.mass_psi = mp;
        row.mass_phi = mf;
        row.momentum = inv.momentum;
        row.energy = inv.energy;
        const TrackRecord tr = tracker.update(st);
        row.x_left = tr.center_left;
        row.x_right = tr.center_right;
        // angles are user-facing: degrees in the series and the summary
        const double to_deg = 180.0 / kPi;
        row.theta_left = row.theta_right = nan_value();
        if (!tr.merged) {
            try {
                auto [llo, lhi] = tracker.window(0);
                row.theta_left = to_deg * polarization(st, cfg.grid, llo, lhi);
                auto [rlo, rhi] = tracker.window(tracker.count() - 1);
                row.theta_right = to_deg * polarization(st, cfg.grid, rlo, rhi);
            } catch (const DegenerateWindow&) {
                // leave the suspended marker in place
            }
        }
        row.theta_total =
            to_deg * polarization(st, cfg.grid, -cfg.grid.L1, cfg.grid.L2);
        art.series.push_back(row);

        const bool conservative = cfg.model.conservative();
        if (conservative) {
            sum.drift_mass = std::max(
                sum.drift_mass,
                std::abs(inv.mass - inv0.mass) / std::max(std::abs(inv0.mass), 1.0));
            sum.drift_momentum =
                std::max(sum.drift_momentum, std::abs(inv.momentum - inv0.momentum) /
                                                 std::max(std::abs(inv0.momentum), 1.0));
            sum.drift_energy = std::max(
                sum.drift_energy, std::abs(inv.energy - inv0.energy) /
                                      std::max(std::abs(inv0.energy), 1.0));
        }
        sum.max_abs_momentum = std::max(sum.max_abs_momentum, std::abs(inv.momentum));
    };

    record_row(state);
    if (snapshot_at.count(0) && writing) {
        write_snapshot_csv(state, cfg.grid, snapshot_path(snapshot_at[0]));
        art.written.push_back(snapshot_path(snapshot_at[0]));
    }

    std::vector<int> iteration_counts;
    iteration_counts.reserve(steps);
    IterationReport rep;
    for (long n = 1; n <= steps; ++n) {
        state = stepper.step(state, &rep);
        iteration_counts.push_back(rep.iterations);
        if (n % cfg.output.series_every == 0 || n == steps) record_row(state);
        auto snap = snapshot_at.find(n);
        if (snap != snapshot_at.end() && n != 0 && writing) {
            write_snapshot_csv(state, cfg.grid, snapshot_path(snap->second));
            art.written.push_back(snapshot_path(snap->second));
        }
    }
    art.final_state = state;
    sum.final_state = discrete_invariants(state, cfg.model, cfg.grid);

    if (!iteration_counts.empty()) {
        std::vector<int> sorted = iteration_counts;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        sum.median_iterations = sorted[sorted.size() / 2];
        sum.max_iterations = *std::max_element(iteration_counts.begin(),
                                               iteration_counts.end());
    }

    {
        std::vector<double> ts, mpsi;
        for (const SeriesRow& r : art.series) {
            ts.push_back(r.t);
            mpsi.push_back(r.mass_psi);
        }
        try {
            sum.breathing_period = breathing_period(ts, mpsi);
        } catch (const Error&) {
            sum.breathing_period = nan_value();
        }
    }

    sum.theta_total_min = sum.theta_total_max = art.series.front().theta_total;
    for (const SeriesRow& r : art.series) {
        sum.theta_total_min = std::min(sum.theta_total_min, r.theta_total);
        sum.theta_total_max = std::max(sum.theta_total_max, r.theta_total);
    }

    const double fit_span = std::min(12.0, 0.25 * cfg.t_final);
    sum.speed_in_left = fit_speed(art.series, true, 0.0, fit_span);
    sum.speed_in_right = fit_speed(art.series, false, 0.0, fit_span);
    sum.speed_out_left = fit_speed(art.series, true, cfg.t_final - fit_span, cfg.t_final);
    sum.speed_out_right = fit_speed(art.series, false, cfg.t_final - fit_span, cfg.t_final);

    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();

    if (writing) {
        const std::string series_path = cfg.output.out_dir + "/series.csv";
        write_series_csv(art.series, series_path);
        art.written.push_back(series_path);

        const std::string summary_path = cfg.output.out_dir + "/summary.txt";
        std::ofstream sf(summary_path);
        sf << format_summary(sum);
        sf.close();
        art.written.push_back(summary_path);

        const std::string manifest_path = cfg.output.out_dir + "/manifest.txt";
        std::ofstream mf(manifest_path);
        mf << format_manifest(cfg);
        mf.close();
        art.written.push_back(manifest_path);
    }
    return art;
}

namespace {

// closed-form reference at time t for a single circular or linear soliton:
// the gamma-free solution (envelope times traveling carrier) pushed through
// the exact component-mixing transform
FieldState oracle_state(const ScenarioConfig& cfg, double t) {
    const SolitonSetup& s = cfg.solitons.front();
    const SolitonSpec& sp = s.spec;
    const double a1 = cfg.model.alpha1;
    const double kap = sp.n_psi + 0.25 * sp.c * sp.c;
    const double b = std::sqrt(-kap);
    const double amp = (s.family == SolitonFamily::Circular) ? b / std::sqrt(a1)
                                                             : b * std::sqrt(2.0 / a1);
    const int nn = cfg.grid.nodes();
    FieldState manakov;
    manakov.time = t;
    manakov.psi.resize(nn);
    manakov.phi.resize(nn);
    for (int i = 0; i < nn; ++i) {
        const double xi = cfg.grid.x(i) - sp.X - sp.c * t;
        const double A = amp / std::cosh(b * xi);
        const double base = sp.n_psi * t - 0.5 * sp.c * xi;
        manakov.psi[i] = A * std::polar(1.0, base + sp.delta_psi);
        manakov.phi[i] = (s.family == SolitonFamily::Circular)
                             ? A * std::polar(1.0, base + sp.delta_phi)
                             : cplx(0.0, 0.0);
    }
    return manakov_to_linear(manakov, t, cfg.model.gamma);
}

} // namespace

std::vector<RefinementRow> run_refinement_study(const ScenarioConfig& cfg, int levels) {
    validate_config(cfg);
    if (levels < 3)
        throw ConfigInvalid("refinement: need at least 3 levels, got " +
                            std::to_string(levels));
    if (cfg.solitons.size() != 1)
        throw OracleUnavailable("refinement: no closed-form reference for " +
                                std::to_string(cfg.solitons.size()) + " solitons");
    if (cfg.solitons.front().family == SolitonFamily::Elliptic)
        throw OracleUnavailable(
            "refinement: elliptic profiles have no closed-form reference");
    const SolitonSpec& sp = cfg.solitons.front().spec;
    if (sp.n_psi + 0.25 * sp.c * sp.c >= 0.0)
        throw OracleUnavailable("refinement: the configured soliton is not bound");

    std::vector<RefinementRow> table;
    for (int level = 0; level < levels; ++level) {
        ScenarioConfig c = cfg;
        c.grid.m = cfg.grid.m << level;
        c.grid.dtau = cfg.grid.dtau / static_cast<double>(1 << level);
        c.output.out_dir.clear();

        FieldState state = initial_state(c);
        Stepper stepper(c.model, c.grid, c.ctrl);
        const long steps = std::lround(c.t_final / c.grid.dtau);
        for (long n = 0; n < steps; ++n) state = stepper.step(state);

        const FieldState ref = oracle_state(c, state.time);
        double err = 0.0;
        for (int i = 0; i < c.grid.nodes(); ++i) {
            err = std::max(err, std::abs(state.psi[i] - ref.psi[i]));
            err = std::max(err, std::abs(state.phi[i] - ref.phi[i]));
        }

        RefinementRow row;
        row.h = c.grid.h();
        row.dtau = c.grid.dtau;
        row.error = err;
        row.order = table.empty() ? nan_value() : std::log2(table.back().error / err);
        table.push_back(row);
    }
    return table;
}

std::vector<SweepRow> run_phase_sweep(const ScenarioConfig& cfg,
                                      const std::vector<double>& phase_diffs_deg) {
    validate_config(cfg);
    std::vector<SweepRow> rows(phase_diffs_deg.size());
    if (rows.empty()) return rows;

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            SweepRow& row = rows[i];
            row.delta_deg = phase_diffs_deg[i];
            try {
                ScenarioConfig c = cfg;
                apply_phase_difference(c, row.delta_deg);
                if (!cfg.output.out_dir.empty())
                    c.output.out_dir =
                        cfg.output.out_dir + "/delta_" + time_tag(row.delta_deg);
                RunArtifacts art = run_scenario(c);
                row.energy = art.series.front().energy;
                row.mass = art.summary.quad_mass;
                row.max_abs_momentum = art.summary.max_abs_momentum;
                row.theta_amplitude =
                    0.5 * (art.summary.theta_total_max - art.summary.theta_total_min);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const size_t nthreads = std::min<size_t>(rows.size(), hw);
    std::vector<std::thread> pool;
    for (size_t k = 1; k < nthreads; ++k) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    return rows;
}

} // namespace lcnls
