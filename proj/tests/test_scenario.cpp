#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcnls/errors.hpp"
#include "lcnls/scenario.hpp"

using namespace lcnls;

namespace {

constexpr double kPi = 3.14159265358979323846;

// compact two-soliton setup for fast end-to-end runs: coarser grid, short
// horizon, same physics as the full preset
ScenarioConfig quick_pair() {
    ScenarioConfig cfg = preset_config("circular_headon");
    cfg.grid = Grid{60.0, 60.0, 1200, 0.02};
    cfg.t_final = 0.5;
    cfg.output.series_every = 5;
    cfg.preset.clear();
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& leaf)
        : path(std::filesystem::temp_directory_path() / leaf) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("presets carry the published scenario parameters") {
    const ScenarioConfig c = preset_config("circular_headon");
    CHECK(c.model.alpha1 == 0.75);
    CHECK(c.model.gamma == cplx(0.175, 0.0));
    CHECK(c.grid.L1 == 60.0);
    CHECK(c.grid.L2 == 60.0);
    CHECK(c.grid.m == 2400);
    CHECK(c.grid.dtau == 0.01);
    CHECK(c.t_final == 60.0);
    REQUIRE(c.solitons.size() == 2);
    CHECK(c.solitons[0].spec.X == -40.0);
    CHECK(c.solitons[0].spec.c == 1.0);
    CHECK(c.solitons[0].spec.n_psi == -1.5);
    CHECK(c.solitons[1].spec.X == 40.0);
    CHECK(c.solitons[1].spec.c == -1.0);
    CHECK(c.solitons[0].family == SolitonFamily::Circular);

    const ScenarioConfig e = preset_config("elliptic_headon");
    CHECK(e.solitons[0].spec.n_psi == -1.1);
    CHECK(e.solitons[0].spec.n_phi == -1.5);
    CHECK(e.solitons[0].family == SolitonFamily::Elliptic);

    const ScenarioConfig t = preset_config("elliptic_takeover");
    CHECK(t.solitons[0].spec.X == -20.0);
    CHECK(t.solitons[0].spec.c == 1.0);
    CHECK(t.solitons[1].spec.X == 0.0);
    CHECK(t.solitons[1].spec.c == 0.8);
    CHECK(t.grid.L2 == 120.0);
    CHECK(t.t_final == 120.0);

    CHECK(preset_names().size() == 3);
    CHECK_THROWS_AS(preset_config("no_such_preset"), ConfigInvalid);
}

TEST_CASE("config round-trips through the manifest format") {
    ScenarioConfig cfg = preset_config("elliptic_takeover");
    cfg.output.snapshot_times = {0.0, 30.0, 120.0};
    cfg.ctrl.mode = CouplingMode::Lagged;
    apply_phase_difference(cfg, 90.0);

    const std::string text = format_manifest(cfg);
    std::istringstream in(text);
    const ScenarioConfig back = parse_config(in);
    CHECK(format_manifest(back) == text);
    CHECK(back.solitons[1].spec.delta_psi ==
          doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(back.ctrl.mode == CouplingMode::Lagged);
}

TEST_CASE("config parsing is strict about keys and values") {
    SUBCASE("unknown keys are named in the error") {
        std::istringstream in("grid.spacing = 0.05\n");
        try {
            parse_config(in);
            FAIL("expected ConfigInvalid");
        } catch (const ConfigInvalid& e) {
            CHECK(std::string(e.what()).find("grid.spacing") != std::string::npos);
        }
    }
    SUBCASE("non-numeric values are rejected") {
        std::istringstream in("grid.m = many\n");
        CHECK_THROWS_AS(parse_config(in), ConfigInvalid);
    }
    SUBCASE("a third soliton is rejected") {
        std::istringstream in("soliton3.X = 0\n");
        CHECK_THROWS_AS(parse_config(in), ConfigInvalid);
    }
    SUBCASE("comments and info keys are ignored") {
        std::istringstream in("# comment line\ninfo.preset = whatever\ngrid.m = 600\n");
        CHECK(parse_config(in).grid.m == 600);
    }
    SUBCASE("phases are written in degrees") {
        std::istringstream in("soliton1.delta_phi_deg = 180\n");
        CHECK(parse_config(in).solitons[0].spec.delta_phi ==
              doctest::Approx(kPi).epsilon(1e-12));
    }
}

TEST_CASE("validation rejects inconsistent scenarios") {
    ScenarioConfig cfg = quick_pair();
    CHECK_NOTHROW(validate_config(cfg));

    SUBCASE("no solitons") {
        cfg.solitons.clear();
        CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
    }
    SUBCASE("final time between steps") {
        cfg.t_final = 0.503;
        CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
    }
    SUBCASE("center outside the box") {
        cfg.solitons[0].spec.X = -80.0;
        CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
    }
    SUBCASE("snapshot beyond the horizon") {
        cfg.output.snapshot_times = {2.0};
        CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
    }
    SUBCASE("circular family with split frequencies") {
        cfg.solitons[0].spec.n_psi = -1.2;
        CHECK_THROWS_AS(validate_config(cfg), ConfigInvalid);
    }
}

TEST_CASE("phase differences go to the rightmost soliton") {
    ScenarioConfig cfg = quick_pair();
    apply_phase_difference(cfg, 90.0);
    CHECK(cfg.solitons[0].spec.delta_psi == 0.0);
    CHECK(cfg.solitons[1].spec.delta_psi == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(cfg.solitons[1].spec.delta_phi == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(cfg.phase_diff_deg == 90.0);
}

TEST_CASE("a short two-soliton run produces a consistent series and summary") {
    const RunArtifacts art = run_scenario(quick_pair());

    // rows at t = 0 and every 5 steps of the 25-step run
    CHECK(art.series.size() == 6);
    CHECK(art.series.front().t == 0.0);
    CHECK(art.series.back().t == doctest::Approx(0.5));

    CHECK(art.summary.initial.mass == doctest::Approx(5.96285).epsilon(1e-4));
    CHECK(art.summary.drift_mass < 1e-12);
    CHECK(art.summary.drift_energy < 1e-10);
    CHECK(art.summary.median_iterations <= 6);
    CHECK(art.summary.wall_seconds > 0.0);

    for (const SeriesRow& r : art.series) {
        CHECK(r.theta_total == doctest::Approx(45.0).epsilon(1e-9));
        CHECK(r.mass == doctest::Approx(5.96285).epsilon(1e-4));
    }
    // both centers tracked, no merge at this separation
    CHECK(art.series.back().x_left == doctest::Approx(-39.5).epsilon(0.02));
    CHECK(art.series.back().x_right == doctest::Approx(39.5).epsilon(0.02));
}

TEST_CASE("artifacts rerun bit-identically from their own manifest") {
    TempDir d1("lcnls_rerun_a"), d2("lcnls_rerun_b");
    ScenarioConfig cfg = quick_pair();
    cfg.output.snapshot_times = {0.25};
    cfg.output.out_dir = d1.path.string();

    const RunArtifacts first = run_scenario(cfg);
    REQUIRE(std::filesystem::exists(d1.path / "series.csv"));
    REQUIRE(std::filesystem::exists(d1.path / "snapshot_t0p25.csv"));
    REQUIRE(std::filesystem::exists(d1.path / "summary.txt"));
    REQUIRE(std::filesystem::exists(d1.path / "manifest.txt"));
    CHECK(first.written.size() == 4);

    ScenarioConfig reloaded = load_config((d1.path / "manifest.txt").string());
    reloaded.output.snapshot_times = {0.25};
    reloaded.output.out_dir = d2.path.string();
    run_scenario(reloaded);

    CHECK(slurp((d1.path / "series.csv").string()) ==
          slurp((d2.path / "series.csv").string()));
    CHECK(slurp((d1.path / "snapshot_t0p25.csv").string()) ==
          slurp((d2.path / "snapshot_t0p25.csv").string()));
}

TEST_CASE("refinement study halves the error at second order") {
    ScenarioConfig cfg;
    cfg.model.alpha1 = 0.75;
    cfg.model.gamma = cplx(0.175, 0.0);
    cfg.grid = Grid{30.0, 30.0, 300, 0.04};
    cfg.t_final = 4.0;
    SolitonSetup s;
    s.family = SolitonFamily::Circular;
    s.spec.n_psi = s.spec.n_phi = -1.5;
    s.spec.X = -5.0;
    s.spec.c = 0.5;
    cfg.solitons = {s};

    const auto rows = run_refinement_study(cfg, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].h == doctest::Approx(0.2));
    CHECK(rows[1].h == doctest::Approx(0.1));
    CHECK(rows[1].dtau == doctest::Approx(0.02));
    CHECK(std::isnan(rows[0].order));
    for (size_t j = 1; j < rows.size(); ++j) {
        CHECK(rows[j].error < rows[j - 1].error);
        CHECK(rows[j].order > 1.5);
        CHECK(rows[j].order < 2.5);
    }
}

TEST_CASE("refinement requires a closed-form reference") {
    SUBCASE("two solitons have none") {
        CHECK_THROWS_AS(run_refinement_study(quick_pair(), 3), OracleUnavailable);
    }
    SUBCASE("elliptic profiles have none") {
        ScenarioConfig cfg = quick_pair();
        cfg.solitons.pop_back();
        cfg.solitons[0].family = SolitonFamily::Elliptic;
        cfg.solitons[0].spec.n_psi = -1.1;
        CHECK_THROWS_AS(run_refinement_study(cfg, 3), OracleUnavailable);
    }
    SUBCASE("fewer than three levels is not a study") {
        ScenarioConfig cfg = quick_pair();
        cfg.solitons.pop_back();
        CHECK_THROWS_AS(run_refinement_study(cfg, 2), ConfigInvalid);
    }
}

TEST_CASE("phase sweep rows come back in input order with stable values") {
    ScenarioConfig cfg = quick_pair();
    cfg.t_final = 0.1;

    const auto fwd = run_phase_sweep(cfg, {0.0, 90.0, 180.0});
    const auto rev = run_phase_sweep(cfg, {180.0, 90.0, 0.0});
    REQUIRE(fwd.size() == 3);
    REQUIRE(rev.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(fwd[k].ok);
        CHECK(fwd[k].delta_deg == doctest::Approx(rev[2 - k].delta_deg));
        CHECK(fwd[k].energy == doctest::Approx(rev[2 - k].energy).epsilon(1e-14));
        CHECK(fwd[k].mass == doctest::Approx(rev[2 - k].mass).epsilon(1e-14));
    }
}

TEST_CASE("sweep failures are marked per row, not thrown") {
    ScenarioConfig cfg = quick_pair();
    cfg.model.beta = 2.0; // passes validation, envelope generation refuses it
    const auto rows = run_phase_sweep(cfg, {0.0, 45.0});
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.error.empty());
    }
}

TEST_CASE("initial state of the takeover preset fits in its box") {
    ScenarioConfig cfg = preset_config("elliptic_takeover");
    // envelope continuation on the preset grid spacing
    const FieldState st = initial_state(cfg);
    CHECK(st.psi.size() == static_cast<size_t>(cfg.grid.nodes()));
    double m = 0.0;
    for (const cplx& v : st.psi) m = std::max(m, std::abs(v));
    for (const cplx& v : st.phi) m = std::max(m, std::abs(v));
    CHECK(m > 0.5);
}
