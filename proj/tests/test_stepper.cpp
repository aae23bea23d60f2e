#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "lcnls/diagnostics.hpp"
#include "lcnls/envelope.hpp"
#include "lcnls/errors.hpp"
#include "lcnls/initial_data.hpp"
#include "lcnls/stepper.hpp"

using namespace lcnls;

namespace {

const ModelParams kModel{1.0, 0.75, cplx(0.175, 0.0)};

// compact setup: one soliton on a short symmetric grid
FieldState soliton_state(const Grid& g, double X, double c) {
    SolitonSpec s;
    s.X = X;
    s.c = c;
    s.n_psi = s.n_phi = -1.5;
    const EnvelopePair env = circular_envelope({-1.5, -1.5, c, 0.75}, 30.0, g.h());
    return assemble_soliton(env, s, g);
}

FieldState zero_state(const Grid& g) {
    FieldState st;
    st.psi.assign(g.nodes(), cplx(0.0, 0.0));
    st.phi.assign(g.nodes(), cplx(0.0, 0.0));
    return st;
}

double max_diff(const FieldState& a, const FieldState& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.psi.size(); ++i) {
        d = std::max(d, std::abs(a.psi[i] - b.psi[i]));
        d = std::max(d, std::abs(a.phi[i] - b.phi[i]));
    }
    return d;
}

} // namespace

TEST_CASE("the zero field advances in one inner iteration and stays zero") {
    const Grid g{30.0, 30.0, 600, 0.01};
    Stepper st(kModel, g);
    IterationReport rep;
    const FieldState out = st.step(zero_state(g), &rep);
    CHECK(rep.iterations == 1);
    CHECK(out.time == doctest::Approx(0.01));
    for (const cplx& v : out.psi) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("converged steps satisfy the two-level scheme to tolerance") {
    const Grid g{30.0, 30.0, 600, 0.01};
    const FieldState before = soliton_state(g, 0.0, 0.0);
    Stepper st(kModel, g);
    IterationReport rep;
    const FieldState after = st.step(before, &rep);

    CHECK(rep.iterations >= 2);
    CHECK(rep.update_norm <= 1e-12);
    CHECK(scheme_residual(before, after, kModel, g) <= 1e-12);
    // a state that never advanced is far from solving the step equations
    CHECK(scheme_residual(before, before, kModel, g) > 1e-6);
}

TEST_CASE("interleaved and component-lagged iterations land on the same step") {
    const Grid g{30.0, 30.0, 600, 0.01};
    FieldState a = soliton_state(g, -5.0, 1.0);
    FieldState b = a;

    IterationControl ctrl;
    ctrl.mode = CouplingMode::Coupled;
    Stepper coupled(kModel, g, ctrl);
    ctrl.mode = CouplingMode::Lagged;
    Stepper lagged(kModel, g, ctrl);

    for (int n = 0; n < 50; ++n) {
        a = coupled.step(a);
        b = lagged.step(b);
    }
    CHECK(max_diff(a, b) < 1e-8);
}

TEST_CASE("inner iteration counts stay small on production-like steps") {
    const Grid g{30.0, 30.0, 600, 0.01};
    FieldState st = soliton_state(g, -5.0, 1.0);
    Stepper stepper(kModel, g);
    std::vector<int> counts;
    IterationReport rep;
    for (int n = 0; n < 100; ++n) {
        st = stepper.step(st, &rep);
        counts.push_back(rep.iterations);
    }
    std::nth_element(counts.begin(), counts.begin() + counts.size() / 2, counts.end());
    CHECK(counts[counts.size() / 2] <= 6);
}

TEST_CASE("discrete mass and energy hold to roundoff over a short run") {
    const Grid g{30.0, 30.0, 600, 0.01};
    FieldState st = soliton_state(g, -5.0, 1.0);
    Stepper stepper(kModel, g);
    const InvariantTriple i0 = discrete_invariants(st, kModel, g);
    for (int n = 0; n < 200; ++n) st = stepper.step(st);
    const InvariantTriple i1 = discrete_invariants(st, kModel, g);
    CHECK(std::abs(i1.mass - i0.mass) < 1e-11 * std::abs(i0.mass));
    CHECK(std::abs(i1.energy - i0.energy) < 1e-10 * std::max(std::abs(i0.energy), 1.0));
    // the forward-product momentum of a translating profile is conserved
    // only up to an O(h^2) ripple as the peak crosses cells; it must stay
    // bounded, not vanish
    CHECK(std::abs(i1.momentum - i0.momentum) < 1e-3);
}

TEST_CASE("momentum of a parity-symmetric state is pinned to zero") {
    const Grid g{30.0, 30.0, 600, 0.01};
    FieldState st = soliton_state(g, 0.0, 0.0);
    Stepper stepper(kModel, g);
    for (int n = 0; n < 200; ++n) st = stepper.step(st);
    CHECK(std::abs(discrete_invariants(st, kModel, g).momentum) < 1e-12);
}

TEST_CASE("an oversized time step is reported instead of silently accepted") {
    const Grid g{30.0, 30.0, 600, 5.0};
    IterationControl ctrl;
    ctrl.max_iter = 8;
    Stepper st(kModel, g, ctrl);
    CHECK_THROWS_AS(st.step(soliton_state(g, 0.0, 0.0)), InnerIterationDiverged);
}

TEST_CASE("a state on the wrong grid is rejected") {
    const Grid g{30.0, 30.0, 600, 0.01};
    const Grid other{30.0, 30.0, 400, 0.01};
    Stepper st(kModel, g);
    CHECK_THROWS_AS(st.step(soliton_state(other, 0.0, 0.0)), DimensionMismatch);
}

TEST_CASE("component-mixing transform: identity, phase rotation, full exchange") {
    const Grid g{30.0, 30.0, 600, 0.01};
    const cplx gamma(0.175, 0.0);

    SUBCASE("t = 0 is the identity") {
        const FieldState st = soliton_state(g, 0.0, 0.0);
        const FieldState out = manakov_to_linear(st, 0.0, gamma);
        CHECK(max_diff(st, out) == 0.0);
    }
    SUBCASE("equal components pick up a pure phase") {
        const FieldState st = soliton_state(g, 0.0, 0.0); // psi == phi
        const double t = 3.7;
        const FieldState out = manakov_to_linear(st, t, gamma);
        const cplx rot = std::polar(1.0, 0.175 * t);
        for (size_t i = 0; i < st.psi.size(); i += 29) {
            CHECK(std::abs(out.psi[i] - rot * st.psi[i]) < 1e-14);
            CHECK(std::abs(out.phi[i] - rot * st.phi[i]) < 1e-14);
        }
    }
    SUBCASE("a quarter period moves one component onto the other") {
        FieldState st = soliton_state(g, 0.0, 0.0);
        for (cplx& v : st.phi) v = 0.0; // single-component input
        const double t = 0.5 * std::acos(-1.0) / 0.175;
        const FieldState out = manakov_to_linear(st, t, gamma);
        for (size_t i = 0; i < st.psi.size(); i += 29) {
            CHECK(std::abs(out.psi[i]) < 1e-12);
            CHECK(std::abs(out.phi[i] - cplx(0.0, 1.0) * st.psi[i]) < 1e-12);
        }
    }
    SUBCASE("a full period returns the input") {
        FieldState st = soliton_state(g, 0.0, 0.0);
        for (cplx& v : st.phi) v = 0.0;
        const double t = 2.0 * std::acos(-1.0) / 0.175;
        const FieldState out = manakov_to_linear(st, t, gamma);
        CHECK(max_diff(st, out) < 1e-12);
    }
}

TEST_CASE("the transformed single-component wave shows the predicted mass exchange") {
    // with psi = envelope wave and phi = 0 at t = 0, the psi mass follows
    // cos^2 of the coupling phase; check the quarter- and half-period marks
    const Grid g{30.0, 30.0, 600, 0.01};
    FieldState st = soliton_state(g, 0.0, 0.0);
    for (cplx& v : st.phi) v = 0.0;
    const double m0 = component_masses(st, kModel, g).first;
    const double pi = std::acos(-1.0);
    for (double frac : {0.125, 0.25, 0.5}) {
        const double t = frac * pi / 0.175;
        const auto [mp, mf] = component_masses(manakov_to_linear(st, t, kModel.gamma),
                                               kModel, g);
        const double want = m0 * std::cos(0.175 * t) * std::cos(0.175 * t);
        CHECK(mp == doctest::Approx(want).epsilon(1e-10));
        CHECK(mp + mf == doctest::Approx(m0).epsilon(1e-10));
    }
}
