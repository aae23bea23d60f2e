#include "lcnls/envelope.hpp"
#include "lcnls/band.hpp"
#include "lcnls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace lcnls {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double s : v) m = std::max(m, std::abs(s));
    return m;
}

std::vector<double> symmetric_abscissae(double half_width, double h) {
    if (half_width <= 0.0 || h <= 0.0)
        throw std::invalid_argument("envelope grid: half_width and h must be positive");
    const int m = static_cast<int>(std::lround(2.0 * half_width / h));
    std::vector<double> x(m + 1);
    for (int i = 0; i <= m; ++i) x[i] = -half_width + i * (2.0 * half_width / m);
    return x;
}

double require_decay_rate(double kappa, const char* who) {
    if (kappa >= 0.0)
        throw UnboundState(std::string(who) + ": n + c^2/4 = " + std::to_string(kappa) +
                           " >= 0, no decaying envelope exists");
    return std::sqrt(-kappa);
}

} // namespace

double EnvelopePair::max_psi() const { return max_abs(a_psi); }
double EnvelopePair::max_phi() const { return max_abs(a_phi); }

double EnvelopePair::polarization_angle() const {
    return std::atan2(max_phi(), max_psi());
}

EnvelopePair circular_envelope(const EnvelopeParams& params, double half_width, double h) {
    if (params.n_psi != params.n_phi)
        throw std::invalid_argument("circular_envelope: requires n_psi == n_phi");
    if (params.alpha1 <= 0.0)
        throw std::invalid_argument("circular_envelope: alpha1 must be positive");
    const double b = require_decay_rate(params.kappa_psi(), "circular_envelope");
    const double a = b / std::sqrt(params.alpha1);

    EnvelopePair pair;
    pair.x = symmetric_abscissae(half_width, h);
    pair.a_psi.resize(pair.x.size());
    for (size_t i = 0; i < pair.x.size(); ++i) pair.a_psi[i] = a / std::cosh(b * pair.x[i]);
    pair.a_phi = pair.a_psi;
    return pair;
}

EnvelopePair linear_envelope(double n, double c, double alpha1, double half_width, double h) {
    if (alpha1 <= 0.0)
        throw std::invalid_argument("linear_envelope: alpha1 must be positive");
    const double b = require_decay_rate(n + 0.25 * c * c, "linear_envelope");
    const double a = b * std::sqrt(2.0 / alpha1);

    EnvelopePair pair;
    pair.x = symmetric_abscissae(half_width, h);
    pair.a_psi.resize(pair.x.size());
    for (size_t i = 0; i < pair.x.size(); ++i) pair.a_psi[i] = a / std::cosh(b * pair.x[i]);
    pair.a_phi.assign(pair.x.size(), 0.0);
    return pair;
}

double bvp_residual(const EnvelopeParams& params, const EnvelopePair& pair) {
    const size_t n = pair.x.size();
    if (n < 3 || pair.a_psi.size() != n || pair.a_phi.size() != n)
        throw std::invalid_argument("bvp_residual: malformed envelope pair");
    const double h = pair.h();
    const double kp = params.kappa_psi(), kf = params.kappa_phi(), a1 = params.alpha1;
    double r = 0.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double u = pair.a_psi[i], v = pair.a_phi[i];
        const double q = a1 * (u * u + v * v);
        const double lu = (pair.a_psi[i - 1] - 2.0 * u + pair.a_psi[i + 1]) / (h * h);
        const double lv = (pair.a_phi[i - 1] - 2.0 * v + pair.a_phi[i + 1]) / (h * h);
        r = std::max(r, std::abs(lu + kp * u + q * u));
        r = std::max(r, std::abs(lv + kf * v + q * v));
    }
    return r;
}

EnvelopePair solve_conjugate_bvp(const EnvelopeParams& params, const Grid& grid,
                                 const EnvelopePair& guess, const NewtonOptions& opts) {
    if (params.alpha1 <= 0.0)
        throw std::invalid_argument("solve_conjugate_bvp: alpha1 must be positive");
    const double kp = params.kappa_psi(), kf = params.kappa_phi();
    require_decay_rate(kp, "solve_conjugate_bvp[psi]");
    require_decay_rate(kf, "solve_conjugate_bvp[phi]");
    if (std::abs(grid.L1 - grid.L2) > 1e-12)
        throw ConfigInvalid("solve_conjugate_bvp: grid must be symmetric (L1 == L2)");
    if (grid.m % 2 != 0)
        throw ConfigInvalid("solve_conjugate_bvp: grid needs an even cell count so a center node exists");

    const int nn = grid.nodes();
    if (static_cast<int>(guess.x.size()) != nn)
        throw ConfigInvalid("solve_conjugate_bvp: guess sampled on a different grid");
    if (guess.max_psi() + guess.max_phi() <= 0.0)
        throw std::invalid_argument("solve_conjugate_bvp: guess must be nontrivial");

    const double h = grid.h(), a1 = params.alpha1;
    const double ih2 = 1.0 / (h * h);

    // The problem is posed with symmetric boundary conditions and every
    // sought profile is even, so Newton runs on the right half-domain with a
    // ghost-node reflection at the center. This removes the translation
    // near-null mode of the full-domain Jacobian, which otherwise amplifies
    // roundoff into O(1) parasitic updates near the single-component branch.
    // The mirrored result satisfies the full-domain central-difference system
    // exactly: the reflected neighbor reproduces the ghost equation.
    const int ic = grid.m / 2;          // center node of the full grid
    const int nh = nn - ic;             // half-domain nodes, center..right end
    std::vector<double> u(nh), v(nh);
    for (int j = 0; j < nh; ++j) {
        u[j] = guess.a_psi[ic + j];
        v[j] = guess.a_phi[ic + j];
    }
    u.back() = v.back() = 0.0;

    // At exactly equal kappas the discrete system is invariant under
    // rotations of (u, v), so the Jacobian has an exact zero mode and Newton
    // would drift along the solution circle. A gauge row pins the rotation
    // phase to the guess: the dropped equation holds automatically on the
    // rotation orbit the iteration converges to.
    const bool gauge = (kp == kf);
    const double gu = guess.a_psi[ic], gv = guess.a_phi[ic];

    // Unknowns interleaved (u_j, v_j): the cross derivative sits next to the
    // diagonal and the second difference two columns out, bandwidth (2, 2).
    const int N = 2 * nh;
    BandMatrix jac(N, 2, 2);
    std::vector<cplx> rhs(N);

    double update = 0.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        jac.clear();
        for (int j = 0; j < nh; ++j) {
            const int ru = 2 * j, rv = 2 * j + 1;
            if (j == nh - 1) {
                jac.at(ru, ru) = 1.0;
                jac.at(rv, rv) = 1.0;
                rhs[ru] = -u[j];
                rhs[rv] = -v[j];
                continue;
            }
            const double q = a1 * (u[j] * u[j] + v[j] * v[j]);
            const double ul = (j == 0) ? u[1] : u[j - 1]; // reflected ghost at center
            const double vl = (j == 0) ? v[1] : v[j - 1];
            const double lu = (ul - 2.0 * u[j] + u[j + 1]) * ih2;
            const double lv = (vl - 2.0 * v[j] + v[j + 1]) * ih2;

            jac.at(ru, ru) = -2.0 * ih2 + kp + a1 * (3.0 * u[j] * u[j] + v[j] * v[j]);
            jac.at(ru, rv) = 2.0 * a1 * u[j] * v[j];
            jac.at(ru, ru + 2) = (j == 0) ? 2.0 * ih2 : ih2;
            if (j > 0) jac.at(ru, ru - 2) = ih2;
            rhs[ru] = -(lu + kp * u[j] + q * u[j]);

            if (j == 0 && gauge) {
                jac.at(rv, ru) = gv;
                jac.at(rv, rv) = -gu;
                rhs[rv] = -(gv * u[0] - gu * v[0]);
            } else {
                jac.at(rv, rv) = -2.0 * ih2 + kf + a1 * (3.0 * v[j] * v[j] + u[j] * u[j]);
                jac.at(rv, ru) = 2.0 * a1 * u[j] * v[j];
                jac.at(rv, rv + 2) = (j == 0) ? 2.0 * ih2 : ih2;
                if (j > 0) jac.at(rv, rv - 2) = ih2;
                rhs[rv] = -(lv + kf * v[j] + q * v[j]);
            }
        }
        // Near-singular Jacobians still occur legitimately next to branch
        // ends, so the singularity guard sits far below the generic default.
        std::vector<cplx> step = factor(jac, 1e-18).solve(rhs);
        update = 0.0;
        for (int j = 0; j < nh; ++j) {
            u[j] += step[2 * j].real();
            v[j] += step[2 * j + 1].real();
            update = std::max(update, std::abs(step[2 * j]));
            update = std::max(update, std::abs(step[2 * j + 1]));
        }
        if (update <= opts.update_tol) { converged = true; break; }
    }
    if (!converged)
        throw NewtonDiverged("solve_conjugate_bvp: update " + std::to_string(update) +
                             " after " + std::to_string(opts.max_iter) + " iterations");

    const double mu = max_abs(u), mv = max_abs(v);
    if (std::max(mu, mv) < 1e-3)
        throw TrivialBranch("solve_conjugate_bvp: converged to max amplitude " +
                            std::to_string(std::max(mu, mv)));

    // snap a dust component to the exact zero branch
    if (mu < 1e-8 * mv) std::fill(u.begin(), u.end(), 0.0);
    if (mv < 1e-8 * mu) std::fill(v.begin(), v.end(), 0.0);

    EnvelopePair out;
    out.x = guess.x;
    out.a_psi.resize(nn);
    out.a_phi.resize(nn);
    for (int j = 0; j < nh; ++j) {
        out.a_psi[ic + j] = u[j];
        out.a_psi[ic - j] = u[j];
        out.a_phi[ic + j] = v[j];
        out.a_phi[ic - j] = v[j];
    }
    return out;
}

EnvelopePair continuation_guess(const EnvelopeParams& /*params_from*/,
                                const EnvelopePair& solution_from,
                                const EnvelopeParams& /*params_to*/) {
    return solution_from;
}

EnvelopePair elliptic_envelope(const EnvelopeParams& params, const Grid& grid,
                               double max_step, const NewtonOptions& opts) {
    if (max_step <= 0.0)
        throw std::invalid_argument("elliptic_envelope: max_step must be positive");

    EnvelopeParams at{params.n_phi, params.n_phi, params.c, params.alpha1};
    EnvelopePair sol = solve_conjugate_bvp(
        at, grid, circular_envelope(at, grid.L2, grid.h()), opts);

    const double span = params.n_psi - params.n_phi;
    if (span == 0.0) return sol;

    // March n_psi from the equal-rate start toward the target, bisecting the
    // step when Newton fails. Steps shrink through the stiff stretch where
    // one component drains away and grow back afterwards.
    const double dir = (span > 0.0) ? 1.0 : -1.0;
    const double floor_step = std::abs(span) * 1e-4;
    double step = std::min(max_step, std::abs(span));
    while (at.n_psi != params.n_psi) {
        double next_n = at.n_psi + dir * step;
        if (dir * (next_n - params.n_psi) >= 0.0) next_n = params.n_psi;
        EnvelopeParams next{next_n, params.n_phi, params.c, params.alpha1};
        try {
            EnvelopePair cand =
                solve_conjugate_bvp(next, grid, continuation_guess(at, sol, next), opts);
            sol = std::move(cand);
            at = next;
            step = std::min(step * 1.5, max_step);
        } catch (const Error&) {
            step *= 0.5;
            if (step < floor_step) throw;
        }
    }
    return sol;
}

void validate_envelope_pair(const EnvelopePair& pair, double decay_tol, double sym_tol) {
    const size_t n = pair.x.size();
    if (n < 3 || pair.a_psi.size() != n || pair.a_phi.size() != n)
        throw ConfigInvalid("envelope pair: array lengths disagree");

    const double scale = std::max(pair.max_psi(), pair.max_phi());
    if (scale <= 0.0)
        throw ConfigInvalid("envelope pair: both components are identically zero");

    for (const auto* comp : {&pair.a_psi, &pair.a_phi}) {
        if (std::abs(comp->front()) > decay_tol || std::abs(comp->back()) > decay_tol)
            throw ConfigInvalid("envelope pair: profile does not decay below tolerance at the ends");
        for (double s : *comp)
            if (s < -1e-12 * scale)
                throw ConfigInvalid("envelope pair: negative sample beyond roundoff");
        for (size_t i = 0; i < n / 2; ++i)
            if (std::abs((*comp)[i] - (*comp)[n - 1 - i]) > sym_tol)
                throw ConfigInvalid("envelope pair: even symmetry violated");
    }
}

void write_envelope_csv(const EnvelopePair& pair, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_envelope_csv: cannot open " + path);
    std::fprintf(f, "x,a_psi,a_phi\n");
    for (size_t i = 0; i < pair.x.size(); ++i)
        std::fprintf(f, "%.12g,%.12g,%.12g\n", pair.x[i], pair.a_psi[i], pair.a_phi[i]);
    std::fclose(f);
}

} // namespace lcnls
