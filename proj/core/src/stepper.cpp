#include "lcnls/stepper.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "lcnls/band.hpp"
#include "lcnls/errors.hpp"

namespace lcnls {

namespace {

const cplx kI(0.0, 1.0);

void check_state(const FieldState& state, const Grid& grid, const char* where) {
    const size_t nn = static_cast<size_t>(grid.nodes());
    if (state.psi.size() != nn || state.phi.size() != nn)
        throw DimensionMismatch(std::string(where) + ": state arrays do not match the grid");
}

} // namespace

double scheme_residual(const FieldState& old_state, const FieldState& new_state,
                       const ModelParams& params, const Grid& grid) {
    check_state(old_state, grid, "scheme_residual");
    check_state(new_state, grid, "scheme_residual");

    const double h = grid.h(), dt = grid.dtau;
    const double r = params.beta * dt / (2.0 * h * h);
    const double cn = params.alpha1 * dt / 4.0;
    const cplx cg = params.gamma * (dt / 2.0);

    const auto& p0 = old_state.psi;
    const auto& f0 = old_state.phi;
    const auto& p1 = new_state.psi;
    const auto& f1 = new_state.phi;

    double worst = 0.0;
    for (int i = 1; i + 1 < grid.nodes(); ++i) {
        const double I0 = std::norm(p0[i]) + std::norm(f0[i]);
        const double I1 = std::norm(p1[i]) + std::norm(f1[i]);
        const cplx d2p = (p1[i - 1] - 2.0 * p1[i] + p1[i + 1]) +
                         (p0[i - 1] - 2.0 * p0[i] + p0[i + 1]);
        const cplx d2f = (f1[i - 1] - 2.0 * f1[i] + f1[i + 1]) +
                         (f0[i - 1] - 2.0 * f0[i] + f0[i + 1]);
        const cplx rp = kI * (p1[i] - p0[i]) - r * d2p -
                        cn * (I1 + I0) * (p1[i] + p0[i]) + cg * (f1[i] + f0[i]);
        const cplx rf = kI * (f1[i] - f0[i]) - r * d2f -
                        cn * (I1 + I0) * (f1[i] + f0[i]) + cg * (p1[i] + p0[i]);
        worst = std::max(worst, std::max(std::abs(rp), std::abs(rf)));
    }
    return worst;
}

Stepper::Stepper(const ModelParams& params, const Grid& grid, const IterationControl& ctrl)
    : params_(params), grid_(grid), ctrl_(ctrl) {
    if (ctrl_.max_iter < 1)
        throw ConfigInvalid("Stepper: iteration cap must be at least 1");
    if (!params_.conservative())
        std::cerr << "lcnls: warning: Im(gamma) != 0, the scheme's conservation "
                     "guarantees do not apply (possible gain/blow-up)\n";
}

FieldState Stepper::step(const FieldState& state, IterationReport* report) {
    check_state(state, grid_, "step");

    IterationReport rep;
    FieldState out = (ctrl_.mode == CouplingMode::Coupled) ? step_coupled(state, rep)
                                                           : step_lagged(state, rep);
    out.time = state.time + grid_.dtau;

    prev_psi_ = state.psi;
    prev_phi_ = state.phi;
    prev_out_time_ = out.time;
    have_prev_ = true;

    if (report) *report = rep;
    return out;
}

FieldState Stepper::step_coupled(const FieldState& state, IterationReport& rep) {
    const int nn = grid_.nodes();
    const double h = grid_.h(), dt = grid_.dtau;
    const double r = params_.beta * dt / (2.0 * h * h);
    const double cn = params_.alpha1 * dt / 4.0;
    const cplx cg = params_.gamma * (dt / 2.0);

    const auto& pn = state.psi;
    const auto& fn = state.phi;
    std::vector<double> In(nn);
    for (int i = 0; i < nn; ++i) In[i] = std::norm(pn[i]) + std::norm(fn[i]);

    // iterate start: linear extrapolation of the previous step when the
    // incoming state continues the same trajectory, else the state itself
    std::vector<cplx> p(pn), f(fn);
    if (have_prev_ && prev_psi_.size() == pn.size() &&
        std::abs(state.time - prev_out_time_) <= 1e-9 * std::max(1.0, dt)) {
        for (int i = 0; i < nn; ++i) {
            p[i] = 2.0 * pn[i] - prev_psi_[i];
            f[i] = 2.0 * fn[i] - prev_phi_[i];
        }
    }

    const int N = 2 * nn;
    BandMatrix mat(N, 2, 2);
    std::vector<cplx> rhs(N);

    FieldState cand;
    cand.psi.resize(nn);
    cand.phi.resize(nn);

    for (int k = 1; k <= ctrl_.max_iter; ++k) {
        mat.clear();
        for (int i = 0; i < nn; ++i) {
            const int ru = 2 * i, rv = 2 * i + 1;
            if (i == 0 || i == nn - 1) {
                mat.at(ru, ru) = 1.0;
                mat.at(rv, rv) = 1.0;
                rhs[ru] = rhs[rv] = 0.0;
                continue;
            }
            const cplx Sp = p[i] + pn[i];
            const cplx Sf = f[i] + fn[i];
            const cplx d2pn = pn[i - 1] - 2.0 * pn[i] + pn[i + 1];
            const cplx d2fn = fn[i - 1] - 2.0 * fn[i] + fn[i + 1];

            mat.at(ru, ru) = kI + 2.0 * r - cn * Sp * std::conj(p[i]);
            mat.at(ru, rv) = -cn * Sp * std::conj(f[i]) + cg;
            mat.at(ru, ru - 2) = -r;
            mat.at(ru, ru + 2) = -r;
            rhs[ru] = kI * pn[i] + r * d2pn + cn * Sp * In[i] - cg * fn[i];

            mat.at(rv, rv) = kI + 2.0 * r - cn * Sf * std::conj(f[i]);
            mat.at(rv, ru) = -cn * Sf * std::conj(p[i]) + cg;
            mat.at(rv, rv - 2) = -r;
            mat.at(rv, rv + 2) = -r;
            rhs[rv] = kI * fn[i] + r * d2fn + cn * Sf * In[i] - cg * pn[i];
        }

        std::vector<cplx> sol = factor(mat).solve(rhs);
        double update = 0.0;
        for (int i = 0; i < nn; ++i) {
            update = std::max(update, std::abs(sol[2 * i] - p[i]));
            update = std::max(update, std::abs(sol[2 * i + 1] - f[i]));
            p[i] = sol[2 * i];
            f[i] = sol[2 * i + 1];
        }
        rep.iterations = k;
        rep.update_norm = update;
        if (update <= ctrl_.update_tol) {
            cand.psi.assign(p.begin(), p.end());
            cand.phi.assign(f.begin(), f.end());
            rep.residual = scheme_residual(state, cand, params_, grid_);
            if (rep.residual <= ctrl_.residual_tol) return cand;
        }
    }
    throw InnerIterationDiverged(
        "step: no convergence in " + std::to_string(ctrl_.max_iter) +
        " inner iterations (update " + std::to_string(rep.update_norm) +
        "); the time step is likely too large");
}

FieldState Stepper::step_lagged(const FieldState& state, IterationReport& rep) {
    const int nn = grid_.nodes();
    const double h = grid_.h(), dt = grid_.dtau;
    const double r = params_.beta * dt / (2.0 * h * h);
    const double cn = params_.alpha1 * dt / 4.0;
    const cplx cg = params_.gamma * (dt / 2.0);

    const auto& pn = state.psi;
    const auto& fn = state.phi;
    std::vector<double> In(nn);
    for (int i = 0; i < nn; ++i) In[i] = std::norm(pn[i]) + std::norm(fn[i]);

    std::vector<cplx> p(pn), f(fn);
    if (have_prev_ && prev_psi_.size() == pn.size() &&
        std::abs(state.time - prev_out_time_) <= 1e-9 * std::max(1.0, dt)) {
        for (int i = 0; i < nn; ++i) {
            p[i] = 2.0 * pn[i] - prev_psi_[i];
            f[i] = 2.0 * fn[i] - prev_phi_[i];
        }
    }

    BandMatrix mp(nn, 1, 1), mf(nn, 1, 1);
    std::vector<cplx> rp(nn), rf(nn);

    FieldState cand;
    cand.psi.resize(nn);
    cand.phi.resize(nn);

    for (int k = 1; k <= ctrl_.max_iter; ++k) {
        mp.clear();
        mf.clear();
        for (int i = 0; i < nn; ++i) {
            if (i == 0 || i == nn - 1) {
                mp.at(i, i) = 1.0;
                mf.at(i, i) = 1.0;
                rp[i] = rf[i] = 0.0;
                continue;
            }
            const cplx Sp = p[i] + pn[i];
            const cplx Sf = f[i] + fn[i];
            const cplx d2pn = pn[i - 1] - 2.0 * pn[i] + pn[i + 1];
            const cplx d2fn = fn[i - 1] - 2.0 * fn[i] + fn[i + 1];

            // the partner component is frozen at the current iterate: its
            // nonlinear contribution and the gamma coupling go to the right side
            mp.at(i, i) = kI + 2.0 * r - cn * Sp * std::conj(p[i]);
            mp.at(i, i - 1) = -r;
            mp.at(i, i + 1) = -r;
            rp[i] = kI * pn[i] + r * d2pn + cn * Sp * (In[i] + std::norm(f[i])) -
                    cg * (f[i] + fn[i]);

            mf.at(i, i) = kI + 2.0 * r - cn * Sf * std::conj(f[i]);
            mf.at(i, i - 1) = -r;
            mf.at(i, i + 1) = -r;
            rf[i] = kI * fn[i] + r * d2fn + cn * Sf * (In[i] + std::norm(p[i])) -
                    cg * (p[i] + pn[i]);
        }

        std::vector<cplx> sp = factor(mp).solve(rp);
        std::vector<cplx> sf = factor(mf).solve(rf);
        double update = 0.0;
        for (int i = 0; i < nn; ++i) {
            update = std::max(update, std::abs(sp[i] - p[i]));
            update = std::max(update, std::abs(sf[i] - f[i]));
        }
        p.swap(sp);
        f.swap(sf);
        rep.iterations = k;
        rep.update_norm = update;
        if (update <= ctrl_.update_tol) {
            cand.psi.assign(p.begin(), p.end());
            cand.phi.assign(f.begin(), f.end());
            rep.residual = scheme_residual(state, cand, params_, grid_);
            if (rep.residual <= ctrl_.residual_tol) return cand;
        }
    }
    throw InnerIterationDiverged(
        "step: no convergence in " + std::to_string(ctrl_.max_iter) +
        " inner iterations (update " + std::to_string(rep.update_norm) +
        "); the time step is likely too large");
}

FieldState step(const FieldState& state, const ModelParams& params, const Grid& grid,
                const IterationControl& ctrl, IterationReport* report) {
    Stepper s(params, grid, ctrl);
    return s.step(state, report);
}

FieldState manakov_to_linear(const FieldState& manakov, double t, cplx gamma) {
    const cplx ct = std::cos(gamma * t);
    const cplx st = std::sin(gamma * t);
    FieldState out;
    out.time = t;
    const size_t nn = manakov.psi.size();
    out.psi.resize(nn);
    out.phi.resize(nn);
    for (size_t i = 0; i < nn; ++i) {
        out.psi[i] = ct * manakov.psi[i] + kI * st * manakov.phi[i];
        out.phi[i] = ct * manakov.phi[i] + kI * st * manakov.psi[i];
    }
    return out;
}

} // namespace lcnls
