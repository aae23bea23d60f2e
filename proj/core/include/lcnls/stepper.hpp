#pragma once

// Conservative implicit time stepping for the linearly coupled system
//
//   i psi_t = beta psi_xx + alpha1 (|psi|^2 + |phi|^2) psi - gamma phi
//   i phi_t = beta phi_xx + alpha1 (|psi|^2 + |phi|^2) phi - gamma psi
//
// discretized by the Crank-Nicolson-type scheme whose nonlinear terms average
// the old and new time levels. Each step solves the nonlinear system by inner
// iterations that linearize the modulus products against the previous iterate;
// the converged iterate satisfies the exact nonlinear scheme, which is what
// makes the discrete mass, momentum and energy sums time invariants.

#include <complex>

#include "lcnls/model.hpp"

namespace lcnls {

// How the gamma coupling is treated inside one inner iteration.
//
// Coupled: both components advance together; unknowns interleave as
// (psi_0, phi_0, psi_1, phi_1, ...) giving one complex five-diagonal system.
// Lagged: the other component is frozen at the previous iterate, decoupling
// the iteration into two tridiagonal solves. Both variants share the same
// fixed point and must agree at matched tolerances.
enum class CouplingMode { Coupled, Lagged };

struct IterationControl {
    double update_tol = 1e-12;   // stop when successive iterates differ less
    double residual_tol = 1e-12; // converged step must satisfy the scheme this well
    int max_iter = 30;           // exceeding this signals a too-large time step
    CouplingMode mode = CouplingMode::Coupled;
};

struct IterationReport {
    int iterations = 0;
    double update_norm = 0.0;
    double residual = 0.0;
};

// Max-norm residual of the full nonlinear scheme between two consecutive
// states, evaluated over interior nodes in the time-step-scaled form
// | i(psi' - psi) - r(d2 psi' + d2 psi) - (dt a1/4)(I' + I)(psi' + psi)
//   + (dt gamma/2)(phi' + phi) |  with r = beta dt / (2 h^2).
double scheme_residual(const FieldState& old_state, const FieldState& new_state,
                       const ModelParams& params, const Grid& grid);

// Advances states by one time step each call. Keeping one Stepper alive
// across a run enables the linear predictor (extrapolating the previous step),
// which typically saves one inner iteration per step.
class Stepper {
public:
    Stepper(const ModelParams& params, const Grid& grid,
            const IterationControl& ctrl = {});

    // Returns the state at time + dtau. Throws InnerIterationDiverged when
    // the inner iteration fails to meet both tolerances within the cap.
    FieldState step(const FieldState& state, IterationReport* report = nullptr);

    const IterationControl& control() const { return ctrl_; }

private:
    FieldState step_coupled(const FieldState& state, IterationReport& rep);
    FieldState step_lagged(const FieldState& state, IterationReport& rep);

    ModelParams params_;
    Grid grid_;
    IterationControl ctrl_;

    // predictor history: the input of the previous step and the time its
    // output corresponds to, so a fresh or out-of-sequence state falls back
    // to the plain copy predictor
    std::vector<cplx> prev_psi_, prev_phi_;
    double prev_out_time_ = 0.0;
    bool have_prev_ = false;
};

// One-shot convenience wrapper (no predictor history).
FieldState step(const FieldState& state, const ModelParams& params, const Grid& grid,
                const IterationControl& ctrl = {}, IterationReport* report = nullptr);

// Exact map between a Manakov-type solution pair (gamma absent) and the
// linearly coupled system at time t:
//   psi = Psi cos(gamma t) + i Phi sin(gamma t)
//   phi = Phi cos(gamma t) + i Psi sin(gamma t)
// At t = 0 this is the identity. It supplies closed-form reference solutions:
// equal components reduce to the phase factor e^{i gamma t}, a vanishing
// second component yields the mass-exchange (breathing) solution.
FieldState manakov_to_linear(const FieldState& manakov, double t, cplx gamma);

} // namespace lcnls
