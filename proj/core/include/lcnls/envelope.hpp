#pragma once

#include "lcnls/model.hpp"

#include <vector>

namespace lcnls {

/// Parameters of the stationary envelope system
///   A_psi'' + (n_psi + c^2/4) A_psi + alpha1 (A_psi^2 + A_phi^2) A_psi = 0
///   A_phi'' + (n_phi + c^2/4) A_phi + alpha1 (A_psi^2 + A_phi^2) A_phi = 0
/// Decaying localized solutions require n + c^2/4 < 0 for both components.
struct EnvelopeParams {
    double n_psi;
    double n_phi;
    double c;
    double alpha1;

    double kappa_psi() const { return n_psi + 0.25 * c * c; }
    double kappa_phi() const { return n_phi + 0.25 * c * c; }
};

/// Real envelope samples for the two components on symmetric abscissae
/// centered at x = 0.
struct EnvelopePair {
    std::vector<double> x;
    std::vector<double> a_psi;
    std::vector<double> a_phi;

    double h() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
    double max_psi() const;
    double max_phi() const;
    /// arctan(max A_phi / max A_psi), radians in [0, pi/2]
    double polarization_angle() const;
};

/// Newton controls for the envelope boundary-value solve.
struct NewtonOptions {
    double update_tol = 1e-12;
    int max_iter = 50;
};

/// Closed-form circular envelope (both components equal):
///   A = (b / sqrt(alpha1)) sech(b x),  b = sqrt(-(n + c^2/4)).
/// Requires n_psi == n_phi; throws UnboundState when n + c^2/4 >= 0.
EnvelopePair circular_envelope(const EnvelopeParams& params,
                               double half_width = 30.0, double h = 0.05);

/// Closed-form single-component envelope (the second component is zero):
///   A = b sqrt(2/alpha1) sech(b x).
/// The populated component is a_psi; swap fields for a phi-only wave.
EnvelopePair linear_envelope(double n, double c, double alpha1,
                             double half_width = 30.0, double h = 0.05);

/// Solve the central-difference discretization of the envelope system with
/// homogeneous Dirichlet boundary values by Newton's method with the exact
/// analytic Jacobian (interleaved, bandwidth-2 system).
///
/// The grid must be symmetric (L1 == L2). Returns the converged nontrivial
/// discrete solution. Throws:
///   UnboundState    when either n + c^2/4 >= 0,
///   NewtonDiverged  when the update tolerance is not reached within the cap,
///   TrivialBranch   when the converged profile has max amplitude < 1e-3.
///
/// A component that collapses to numerical dust (max below 1e-8 of the other
/// component) is snapped to the exact zero branch: the zero function solves
/// its equation identically and its cross-term feedback is below roundoff.
EnvelopePair solve_conjugate_bvp(const EnvelopeParams& params, const Grid& grid,
                                 const EnvelopePair& guess,
                                 const NewtonOptions& opts = {});

/// Initial guess for a Newton solve at params_to, built from a converged
/// solution at params_from. Pure construction, never fails: the previous
/// solution itself is the guess (parameter steps of at most 0.1 keep it
/// inside the Newton basin).
EnvelopePair continuation_guess(const EnvelopeParams& params_from,
                                const EnvelopePair& solution_from,
                                const EnvelopeParams& params_to);

/// Drive a parameter continuation from the circular branch at
/// (n_phi, n_phi, c) to the requested (n_psi, n_phi, c), stepping n_psi in
/// increments of at most max_step and Newton-solving at each rung.
EnvelopePair elliptic_envelope(const EnvelopeParams& params, const Grid& grid,
                               double max_step = 0.1,
                               const NewtonOptions& opts = {});

/// Max-norm residual of the central-difference envelope equations at the
/// given samples, interior nodes only.
double bvp_residual(const EnvelopeParams& params, const EnvelopePair& pair);

/// Validate decay at the ends (<= decay_tol), even symmetry about the center
/// (<= sym_tol), non-negativity up to roundoff, and nontriviality of the
/// pair. Throws ConfigInvalid naming the failed property.
void validate_envelope_pair(const EnvelopePair& pair, double decay_tol = 1e-8,
                            double sym_tol = 1e-8);

/// Export as CSV with columns x, a_psi, a_phi.
void write_envelope_csv(const EnvelopePair& pair, const std::string& path);

} // namespace lcnls
