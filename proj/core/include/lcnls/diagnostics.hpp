#pragma once

// Conserved functionals, scheme invariants, polarization angles, center
// tracking and breathing-period estimation.

#include <utility>
#include <vector>

#include "lcnls/model.hpp"

namespace lcnls {

struct InvariantTriple {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
};

// Quadrature (trapezoid) evaluations of the continuous functionals:
//   M = (1/2 beta) Int (|psi|^2 + |phi|^2)
//   P = -Int Im(conj(psi) psi_x + conj(phi) phi_x)    (central differences,
//       one-sided at the boundary nodes)
//   E = Int [ beta(|psi_x|^2 + |phi_x|^2) - (alpha1/2)(|psi|^2 + |phi|^2)^2
//             - 2 Re(gamma) Re(conj(psi) phi) ]
double mass(const FieldState& state, const ModelParams& params, const Grid& grid);
std::pair<double, double> component_masses(const FieldState& state,
                                           const ModelParams& params, const Grid& grid);
double momentum(const FieldState& state, const Grid& grid);
double energy(const FieldState& state, const ModelParams& params, const Grid& grid);

// The scheme's own discrete sums, h-weighted so they approximate the
// continuous functionals. These are the quantities the implicit scheme keeps
// constant to roundoff when gamma is real; the discrete energy differs from
// the continuum convention by a scheme-specific normalization.
InvariantTriple discrete_invariants(const FieldState& state, const ModelParams& params,
                                    const Grid& grid);

// Polarization angle over a spatial window: arctan(max|phi| / max|psi|) with
// the maxima taken over nodes inside [x_lo, x_hi]. Angles lie in [0, pi/2]:
// 0 and pi/2 are the linearly polarized states, pi/4 the circular one.
// Throws DegenerateWindow when both windowed maxima fall below 1e-10.
double polarization(const FieldState& state, const Grid& grid, double x_lo, double x_hi);

struct TrackRecord {
    double center_left = 0.0;
    double center_right = 0.0;
    double speed_left = 0.0;
    double speed_right = 0.0;
    bool merged = false; // windows overlapped; centers are ballistic estimates
};

// Follows one or two density centroids through a run. Each center is the
// centroid of rho = |psi|^2 + |phi|^2 over a window of half-width W around
// its previous position. When two windows meet, per-center tracking is
// suspended and the centers advance ballistically at their last fitted
// speeds until the estimates separate again, which restarts centroid
// tracking near the predicted positions. Speeds come from a least-squares
// fit over a trailing time window.
class Tracker {
public:
    // seed_speeds, when nonempty, preloads the ballistic speeds (one per
    // center, in center order). Useful when the windows already overlap at
    // the first sample, so no fitted speed exists yet.
    Tracker(const Grid& grid, std::vector<double> initial_centers,
            double half_width = 15.0, double speed_fit_window = 5.0,
            std::vector<double> seed_speeds = {});

    TrackRecord update(const FieldState& state);

    bool merged() const { return merged_; }
    int count() const { return static_cast<int>(centers_.size()); }
    // current window of center idx, clamped to the grid
    std::pair<double, double> window(int idx) const;

private:
    double centroid(const FieldState& state, double center) const;

    Grid grid_;
    std::vector<double> centers_;
    std::vector<double> speeds_;
    std::vector<std::vector<std::pair<double, double>>> history_; // (t, center)
    double half_width_;
    double fit_window_;
    double last_time_ = 0.0;
    bool started_ = false;
    bool merged_ = false;
};

// Oscillation period from the crossings of (value - mean): the period is
// twice the mean gap between consecutive crossings (linearly interpolated).
// Throws NoOscillation when the series amplitude is below 1e-6 of the mean
// level or fewer than two crossings exist.
double breathing_period(const std::vector<double>& times, const std::vector<double>& values);

} // namespace lcnls
