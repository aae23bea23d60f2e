#include "lcnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "lcnls/errors.hpp"

namespace lcnls {

namespace {

// trapezoid weights: h everywhere, halved at the two ends
double trapz(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

// first derivative samples: central inside, one-sided at the ends
std::vector<cplx> derivative(const std::vector<cplx>& f, double h) {
    const size_t n = f.size();
    std::vector<cplx> d(n);
    if (n < 2) return d;
    d[0] = (f[1] - f[0]) / h;
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for (size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

} // namespace

std::pair<double, double> component_masses(const FieldState& state,
                                           const ModelParams& params, const Grid& grid) {
    const double h = grid.h();
    const size_t n = state.psi.size();
    std::vector<double> dp(n), df(n);
    for (size_t i = 0; i < n; ++i) {
        dp[i] = std::norm(state.psi[i]);
        df[i] = std::norm(state.phi[i]);
    }
    const double w = 1.0 / (2.0 * params.beta);
    return {w * trapz(dp, h), w * trapz(df, h)};
}

double mass(const FieldState& state, const ModelParams& params, const Grid& grid) {
    auto [mp, mf] = component_masses(state, params, grid);
    return mp + mf;
}

double momentum(const FieldState& state, const Grid& grid) {
    const double h = grid.h();
    const std::vector<cplx> dp = derivative(state.psi, h);
    const std::vector<cplx> df = derivative(state.phi, h);
    const size_t n = state.psi.size();
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i)
        g[i] = std::imag(std::conj(state.psi[i]) * dp[i]) +
               std::imag(std::conj(state.phi[i]) * df[i]);
    return -trapz(g, h);
}

double energy(const FieldState& state, const ModelParams& params, const Grid& grid) {
    const double h = grid.h();
    const std::vector<cplx> dp = derivative(state.psi, h);
    const std::vector<cplx> df = derivative(state.phi, h);
    const size_t n = state.psi.size();
    std::vector<double> dens(n);
    for (size_t i = 0; i < n; ++i) {
        const double I = std::norm(state.psi[i]) + std::norm(state.phi[i]);
        dens[i] = params.beta * (std::norm(dp[i]) + std::norm(df[i])) -
                  0.5 * params.alpha1 * I * I -
                  2.0 * params.gamma.real() *
                      std::real(std::conj(state.psi[i]) * state.phi[i]);
    }
    return trapz(dens, h);
}

InvariantTriple discrete_invariants(const FieldState& state, const ModelParams& params,
                                    const Grid& grid) {
    const double h = grid.h();
    const size_t n = state.psi.size();

    InvariantTriple out;
    double msum = 0.0, psum = 0.0, grad = 0.0, point = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double I = std::norm(state.psi[i]) + std::norm(state.phi[i]);
        msum += I;
        point += 0.25 * params.alpha1 * I * I +
                 params.gamma.real() * std::real(std::conj(state.psi[i]) * state.phi[i]);
        if (i + 1 < n) {
            psum += std::imag(std::conj(state.psi[i]) * state.psi[i + 1]) +
                    std::imag(std::conj(state.phi[i]) * state.phi[i + 1]);
            grad += std::norm(state.psi[i + 1] - state.psi[i]) +
                    std::norm(state.phi[i + 1] - state.phi[i]);
        }
    }
    out.mass = h * msum / (2.0 * params.beta);
    // the forward-difference product already carries one factor of h
    out.momentum = -psum;
    out.energy = h * (point - params.beta / (2.0 * h * h) * grad);
    return out;
}

double polarization(const FieldState& state, const Grid& grid, double x_lo, double x_hi) {
    double mp = 0.0, mf = 0.0;
    bool seen = false;
    for (int i = 0; i < grid.nodes(); ++i) {
        const double x = grid.x(i);
        if (x < x_lo || x > x_hi) continue;
        seen = true;
        mp = std::max(mp, std::abs(state.psi[i]));
        mf = std::max(mf, std::abs(state.phi[i]));
    }
    if (!seen)
        throw DegenerateWindow("polarization: window [" + std::to_string(x_lo) + ", " +
                               std::to_string(x_hi) + "] contains no grid nodes");
    if (mp < 1e-10 && mf < 1e-10)
        throw DegenerateWindow("polarization: both component maxima below 1e-10");
    return std::atan2(mf, mp);
}

Tracker::Tracker(const Grid& grid, std::vector<double> initial_centers,
                 double half_width, double speed_fit_window,
                 std::vector<double> seed_speeds)
    : grid_(grid), centers_(std::move(initial_centers)), half_width_(half_width),
      fit_window_(speed_fit_window) {
    if (centers_.empty() || centers_.size() > 2)
        throw ConfigInvalid("Tracker: expects one or two centers");
    std::sort(centers_.begin(), centers_.end());
    for (double c : centers_)
        if (c < -grid_.L1 || c > grid_.L2)
            throw ConfigInvalid("Tracker: initial center outside the grid");
    if (!seed_speeds.empty() && seed_speeds.size() != centers_.size())
        throw ConfigInvalid("Tracker: seed speeds must match the center count");
    speeds_ = seed_speeds.empty() ? std::vector<double>(centers_.size(), 0.0)
                                  : std::move(seed_speeds);
    history_.resize(centers_.size());
}

std::pair<double, double> Tracker::window(int idx) const {
    const double lo = std::max(centers_[idx] - half_width_, -grid_.L1);
    const double hi = std::min(centers_[idx] + half_width_, grid_.L2);
    return {lo, hi};
}

double Tracker::centroid(const FieldState& state, double center) const {
    const double h = grid_.h();
    double m = 0.0, mx = 0.0;
    for (int i = 0; i < grid_.nodes(); ++i) {
        const double x = grid_.x(i);
        if (x < center - half_width_ || x > center + half_width_) continue;
        const double rho = std::norm(state.psi[i]) + std::norm(state.phi[i]);
        m += rho;
        mx += x * rho;
    }
    m *= h;
    mx *= h;
    if (m < 1e-6)
        throw TrackLost("track_centers: windowed density mass " + std::to_string(m) +
                        " below 1e-6 near x = " + std::to_string(center));
    return mx / m;
}

TrackRecord Tracker::update(const FieldState& state) {
    const double t = state.time;
    const double dt = started_ ? (t - last_time_) : 0.0;

    if (merged_) {
        // ballistic coasting until the predicted windows separate again
        for (size_t k = 0; k < centers_.size(); ++k) centers_[k] += speeds_[k] * dt;
        const double gap = std::abs(centers_.back() - centers_.front());
        if (gap >= 2.0 * half_width_) {
            merged_ = false;
            // the fit histories straddle the interaction; restart them clean
            for (auto& hist : history_) hist.clear();
        }
    }

    if (!merged_) {
        if (centers_.size() == 2 &&
            std::abs(centers_[1] - centers_[0]) < 2.0 * half_width_) {
            merged_ = true;
        } else {
            for (size_t k = 0; k < centers_.size(); ++k) {
                centers_[k] = centroid(state, centers_[k]);
                auto& hist = history_[k];
                hist.emplace_back(t, centers_[k]);
                while (!hist.empty() && hist.front().first < t - fit_window_)
                    hist.erase(hist.begin());
                if (hist.size() >= 2 && hist.back().first > hist.front().first) {
                    double st = 0.0, sc = 0.0;
                    for (auto& [ht, hc] : hist) { st += ht; sc += hc; }
                    st /= hist.size();
                    sc /= hist.size();
                    double num = 0.0, den = 0.0;
                    for (auto& [ht, hc] : hist) {
                        num += (ht - st) * (hc - sc);
                        den += (ht - st) * (ht - st);
                    }
                    speeds_[k] = num / den;
                }
            }
        }
    }

    last_time_ = t;
    started_ = true;

    TrackRecord rec;
    rec.merged = merged_;
    rec.center_left = centers_.front();
    rec.center_right = centers_.back();
    rec.speed_left = speeds_.front();
    rec.speed_right = speeds_.back();
    return rec;
}

double breathing_period(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 4)
        throw ConfigInvalid("breathing_period: need a time series of at least 4 samples");

    double mean = 0.0, lo = values[0], hi = values[0];
    for (double v : values) {
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    mean /= static_cast<double>(values.size());
    const double amp = 0.5 * (hi - lo);
    if (amp <= 1e-6 * std::abs(mean))
        throw NoOscillation("breathing_period: amplitude " + std::to_string(amp) +
                            " below 1e-6 of the mean level");

    std::vector<double> crossings;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i] - mean, b = values[i + 1] - mean;
        if (a == 0.0) {
            crossings.push_back(times[i]);
        } else if (a * b < 0.0) {
            crossings.push_back(times[i] + (times[i + 1] - times[i]) * a / (a - b));
        }
    }
    if (crossings.size() < 2)
        throw NoOscillation("breathing_period: fewer than two mean crossings");

    const double span = crossings.back() - crossings.front();
    return 2.0 * span / static_cast<double>(crossings.size() - 1);
}

} // namespace lcnls
