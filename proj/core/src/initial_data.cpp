#include "lcnls/initial_data.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "lcnls/errors.hpp"

namespace lcnls {

namespace {

constexpr double kTailFloor = 1e-6;

double total_amplitude(const FieldState& s, int i) {
    return std::abs(s.psi[i]) + std::abs(s.phi[i]);
}

} // namespace

FieldState assemble_soliton(const EnvelopePair& envelope, const SolitonSpec& spec,
                            const Grid& grid) {
    const size_t ne = envelope.x.size();
    if (ne < 2 || envelope.a_psi.size() != ne || envelope.a_phi.size() != ne)
        throw ConfigInvalid("assemble_soliton: envelope arrays malformed");

    const double h = grid.h();
    if (std::abs(envelope.h() - h) > 1e-12 * h)
        throw ConfigInvalid("assemble_soliton: envelope spacing differs from grid spacing");

    // Envelope sample j lands at grid index off + j after the shift by X.
    const double off_real = (envelope.x.front() + spec.X + grid.L1) / h;
    const long off = std::lround(off_real);
    if (std::abs(off_real - static_cast<double>(off)) > 1e-6)
        throw ConfigInvalid("assemble_soliton: X = " + std::to_string(spec.X) +
                            " does not land on a grid node");

    const int nn = grid.nodes();
    FieldState out;
    out.time = 0.0;
    out.psi.assign(nn, cplx(0.0, 0.0));
    out.phi.assign(nn, cplx(0.0, 0.0));

    for (size_t j = 0; j < ne; ++j) {
        const long i = off + static_cast<long>(j);
        if (i < 0 || i >= nn) {
            if (std::abs(envelope.a_psi[j]) > kTailFloor ||
                std::abs(envelope.a_phi[j]) > kTailFloor)
                throw ShiftOutOfDomain(
                    "assemble_soliton: envelope amplitude " +
                    std::to_string(std::max(std::abs(envelope.a_psi[j]),
                                            std::abs(envelope.a_phi[j]))) +
                    " would be dropped outside the grid (X = " +
                    std::to_string(spec.X) + ")");
            continue;
        }
        const double xi = grid.x(static_cast<int>(i)) - spec.X;
        const double base = -0.5 * spec.c * xi;
        out.psi[i] = envelope.a_psi[j] * std::polar(1.0, base + spec.delta_psi);
        out.phi[i] = envelope.a_phi[j] * std::polar(1.0, base + spec.delta_phi);
    }
    return out;
}

FieldState superpose(const std::vector<FieldState>& states, const Grid& grid) {
    if (states.empty())
        throw ConfigInvalid("superpose: no states given");

    const int nn = grid.nodes();
    for (const FieldState& s : states)
        if (static_cast<int>(s.psi.size()) != nn || static_cast<int>(s.phi.size()) != nn)
            throw DimensionMismatch("superpose: state not sampled on the given grid");

    // Pairwise separation gate: the cross integral of total amplitudes is the
    // quantity that controls the spurious interference terms in the invariants.
    const double h = grid.h();
    for (size_t a = 0; a + 1 < states.size(); ++a)
        for (size_t b = a + 1; b < states.size(); ++b) {
            double cross = 0.0;
            for (int i = 0; i < nn; ++i)
                cross += total_amplitude(states[a], i) * total_amplitude(states[b], i);
            cross *= h;
            if (cross > kTailFloor)
                throw OverlapTooLarge("superpose: envelope cross integral " +
                                      std::to_string(cross) + " exceeds 1e-6");
        }

    FieldState out = states.front();
    for (size_t a = 1; a < states.size(); ++a)
        for (int i = 0; i < nn; ++i) {
            out.psi[i] += states[a].psi[i];
            out.phi[i] += states[a].phi[i];
        }
    return out;
}

} // namespace lcnls
