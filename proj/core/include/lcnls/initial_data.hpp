#pragma once

// Initial-data assembly: carrier-modulated solitons built from stationary
// envelopes, and superposition of well-separated states.

#include <vector>

#include "lcnls/envelope.hpp"
#include "lcnls/model.hpp"

namespace lcnls {

// Places the envelope pair at spec.X and modulates it with the traveling
// carrier, chi_i = A_chi(x_i - X) * exp(i * (-(c/2) (x_i - X) + delta_chi)).
// The envelope's own x window must share the grid spacing and land on grid
// nodes after the shift; samples falling outside the grid are dropped only
// if they are below the decay floor (1e-6), otherwise ShiftOutOfDomain.
FieldState assemble_soliton(const EnvelopePair& envelope, const SolitonSpec& spec,
                            const Grid& grid);

// Pointwise sum of states on identical grids. The states must be essentially
// disjoint: the cross integral of any two total amplitudes must stay below
// 1e-6, otherwise OverlapTooLarge (the sum would not be a valid multi-soliton
// initial condition).
FieldState superpose(const std::vector<FieldState>& states, const Grid& grid);

} // namespace lcnls
