#pragma once

#include "homodyne/mode_algebra.hpp"
#include "homodyne/mode_state.hpp"

namespace homodyne {

// <(b^dag)^m b^n> for a single-mode Gaussian state. Expands b = mean + db and
// sums the Wick pairings of the fluctuation operators.
Complex normal_moment(const ModeState& state, int creators, int annihilators);

// Exact expectation of a normal-ordered polynomial in a product state.
// Throws StateError for unassigned modes or unphysical moments.
Complex expectation(const OperatorPoly& p, const StateAssignment& states);

// <b> of one mode; throws StateError if the mode is unassigned.
Complex mean_amplitude(const StateAssignment& states, const ModeId& mode);

}  // namespace homodyne
