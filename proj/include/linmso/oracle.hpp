#pragma once

// Brute-force reference semantics. Shares no code with the game engine.

#include "linmso/solver.hpp"
#include "linmso/structure.hpp"

namespace linmso {

// Classical truth of the formula (any negation form). Every nullary symbol
// occurring free must be interpreted.
bool brute_force_mc(const Structure& a, const Formula& f);

// Exhaustive minimum over all interpretations of the free symbols.
// Throws TooLargeError when (free symbols + set-quantifier nesting) * |A| > 24.
Cost brute_force_linmso(const Structure& a, const Problem& p);

} // namespace linmso
