#pragma once

#include "linmso/solver.hpp"

#include <string>
#include <vector>

namespace linmso {

// "vc", "ds" or "3col".
Problem builtin(const std::string& name);
std::vector<std::string> builtin_names();

/**
 * Problem file:
 *   vocabulary adj/2;
 *   free C weight 1;
 *   objective min;
 *   formula all x. all y. (~adj(x,y) | x in C | y in C);
 * `#` starts a comment. A `max` objective negates the weights.
 */
Problem load_problem(const std::string& text, const std::string& name = "");
std::string serialize_problem(const Problem& p);

// Builtin name, or a path to a problem file.
Problem resolve_problem(const std::string& spec);

} // namespace linmso
