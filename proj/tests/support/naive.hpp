#pragma once

// Literal reference implementation of the game algorithms on explicit
// structures. Slow; independent of the engine's relative encoding.

#include "linmso/logic.hpp"
#include "linmso/structure.hpp"

#include <string>
#include <vector>

namespace linmso::naive {

struct NGame {
    enum Kind { Node, Top, Bottom } kind = Node;
    int phi = -1;
    Structure H;
    ObjectSet X;
    std::vector<NGame> kids;

    static NGame top() { return {Top, -1, {}, {}, {}}; }
    static NGame bottom() { return {Bottom, -1, {}, {}, {}}; }
    bool sentinel() const { return kind != Node; }
};

// 1 true, 0 false, -1 undetermined.
int literal(const Formula& f, int phi, const Structure& h);

NGame emc(const Formula& f, const Structure& a, const ObjectSet& x, int phi, bool nil_moves = true);
NGame eval(const Formula& f, const NGame& g);
NGame reduce(const Formula& f, const NGame& g);
NGame convert(const NGame& g);
NGame combine(const Formula& f, const NGame& g1, const NGame& g2);
NGame forget(const Formula& f, const NGame& g, Object x);

// Same format as linmso::canonical_key.
std::string key(const NGame& g);

} // namespace linmso::naive
