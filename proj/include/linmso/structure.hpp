#pragma once

#include "linmso/logic.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace linmso {

using Object = int;
using ObjectSet = std::set<Object>;
using Tuple = std::vector<Object>;

/**
 * Finite relational structure. Nullary symbols may be uninterpreted (nil),
 * represented by std::nullopt.
 */
class Structure {
public:
    Structure() = default;
    explicit Structure(Vocabulary vocab, ObjectSet universe = {});

    const Vocabulary& vocabulary() const { return vocab_; }
    const ObjectSet& universe() const { return universe_; }
    size_t size() const { return universe_.size(); }

    void add_object(Object a);
    // Adds a tuple; all entries must be in the universe.
    void add_tuple(const std::string& rel, Tuple t);
    // Sets (or clears, with nullopt) a nullary interpretation.
    void set_constant(const std::string& c, std::optional<Object> v);

    const std::set<Tuple>& tuples(const std::string& rel) const;
    bool holds(const std::string& rel, const Tuple& t) const;
    std::optional<Object> constant(const std::string& c) const;

    std::set<std::string> interpreted() const;
    bool fully_interpreted() const;
    // Values of interpreted nullaries.
    ObjectSet named_objects() const;

    bool operator==(const Structure&) const = default;

private:
    Vocabulary vocab_;
    ObjectSet universe_;
    std::map<std::string, std::set<Tuple>> rel_;
    std::map<std::string, std::optional<Object>> null_;
};

// Universe {1..n}, symmetric binary relation adj.
Structure graph_to_structure(int n, const std::vector<std::pair<int, int>>& edges);

Structure induced_substructure(const Structure& a, const ObjectSet& s);

bool compatible(const Structure& a1, const Structure& a2);

// Precondition: compatible(a1, a2).
Structure structure_union(const Structure& a1, const Structure& a2);

// Adds a unary symbol interpreted as `u`.
Structure expand(const Structure& a, const std::string& set_symbol, const ObjectSet& u);
// Adds a nullary symbol interpreted as `v` (nullopt = nil).
Structure expand(const Structure& a, const std::string& object_symbol, std::optional<Object> v);

// An isomorphism h: h1 -> h2 with h(a) = a for a in x, if one exists.
std::optional<std::map<Object, Object>> iso_fixing(const Structure& h1, const Structure& h2,
                                                   const ObjectSet& x);

// Lexicographically minimal serialisation over all bijections that fix x
// pointwise and send the remaining objects to fresh labels.
std::string canonical_encoding(const Structure& a, const ObjectSet& x);

std::string to_string(const Structure& a);

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

// PACE .gr format.
Graph parse_gr(const std::string& text);
std::string serialize_gr(const Graph& g);

} // namespace linmso
