#include "linmso/structure.hpp"

#include "linmso/errors.hpp"

#include <algorithm>
#include <sstream>

namespace linmso {

Structure::Structure(Vocabulary vocab, ObjectSet universe)
    : vocab_(std::move(vocab)), universe_(std::move(universe)) {
    for (const auto& s : vocab_.symbols()) {
        if (s.arity == 0)
            null_.emplace(s.name, std::nullopt);
        else
            rel_.emplace(s.name, std::set<Tuple>{});
    }
}

void Structure::add_object(Object a) { universe_.insert(a); }

void Structure::add_tuple(const std::string& rel, Tuple t) {
    auto it = rel_.find(rel);
    if (it == rel_.end()) throw InputError("unknown relation symbol '" + rel + "'");
    if (static_cast<int>(t.size()) != vocab_.arity_of(rel))
        throw InputError("tuple length does not match the arity of '" + rel + "'");
    for (Object a : t)
        if (!universe_.count(a))
            throw InputError("tuple entry " + std::to_string(a) + " is not in the universe");
    it->second.insert(std::move(t));
}

void Structure::set_constant(const std::string& c, std::optional<Object> v) {
    auto it = null_.find(c);
    if (it == null_.end()) throw InputError("unknown nullary symbol '" + c + "'");
    if (v && !universe_.count(*v))
        throw InputError("value of '" + c + "' is not in the universe");
    it->second = v;
}

const std::set<Tuple>& Structure::tuples(const std::string& rel) const {
    auto it = rel_.find(rel);
    if (it == rel_.end()) throw InputError("unknown relation symbol '" + rel + "'");
    return it->second;
}

bool Structure::holds(const std::string& rel, const Tuple& t) const { return tuples(rel).count(t) != 0; }

std::optional<Object> Structure::constant(const std::string& c) const {
    auto it = null_.find(c);
    if (it == null_.end()) throw InputError("unknown nullary symbol '" + c + "'");
    return it->second;
}

std::set<std::string> Structure::interpreted() const {
    std::set<std::string> out;
    for (const auto& [c, v] : null_)
        if (v) out.insert(c);
    return out;
}

bool Structure::fully_interpreted() const {
    return std::all_of(null_.begin(), null_.end(), [](const auto& kv) { return kv.second.has_value(); });
}

ObjectSet Structure::named_objects() const {
    ObjectSet out;
    for (const auto& [c, v] : null_)
        if (v) out.insert(*v);
    return out;
}

Structure graph_to_structure(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 0) throw InputError("negative vertex count");
    ObjectSet u;
    for (int v = 1; v <= n; ++v) u.insert(v);
    Structure a(Vocabulary{{"adj", 2}}, u);
    for (auto [x, y] : edges) {
        if (x < 1 || x > n || y < 1 || y > n)
            throw InputError("edge {" + std::to_string(x) + "," + std::to_string(y) +
                             "} references a vertex outside 1.." + std::to_string(n));
        a.add_tuple("adj", {x, y});
        a.add_tuple("adj", {y, x});
    }
    return a;
}

Structure induced_substructure(const Structure& a, const ObjectSet& s) {
    for (Object o : s)
        if (!a.universe().count(o))
            throw InputError("induced substructure: object " + std::to_string(o) + " not in universe");
    Structure out(a.vocabulary(), s);
    for (const auto& sym : a.vocabulary().symbols()) {
        if (sym.arity == 0) {
            auto v = a.constant(sym.name);
            if (v && s.count(*v)) out.set_constant(sym.name, v);
            continue;
        }
        for (const auto& t : a.tuples(sym.name))
            if (std::all_of(t.begin(), t.end(), [&](Object o) { return s.count(o) != 0; }))
                out.add_tuple(sym.name, t);
    }
    return out;
}

bool compatible(const Structure& a1, const Structure& a2) {
    if (!(a1.vocabulary() == a2.vocabulary())) throw InputError("compatibility check on different vocabularies");
    for (const auto& c : a1.vocabulary().nullaries()) {
        auto v1 = a1.constant(c.name), v2 = a2.constant(c.name);
        if (v1 && v2 && *v1 != *v2) return false;
    }
    ObjectSet common;
    std::set_intersection(a1.universe().begin(), a1.universe().end(), a2.universe().begin(),
                          a2.universe().end(), std::inserter(common, common.end()));
    return induced_substructure(a1, common) == induced_substructure(a2, common);
}

Structure structure_union(const Structure& a1, const Structure& a2) {
    if (!compatible(a1, a2)) throw InputError("union of incompatible structures");
    ObjectSet u = a1.universe();
    u.insert(a2.universe().begin(), a2.universe().end());
    Structure out(a1.vocabulary(), u);
    for (const auto& sym : a1.vocabulary().symbols()) {
        if (sym.arity == 0) {
            auto v = a1.constant(sym.name);
            if (!v) v = a2.constant(sym.name);
            out.set_constant(sym.name, v);
            continue;
        }
        for (const auto& t : a1.tuples(sym.name)) out.add_tuple(sym.name, t);
        for (const auto& t : a2.tuples(sym.name)) out.add_tuple(sym.name, t);
    }
    return out;
}

namespace {

Structure with_symbol(const Structure& a, const Symbol& sym) {
    if (a.vocabulary().contains(sym.name))
        throw InputError("expansion: symbol '" + sym.name + "' already in the vocabulary");
    Vocabulary v = a.vocabulary();
    v.add(sym);
    Structure out(v, a.universe());
    for (const auto& s : a.vocabulary().symbols()) {
        if (s.arity == 0)
            out.set_constant(s.name, a.constant(s.name));
        else
            for (const auto& t : a.tuples(s.name)) out.add_tuple(s.name, t);
    }
    return out;
}

} // namespace

Structure expand(const Structure& a, const std::string& set_symbol, const ObjectSet& u) {
    Structure out = with_symbol(a, {set_symbol, 1});
    for (Object o : u) out.add_tuple(set_symbol, {o});
    return out;
}

Structure expand(const Structure& a, const std::string& object_symbol, std::optional<Object> v) {
    Structure out = with_symbol(a, {object_symbol, 0});
    out.set_constant(object_symbol, v);
    return out;
}

namespace {

bool maps_relations(const Structure& h1, const Structure& h2, const std::map<Object, Object>& h) {
    for (const auto& sym : h1.vocabulary().relations()) {
        const auto& t1 = h1.tuples(sym.name);
        const auto& t2 = h2.tuples(sym.name);
        if (t1.size() != t2.size()) return false;
        Tuple img;
        for (const auto& t : t1) {
            img.clear();
            for (Object o : t) img.push_back(h.at(o));
            if (!t2.count(img)) return false;
        }
    }
    return true;
}

bool extend(const Structure& h1, const Structure& h2, const std::vector<Object>& todo, size_t k,
            std::map<Object, Object>& h, std::set<Object>& used) {
    if (k == todo.size()) return maps_relations(h1, h2, h);
    for (Object b : h2.universe()) {
        if (used.count(b)) continue;
        h[todo[k]] = b;
        used.insert(b);
        if (extend(h1, h2, todo, k + 1, h, used)) return true;
        used.erase(b);
        h.erase(todo[k]);
    }
    return false;
}

} // namespace

std::optional<std::map<Object, Object>> iso_fixing(const Structure& h1, const Structure& h2,
                                                   const ObjectSet& x) {
    if (!(h1.vocabulary() == h2.vocabulary())) return std::nullopt;
    if (h1.size() != h2.size()) return std::nullopt;
    std::map<Object, Object> h;
    std::set<Object> used;
    for (Object a : x) {
        if (!h1.universe().count(a) || !h2.universe().count(a))
            throw InputError("fixed object " + std::to_string(a) + " is not in both universes");
        h[a] = a;
        used.insert(a);
    }
    for (const auto& c : h1.vocabulary().nullaries()) {
        auto v1 = h1.constant(c.name), v2 = h2.constant(c.name);
        if (v1.has_value() != v2.has_value()) return std::nullopt;
        if (!v1) continue;
        auto it = h.find(*v1);
        if (it != h.end()) {
            if (it->second != *v2) return std::nullopt;
            continue;
        }
        if (used.count(*v2)) return std::nullopt;
        h[*v1] = *v2;
        used.insert(*v2);
    }
    std::vector<Object> todo;
    for (Object a : h1.universe())
        if (!h.count(a)) todo.push_back(a);
    if (extend(h1, h2, todo, 0, h, used)) return h;
    return std::nullopt;
}

std::string canonical_encoding(const Structure& a, const ObjectSet& x) {
    std::vector<Object> free;
    for (Object o : a.universe())
        if (!x.count(o)) free.push_back(o);
    std::vector<int> perm(free.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);

    auto label = [&](Object o) -> std::string {
        auto it = std::find(free.begin(), free.end(), o);
        if (it == free.end()) return std::to_string(o);
        return "#" + std::to_string(perm[static_cast<size_t>(it - free.begin())]);
    };

    std::string best;
    bool have = false;
    do {
        std::ostringstream os;
        os << "U";
        for (Object o : a.universe())
            if (x.count(o)) os << ' ' << o;
        os << " +" << free.size();
        for (const auto& sym : a.vocabulary().symbols()) {
            os << ';' << sym.name << ':';
            if (sym.arity == 0) {
                auto v = a.constant(sym.name);
                os << (v ? label(*v) : std::string("nil"));
                continue;
            }
            std::vector<std::string> rows;
            for (const auto& t : a.tuples(sym.name)) {
                std::string r;
                for (Object o : t) r += label(o) + ",";
                rows.push_back(r);
            }
            std::sort(rows.begin(), rows.end());
            for (const auto& r : rows) os << '(' << r << ')';
        }
        std::string s = os.str();
        if (!have || s < best) {
            best = std::move(s);
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::string to_string(const Structure& a) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (Object o : a.universe()) {
        if (!first) os << ',';
        os << o;
        first = false;
    }
    os << '}';
    for (const auto& sym : a.vocabulary().symbols()) {
        os << ' ' << sym.name;
        if (sym.arity == 0) {
            auto v = a.constant(sym.name);
            os << '=' << (v ? std::to_string(*v) : std::string("nil"));
            continue;
        }
        os << "={";
        bool ft = true;
        for (const auto& t : a.tuples(sym.name)) {
            if (!ft) os << ',';
            ft = false;
            os << '(';
            for (size_t k = 0; k < t.size(); ++k) os << (k ? "," : "") << t[k];
            os << ')';
        }
        os << '}';
    }
    return os.str();
}

Graph parse_gr(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Graph g;
    bool header = false;
    int expected = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first == "c") continue;
        if (first == "p") {
            std::string tw;
            if (header || !(ls >> tw >> g.n >> expected) || tw != "tw" || g.n < 0 || expected < 0)
                throw ParseError("malformed .gr header", lineno, 1);
            header = true;
            continue;
        }
        if (!header) throw ParseError("edge line before 'p tw' header", lineno, 1);
        int u, v;
        std::string rest;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw ParseError("malformed edge line", lineno, 1);
        }
        if (!(ls >> v) || (ls >> rest)) throw ParseError("malformed edge line", lineno, 1);
        if (u < 1 || u > g.n || v < 1 || v > g.n)
            throw ParseError("edge endpoint out of range", lineno, 1);
        g.edges.emplace_back(u, v);
    }
    if (!header) throw ParseError("missing 'p tw' header", std::max(lineno, 1), 1);
    if (static_cast<int>(g.edges.size()) != expected)
        throw ParseError("header announces " + std::to_string(expected) + " edges, found " +
                             std::to_string(g.edges.size()),
                         lineno, 1);
    return g;
}

std::string serialize_gr(const Graph& g) {
    std::ostringstream os;
    os << "p tw " << g.n << ' ' << g.edges.size() << '\n';
    for (auto [u, v] : g.edges) os << u << ' ' << v << '\n';
    return os.str();
}

} // namespace linmso
