#include "linmso/game.hpp"
#include "linmso/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace linmso {

const char* owner_name(Owner o) {
    switch (o) {
    case Owner::Falsifier: return "falsifier";
    case Owner::Verifier: return "verifier";
    case Owner::Neither: return "neither";
    }
    return "?";
}

std::unique_ptr<GameStore> make_store(const Formula& nnf, const Vocabulary& tau) {
    return std::make_unique<GameStore>(Layout(nnf, tau));
}

namespace {

Game make(GameStore& store, const Structure& a, const ObjectSet& x, int phi, bool reduced, bool nil) {
    if (phi < 0 || static_cast<size_t>(phi) >= store.layout().size()) throw InputError("subformula index out of range");
    LocalStructure ls = localize(store.layout(), a, x, phi);
    uint32_t ctx = engine::context_of(store, ls);
    return {&store, ctx, engine::build(store, ls, phi, reduced, nil)};
}

void need_node(const Game& g) {
    if (!g.store) throw InputError("game has no store");
}

} // namespace

Game emc(GameStore& store, const Structure& a, const ObjectSet& x, int phi) {
    return make(store, a, x, phi, false, true);
}

Game reduced_emc(GameStore& store, const Structure& a, const ObjectSet& x, int phi) {
    return make(store, a, x, phi, true, true);
}

Game mc(GameStore& store, const Structure& a, int phi) {
    for (const auto& c : store.layout().constants())
        if (!a.constant(c)) throw InputError("classical game needs a fully interpreted structure");
    return make(store, a, {}, phi, false, false);
}

Game eval(const Game& g) {
    need_node(g);
    return {g.store, g.ctx, engine::eval(*g.store, g.ctx, g.node)};
}

Game reduce(const Game& g) {
    need_node(g);
    return {g.store, g.ctx, engine::reduce(*g.store, g.ctx, g.node)};
}

Game convert(const Game& g) {
    need_node(g);
    uint32_t out = 0;
    NodeId n = engine::convert(*g.store, g.ctx, g.node, out);
    return {g.store, out, n};
}

Game combine(const Game& g1, const Game& g2) {
    need_node(g1);
    need_node(g2);
    if (g1.store != g2.store) throw InputError("combine: games belong to different stores");
    engine::Combiner c(*g1.store, g1.ctx, g2.ctx);
    return {g1.store, c.result_context(), c.run(g1.node, g2.node)};
}

Game forget(const Game& g, Object x) {
    need_node(g);
    const auto& X = g.store->context(g.ctx).X;
    auto it = std::lower_bound(X.begin(), X.end(), x);
    if (it == X.end() || *it != x) throw InputError("forget: object is not in X");
    engine::Forgetter f(*g.store, g.ctx, static_cast<int>(it - X.begin()));
    return {g.store, f.result_context(), f.run(g.node)};
}

Position root_position(const Game& g) {
    need_node(g);
    if (g.is_sentinel()) throw InputError("sentinel games have no root position");
    const GameStore& st = *g.store;
    const Layout& L = st.layout();
    int phi = st.phi(g.node);
    const Context& ctx = st.context(g.ctx);
    const Shape& shape = st.shape(ctx.shape);
    PosView p = st.pos(g.node);
    int k = shape.k;
    int m = p.anon();
    auto id_of = [&](int local) { return local < k ? ctx.X[static_cast<size_t>(local)] : -1 - (local - k); };

    Vocabulary v = L.vocabulary();
    const auto& objs = L.object_names(phi);
    const auto& sets = L.set_names(phi);
    for (const auto& s : sets) v.add({s, 1});
    for (size_t j = L.constants().size(); j < objs.size(); ++j) v.add({objs[j], 0});

    ObjectSet uni(ctx.X.begin(), ctx.X.end());
    for (int a = 0; a < m; ++a) uni.insert(-1 - a);
    Position pos;
    pos.H = Structure(v, uni);
    auto add = [&](uint64_t t) {
        const Symbol& r = L.relations()[static_cast<size_t>(tuple_rel(t))];
        Tuple tu;
        for (int q = 0; q < r.arity; ++q) tu.push_back(id_of(tuple_arg(t, q)));
        pos.H.add_tuple(r.name, tu);
    };
    for (uint64_t t : shape.tuples) add(t);
    for (uint64_t t : p.tuples()) add(t);
    for (int j = 0; j < p.nset; ++j)
        for (int o = 0; o < k + m; ++o)
            if ((p.set(j) >> o) & 1) pos.H.add_tuple(sets[static_cast<size_t>(j)], {id_of(o)});
    for (int j = 0; j < p.nobj; ++j) {
        uint8_t val = p.obj(j);
        pos.H.set_constant(objs[static_cast<size_t>(j)],
                           val == kNil ? std::nullopt : std::optional<Object>(id_of(val - 1)));
    }
    pos.X = ObjectSet(ctx.X.begin(), ctx.X.end());
    pos.phi = phi;
    Class c = L.node(phi).cls;
    if (c == Class::Universal)
        pos.owner = Owner::Falsifier;
    else if (c == Class::Existential)
        pos.owner = Owner::Verifier;
    else {
        int lv = engine::literal_value(st, shape, g.node);
        pos.owner = lv < 0 ? Owner::Neither : (lv ? Owner::Falsifier : Owner::Verifier);
    }
    return pos;
}

std::vector<Game> subgames(const Game& g) {
    need_node(g);
    std::vector<Game> out;
    if (g.is_sentinel()) return out;
    for (NodeId c : g.store->children(g.node)) out.push_back({g.store, g.ctx, c});
    return out;
}

size_t game_size(const Game& g) {
    need_node(g);
    return engine::dag_size(*g.store, g.node);
}

namespace {

class Equiv {
public:
    Equiv(const Game& a, const Game& b) : a_(a), b_(b) {}

    bool run(NodeId x, NodeId y) {
        if (is_sentinel(x) || is_sentinel(y)) return x == y;
        auto key = std::make_pair(x, y);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool r = check(x, y);
        memo_[key] = r;
        return r;
    }

private:
    Game a_, b_;
    std::map<std::pair<NodeId, NodeId>, bool> memo_;

    bool check(NodeId x, NodeId y) {
        Position px = root_position({a_.store, a_.ctx, x});
        Position py = root_position({b_.store, b_.ctx, y});
        if (px.phi != py.phi || px.X != py.X) return false;
        if (!(px.H.vocabulary() == py.H.vocabulary())) return false;
        if (!iso_fixing(px.H, py.H, px.X)) return false;
        auto cx = a_.store->children(x);
        auto cy = b_.store->children(y);
        if (cx.size() != cy.size()) return false;
        std::vector<NodeId> lx(cx.begin(), cx.end()), ly(cy.begin(), cy.end());
        std::vector<char> used(ly.size(), 0);
        auto match = [&](auto& self, size_t i) -> bool {
            if (i == lx.size()) return true;
            for (size_t j = 0; j < ly.size(); ++j) {
                if (used[j] || !run(lx[i], ly[j])) continue;
                used[j] = 1;
                if (self(self, i + 1)) return true;
                used[j] = 0;
            }
            return false;
        };
        return match(match, 0);
    }
};

} // namespace

bool equivalent(const Game& g1, const Game& g2) {
    if (g1.is_sentinel() || g2.is_sentinel()) return g1.node == g2.node;
    Equiv e(g1, g2);
    return e.run(g1.node, g2.node);
}

std::string canonical_key(const Game& g) {
    if (g.is_top()) return "T";
    if (g.is_bottom()) return "B";
    std::unordered_map<NodeId, std::string> memo;
    auto rec = [&](auto& self, NodeId n) -> std::string {
        if (n == kTop) return "T";
        if (n == kBottom) return "B";
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        Position p = root_position({g.store, g.ctx, n});
        std::vector<std::string> kids;
        for (NodeId c : g.store->children(n)) kids.push_back(self(self, c));
        std::sort(kids.begin(), kids.end());
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        std::string s = "(" + std::to_string(p.phi) + ";" + canonical_encoding(p.H, p.X);
        for (const auto& k : kids) s += ";" + k;
        s += ")";
        memo.emplace(n, s);
        return s;
    };
    std::string x;
    for (Object o : g.store->context(g.ctx).X) x += std::to_string(o) + ",";
    return "X{" + x + "}" + rec(rec, g.node);
}

std::string to_debug_string(const Game& g) {
    std::ostringstream out;
    auto rec = [&](auto& self, NodeId n, int depth) -> void {
        out << std::string(static_cast<size_t>(depth) * 2, ' ');
        if (n == kTop) {
            out << "TOP\n";
            return;
        }
        if (n == kBottom) {
            out << "BOTTOM\n";
            return;
        }
        Position p = root_position({g.store, g.ctx, n});
        out << "phi=" << p.phi << " X={";
        bool first = true;
        for (Object o : p.X) {
            out << (first ? "" : ",") << o;
            first = false;
        }
        out << "} owner=" << owner_name(p.owner) << " H=" << canonical_encoding(p.H, p.X) << "\n";
        for (NodeId c : g.store->children(n)) self(self, c, depth + 1);
    };
    rec(rec, g.node, 0);
    return out.str();
}

} // namespace linmso
