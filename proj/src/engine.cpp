#include "linmso/engine.hpp"
#include "linmso/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace linmso::engine {

namespace {

inline uint64_t low_mask(int k) { return k >= 64 ? ~uint64_t{0} : ((uint64_t{1} << k) - 1); }

int arity_of(const Layout& L, uint64_t tuple) {
    return L.relations()[static_cast<size_t>(tuple_rel(tuple))].arity;
}

// Truth of the atom at `phi` in an encoded position over `shape`.
int literal_in(const Layout& L, const Shape& shape, int phi, const PosView& p) {
    const Layout::Node& nd = L.node(phi);
    std::array<uint8_t, kMaxArity> args{};
    bool in_x = true;
    for (int t = 0; t < nd.arity; ++t) {
        uint8_t v = p.obj(nd.args[static_cast<size_t>(t)]);
        if (v == kNil) return -1;
        args[static_cast<size_t>(t)] = static_cast<uint8_t>(v - 1);
        if (v - 1 >= shape.k) in_x = false;
    }
    bool holds;
    if (nd.set_atom) {
        holds = (p.set(nd.rel) >> args[0]) & 1;
    } else {
        uint64_t t = pack_tuple(nd.rel, args.data(), nd.arity);
        if (in_x) {
            holds = shape.has(t);
        } else {
            auto tu = p.tuples();
            holds = std::binary_search(tu.begin(), tu.end(), t);
        }
    }
    if (nd.kind == Kind::NegAtom) holds = !holds;
    return holds ? 1 : 0;
}

PosView view_of(const Layout& L, int phi, const std::vector<uint64_t>& w) {
    const Layout::Node& nd = L.node(phi);
    return {w.data(), w.size(), nd.nobj, nd.nset};
}

// Sentinel rules of the reduction for one child result. Returns true when the
// node is decided by r alone.
inline bool absorb(bool universal, NodeId r, std::vector<NodeId>& kids) {
    if (universal ? r == kBottom : r == kTop) return true;
    if (!is_sentinel(r)) kids.push_back(r);
    return false;
}

class Builder {
public:
    Builder(GameStore& st, const LocalStructure& ls, bool reduced, bool nil_moves)
        : st_(st), L_(st.layout()), ls_(ls), reduced_(reduced), nil_(nil_moves),
          n_(static_cast<int>(ls.ids.size())), k_(ls.k) {
        anon_of_.fill(-1);
        std::copy(ls.sets.begin(), ls.sets.end(), sets_.begin());
        std::copy(ls.objs.begin(), ls.objs.end(), objs_.begin());
    }

    NodeId go(int phi) {
        const Layout::Node& nd = L_.node(phi);
        if (nd.cls == Class::Atomic || nd.cls == Class::Negated) {
            if (reduced_) {
                int v = literal(nd);
                if (v >= 0) return v ? kTop : kBottom;
            }
            std::vector<NodeId> none;
            return st_.intern(phi, encode(phi), none);
        }
        bool uni = nd.cls == Class::Universal;
        std::vector<NodeId> kids;
        auto take = [&](NodeId r) {
            if (!reduced_) {
                kids.push_back(r);
                return false;
            }
            return absorb(uni, r, kids);
        };
        switch (nd.kind) {
        case Kind::And:
        case Kind::Or:
            if (take(go(nd.left))) return uni ? kBottom : kTop;
            if (take(go(nd.right))) return uni ? kBottom : kTop;
            break;
        case Kind::ForallSet:
        case Kind::ExistsSet: {
            if (n_ > 30) throw TooLargeError("set quantifier over more than 30 objects");
            uint64_t saved = sets_[nd.slot];
            uint64_t count = uint64_t{1} << n_;
            for (uint64_t u = 0; u < count; ++u) {
                sets_[nd.slot] = u;
                if (take(go(nd.left))) {
                    sets_[nd.slot] = saved;
                    return uni ? kBottom : kTop;
                }
            }
            sets_[nd.slot] = saved;
            break;
        }
        case Kind::ForallObj:
        case Kind::ExistsObj: {
            uint8_t saved = objs_[nd.slot];
            bool stop = false;
            for (int a = 0; a <= n_ && !stop; ++a) {
                if (a == n_ && !nil_) break;
                objs_[nd.slot] = a == n_ ? kNil : static_cast<uint8_t>(a + 1);
                stop = take(go(nd.left));
            }
            objs_[nd.slot] = saved;
            if (stop) return uni ? kBottom : kTop;
            break;
        }
        default: throw InvariantError("unexpected formula node");
        }
        if (reduced_ && kids.empty()) return uni ? kTop : kBottom;
        return st_.intern(phi, encode(phi), kids);
    }

private:
    GameStore& st_;
    const Layout& L_;
    const LocalStructure& ls_;
    bool reduced_;
    bool nil_;
    int n_;
    int k_;
    std::array<uint64_t, kMaxSlots> sets_{};
    std::array<uint8_t, kMaxSlots> objs_{};
    std::array<int, kMaxObjects> anon_of_{};
    PosCode pc_;

    int literal(const Layout::Node& nd) const {
        std::array<uint8_t, kMaxArity> args{};
        for (int t = 0; t < nd.arity; ++t) {
            uint8_t v = objs_[nd.args[static_cast<size_t>(t)]];
            if (v == kNil) return -1;
            args[static_cast<size_t>(t)] = static_cast<uint8_t>(v - 1);
        }
        bool holds;
        if (nd.set_atom)
            holds = (sets_[nd.rel] >> args[0]) & 1;
        else
            holds = std::binary_search(ls_.tuples.begin(), ls_.tuples.end(),
                                       pack_tuple(nd.rel, args.data(), nd.arity));
        if (nd.kind == Kind::NegAtom) holds = !holds;
        return holds ? 1 : 0;
    }

    // H = A[X u named objects], relative to X.
    const std::vector<uint64_t>& encode(int phi) {
        const Layout::Node& nd = L_.node(phi);
        std::array<uint8_t, kMaxSlots> used{};
        int m = 0;
        for (int j = 0; j < nd.nobj; ++j) {
            uint8_t v = objs_[static_cast<size_t>(j)];
            if (v != kNil && v - 1 >= k_ && anon_of_[static_cast<size_t>(v - 1)] < 0) {
                anon_of_[static_cast<size_t>(v - 1)] = m;
                used[static_cast<size_t>(m++)] = static_cast<uint8_t>(v - 1);
            }
        }
        pc_.reset(nd.nobj, nd.nset);
        pc_.set_anon(m);
        auto local = [&](int o) { return o < k_ ? o : k_ + anon_of_[static_cast<size_t>(o)]; };
        for (int j = 0; j < nd.nobj; ++j) {
            uint8_t v = objs_[static_cast<size_t>(j)];
            pc_.set_obj(j, v == kNil ? kNil : static_cast<uint8_t>(local(v - 1) + 1));
        }
        for (int j = 0; j < nd.nset; ++j) {
            uint64_t mask = sets_[static_cast<size_t>(j)];
            uint64_t out = mask & low_mask(k_);
            for (int a = 0; a < m; ++a)
                if ((mask >> used[static_cast<size_t>(a)]) & 1) out |= uint64_t{1} << (k_ + a);
            pc_.set_mask(j, out);
        }
        if (m > 0) {
            for (uint64_t t : ls_.tuples) {
                int ar = arity_of(L_, t);
                std::array<uint8_t, kMaxArity> args{};
                bool keep = true, anon = false;
                for (int q = 0; q < ar && keep; ++q) {
                    int o = tuple_arg(t, q);
                    if (o >= k_) {
                        if (anon_of_[static_cast<size_t>(o)] < 0)
                            keep = false;
                        else
                            anon = true;
                    }
                    args[static_cast<size_t>(q)] = static_cast<uint8_t>(local(o));
                }
                if (keep && anon) pc_.add_tuple(pack_tuple(tuple_rel(t), args.data(), ar));
            }
            pc_.finish(nd.nset);
        }
        for (int a = 0; a < m; ++a) anon_of_[used[static_cast<size_t>(a)]] = -1;
        return pc_.w;
    }
};

Class cls_of(const Layout& L, int phi) { return L.node(phi).cls; }

bool is_atomic_cls(Class c) { return c == Class::Atomic || c == Class::Negated; }

} // namespace

uint32_t context_of(GameStore& store, const LocalStructure& ls) {
    Shape s;
    s.k = ls.k;
    for (uint64_t t : ls.tuples) {
        int ar = arity_of(store.layout(), t);
        bool in = true;
        for (int q = 0; q < ar; ++q)
            if (tuple_arg(t, q) >= ls.k) in = false;
        if (in) s.tuples.push_back(t);
    }
    std::vector<Object> X(ls.ids.begin(), ls.ids.begin() + ls.k);
    return store.context_id(X, store.shape_id(s));
}

NodeId build(GameStore& store, const LocalStructure& ls, int phi, bool reduced, bool nil_moves) {
    Builder b(store, ls, reduced, nil_moves);
    return b.go(phi);
}

int literal_value(const GameStore& store, const Shape& shape, NodeId n) {
    return literal_in(store.layout(), shape, store.phi(n), store.pos(n));
}

namespace {

std::vector<uint64_t> code_of(const GameStore& st, NodeId n) {
    PosView p = st.pos(n);
    return {p.w, p.w + p.len};
}

} // namespace

NodeId eval(GameStore& store, uint32_t ctx, NodeId root) {
    const Layout& L = store.layout();
    const Shape& shape = store.context_shape(ctx);
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto& self, NodeId n) -> NodeId {
        if (is_sentinel(n)) return n;
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        // Copy first: interning below may grow the child arena.
        std::vector<NodeId> sub(store.children(n).begin(), store.children(n).end());
        for (NodeId& c : sub) c = self(self, c);
        std::sort(sub.begin(), sub.end());
        sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
        Class c = cls_of(L, store.phi(n));
        int owner = 2; // 0 falsifier, 1 verifier, 2 neither
        if (c == Class::Universal)
            owner = 0;
        else if (c == Class::Existential)
            owner = 1;
        else {
            int v = literal_value(store, shape, n);
            owner = v < 0 ? 2 : (v == 1 ? 0 : 1);
        }
        bool has_top = std::find(sub.begin(), sub.end(), kTop) != sub.end();
        bool has_bot = std::find(sub.begin(), sub.end(), kBottom) != sub.end();
        NodeId r;
        if (owner == 0 && (sub.empty() || (sub.size() == 1 && has_top)))
            r = kTop;
        else if (owner == 0 && has_bot)
            r = kBottom;
        else if (owner == 1 && (sub.empty() || (sub.size() == 1 && has_bot)))
            r = kBottom;
        else if (owner == 1 && has_top)
            r = kTop;
        else
            r = store.intern(store.phi(n), code_of(store, n), sub);
        memo.emplace(n, r);
        return r;
    };
    return rec(rec, root);
}

NodeId reduce(GameStore& store, uint32_t ctx, NodeId root) {
    const Layout& L = store.layout();
    const Shape& shape = store.context_shape(ctx);
    std::unordered_map<NodeId, NodeId> memo;
    auto rec = [&](auto& self, NodeId n) -> NodeId {
        if (is_sentinel(n)) return n;
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        Class c = cls_of(L, store.phi(n));
        NodeId r;
        if (is_atomic_cls(c)) {
            int v = literal_value(store, shape, n);
            r = v < 0 ? n : (v ? kTop : kBottom);
        } else {
            bool uni = c == Class::Universal;
            std::vector<NodeId> kept;
            bool decided = false;
            std::vector<NodeId> kids(store.children(n).begin(), store.children(n).end());
            for (NodeId ch : kids)
                if (absorb(uni, self(self, ch), kept)) {
                    decided = true;
                    break;
                }
            if (decided)
                r = uni ? kBottom : kTop;
            else if (kept.empty())
                r = uni ? kTop : kBottom;
            else
                r = store.intern(store.phi(n), code_of(store, n), kept);
        }
        memo.emplace(n, r);
        return r;
    };
    return rec(rec, root);
}

NodeId convert(GameStore& store, uint32_t ctx, NodeId root, uint32_t& out_ctx) {
    const Layout& L = store.layout();
    const Shape& shape = store.context_shape(ctx);
    out_ctx = store.context_id({}, store.shape_id(Shape{}));
    const int k = shape.k;
    std::unordered_map<NodeId, NodeId> memo;

    auto recode = [&](NodeId n) {
        PosView p = store.pos(n);
        std::array<int, 256> nw;
        nw.fill(-1);
        std::array<uint8_t, kMaxSlots> named{};
        int m = 0;
        for (int j = 0; j < p.nobj; ++j) {
            uint8_t v = p.obj(j);
            if (v != kNil && nw[v - 1] < 0) {
                nw[v - 1] = m;
                named[static_cast<size_t>(m++)] = static_cast<uint8_t>(v - 1);
            }
        }
        PosCode pc;
        pc.reset(p.nobj, p.nset);
        pc.set_anon(m);
        for (int j = 0; j < p.nobj; ++j) {
            uint8_t v = p.obj(j);
            pc.set_obj(j, v == kNil ? kNil : static_cast<uint8_t>(nw[v - 1] + 1));
        }
        for (int j = 0; j < p.nset; ++j) {
            uint64_t mask = p.set(j), out = 0;
            for (int a = 0; a < m; ++a)
                if ((mask >> named[static_cast<size_t>(a)]) & 1) out |= uint64_t{1} << a;
            pc.set_mask(j, out);
        }
        auto add = [&](uint64_t t) {
            int ar = arity_of(L, t);
            std::array<uint8_t, kMaxArity> args{};
            for (int q = 0; q < ar; ++q) {
                int o = nw[tuple_arg(t, q)];
                if (o < 0) return;
                args[static_cast<size_t>(q)] = static_cast<uint8_t>(o);
            }
            pc.add_tuple(pack_tuple(tuple_rel(t), args.data(), ar));
        };
        if (m > 0) {
            for (uint64_t t : shape.tuples) add(t);
            for (uint64_t t : p.tuples()) add(t);
        }
        pc.finish(p.nset);
        (void)k;
        return pc.w;
    };

    auto fully = [&](NodeId c) {
        PosView p = store.pos(c);
        for (int j = 0; j < p.nobj; ++j)
            if (p.obj(j) == kNil) return false;
        return true;
    };

    auto rec = [&](auto& self, NodeId n) -> NodeId {
        if (is_sentinel(n)) return n;
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        std::vector<NodeId> kids;
        std::vector<NodeId> src(store.children(n).begin(), store.children(n).end());
        for (NodeId c : src)
            if (is_sentinel(c) || fully(c)) kids.push_back(self(self, c));
        auto code = recode(n);
        NodeId r = store.intern(store.phi(n), code, kids);
        memo.emplace(n, r);
        return r;
    };
    return rec(rec, root);
}

bool convert_eval_top(GameStore& store, uint32_t ctx, NodeId n) {
    if (is_sentinel(n)) return n == kTop;
    uint32_t c2 = 0;
    NodeId g = convert(store, ctx, n, c2);
    return eval(store, c2, g) == kTop;
}

// ---------------------------------------------------------------- combine

Combiner::Combiner(GameStore& store, uint32_t ctx1, uint32_t ctx2) : store_(store) {
    const Context& c1 = store.context(ctx1);
    const Context& c2 = store.context(ctx2);
    std::vector<Object> X;
    std::set_union(c1.X.begin(), c1.X.end(), c2.X.begin(), c2.X.end(), std::back_inserter(X));
    if (X.size() > static_cast<size_t>(kMaxObjects)) throw TooLargeError("context too large");
    k_ = static_cast<int>(X.size());
    auto side = [&](const Context& c, const Context& other, Side& s) {
        s.k = static_cast<int>(c.X.size());
        for (int i = 0; i < s.k; ++i) {
            Object o = c.X[static_cast<size_t>(i)];
            s.map.push_back(static_cast<uint8_t>(std::lower_bound(X.begin(), X.end(), o) - X.begin()));
            if (std::binary_search(other.X.begin(), other.X.end(), o)) {
                s.shared |= uint64_t{1} << i;
                shared_union_ |= uint64_t{1} << s.map.back();
            }
        }
    };
    side(c1, c2, s1_);
    side(c2, c1, s2_);

    const Layout& L = store.layout();
    auto mapped = [&](const Shape& sh, const Side& s, std::vector<uint64_t>& all, std::vector<uint64_t>& shared) {
        for (uint64_t t : sh.tuples) {
            int ar = arity_of(L, t);
            std::array<uint8_t, kMaxArity> args{};
            bool sh_all = true;
            for (int q = 0; q < ar; ++q) {
                uint8_t o = tuple_arg(t, q);
                args[static_cast<size_t>(q)] = s.map[o];
                if (!((s.shared >> o) & 1)) sh_all = false;
            }
            uint64_t u = pack_tuple(tuple_rel(t), args.data(), ar);
            all.push_back(u);
            if (sh_all) shared.push_back(u);
        }
    };
    std::vector<uint64_t> all, sh1, sh2;
    mapped(store.shape(c1.shape), s1_, all, sh1);
    mapped(store.shape(c2.shape), s2_, all, sh2);
    std::sort(sh1.begin(), sh1.end());
    std::sort(sh2.begin(), sh2.end());
    if (sh1 != sh2) throw InputError("combine: the games disagree on their shared objects");
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    Shape out{k_, all};
    uint32_t sid = store.shape_id(out);
    out_ctx_ = store.context_id(X, sid);
    shape_ = &store.shape(sid);

    std::vector<uint32_t> sig{1, c1.shape, c2.shape, 0xFFFFFFFFu};
    sig.insert(sig.end(), s1_.map.begin(), s1_.map.end());
    sig.push_back(0xFFFFFFFFu);
    sig.insert(sig.end(), s2_.map.begin(), s2_.map.end());
    sig_ = store.signature(sig);
}

Combiner::Sig Combiner::signature(const Side& s, NodeId c) const {
    PosView p = store_.pos(c);
    Sig out;
    out.key.reserve(2 + static_cast<size_t>(p.nset) + Layout::obj_words(p.nobj));
    out.key.push_back(static_cast<uint64_t>(store_.phi(c)));
    uint64_t word = 0;
    for (int j = 0; j < p.nobj; ++j) {
        uint8_t v = p.obj(j);
        uint64_t cls = 0;
        if (v != kNil) {
            int o = v - 1;
            if (o < s.k && ((s.shared >> o) & 1))
                cls = static_cast<uint64_t>(s.map[static_cast<size_t>(o)]) + 1;
            else
                out.priv |= uint64_t{1} << j;
        }
        word |= cls << (8 * (j % 8));
        if (j % 8 == 7 || j + 1 == p.nobj) {
            out.key.push_back(word);
            word = 0;
        }
    }
    for (int j = 0; j < p.nset; ++j) {
        uint64_t m = p.set(j) & s.shared, u = 0;
        while (m) {
            int o = std::countr_zero(m);
            m &= m - 1;
            u |= uint64_t{1} << s.map[static_cast<size_t>(o)];
        }
        out.key.push_back(u);
    }
    return out;
}

bool Combiner::compatible(NodeId a, NodeId b) const {
    if (store_.phi(a) != store_.phi(b)) return false;
    Sig x = signature(s1_, a), y = signature(s2_, b);
    return x.key == y.key && (x.priv & y.priv) == 0;
}

bool Combiner::unite(NodeId a, NodeId b, PosCode& out) const {
    PosView pa = store_.pos(a), pb = store_.pos(b);
    const Layout& L = store_.layout();
    std::array<int, kMaxObjects> na, nb;
    na.fill(-1);
    nb.fill(-1);
    int m = 0;
    out.reset(pa.nobj, pa.nset);
    auto obj_of = [&](const Side& s, std::array<int, kMaxObjects>& nw, uint8_t v) -> int {
        int o = v - 1;
        if (o < s.k) return s.map[static_cast<size_t>(o)];
        int a2 = o - s.k;
        if (nw[static_cast<size_t>(a2)] < 0) nw[static_cast<size_t>(a2)] = m++;
        return k_ + nw[static_cast<size_t>(a2)];
    };
    auto shared_of = [](const Side& s, uint8_t v) {
        int o = v - 1;
        return o < s.k && ((s.shared >> o) & 1);
    };
    for (int j = 0; j < pa.nobj; ++j) {
        uint8_t va = pa.obj(j), vb = pb.obj(j);
        int u = -1;
        if (va != kNil && vb != kNil) {
            if (!shared_of(s1_, va) || !shared_of(s2_, vb)) return false;
            u = s1_.map[static_cast<size_t>(va - 1)];
            if (u != s2_.map[static_cast<size_t>(vb - 1)]) return false;
        } else if (va != kNil) {
            if (shared_of(s1_, va)) return false;
            u = obj_of(s1_, na, va);
        } else if (vb != kNil) {
            if (shared_of(s2_, vb)) return false;
            u = obj_of(s2_, nb, vb);
        }
        out.set_obj(j, u < 0 ? kNil : static_cast<uint8_t>(u + 1));
    }
    if (k_ + m > kMaxObjects) throw TooLargeError("position too large");
    out.set_anon(m);
    auto map_mask = [&](const Side& s, std::array<int, kMaxObjects>& nw, uint64_t mask) {
        uint64_t u = 0;
        while (mask) {
            int o = std::countr_zero(mask);
            mask &= mask - 1;
            if (o < s.k)
                u |= uint64_t{1} << s.map[static_cast<size_t>(o)];
            else
                u |= uint64_t{1} << (k_ + nw[static_cast<size_t>(o - s.k)]);
        }
        return u;
    };
    for (int j = 0; j < pa.nset; ++j) {
        uint64_t ua = map_mask(s1_, na, pa.set(j)), ub = map_mask(s2_, nb, pb.set(j));
        if ((ua & shared_union_) != (ub & shared_union_)) return false;
        out.set_mask(j, ua | ub);
    }
    auto map_tuples = [&](const Side& s, std::array<int, kMaxObjects>& nw, const PosView& p) {
        for (uint64_t t : p.tuples()) {
            int ar = arity_of(L, t);
            std::array<uint8_t, kMaxArity> args{};
            for (int q = 0; q < ar; ++q) {
                int o = tuple_arg(t, q);
                args[static_cast<size_t>(q)] =
                    static_cast<uint8_t>(o < s.k ? s.map[static_cast<size_t>(o)] : k_ + nw[static_cast<size_t>(o - s.k)]);
            }
            out.add_tuple(pack_tuple(tuple_rel(t), args.data(), ar));
        }
    };
    map_tuples(s1_, na, pa);
    map_tuples(s2_, nb, pb);
    out.finish(pa.nset);
    return true;
}

NodeId Combiner::run(NodeId a, NodeId b) {
    if (is_sentinel(a)) return a;
    if (is_sentinel(b)) return b;
    if (store_.phi(a) != store_.phi(b)) throw InputError("combine: root subformulas differ");
    PosCode pc;
    if (!unite(a, b, pc)) throw InputError("combine: root structures are not compatible");
    return rec(a, b);
}

NodeId Combiner::rec(NodeId a, NodeId b) {
    auto& memo = store_.memo();
    GameStore::MemoKey key{sig_, a, b};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    const Layout& L = store_.layout();
    int phi = store_.phi(a);
    PosCode pc;
    if (!unite(a, b, pc)) throw InvariantError("combine: paired incompatible positions");
    Class c = cls_of(L, phi);
    NodeId r;
    if (is_atomic_cls(c)) {
        int v = literal_in(L, *shape_, phi, view_of(L, phi, pc.w));
        if (v >= 0) {
            r = v ? kTop : kBottom;
        } else {
            std::vector<NodeId> none;
            r = store_.intern(phi, pc.w, none);
        }
    } else {
        bool uni = c == Class::Universal;
        std::vector<NodeId> ka(store_.children(a).begin(), store_.children(a).end());
        std::vector<NodeId> kb(store_.children(b).begin(), store_.children(b).end());
        std::vector<Sig> sb;
        sb.reserve(kb.size());
        struct VecHash {
            size_t operator()(const std::vector<uint64_t>& v) const {
                uint64_t h = 0xCBF29CE484222325ULL;
                for (uint64_t x : v) {
                    h ^= x;
                    h *= 0x100000001B3ULL;
                    h ^= h >> 29;
                }
                return static_cast<size_t>(h);
            }
        };
        std::unordered_map<std::vector<uint64_t>, std::vector<size_t>, VecHash> buckets;
        for (size_t i = 0; i < kb.size(); ++i) {
            if (is_sentinel(kb[i])) {
                sb.push_back({});
                continue;
            }
            sb.push_back(signature(s2_, kb[i]));
            buckets[sb.back().key].push_back(i);
        }
        std::vector<NodeId> kept;
        bool decided = false;
        for (NodeId x : ka) {
            if (is_sentinel(x)) continue;
            Sig sx = signature(s1_, x);
            auto bit = buckets.find(sx.key);
            if (bit == buckets.end()) continue;
            for (size_t i : bit->second) {
                if (sx.priv & sb[i].priv) continue;
                if (absorb(uni, rec(x, kb[i]), kept)) {
                    decided = true;
                    break;
                }
            }
            if (decided) break;
        }
        if (decided)
            r = uni ? kBottom : kTop;
        else if (kept.empty())
            r = uni ? kTop : kBottom;
        else
            r = store_.intern(phi, pc.w, kept);
    }
    store_.memo().emplace(key, r);
    return r;
}

// ----------------------------------------------------------------- forget

Forgetter::Forgetter(GameStore& store, uint32_t ctx, int x_index) : store_(store), x_(x_index) {
    const Context& c = store.context(ctx);
    k_ = static_cast<int>(c.X.size());
    if (x_ < 0 || x_ >= k_) throw InputError("forget: object is not in X");
    const Layout& L = store.layout();
    const Shape& sh = store.shape(c.shape);
    Shape out;
    out.k = k_ - 1;
    for (uint64_t t : sh.tuples) {
        int ar = arity_of(L, t);
        bool has_x = false;
        std::array<uint8_t, kMaxArity> args{};
        for (int q = 0; q < ar; ++q) {
            int o = tuple_arg(t, q);
            if (o == x_) has_x = true;
            args[static_cast<size_t>(q)] = static_cast<uint8_t>(o > x_ ? o - 1 : o);
        }
        if (has_x)
            x_tuples_.push_back(t);
        else
            out.tuples.push_back(pack_tuple(tuple_rel(t), args.data(), ar));
    }
    std::sort(out.tuples.begin(), out.tuples.end());
    std::vector<Object> X = c.X;
    X.erase(X.begin() + x_);
    uint32_t sid = store.shape_id(out);
    out_ctx_ = store.context_id(X, sid);
    out_shape_ = &store.shape(sid);
    sig_ = store.signature({2, c.shape, static_cast<uint32_t>(x_)});
}

void Forgetter::recode(NodeId n, PosCode& out) const {
    PosView p = store_.pos(n);
    const Layout& L = store_.layout();
    int m = p.anon();
    bool named = false;
    for (int j = 0; j < p.nobj; ++j)
        if (p.obj(j) == x_ + 1) named = true;

    // New local index of every old local object; -1 = dropped.
    std::array<int, kMaxObjects> nw;
    nw.fill(-1);
    for (int i = 0; i < k_; ++i)
        if (i != x_) nw[static_cast<size_t>(i)] = i < x_ ? i : i - 1;
    int m2 = 0;
    if (named) {
        for (int j = 0; j < p.nobj; ++j) {
            uint8_t v = p.obj(j);
            if (v == kNil) continue;
            int o = v - 1;
            if ((o == x_ || o >= k_) && nw[static_cast<size_t>(o)] < 0) nw[static_cast<size_t>(o)] = (k_ - 1) + m2++;
        }
    } else {
        for (int a = 0; a < m; ++a) nw[static_cast<size_t>(k_ + a)] = (k_ - 1) + a;
        m2 = m;
    }
    out.reset(p.nobj, p.nset);
    out.set_anon(m2);
    for (int j = 0; j < p.nobj; ++j) {
        uint8_t v = p.obj(j);
        out.set_obj(j, v == kNil ? kNil : static_cast<uint8_t>(nw[static_cast<size_t>(v - 1)] + 1));
    }
    for (int j = 0; j < p.nset; ++j) {
        uint64_t mask = p.set(j), u = 0;
        while (mask) {
            int o = std::countr_zero(mask);
            mask &= mask - 1;
            if (nw[static_cast<size_t>(o)] >= 0) u |= uint64_t{1} << nw[static_cast<size_t>(o)];
        }
        out.set_mask(j, u);
    }
    auto add = [&](uint64_t t) {
        int ar = arity_of(L, t);
        std::array<uint8_t, kMaxArity> args{};
        for (int q = 0; q < ar; ++q) {
            int o = nw[tuple_arg(t, q)];
            if (o < 0) return;
            args[static_cast<size_t>(q)] = static_cast<uint8_t>(o);
        }
        out.add_tuple(pack_tuple(tuple_rel(t), args.data(), ar));
    };
    for (uint64_t t : p.tuples()) add(t);
    if (named)
        for (uint64_t t : x_tuples_) add(t);
    out.finish(p.nset);
}

NodeId Forgetter::run(NodeId n) {
    if (is_sentinel(n)) return n;
    auto& memo = store_.memo();
    GameStore::MemoKey key{sig_, n, 0xFFFFFFFFu};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const Layout& L = store_.layout();
    int phi = store_.phi(n);
    PosCode pc;
    recode(n, pc);
    Class c = cls_of(L, phi);
    NodeId r;
    if (is_atomic_cls(c)) {
        int v = literal_in(L, *out_shape_, phi, view_of(L, phi, pc.w));
        if (v >= 0) {
            r = v ? kTop : kBottom;
        } else {
            std::vector<NodeId> none;
            r = store_.intern(phi, pc.w, none);
        }
    } else {
        bool uni = c == Class::Universal;
        std::vector<NodeId> src(store_.children(n).begin(), store_.children(n).end());
        std::vector<NodeId> kept;
        bool decided = false;
        for (NodeId ch : src)
            if (absorb(uni, run(ch), kept)) {
                decided = true;
                break;
            }
        if (decided)
            r = uni ? kBottom : kTop;
        else if (kept.empty())
            r = uni ? kTop : kBottom;
        else
            r = store_.intern(phi, pc.w, kept);
    }
    store_.memo().emplace(key, r);
    return r;
}

size_t dag_size(const GameStore& store, NodeId n) {
    if (is_sentinel(n)) return 0;
    std::vector<NodeId> stack{n};
    std::unordered_map<NodeId, char> seen{{n, 1}};
    while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (NodeId c : store.children(x))
            if (!is_sentinel(c) && seen.emplace(c, 1).second) stack.push_back(c);
    }
    return seen.size();
}

} // namespace linmso::engine
