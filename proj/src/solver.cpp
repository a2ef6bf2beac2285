#include "linmso/solver.hpp"
#include "linmso/errors.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace linmso {

Cost add_cost(Cost a, Cost b) {
    if (a == kInfinity || b == kInfinity) return kInfinity;
    Cost r;
    if (__builtin_add_overflow(a, b, &r) || r == kInfinity) throw InputError("objective value overflow");
    return r;
}

std::string cost_to_string(Cost c) { return c == kInfinity ? "infinity" : std::to_string(c); }

Vocabulary Problem::vocabulary() const {
    Vocabulary v = base;
    for (const auto& f : free) v.add({f.name, 1});
    return v;
}

void Problem::validate() const {
    if (!base.nullaries().empty()) throw InputError("the base vocabulary must be relational");
    std::set<std::string> names;
    for (const auto& f : free) {
        if (base.contains(f.name)) throw InputError("free symbol '" + f.name + "' clashes with the base vocabulary");
        if (!names.insert(f.name).second) throw InputError("free symbol '" + f.name + "' declared twice");
    }
    if (formula.root() < 0) throw InputError("problem has no formula");
    if (!formula.is_nnf()) throw InputError("problem formula is not in negation normal form");
    for (const auto& s : free_symbols(formula))
        if (!names.count(s)) throw InputError("symbol '" + s + "' is free in the formula but not declared");
}

Cost user_value(const Problem& p, Cost internal) {
    if (!p.maximize || internal == kInfinity) return internal;
    return -internal;
}

Solver::Solver(Problem problem, SolverOptions opts) : problem_(std::move(problem)), opts_(opts) {
    problem_.validate();
    store_ = std::make_unique<GameStore>(Layout(problem_.formula, problem_.vocabulary()));
    for (const auto& f : problem_.free) free_rel_.push_back(store_->layout().relation_index(f.name));
}

namespace {

using Clock = std::chrono::steady_clock;
using Key = std::vector<uint64_t>;

struct Cell {
    uint32_t ctx = 0;
    std::vector<CellEntry> entries;
    std::unordered_map<NodeId, uint32_t> index;

    void insert(NodeId g, Cost v) {
        if (g == kBottom || v == kInfinity) return;
        auto [it, fresh] = index.emplace(g, static_cast<uint32_t>(entries.size()));
        if (fresh)
            entries.push_back({g, v});
        else if (v < entries[it->second].value)
            entries[it->second].value = v;
    }
};

struct Table {
    std::vector<Object> bag;
    std::map<Key, Cell> cells;
};

inline uint64_t low(int p) { return p >= 64 ? ~uint64_t{0} : (uint64_t{1} << p) - 1; }
inline uint64_t insert_bit(uint64_t m, int p) { return (m & low(p)) | ((m >> p) << (p + 1)); }
inline uint64_t drop_bit(uint64_t m, int p) { return (m & low(p)) | ((m >> (p + 1)) << p); }

} // namespace

struct Solver::Run {
    Solver& s;
    GameStore& st;
    const Structure& a;
    const NiceTreeDecomposition& ntd;
    int l;
    int phi;
    SolverStats stats;
    std::vector<std::pair<int, Tuple>> tuples; // relation index, objects

    Run(Solver& solver, const Structure& a_, const NiceTreeDecomposition& t)
        : s(solver), st(*solver.store_), a(a_), ntd(t), l(static_cast<int>(solver.free_rel_.size())),
          phi(solver.store_->layout().root()) {
        for (const auto& r : s.problem_.base.relations()) {
            int ri = st.layout().relation_index(r.name);
            for (const auto& tu : a.tuples(r.name)) tuples.emplace_back(ri, tu);
        }
    }

    // Relation tuples inside a bag, over bag-local indices.
    std::vector<uint64_t> bag_tuples(const std::vector<Object>& bag) const {
        std::vector<uint64_t> out;
        for (const auto& [ri, tu] : tuples) {
            std::array<uint8_t, kMaxArity> args{};
            bool in = true;
            for (size_t q = 0; q < tu.size() && in; ++q) {
                auto it = std::lower_bound(bag.begin(), bag.end(), tu[q]);
                if (it == bag.end() || *it != tu[q])
                    in = false;
                else
                    args[q] = static_cast<uint8_t>(it - bag.begin());
            }
            if (in) out.push_back(pack_tuple(ri, args.data(), static_cast<int>(tu.size())));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    uint32_t context(const std::vector<Object>& bag, const std::vector<uint64_t>& base, const Key& u) {
        Shape sh;
        sh.k = static_cast<int>(bag.size());
        sh.tuples = base;
        for (int k = 0; k < l; ++k)
            for (int i = 0; i < sh.k; ++i)
                if ((u[static_cast<size_t>(k)] >> i) & 1) {
                    uint8_t arg = static_cast<uint8_t>(i);
                    sh.tuples.push_back(pack_tuple(s.free_rel_[static_cast<size_t>(k)], &arg, 1));
                }
        std::sort(sh.tuples.begin(), sh.tuples.end());
        return st.context_id(bag, st.shape_id(sh));
    }

    // R(U): the reduced game of the bag alone, cached by shape.
    NodeId bag_game(uint32_t ctx) {
        const Context& c = st.context(ctx);
        uint64_t key = (static_cast<uint64_t>(c.shape) << 32) | static_cast<uint32_t>(phi);
        auto it = st.bag_cache().find(key);
        if (it != st.bag_cache().end()) return it->second;
        LocalStructure ls;
        ls.ids = c.X;
        ls.k = static_cast<int>(c.X.size());
        ls.tuples = st.shape(c.shape).tuples;
        NodeId r = engine::build(st, ls, phi, true, true);
        st.bag_cache().emplace(key, r);
        return r;
    }

    Table leaf(const NiceNode& nd) {
        Table t;
        t.bag = nd.bag;
        auto base = bag_tuples(t.bag);
        for (uint64_t ext = 0; ext < (uint64_t{1} << l); ++ext) {
            Key u(static_cast<size_t>(l));
            for (int k = 0; k < l; ++k) u[static_cast<size_t>(k)] = (ext >> k) & 1;
            uint32_t ctx = context(t.bag, base, u);
            NodeId r = bag_game(ctx);
            if (r == kBottom) continue;
            Cell& c = t.cells[u];
            c.ctx = ctx;
            c.insert(r, 0);
        }
        return t;
    }

    Table introduce(const NiceNode& nd, const Table& child) {
        Table t;
        t.bag = nd.bag;
        int p = static_cast<int>(std::lower_bound(t.bag.begin(), t.bag.end(), nd.vertex) - t.bag.begin());
        auto base = bag_tuples(t.bag);
        std::map<std::pair<uint32_t, uint32_t>, std::unique_ptr<engine::Combiner>> combiners;
        for (const auto& [uj, cj] : child.cells) {
            for (uint64_t ext = 0; ext < (uint64_t{1} << l); ++ext) {
                Key ui(uj.size());
                for (int k = 0; k < l; ++k)
                    ui[static_cast<size_t>(k)] = insert_bit(uj[static_cast<size_t>(k)], p) |
                                                 (((ext >> k) & 1) << p);
                uint32_t ctx = context(t.bag, base, ui);
                NodeId r = bag_game(ctx);
                if (r == kBottom) continue;
                Cell* cell = nullptr;
                for (const CellEntry& e : cj.entries) {
                    NodeId g;
                    if (e.game == kTop || r == kTop) {
                        g = kTop;
                    } else {
                        auto& cb = combiners[{cj.ctx, ctx}];
                        if (!cb) {
                            cb = std::make_unique<engine::Combiner>(st, cj.ctx, ctx);
                            if (cb->result_context() != ctx) throw InvariantError("introduce: unexpected context");
                        }
                        g = cb->run(e.game, r);
                    }
                    if (g == kBottom) continue;
                    if (!cell) {
                        cell = &t.cells[ui];
                        cell->ctx = ctx;
                    }
                    cell->insert(g, e.value);
                }
            }
        }
        return t;
    }

    Table forget(const NiceNode& nd, const Table& child) {
        Table t;
        t.bag = nd.bag;
        int p = static_cast<int>(std::lower_bound(child.bag.begin(), child.bag.end(), nd.vertex) - child.bag.begin());
        std::map<uint32_t, std::unique_ptr<engine::Forgetter>> forgetters;
        for (const auto& [uj, cj] : child.cells) {
            Key ui(uj.size());
            Cost add = 0;
            for (int k = 0; k < l; ++k) {
                uint64_t m = uj[static_cast<size_t>(k)];
                ui[static_cast<size_t>(k)] = drop_bit(m, p);
                if ((m >> p) & 1) add = add_cost(add, s.problem_.free[static_cast<size_t>(k)].weight);
            }
            auto& fg = forgetters[cj.ctx];
            if (!fg) fg = std::make_unique<engine::Forgetter>(st, cj.ctx, p);
            Cell* cell = nullptr;
            for (const CellEntry& e : cj.entries) {
                NodeId g = fg->run(e.game);
                if (g == kBottom) continue;
                if (!cell) {
                    cell = &t.cells[ui];
                    cell->ctx = fg->result_context();
                }
                cell->insert(g, add_cost(e.value, add));
            }
        }
        return t;
    }

    Table join(const NiceNode& nd, const Table& left, const Table& right) {
        Table t;
        t.bag = nd.bag;
        for (const auto& [u, cl] : left.cells) {
            auto it = right.cells.find(u);
            if (it == right.cells.end()) continue;
            const Cell& cr = it->second;
            if (cl.ctx != cr.ctx) throw InvariantError("join: children disagree on the bag context");
            std::unique_ptr<engine::Combiner> cb;
            Cell* cell = nullptr;
            for (const CellEntry& x : cl.entries)
                for (const CellEntry& y : cr.entries) {
                    NodeId g;
                    if (x.game == kTop || y.game == kTop) {
                        g = kTop;
                    } else {
                        if (!cb) cb = std::make_unique<engine::Combiner>(st, cl.ctx, cr.ctx);
                        g = cb->run(x.game, y.game);
                    }
                    if (g == kBottom) continue;
                    if (!cell) {
                        cell = &t.cells[u];
                        cell->ctx = cl.ctx;
                    }
                    cell->insert(g, add_cost(x.value, y.value));
                }
        }
        return t;
    }

    void observe(int i, const Table& t) {
        size_t cells = t.cells.size(), entries = 0;
        for (const auto& [_, c] : t.cells) {
            entries = std::max(entries, c.entries.size());
            if (s.opts_.game_sizes)
                for (const auto& e : c.entries)
                    stats.max_game_size = std::max(stats.max_game_size, engine::dag_size(st, e.game));
        }
        stats.max_cells = std::max(stats.max_cells, cells);
        stats.max_entries = std::max(stats.max_entries, entries);
        if (!s.observer_) return;
        NodeTable view;
        view.node = i;
        view.nice = &ntd.nodes[static_cast<size_t>(i)];
        for (const auto& [u, c] : t.cells) {
            view.contexts[u] = c.ctx;
            view.cells[u] = c.entries;
        }
        s.observer_(view);
    }

    void collect(std::vector<std::unique_ptr<Table>>& tables) {
        std::vector<NodeId> roots;
        for (const auto& t : tables)
            if (t)
                for (const auto& [_, c] : t->cells)
                    for (const auto& e : c.entries) roots.push_back(e.game);
        st.collect(roots);
        size_t i = 0;
        for (auto& t : tables)
            if (t)
                for (auto& [_, c] : t->cells) {
                    c.index.clear();
                    for (uint32_t j = 0; j < c.entries.size(); ++j) {
                        c.entries[j].game = roots[i++];
                        c.index.emplace(c.entries[j].game, j);
                    }
                }
    }

    Cost empty_universe() {
        LocalStructure ls;
        uint32_t ctx = engine::context_of(st, ls);
        NodeId r = engine::build(st, ls, phi, true, true);
        return engine::convert_eval_top(st, ctx, r) ? 0 : kInfinity;
    }

    Cost run() {
        if (ntd.nodes.empty()) {
            if (a.size() != 0) throw InputError("empty decomposition for a nonempty structure");
            return empty_universe();
        }
        size_t n = ntd.nodes.size();
        std::vector<std::unique_ptr<Table>> tables(n);
        size_t next_gc = s.opts_.gc_threshold;
        for (size_t i = 0; i < n; ++i) {
            const NiceNode& nd = ntd.nodes[i];
            auto t0 = Clock::now();
            Table t;
            switch (nd.kind) {
            case NiceKind::Leaf: t = leaf(nd); break;
            case NiceKind::Introduce: t = introduce(nd, *tables[static_cast<size_t>(nd.children[0])]); break;
            case NiceKind::Forget: t = forget(nd, *tables[static_cast<size_t>(nd.children[0])]); break;
            case NiceKind::Join:
                t = join(nd, *tables[static_cast<size_t>(nd.children[0])],
                         *tables[static_cast<size_t>(nd.children[1])]);
                break;
            }
            for (int c : nd.children) tables[static_cast<size_t>(c)].reset();
            stats.seconds[static_cast<int>(nd.kind)] +=
                std::chrono::duration<double>(Clock::now() - t0).count();
            ++stats.nodes;
            observe(static_cast<int>(i), t);
            tables[i] = std::make_unique<Table>(std::move(t));
            if (st.node_count() > next_gc) {
                collect(tables);
                next_gc = std::max(s.opts_.gc_threshold, 2 * st.node_count());
            }
        }
        auto t0 = Clock::now();
        const Table& root = *tables[static_cast<size_t>(ntd.root)];
        if (!root.bag.empty()) throw InputError("the decomposition root must have an empty bag");
        Cost best = kInfinity;
        for (const auto& [_, c] : root.cells)
            for (const auto& e : c.entries)
                if (e.value < best && engine::convert_eval_top(st, c.ctx, e.game)) best = e.value;
        stats.root_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return best;
    }
};

SolveResult Solver::solve(const Structure& a, const NiceTreeDecomposition& ntd) {
    if (!(a.vocabulary() == problem_.base))
        throw InputError("structure vocabulary does not match the problem's base vocabulary");
    if (!ntd.nodes.empty()) {
        ntd.check();
        TdReport rep = validate_td(flatten(ntd, static_cast<int>(a.size())), a);
        if (!rep.ok) throw InputError("invalid tree decomposition: " + rep.violations.front());
        if (ntd.width() + 1 > kMaxObjects) throw TooLargeError("decomposition too wide");
    }
    Run r(*this, a, ntd);
    SolveResult out;
    out.opt = r.run();
    out.stats = r.stats;
    out.stats.store_nodes = store_->node_count();
    return out;
}

SolveResult solve(const Structure& a, const Problem& p, const NiceTreeDecomposition* ntd) {
    Solver s(p);
    if (ntd) return s.solve(a, *ntd);
    NiceTreeDecomposition own;
    if (a.size() > 0) own = nicify(min_fill_td(a));
    return s.solve(a, own);
}

} // namespace linmso
