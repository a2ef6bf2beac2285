#include "linmso/oracle.hpp"
#include "linmso/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <unordered_set>

namespace linmso {

namespace {

class Evaluator {
public:
    Evaluator(const Structure& a, const Formula& f) : f_(f) {
        objs_.assign(a.universe().begin(), a.universe().end());
        if (objs_.size() > 64) throw TooLargeError("oracle supports at most 64 objects");
        for (size_t i = 0; i < objs_.size(); ++i) index_[objs_[i]] = static_cast<int>(i);
        for (const auto& s : a.vocabulary().symbols()) {
            int id = symbol(s.name);
            if (s.arity == 0) {
                auto v = a.constant(s.name);
                if (v) obj_[static_cast<size_t>(id)] = index_.at(*v);
                continue;
            }
            Rel& r = rel_[static_cast<size_t>(id)];
            r.present = true;
            r.arity = s.arity;
            if (s.arity == 1) {
                for (const auto& t : a.tuples(s.name)) set_[static_cast<size_t>(id)] |= uint64_t{1} << index_.at(t[0]);
            } else if (s.arity == 2) {
                r.rows.assign(objs_.size(), 0);
                for (const auto& t : a.tuples(s.name))
                    r.rows[static_cast<size_t>(index_.at(t[0]))] |= uint64_t{1} << index_.at(t[1]);
            } else {
                for (const auto& t : a.tuples(s.name)) {
                    uint64_t w = 0;
                    for (Object o : t) w = (w << 8) | static_cast<uint64_t>(index_.at(o) + 1);
                    r.tuples.insert(w);
                }
            }
        }
        compile(f_.root());
    }

    bool run() { return eval(f_.root(), true); }

    void bind_set(const std::string& s, uint64_t mask) {
        size_t id = static_cast<size_t>(symbol(s));
        set_[id] = mask;
        rel_[id].present = true;
        rel_[id].arity = 1;
    }

private:
    struct Rel {
        bool present = false;
        int arity = 0;
        std::vector<uint64_t> rows;
        std::unordered_set<uint64_t> tuples;
    };
    struct Atom {
        int sym = -1;
        std::vector<int> args;
    };

    const Formula& f_;
    std::vector<Object> objs_;
    std::map<Object, int> index_;
    std::map<std::string, int> ids_;
    std::vector<Rel> rel_;
    std::vector<int> obj_;      // -1 = uninterpreted
    std::vector<uint64_t> set_; // unary symbols and bound sets
    std::vector<Atom> atoms_;   // by formula node
    std::vector<int> bound_;    // quantifier node -> symbol id

    int symbol(const std::string& name) {
        auto [it, fresh] = ids_.emplace(name, static_cast<int>(ids_.size()));
        if (fresh) {
            rel_.emplace_back();
            obj_.push_back(-1);
            set_.push_back(0);
        }
        return it->second;
    }

    void compile(int i) {
        if (atoms_.size() < f_.arena_size()) {
            atoms_.resize(f_.arena_size());
            bound_.resize(f_.arena_size(), -1);
        }
        const FormulaNode& n = f_.node(i);
        if (n.is_atomic()) {
            Atom& a = atoms_[static_cast<size_t>(i)];
            a.sym = symbol(n.symbol);
            for (const auto& s : n.args) a.args.push_back(symbol(s));
            return;
        }
        if (n.is_quantifier()) bound_[static_cast<size_t>(i)] = symbol(n.symbol);
        if (n.left >= 0) compile(n.left);
        if (n.right >= 0) compile(n.right);
    }

    bool atom(int i) {
        const Atom& a = atoms_[static_cast<size_t>(i)];
        std::array<int, 8> args{};
        for (size_t q = 0; q < a.args.size(); ++q) {
            int v = obj_[static_cast<size_t>(a.args[q])];
            if (v < 0) throw InputError("uninterpreted nullary symbol");
            args[q] = v;
        }
        const Rel& r = rel_[static_cast<size_t>(a.sym)];
        if (!r.present) throw InputError("symbol '" + f_.node(i).symbol + "' is not interpreted");
        if (r.arity == 1) return (set_[static_cast<size_t>(a.sym)] >> args[0]) & 1;
        if (r.arity == 2) return (r.rows[static_cast<size_t>(args[0])] >> args[1]) & 1;
        uint64_t w = 0;
        for (size_t q = 0; q < a.args.size(); ++q) w = (w << 8) | static_cast<uint64_t>(args[q] + 1);
        return r.tuples.count(w) != 0;
    }

    // `pos` is false below an odd number of negations.
    bool eval(int i, bool pos) {
        const FormulaNode& n = f_.node(i);
        switch (n.kind) {
        case Kind::Atom: return atom(i) == pos;
        case Kind::NegAtom: return atom(i) != pos;
        case Kind::Not: return eval(n.left, !pos);
        case Kind::And:
        case Kind::Or: {
            bool conj = (n.kind == Kind::And) == pos;
            bool l = eval(n.left, pos);
            if (conj && !l) return false;
            if (!conj && l) return true;
            return eval(n.right, pos);
        }
        case Kind::ForallSet:
        case Kind::ExistsSet: {
            bool all = (n.kind == Kind::ForallSet) == pos;
            size_t id = static_cast<size_t>(bound_[static_cast<size_t>(i)]);
            rel_[id].present = true;
            rel_[id].arity = 1;
            uint64_t count = uint64_t{1} << objs_.size();
            bool result = all;
            for (uint64_t u = 0; u < count; ++u) {
                set_[id] = u;
                if (eval(n.left, pos) != all) {
                    result = !all;
                    break;
                }
            }
            rel_[id].present = false;
            return result;
        }
        case Kind::ForallObj:
        case Kind::ExistsObj: {
            bool all = (n.kind == Kind::ForallObj) == pos;
            size_t id = static_cast<size_t>(bound_[static_cast<size_t>(i)]);
            bool result = all;
            for (int a = 0; a < static_cast<int>(objs_.size()); ++a) {
                obj_[id] = a;
                if (eval(n.left, pos) != all) {
                    result = !all;
                    break;
                }
            }
            obj_[id] = -1;
            return result;
        }
        }
        return false;
    }
};

int set_nesting(const Formula& f, int i) {
    const FormulaNode& n = f.node(i);
    switch (n.kind) {
    case Kind::Atom:
    case Kind::NegAtom: return 0;
    case Kind::And:
    case Kind::Or: return std::max(set_nesting(f, n.left), set_nesting(f, n.right));
    case Kind::ForallSet:
    case Kind::ExistsSet: return 1 + set_nesting(f, n.left);
    default: return set_nesting(f, n.left);
    }
}

} // namespace

bool brute_force_mc(const Structure& a, const Formula& f) {
    Evaluator e(a, f);
    return e.run();
}

Cost brute_force_linmso(const Structure& a, const Problem& p) {
    p.validate();
    if (!(a.vocabulary() == p.base)) throw InputError("structure vocabulary does not match the problem");
    size_t l = p.free.size();
    size_t n = a.size();
    size_t depth = static_cast<size_t>(set_nesting(p.formula, p.formula.root()));
    if ((l + depth) * n > 24) throw TooLargeError("instance too large for the brute-force oracle");

    Evaluator e(a, p.formula);
    uint64_t per = uint64_t{1} << n;
    std::vector<uint64_t> u(l, 0);
    Cost best = kInfinity;
    // Odometer over all l-tuples of subsets, binary-counting order.
    while (true) {
        Cost v = 0;
        for (size_t k = 0; k < l; ++k) {
            e.bind_set(p.free[k].name, u[k]);
            Cost w = p.free[k].weight * std::popcount(u[k]);
            v = add_cost(v, w);
        }
        if (v < best && e.run()) best = v;
        size_t k = 0;
        while (k < l && ++u[k] == per) u[k++] = 0;
        if (k == l) break;
    }
    return best;
}

} // namespace linmso
