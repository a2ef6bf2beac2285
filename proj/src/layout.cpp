#include "linmso/engine.hpp"
#include "linmso/errors.hpp"

#include <algorithm>

namespace linmso {

Layout::Layout(Formula nnf, Vocabulary tau) : formula_(std::move(nnf)), tau_(std::move(tau)) {
    if (!formula_.is_nnf()) throw InputError("formula must be in negation normal form");
    if (formula_.root() < 0) throw InputError("empty formula");
    relations_ = tau_.relations();
    for (const auto& c : tau_.nullaries()) constants_.push_back(c.name);
    if (relations_.size() > 255) throw InputError("too many relation symbols");
    for (const auto& r : relations_)
        if (r.arity > kMaxArity)
            throw InputError("relation '" + r.name + "' exceeds the supported arity " + std::to_string(kMaxArity));
    if (constants_.size() > static_cast<size_t>(kMaxSlots)) throw InputError("too many nullary symbols");

    nodes_.resize(formula_.arena_size());
    obj_names_.resize(formula_.arena_size());
    set_names_.resize(formula_.arena_size());

    std::vector<std::string> objs = constants_;
    std::vector<std::string> sets;

    auto rec = [&](auto& self, int i) -> void {
        const FormulaNode& fn = formula_.node(i);
        Node& n = nodes_[static_cast<size_t>(i)];
        n.kind = fn.kind;
        n.cls = classify(formula_, i);
        n.left = fn.left;
        n.right = fn.right;
        n.nobj = static_cast<uint8_t>(objs.size());
        n.nset = static_cast<uint8_t>(sets.size());
        obj_names_[static_cast<size_t>(i)] = objs;
        set_names_[static_cast<size_t>(i)] = sets;
        auto bound = [&](const std::string& s) {
            return std::find(objs.begin(), objs.end(), s) != objs.end() ||
                   std::find(sets.begin(), sets.end(), s) != sets.end();
        };

        if (fn.is_atomic()) {
            auto sit = std::find(sets.begin(), sets.end(), fn.symbol);
            if (sit != sets.end()) {
                if (fn.args.size() != 1) throw InputError("set symbol '" + fn.symbol + "' applied to several arguments");
                n.set_atom = true;
                n.rel = static_cast<uint8_t>(sit - sets.begin());
            } else {
                int r = relation_index(fn.symbol);
                if (r < 0) throw InputError("symbol '" + fn.symbol + "' is not in the vocabulary");
                if (static_cast<size_t>(relations_[static_cast<size_t>(r)].arity) != fn.args.size())
                    throw InputError("arity mismatch for '" + fn.symbol + "'");
                n.rel = static_cast<uint8_t>(r);
            }
            n.arity = static_cast<uint8_t>(fn.args.size());
            for (size_t t = 0; t < fn.args.size(); ++t) {
                auto oit = std::find(objs.rbegin(), objs.rend(), fn.args[t]);
                if (oit == objs.rend()) throw InputError("object symbol '" + fn.args[t] + "' is not in scope");
                n.args[t] = static_cast<uint8_t>(objs.rend() - oit - 1);
            }
            return;
        }
        if (fn.is_quantifier()) {
            if (bound(fn.symbol) || tau_.contains(fn.symbol))
                throw InputError("quantifier rebinds symbol '" + fn.symbol + "'");
            bool set = fn.kind == Kind::ForallSet || fn.kind == Kind::ExistsSet;
            auto& scope = set ? sets : objs;
            if (scope.size() >= static_cast<size_t>(kMaxSlots)) throw InputError("formula nests too many quantifiers");
            n.slot = static_cast<uint8_t>(scope.size());
            scope.push_back(fn.symbol);
            self(self, fn.left);
            scope.pop_back();
            return;
        }
        self(self, fn.left);
        self(self, fn.right);
    };
    rec(rec, formula_.root());
}

int Layout::relation_index(const std::string& name) const {
    for (size_t i = 0; i < relations_.size(); ++i)
        if (relations_[i].name == name) return static_cast<int>(i);
    return -1;
}

} // namespace linmso
