#include "linmso/logic.hpp"

#include "linmso/errors.hpp"

#include <algorithm>
#include <functional>

namespace linmso {

Vocabulary::Vocabulary(std::initializer_list<Symbol> syms) {
    for (const auto& s : syms) add(s);
}

void Vocabulary::add(const Symbol& s) {
    if (s.arity < 0) throw InputError("negative arity for symbol '" + s.name + "'");
    auto it = syms_.find(s.name);
    if (it != syms_.end()) {
        if (it->second.arity != s.arity)
            throw InputError("symbol '" + s.name + "' redeclared with a different arity");
        return;
    }
    syms_.emplace(s.name, s);
}

const Symbol* Vocabulary::find(const std::string& name) const {
    auto it = syms_.find(name);
    return it == syms_.end() ? nullptr : &it->second;
}

int Vocabulary::arity_of(const std::string& name) const {
    const Symbol* s = find(name);
    if (!s) throw InputError("unknown symbol '" + name + "'");
    return s->arity;
}

std::vector<Symbol> Vocabulary::symbols() const {
    std::vector<Symbol> out;
    for (const auto& [_, s] : syms_) out.push_back(s);
    return out;
}

std::vector<Symbol> Vocabulary::nullaries() const {
    std::vector<Symbol> out;
    for (const auto& [_, s] : syms_)
        if (s.arity == 0) out.push_back(s);
    return out;
}

std::vector<Symbol> Vocabulary::relations() const {
    std::vector<Symbol> out;
    for (const auto& [_, s] : syms_)
        if (s.arity > 0) out.push_back(s);
    return out;
}

std::vector<Symbol> Vocabulary::unaries() const {
    std::vector<Symbol> out;
    for (const auto& [_, s] : syms_)
        if (s.arity == 1) out.push_back(s);
    return out;
}

int Vocabulary::max_arity() const {
    int m = 0;
    for (const auto& [_, s] : syms_) m = std::max(m, s.arity);
    return m;
}

Vocabulary Vocabulary::merged(const Vocabulary& other) const {
    Vocabulary v = *this;
    for (const auto& [_, s] : other.syms_) v.add(s);
    return v;
}

const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Atom: return "Atom";
    case Kind::NegAtom: return "NegAtom";
    case Kind::And: return "And";
    case Kind::Or: return "Or";
    case Kind::ForallSet: return "ForallSet";
    case Kind::ExistsSet: return "ExistsSet";
    case Kind::ForallObj: return "ForallObj";
    case Kind::ExistsObj: return "ExistsObj";
    case Kind::Not: return "Not";
    }
    return "?";
}

int Formula::add(FormulaNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

size_t Formula::size() const {
    if (root_ < 0) return 0;
    size_t count = 0;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        ++count;
        const auto& n = node(i);
        if (n.left >= 0) stack.push_back(n.left);
        if (n.right >= 0) stack.push_back(n.right);
    }
    return count;
}

bool Formula::is_nnf() const {
    if (root_ < 0) return true;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const auto& n = node(i);
        if (n.kind == Kind::Not) return false;
        if (n.left >= 0) stack.push_back(n.left);
        if (n.right >= 0) stack.push_back(n.right);
    }
    return true;
}

bool Formula::same_tree(int i, const Formula& other, int j) const {
    if ((i < 0) != (j < 0)) return false;
    if (i < 0) return true;
    const auto& a = node(i);
    const auto& b = other.node(j);
    if (a.kind != b.kind || a.symbol != b.symbol || a.args != b.args) return false;
    return same_tree(a.left, other, b.left) && same_tree(a.right, other, b.right);
}

bool Formula::operator==(const Formula& o) const { return same_tree(root_, o, o.root_); }

int Formula::clone_from(const Formula& src, int i) {
    if (i < 0) return -1;
    FormulaNode n = src.node(i);
    n.left = clone_from(src, n.left);
    n.right = clone_from(src, n.right);
    return add(std::move(n));
}

namespace {

Kind dual(Kind k) {
    switch (k) {
    case Kind::Atom: return Kind::NegAtom;
    case Kind::NegAtom: return Kind::Atom;
    case Kind::And: return Kind::Or;
    case Kind::Or: return Kind::And;
    case Kind::ForallSet: return Kind::ExistsSet;
    case Kind::ExistsSet: return Kind::ForallSet;
    case Kind::ForallObj: return Kind::ExistsObj;
    case Kind::ExistsObj: return Kind::ForallObj;
    case Kind::Not: return Kind::Not;
    }
    return k;
}

int nnf_rec(const Formula& src, int i, bool negate, Formula& dst) {
    const FormulaNode& n = src.node(i);
    if (n.kind == Kind::Not) return nnf_rec(src, n.left, !negate, dst);
    FormulaNode out = n;
    out.kind = negate ? dual(n.kind) : n.kind;
    out.left = n.left >= 0 ? nnf_rec(src, n.left, negate, dst) : -1;
    out.right = n.right >= 0 ? nnf_rec(src, n.right, negate, dst) : -1;
    return dst.add(std::move(out));
}

} // namespace

Formula to_nnf(const Formula& f) {
    Formula out;
    if (f.root() >= 0) out.set_root(nnf_rec(f, f.root(), false, out));
    return out;
}

int quantifier_rank(const Formula& f, int i) {
    const auto& n = f.node(i);
    switch (n.kind) {
    case Kind::Atom:
    case Kind::NegAtom: return 0;
    case Kind::Not: return quantifier_rank(f, n.left);
    case Kind::And:
    case Kind::Or: return std::max(quantifier_rank(f, n.left), quantifier_rank(f, n.right));
    default: return 1 + quantifier_rank(f, n.left);
    }
}

int quantifier_rank(const Formula& f) { return f.root() < 0 ? 0 : quantifier_rank(f, f.root()); }

std::set<std::string> free_symbols(const Formula& f) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    auto is_bound = [&](const std::string& s) {
        return std::find(bound.begin(), bound.end(), s) != bound.end();
    };
    std::function<void(int)> rec = [&](int i) {
        const auto& n = f.node(i);
        if (n.is_atomic()) {
            if (n.args.size() == 1 && !is_bound(n.symbol)) out.insert(n.symbol);
            for (const auto& a : n.args)
                if (!is_bound(a)) out.insert(a);
            return;
        }
        if (n.is_quantifier()) {
            bound.push_back(n.symbol);
            rec(n.left);
            bound.pop_back();
            return;
        }
        if (n.left >= 0) rec(n.left);
        if (n.right >= 0) rec(n.right);
    };
    if (f.root() >= 0) rec(f.root());
    return out;
}

Class classify(const Formula& f, int i) {
    switch (f.node(i).kind) {
    case Kind::Atom: return Class::Atomic;
    case Kind::NegAtom: return Class::Negated;
    case Kind::And:
    case Kind::ForallSet:
    case Kind::ForallObj: return Class::Universal;
    case Kind::Or:
    case Kind::ExistsSet:
    case Kind::ExistsObj: return Class::Existential;
    case Kind::Not: break;
    }
    throw InputError("classify: formula is not in negation normal form");
}

namespace {

std::string atom_text(const FormulaNode& n) {
    if (n.args.size() == 1) return n.args[0] + " in " + n.symbol;
    std::string s = n.symbol + "(";
    for (size_t k = 0; k < n.args.size(); ++k) {
        if (k) s += ",";
        s += n.args[k];
    }
    return s + ")";
}

std::string print_rec(const Formula& f, int i);

std::string print_operand(const Formula& f, int i) {
    const auto& n = f.node(i);
    if (n.is_atomic() || n.kind == Kind::Not) return print_rec(f, i);
    return "(" + print_rec(f, i) + ")";
}

std::string print_rec(const Formula& f, int i) {
    const auto& n = f.node(i);
    switch (n.kind) {
    case Kind::Atom: return atom_text(n);
    case Kind::NegAtom: return "~" + atom_text(n);
    case Kind::Not: {
        const auto& b = f.node(n.left);
        if (b.kind == Kind::Atom) return "~" + atom_text(b);
        return "~(" + print_rec(f, n.left) + ")";
    }
    case Kind::And: return print_operand(f, n.left) + " & " + print_operand(f, n.right);
    case Kind::Or: return print_operand(f, n.left) + " | " + print_operand(f, n.right);
    case Kind::ForallSet:
    case Kind::ForallObj: return "all " + n.symbol + ". " + print_rec(f, n.left);
    case Kind::ExistsSet:
    case Kind::ExistsObj: return "ex " + n.symbol + ". " + print_rec(f, n.left);
    }
    return "";
}

} // namespace

std::string to_string(const Formula& f, int node) { return print_rec(f, node); }

std::string to_string(const Formula& f) { return f.root() < 0 ? "" : print_rec(f, f.root()); }

} // namespace linmso
