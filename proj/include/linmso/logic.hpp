#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace linmso {

struct Symbol {
    std::string name;
    int arity = 0;

    bool nullary() const { return arity == 0; }
    bool operator==(const Symbol&) const = default;
};

/**
 * A finite set of symbols with unique names, iterated in name order.
 */
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::initializer_list<Symbol> syms);

    // Throws InputError if the name exists with a different arity.
    void add(const Symbol& s);
    bool contains(const std::string& name) const { return syms_.count(name) != 0; }
    const Symbol* find(const std::string& name) const;
    int arity_of(const std::string& name) const;

    std::vector<Symbol> symbols() const;
    std::vector<Symbol> nullaries() const;
    std::vector<Symbol> relations() const;
    std::vector<Symbol> unaries() const;
    int max_arity() const;
    size_t size() const { return syms_.size(); }
    bool empty() const { return syms_.empty(); }

    Vocabulary merged(const Vocabulary& other) const;
    bool operator==(const Vocabulary&) const = default;

private:
    std::map<std::string, Symbol> syms_;
};

enum class Kind : uint8_t {
    Atom,
    NegAtom,
    And,
    Or,
    ForallSet,
    ExistsSet,
    ForallObj,
    ExistsObj,
    Not, // only before NNF
};

enum class Class : uint8_t { Atomic, Negated, Universal, Existential };

const char* kind_name(Kind k);

struct FormulaNode {
    Kind kind = Kind::Atom;
    std::string symbol;            // relation (atoms) or bound symbol (quantifiers)
    std::vector<std::string> args; // atom arguments, nullary symbols
    int left = -1;                 // And/Or left, quantifier/Not body
    int right = -1;                // And/Or right
    int line = 0;
    int col = 0;

    bool is_quantifier() const {
        return kind == Kind::ForallSet || kind == Kind::ExistsSet ||
               kind == Kind::ForallObj || kind == Kind::ExistsObj;
    }
    bool is_atomic() const { return kind == Kind::Atom || kind == Kind::NegAtom; }
};

/**
 * Formula stored as an arena of nodes. Node indices are stable and serve as
 * subformula identity.
 */
class Formula {
public:
    Formula() = default;

    int add(FormulaNode n);
    void set_root(int r) { root_ = r; }

    int root() const { return root_; }
    const FormulaNode& node(int i) const { return nodes_.at(static_cast<size_t>(i)); }
    const std::vector<FormulaNode>& nodes() const { return nodes_; }
    size_t arena_size() const { return nodes_.size(); }

    // Number of nodes reachable from the root.
    size_t size() const;
    bool is_nnf() const;

    // Subtree equality ignoring source positions and arena layout.
    bool same_tree(int i, const Formula& other, int j) const;
    bool operator==(const Formula& o) const;

    // Copies the subtree rooted at i (from src) into this arena.
    int clone_from(const Formula& src, int i);

private:
    std::vector<FormulaNode> nodes_;
    int root_ = -1;
};

Formula parse_formula(const std::string& text, const Vocabulary& base_vocab);

Formula to_nnf(const Formula& f);

int quantifier_rank(const Formula& f);
int quantifier_rank(const Formula& f, int node);

// Unary and nullary symbols occurring free in f.
std::set<std::string> free_symbols(const Formula& f);

Class classify(const Formula& f, int node);

// Fully parenthesised surface syntax accepted by parse_formula.
std::string to_string(const Formula& f);
std::string to_string(const Formula& f, int node);

} // namespace linmso
