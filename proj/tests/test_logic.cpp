#include "doctest.h"

#include "support/generators.hpp"

#include "linmso/errors.hpp"
#include "linmso/logic.hpp"
#include "linmso/problems.hpp"

using namespace linmso;

namespace {

const Vocabulary kGraph{{"adj", 2}};
const Vocabulary kGraphC{{"adj", 2}, {"C", 1}};

Formula nnf(const std::string& text, const Vocabulary& v = kGraphC) { return to_nnf(parse_formula(text, v)); }

} // namespace

TEST_CASE("vocabulary queries follow arities") {
    Vocabulary v{{"adj", 2}, {"P", 1}, {"c", 0}, {"t", 3}};
    CHECK(v.size() == 4);
    CHECK(v.nullaries().size() == 1);
    CHECK(v.relations().size() == 3);
    CHECK(v.unaries().size() == 1);
    CHECK(v.max_arity() == 3);
    CHECK(v.arity_of("adj") == 2);
    CHECK_THROWS_AS(v.add({"adj", 3}), InputError);
    v.add({"adj", 2});
    CHECK(v.size() == 4);
}

TEST_CASE("parse the vertex cover formula") {
    Formula f = parse_formula("all x. all y. (~adj(x,y) | x in C | y in C)", kGraphC);
    const FormulaNode& r = f.node(f.root());
    CHECK(r.kind == Kind::ForallObj);
    CHECK(r.symbol == "x");
    const FormulaNode& r2 = f.node(r.left);
    CHECK(r2.kind == Kind::ForallObj);
    CHECK(r2.symbol == "y");
    CHECK(quantifier_rank(f) == 2);
    CHECK(free_symbols(f) == std::set<std::string>{"C"});
}

TEST_CASE("single membership atom") {
    Vocabulary v{{"C", 1}, {"x", 0}};
    Formula f = parse_formula("x in C", v);
    REQUIRE(f.size() == 1);
    const FormulaNode& n = f.node(f.root());
    CHECK(n.kind == Kind::Atom);
    CHECK(n.symbol == "C");
    CHECK(n.args == std::vector<std::string>{"x"});
    CHECK(classify(f, f.root()) == Class::Atomic);
}

TEST_CASE("syntax errors carry a location") {
    try {
        parse_formula("all . x", kGraph);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 5);
    }
    try {
        parse_formula("all x.\n  (adj(x,x) &)", kGraph);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 14);
    }
}

TEST_CASE("semantic errors") {
    CHECK_THROWS_AS(parse_formula("all x. edge(x,x)", kGraph), ParseError);   // undeclared
    CHECK_THROWS_AS(parse_formula("all x. adj(x)", kGraph), ParseError);      // arity
    CHECK_THROWS_AS(parse_formula("all x. ex x. adj(x,x)", kGraph), ParseError); // rebinding
    CHECK_THROWS_AS(parse_formula("all x. adj(x,y)", kGraph), ParseError);    // unbound object
    CHECK_THROWS_AS(parse_formula("all x. x in Y", kGraph), ParseError);      // unbound set
}

TEST_CASE("to_nnf pushes negation to atoms") {
    Vocabulary v{{"adj", 2}, {"C", 1}, {"x", 0}, {"y", 0}};
    CHECK(nnf("~(adj(x,y) & x in C)", v) == nnf("~adj(x,y) | ~x in C", v));
    CHECK(nnf("~~adj(x,y)", v) == nnf("adj(x,y)", v));
    CHECK(nnf("~(ex X. x in X)", v) == nnf("all X. ~x in X", v));
    CHECK(nnf("~(all z. ex Y. z in Y)", v) == nnf("ex z. all Y. ~z in Y", v));
    Formula f = nnf("~(ex X. x in X)", v);
    CHECK(f.node(f.root()).kind == Kind::ForallSet);
    CHECK(f.node(f.node(f.root()).left).kind == Kind::NegAtom);
}

TEST_CASE("implication and biconditional desugar") {
    Vocabulary v{{"adj", 2}, {"C", 1}, {"x", 0}, {"y", 0}};
    CHECK(nnf("adj(x,y) -> x in C", v) == nnf("~adj(x,y) | x in C", v));
    CHECK(nnf("adj(x,y) <-> x in C", v) == nnf("(~adj(x,y) | x in C) & (~x in C | adj(x,y))", v));
}

TEST_CASE("to_nnf is idempotent and preserves quantifier rank") {
    for (size_t i = 0; i < testing::corpus_texts().size(); ++i) {
        Formula raw = parse_formula("~(" + testing::corpus_texts()[i] + ")", testing::corpus_vocabulary());
        Formula once = to_nnf(raw);
        CHECK(once.is_nnf());
        CHECK(to_nnf(once) == once);
        CHECK(quantifier_rank(once) == quantifier_rank(raw));
    }
}

TEST_CASE("print then parse round-trips") {
    for (const auto& text : testing::corpus_texts()) {
        Formula f = parse_formula(text, testing::corpus_vocabulary());
        Formula g = parse_formula(to_string(f), testing::corpus_vocabulary());
        CHECK(f == g);
    }
    for (const auto& name : builtin_names()) {
        Problem p = builtin(name);
        CHECK(to_nnf(parse_formula(to_string(p.formula), p.vocabulary())) == p.formula);
    }
}

TEST_CASE("quantifier rank of the builtin formulas") {
    CHECK(quantifier_rank(parse_formula("adj(x,y)", Vocabulary{{"adj", 2}, {"x", 0}, {"y", 0}})) == 0);
    CHECK(quantifier_rank(builtin("vc").formula) == 2);
    CHECK(quantifier_rank(builtin("ds").formula) == 2);
    CHECK(quantifier_rank(builtin("3col").formula) == 5);
}

TEST_CASE("free symbols of the builtin formulas") {
    CHECK(free_symbols(builtin("vc").formula) == std::set<std::string>{"C"});
    CHECK(free_symbols(builtin("ds").formula) == std::set<std::string>{"D"});
    CHECK(free_symbols(builtin("3col").formula).empty());
    Vocabulary v{{"adj", 2}, {"c", 0}};
    CHECK(free_symbols(parse_formula("ex x. adj(x,c)", v)) == std::set<std::string>{"c"});
}

TEST_CASE("classify") {
    Vocabulary v{{"adj", 2}, {"R", 1}, {"x", 0}, {"y", 0}};
    CHECK(classify(nnf("adj(x,y) & x in R", v), nnf("adj(x,y) & x in R", v).root()) == Class::Universal);
    CHECK(classify(nnf("adj(x,y) | x in R", v), nnf("adj(x,y) | x in R", v).root()) == Class::Existential);
    Formula e = parse_formula("ex z. z in R", v);
    CHECK(classify(e, e.root()) == Class::Existential);
    Formula a = parse_formula("all Z. x in Z", v);
    CHECK(classify(a, a.root()) == Class::Universal);
    Formula s = parse_formula("ex Z. x in Z", v);
    CHECK(classify(s, s.root()) == Class::Existential);
    Formula n = nnf("~adj(x,y)", v);
    CHECK(classify(n, n.root()) == Class::Negated);
    // Total on every node of every corpus formula.
    for (size_t i = 0; i < testing::corpus_texts().size(); ++i) {
        Formula f = testing::corpus_formula(i);
        for (size_t k = 0; k < f.arena_size(); ++k) CHECK_NOTHROW(classify(f, static_cast<int>(k)));
    }
}

TEST_CASE("formula size counts reachable nodes") {
    Formula f = nnf("all x. all y. (~adj(x,y) | x in C | y in C)", kGraphC);
    CHECK(f.size() == 7);
}
