#include "doctest.h"

#include "support/checks.hpp"
#include "support/generators.hpp"

#include "linmso/errors.hpp"
#include "linmso/oracle.hpp"
#include "linmso/problems.hpp"
#include "linmso/solver.hpp"
#include "linmso/game.hpp"

#include <set>

using namespace linmso;
using namespace linmso::testing;

namespace {

std::vector<NodeTable> record(Solver& s, const Structure& g, const NiceTreeDecomposition& ntd, Cost* opt = nullptr) {
    std::vector<NodeTable> out;
    s.set_observer([&](const NodeTable& t) { out.push_back(t); });
    Cost v = s.solve(g, ntd).opt;
    if (opt) *opt = v;
    s.set_observer(nullptr);
    return out;
}

} // namespace

TEST_CASE("cost arithmetic") {
    CHECK(add_cost(2, 3) == 5);
    CHECK(add_cost(kInfinity, 3) == kInfinity);
    CHECK(add_cost(-2, kInfinity) == kInfinity);
    CHECK_THROWS_AS(add_cost(kInfinity - 1, 5), InputError);
    CHECK_THROWS_AS(add_cost(std::numeric_limits<Cost>::min(), -1), InputError);
    CHECK(cost_to_string(kInfinity) == "infinity");
    CHECK(cost_to_string(-4) == "-4");
}

TEST_CASE("small optima") {
    CHECK(solve(path_graph(2), builtin("vc")).opt == 1);
    CHECK(solve(complete_graph(3), builtin("3col")).opt == 0);
    CHECK(solve(complete_graph(4), builtin("3col")).opt == kInfinity);
    Structure star = graph(4, {{1, 2}, {1, 3}, {1, 4}});
    CHECK(solve(star, builtin("ds")).opt == 1);
    CHECK(solve(graph(1, {}), builtin("ds")).opt == 1);
    CHECK(solve(graph(3, {}), builtin("vc")).opt == 0);
}

TEST_CASE("known values") {
    Outcome o = check_known_values();
    INFO(o.summary());
    CHECK(o.ok());
}

TEST_CASE("empty universe") {
    Structure empty = graph(0, {});
    CHECK(solve(empty, builtin("vc")).opt == 0);
    CHECK(solve(empty, builtin("ds")).opt == 0);
    CHECK(solve(empty, builtin("3col")).opt == 0);
    Problem need = load_problem("vocabulary adj/2;\nfree C;\nformula ex x. x in C;\n");
    CHECK(solve(empty, need).opt == kInfinity);
    CHECK(solve(graph(1, {}), need).opt == 1);
}

TEST_CASE("leaf tables") {
    Solver vc(builtin("vc"));
    NiceTreeDecomposition ntd = nicify(min_fill_td(graph(1, {})));
    auto tables = record(vc, graph(1, {}), ntd);
    const NodeTable& leaf = tables.front();
    REQUIRE(leaf.nice->kind == NiceKind::Leaf);
    REQUIRE(leaf.cells.count({1}));
    CHECK(leaf.cells.at({1}).size() == 1);
    CHECK(leaf.cells.at({1})[0].value == 0);
    // Not in the cover: undetermined, a later neighbor could need it.
    REQUIRE(leaf.cells.count({0}));
    CHECK(leaf.cells.at({0}).size() == 1);
    CHECK_FALSE(is_sentinel(leaf.cells.at({0})[0].game));

    Solver col(builtin("3col"));
    auto t3 = record(col, graph(1, {}), ntd);
    REQUIRE(t3.front().cells.size() == 1);
    CHECK(t3.front().cells.begin()->second.size() == 1);
}

TEST_CASE("introducing an isolated vertex keeps entries and values") {
    Solver vc(builtin("vc"));
    Structure g = graph(2, {});
    NiceTreeDecomposition ntd = nicify(parse_td("s td 1 2 2\nb 1 1 2\n"));
    auto tables = record(vc, g, ntd);
    REQUIRE(tables[1].nice->kind == NiceKind::Introduce);
    for (const auto& [u, entries] : tables[0].cells)
        for (uint64_t bit : {uint64_t{0}, uint64_t{1}}) {
            auto it = tables[1].cells.find({u[0] | bit << 1});
            REQUIRE(it != tables[1].cells.end());
            CHECK(it->second.size() == entries.size());
            CHECK(it->second[0].value == entries[0].value);
        }
}

TEST_CASE("forget accrues weights") {
    Solver vc(builtin("vc"));
    Cost opt = 0;
    auto tables = record(vc, path_graph(2), nicify(parse_td("s td 1 2 2\nb 1 1 2\n")), &opt);
    CHECK(opt == 1);
    const NodeTable& root = tables.back();
    REQUIRE(root.cells.size() == 1);
    Cost best = kInfinity;
    for (const auto& e : root.cells.begin()->second) best = std::min(best, e.value);
    CHECK(best == 1);

    Solver ds(builtin("ds"));
    auto td = record(ds, graph(1, {}), nicify(min_fill_td(graph(1, {}))), &opt);
    CHECK(opt == 1);
    const NodeTable& top = td.back();
    REQUIRE(top.cells.size() == 1);
    best = kInfinity;
    for (const auto& e : top.cells.begin()->second) {
        Game g{&ds.store(), top.contexts.begin()->second, e.game};
        if (eval(convert(g)).is_top()) best = std::min(best, e.value);
    }
    CHECK(best == 1);
}

TEST_CASE("zero weights keep values at zero") {
    Problem p = load_problem("vocabulary adj/2;\nfree C weight 0;\nformula all x. all y. (~adj(x,y) | x in C | y in C);\n");
    Solver s(p);
    Structure g = cycle_graph(5);
    std::vector<NodeTable> tables = record(s, g, nicify(min_fill_td(g)));
    for (const auto& t : tables)
        for (const auto& [_, entries] : t.cells)
            for (const auto& e : entries) CHECK(e.value == 0);
}

TEST_CASE("tables never hold BOTTOM") {
    for (const auto& name : builtin_names()) {
        Solver s(builtin(name));
        Structure g = grid_graph(2, 3);
        for (const auto& t : record(s, g, nicify(min_fill_td(g))))
            for (const auto& [_, entries] : t.cells) {
                CHECK_FALSE(entries.empty());
                for (const auto& e : entries) CHECK(e.game != kBottom);
            }
    }
}

TEST_CASE("a forgotten vertex outside the cover leaves its own class") {
    // Single vertex, bag emptied by the forget node: the expansion with the
    // vertex outside C keeps an open y := nil play, the other one does not.
    Solver s(builtin("vc"));
    std::vector<NodeTable> tables = record(s, grid_graph(1, 1), nicify(grid_path_td(1, 1)));
    const NodeTable& top = tables.back();
    REQUIRE(top.cells.size() == 1);
    const auto& entries = top.cells.begin()->second;
    REQUIRE(entries.size() == 2);
    std::set<Cost> values;
    for (const auto& e : entries) values.insert(e.value);
    CHECK(values == std::set<Cost>{0, 1});
}

TEST_CASE("input validation") {
    Structure g = path_graph(3);
    Solver s(builtin("vc"));
    CHECK_THROWS_AS(s.solve(g, nicify(parse_td("s td 1 2 3\nb 1 1 2\n"))), InputError);
    Structure other(Vocabulary{{"edge", 2}}, {1});
    CHECK_THROWS_AS(s.solve(other, nicify(parse_td("s td 1 1 1\nb 1 1\n"))), InputError);
    CHECK_THROWS_AS(s.solve(g, NiceTreeDecomposition{}), InputError);
    Problem bad = builtin("vc");
    bad.free.clear();
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(Solver{bad}, InputError);
}

TEST_CASE("maximization negates the reported value") {
    Problem p = load_problem(
        "vocabulary adj/2;\nfree I;\nobjective max;\nformula all x. all y. (~adj(x,y) | ~x in I | ~y in I);\n");
    CHECK(p.maximize);
    Cost internal = solve(cycle_graph(5), p).opt;
    CHECK(internal == -2);
    CHECK(user_value(p, internal) == 2);
    CHECK(brute_force_linmso(cycle_graph(5), p) == -2);
}

TEST_CASE("garbage collection does not change results") {
    SolverOptions opts;
    opts.gc_threshold = 64;
    for (const auto& name : builtin_names()) {
        Solver tight(builtin(name), opts), plain(builtin(name));
        Rng rng(31);
        for (int i = 0; i < 10; ++i) {
            Structure g = random_graph(rng, 9, 0.3);
            NiceTreeDecomposition ntd = nicify(min_fill_td(g));
            CHECK(tight.solve(g, ntd).opt == plain.solve(g, ntd).opt);
        }
    }
}

TEST_CASE("statistics") {
    SolverOptions opts;
    opts.game_sizes = true;
    Solver s(builtin("ds"), opts);
    Structure g = grid_graph(3, 4);
    SolveResult r = s.solve(g, nicify(grid_path_td(3, 4)));
    CHECK(r.stats.nodes > 0);
    CHECK(r.stats.max_cells > 0);
    CHECK(r.stats.max_entries > 0);
    CHECK(r.stats.max_game_size > 0);
    CHECK(r.stats.store_nodes > 0);
}

TEST_CASE("table audit on small graphs") {
    for (const char* p : {"vc", "ds"}) {
        Outcome o = check_table_audit(4, p);
        INFO(p << ": " << o.summary());
        CHECK(o.ok());
        CHECK(o.checked > 0);
    }
}

TEST_CASE("3col tables keep a single entry") {
    Outcome o = check_table_bounds(3, 5, "3col");
    INFO(o.summary());
    CHECK(o.ok());
}

TEST_CASE("oracle equivalence on small graphs") {
    OracleSweep sweep;
    sweep.exhaustive_max_n = 4;
    sweep.sample_n = 5;
    sweep.samples = 100;
    Outcome o = check_oracle_equivalence(sweep);
    INFO(o.summary());
    CHECK(o.ok());
}

TEST_CASE("decomposition invariance on a few graphs") {
    Outcome o = check_decomposition_invariance(20, 10, 3);
    INFO(o.summary());
    CHECK(o.ok());
    CHECK(o.checked == 60);
}

TEST_CASE("higher arity relations") {
    Vocabulary base{{"t", 3}};
    Problem p = load_problem("vocabulary t/3;\nfree S;\nformula all x. all y. all z. (~t(x,y,z) | x in S | z in S);\n");
    Structure a(base, {1, 2, 3, 4});
    a.add_tuple("t", {1, 2, 3});
    a.add_tuple("t", {2, 3, 4});
    a.add_tuple("t", {4, 4, 1});
    NiceTreeDecomposition ntd = nicify(parse_td("s td 1 4 4\nb 1 1 2 3 4\n"));
    CHECK(solve(a, p, &ntd).opt == 2);
    CHECK(brute_force_linmso(a, p) == 2);
}
