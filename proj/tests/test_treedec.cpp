#include "doctest.h"

#include "support/generators.hpp"

#include "linmso/errors.hpp"
#include "linmso/treedec.hpp"

#include <algorithm>
#include <numeric>

using namespace linmso;
using namespace linmso::testing;

namespace {

// Treewidth as the best elimination ordering.
int brute_treewidth(const Structure& g) {
    std::vector<Object> order(g.universe().begin(), g.universe().end());
    int best = static_cast<int>(order.size());
    do best = std::min(best, elimination_td(g, order).width());
    while (std::next_permutation(order.begin(), order.end()));
    return best;
}

void check_nice(const NiceTreeDecomposition& ntd) {
    CHECK_NOTHROW(ntd.check());
    CHECK(ntd.nodes[static_cast<size_t>(ntd.root)].bag.empty());
    for (const auto& n : ntd.nodes)
        if (n.kind == NiceKind::Leaf) CHECK(n.bag.size() == 1);
}

} // namespace

TEST_CASE("parse and serialize td") {
    std::string text = "c path\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";
    TreeDecomposition td = parse_td(text);
    CHECK(td.n == 3);
    CHECK(td.size() == 2);
    CHECK(td.width() == 1);
    CHECK(serialize_td(td) == text);
    CHECK(validate_td(td, path_graph(3)).ok);
    TreeDecomposition empty = parse_td("s td 1 0 0\nb 1\n");
    CHECK(empty.size() == 1);
    CHECK(empty.bags[0].empty());
}

TEST_CASE("td parse errors") {
    CHECK_THROWS_AS(parse_td("s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 1 3\n1 2\n2 3\n3 1\n"), InputError); // cycle
    CHECK_THROWS_AS(parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 3\n"), InputError);                 // bag index
    CHECK_THROWS_AS(parse_td("s tw 2 2 3\n"), InputError);                                         // header
    CHECK_THROWS_AS(parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n"), InputError);                       // forest
    CHECK_THROWS_AS(parse_td("s td 1 2 3\nb 1 1 4\n"), InputError);                                // vertex range
}

TEST_CASE("validate_td reports each violation class") {
    TreeDecomposition td = parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    TdReport r = validate_td(td, complete_graph(3));
    CHECK_FALSE(r.ok);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].find("1") != std::string::npos);
    CHECK(r.violations[0].find("3") != std::string::npos);

    TreeDecomposition gap = parse_td("s td 3 2 4\nb 1 1 2\nb 2 3\nb 3 1 4\n1 2\n2 3\n");
    TdReport g = validate_td(gap, graph(4, {{1, 2}, {1, 4}}));
    CHECK_FALSE(g.ok);
    CHECK(g.violations.size() == 1);
    TreeDecomposition miss = parse_td("s td 1 2 3\nb 1 1 2\n");
    CHECK_FALSE(validate_td(miss, graph(3, {{1, 2}})).ok);
}

TEST_CASE("nicify a single bag") {
    NiceTreeDecomposition ntd = nicify(parse_td("s td 1 2 2\nb 1 1 2\n"));
    check_nice(ntd);
    REQUIRE(ntd.nodes.size() == 4);
    CHECK(ntd.nodes[0].kind == NiceKind::Leaf);
    CHECK(ntd.nodes[0].vertex == 1);
    CHECK(ntd.nodes[1].kind == NiceKind::Introduce);
    CHECK(ntd.nodes[1].vertex == 2);
    CHECK(ntd.nodes[2].kind == NiceKind::Forget);
    CHECK(ntd.nodes[2].vertex == 1);
    CHECK(ntd.nodes[3].kind == NiceKind::Forget);
    CHECK(ntd.nodes[3].vertex == 2);
    CHECK(ntd.width() == 1);
}

TEST_CASE("nicify a star") {
    Structure star = graph(4, {{1, 2}, {1, 3}, {1, 4}});
    TreeDecomposition td = parse_td("s td 3 2 4\nb 1 1 2\nb 2 1 3\nb 3 1 4\n1 2\n1 3\n");
    REQUIRE(validate_td(td, star).ok);
    NiceTreeDecomposition ntd = nicify(td);
    check_nice(ntd);
    CHECK(ntd.width() == 1);
    CHECK(validate_td(flatten(ntd, 4), star).ok);
    CHECK(std::count_if(ntd.nodes.begin(), ntd.nodes.end(), [](const NiceNode& n) { return n.kind == NiceKind::Join; }) >= 1);
}

TEST_CASE("nicify preserves width and validity") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        int n = 1 + below(rng, 10);
        Structure g = random_graph(rng, n, 0.3);
        TreeDecomposition td = min_fill_td(g);
        REQUIRE(validate_td(td, g).ok);
        NiceTreeDecomposition ntd = nicify(td);
        check_nice(ntd);
        CHECK(ntd.width() == td.width());
        CHECK(validate_td(flatten(ntd, n), g).ok);
        // Objects below each node follow the node kinds.
        auto below_node = subtree_objects(ntd);
        CHECK(below_node[static_cast<size_t>(ntd.root)] == g.universe());
        for (size_t k = 0; k < ntd.nodes.size(); ++k) {
            const NiceNode& nd = ntd.nodes[k];
            if (nd.kind != NiceKind::Join) continue;
            const ObjectSet& l = below_node[static_cast<size_t>(nd.children[0])];
            const ObjectSet& r = below_node[static_cast<size_t>(nd.children[1])];
            ObjectSet both;
            std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(both, both.end()));
            CHECK(both == ObjectSet(nd.bag.begin(), nd.bag.end()));
        }
    }
}

TEST_CASE("nice decomposition check rejects malformed trees") {
    NiceTreeDecomposition ntd = nicify(parse_td("s td 1 2 2\nb 1 1 2\n"));
    NiceTreeDecomposition bad = ntd;
    bad.nodes[1].bag = {1, 2, 3};
    CHECK_THROWS_AS(bad.check(), InvariantError);
    bad = ntd;
    bad.nodes[0].bag = {1, 2};
    CHECK_THROWS_AS(bad.check(), InvariantError);
}

TEST_CASE("min-fill widths") {
    Structure tree = graph(6, {{1, 2}, {1, 3}, {3, 4}, {3, 5}, {5, 6}});
    Structure c4 = cycle_graph(4), k4 = complete_graph(4);
    CHECK(brute_treewidth(tree) == 1);
    CHECK(brute_treewidth(c4) == 2);
    CHECK(brute_treewidth(k4) == 3);
    CHECK(min_fill_td(tree).width() == 1);
    CHECK(min_fill_td(c4).width() == 2);
    CHECK(min_fill_td(k4).width() == 3);
}

TEST_CASE("heuristic decompositions are valid and bounded below by treewidth") {
    Rng rng(13);
    for (int i = 0; i < 150; ++i) {
        int n = 1 + below(rng, 7);
        Structure g = random_graph(rng, n, 0.4);
        int tw = brute_treewidth(g);
        TreeDecomposition a = min_fill_td(g);
        TreeDecomposition b = elimination_td(g, min_degree_order(g));
        CHECK(validate_td(a, g).ok);
        CHECK(validate_td(b, g).ok);
        CHECK(a.width() >= tw);
        CHECK(b.width() >= tw);
    }
}

TEST_CASE("grid path decompositions") {
    for (int r = 1; r <= 4; ++r)
        for (int c = 1; c <= 6; ++c) {
            TreeDecomposition td = grid_path_td(r, c);
            CHECK(validate_td(td, grid_graph(r, c)).ok);
            CHECK(td.width() <= r);
        }
}
