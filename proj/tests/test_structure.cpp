#include "doctest.h"

#include "support/generators.hpp"

#include "linmso/errors.hpp"
#include "linmso/structure.hpp"

using namespace linmso;
using namespace linmso::testing;

TEST_CASE("graph_to_structure stores both orientations") {
    Structure t = complete_graph(3);
    CHECK(t.tuples("adj").size() == 6);
    CHECK(t.holds("adj", {2, 1}));
    Structure one = graph(1, {});
    CHECK(one.size() == 1);
    CHECK(one.tuples("adj").empty());
    Structure none = graph(0, {});
    CHECK(none.size() == 0);
    CHECK_THROWS_AS(graph(2, {{1, 3}}), InputError);
}

TEST_CASE("structure invariants are enforced") {
    Structure a(Vocabulary{{"adj", 2}, {"c", 0}}, {1, 2});
    CHECK_THROWS_AS(a.add_tuple("adj", {1, 3}), InputError);
    CHECK_THROWS_AS(a.add_tuple("adj", {1}), InputError);
    CHECK_THROWS_AS(a.set_constant("c", 7), InputError);
    a.set_constant("c", 2);
    CHECK(a.named_objects() == ObjectSet{2});
    CHECK(a.fully_interpreted());
    a.set_constant("c", std::nullopt);
    CHECK_FALSE(a.fully_interpreted());
}

TEST_CASE("induced substructures") {
    Structure t = complete_graph(3);
    Structure e = induced_substructure(t, {1, 2});
    CHECK(e.universe() == ObjectSet{1, 2});
    CHECK(e.tuples("adj").size() == 2);
    Structure c = expand(t, "c", std::optional<Object>(3));
    CHECK_FALSE(induced_substructure(c, {1, 2}).constant("c").has_value());
    CHECK(induced_substructure(c, {2, 3}).constant("c") == 3);
    CHECK(induced_substructure(t, t.universe()) == t);
    CHECK_THROWS_AS(induced_substructure(t, {1, 4}), InputError);
}

TEST_CASE("interpreted symbols of an induced substructure") {
    Rng rng(3);
    Vocabulary v{{"adj", 2}, {"c", 0}, {"d", 0}};
    for (int i = 0; i < 200; ++i) {
        Structure a = random_structure(rng, v, {1, 2, 3, 4}, 0.3, 0.2);
        ObjectSet s = random_subset(rng, a.universe());
        Structure b = induced_substructure(a, s);
        std::set<std::string> want;
        for (const auto& c : a.interpreted())
            if (s.count(*a.constant(c))) want.insert(c);
        CHECK(b.interpreted() == want);
    }
}

TEST_CASE("compatibility") {
    Structure e12 = graph(3, {{1, 2}});
    Structure e23 = graph(3, {{2, 3}});
    CHECK(compatible(induced_substructure(e12, {1, 2}), induced_substructure(e23, {2, 3})));
    Vocabulary v{{"adj", 2}, {"c", 0}};
    Structure a(v, {1, 2}), b(v, {1, 2});
    a.set_constant("c", 1);
    b.set_constant("c", 2);
    CHECK_FALSE(compatible(a, b));
    Structure p(v, {1, 2}), q(v, {1, 2, 3});
    p.add_tuple("adj", {1, 2});
    CHECK_FALSE(compatible(p, q));
    CHECK_THROWS_AS(compatible(e12, Structure(v, {1})), InputError);
}

TEST_CASE("union") {
    Structure l = induced_substructure(graph(3, {{1, 2}}), {1, 2});
    Structure r = induced_substructure(graph(3, {{2, 3}}), {2, 3});
    CHECK(structure_union(l, r) == path_graph(3));
    CHECK(structure_union(l, l) == l);
    Vocabulary v{{"c", 0}};
    Structure a(v, {1}), b(v, {5});
    b.set_constant("c", 5);
    CHECK(structure_union(a, b).constant("c") == 5);
    Structure x(v, {1}), y(v, {1});
    x.set_constant("c", 1);
    Structure z(v, {2});
    z.set_constant("c", 2);
    CHECK_THROWS_AS(structure_union(x, z), InputError);
}

TEST_CASE("union is commutative and associative on compatible families") {
    Rng rng(5);
    Vocabulary v{{"adj", 2}, {"P", 1}, {"c", 0}};
    for (int i = 0; i < 200; ++i) {
        Structure all = random_structure(rng, v, {1, 2, 3, 4, 5}, 0.3, 0.3);
        Structure a = induced_substructure(all, random_subset(rng, all.universe()));
        Structure b = induced_substructure(all, random_subset(rng, all.universe()));
        Structure c = induced_substructure(all, random_subset(rng, all.universe()));
        CHECK(structure_union(a, b) == structure_union(b, a));
        Structure ab = structure_union(a, b), bc = structure_union(b, c);
        if (compatible(ab, c) && compatible(a, bc)) CHECK(structure_union(ab, c) == structure_union(a, bc));
        CHECK(induced_substructure(structure_union(a, b), a.universe()) == a);
    }
}

TEST_CASE("expansions") {
    Structure p2 = path_graph(2);
    Structure r = expand(p2, "R", ObjectSet{1});
    CHECK(r.vocabulary().arity_of("R") == 1);
    CHECK(r.holds("R", {1}));
    CHECK_FALSE(r.holds("R", {2}));
    Structure x = expand(p2, "x", std::optional<Object>());
    CHECK(x.vocabulary().contains("x"));
    CHECK_FALSE(x.constant("x").has_value());
    CHECK_THROWS_AS(expand(r, "R", ObjectSet{}), InputError);
    CHECK_THROWS_AS(expand(p2, "R", ObjectSet{3}), InputError);
    CHECK_THROWS_AS(expand(p2, "x", std::optional<Object>(9)), InputError);
}

TEST_CASE("isomorphisms fixing a set") {
    Vocabulary v{{"adj", 2}};
    Structure a(v, {1}), b(v, {2});
    CHECK(iso_fixing(a, b, {}).has_value());
    CHECK_THROWS_AS(iso_fixing(a, b, {1}), InputError);
    CHECK_FALSE(iso_fixing(complete_graph(3), path_graph(3), {}).has_value());
    // Path 1-2-3 vs 2-1-3: the middle vertex differs, the end vertex 3 does not.
    Structure p = path_graph(3), q = graph(3, {{2, 1}, {1, 3}});
    CHECK(iso_fixing(p, q, {}).has_value());
    CHECK_FALSE(iso_fixing(p, q, {2}).has_value());
    CHECK(iso_fixing(p, q, {3}).has_value());
}

TEST_CASE("isomorphism is an equivalence and matches canonical encodings") {
    Rng rng(7);
    Vocabulary v{{"adj", 2}, {"P", 1}, {"c", 0}};
    for (int i = 0; i < 300; ++i) {
        Structure a = random_structure(rng, v, {1, 2, 3, 4}, 0.3, 0.3);
        ObjectSet x = random_subset(rng, a.universe());
        // Relabel the objects outside x.
        std::map<Object, Object> h;
        Object next = 10;
        for (Object o : a.universe()) h[o] = x.count(o) ? o : next++;
        Structure b(v, {});
        for (Object o : a.universe()) b.add_object(h[o]);
        for (const auto& t : a.tuples("adj")) b.add_tuple("adj", {h[t[0]], h[t[1]]});
        for (const auto& t : a.tuples("P")) b.add_tuple("P", {h[t[0]]});
        if (auto c = a.constant("c")) b.set_constant("c", h[*c]);
        CHECK(iso_fixing(a, a, x).has_value());
        auto f = iso_fixing(a, b, x);
        REQUIRE(f.has_value());
        CHECK(iso_fixing(b, a, x).has_value());
        CHECK(canonical_encoding(a, x) == canonical_encoding(b, x));
        Structure other = random_structure(rng, v, a.universe(), 0.3, 0.3);
        CHECK(iso_fixing(a, other, x).has_value() == (canonical_encoding(a, x) == canonical_encoding(other, x)));
    }
}

TEST_CASE("general arity") {
    Vocabulary v{{"t", 3}, {"q", 4}};
    Structure a(v, {1, 2, 3, 4});
    a.add_tuple("t", {1, 2, 3});
    a.add_tuple("q", {4, 3, 2, 1});
    Structure b = induced_substructure(a, {1, 2, 3});
    CHECK(b.tuples("t").size() == 1);
    CHECK(b.tuples("q").empty());
    CHECK(compatible(a, b));
}

TEST_CASE("gr format") {
    Graph g = parse_gr("c a path\np tw 3 2\n1 2\n2 3\n");
    CHECK(g.n == 3);
    CHECK(g.edges.size() == 2);
    CHECK(serialize_gr(g) == "p tw 3 2\n1 2\n2 3\n");
    CHECK_THROWS_AS(parse_gr("p tw 2 1\n1 3\n"), InputError);
    CHECK_THROWS_AS(parse_gr("p tw 2 2\n1 2\n"), InputError);
    CHECK_THROWS_AS(parse_gr("1 2\n"), InputError);
}
