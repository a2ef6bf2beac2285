#include "doctest.h"

#include "support/checks.hpp"
#include "support/generators.hpp"
#include "support/naive.hpp"

#include "linmso/game.hpp"
#include "linmso/problems.hpp"

using namespace linmso;
using namespace linmso::testing;

namespace {

void run_property(const std::string& name, uint64_t seed) {
    Outcome o = check_property(name, 300, seed);
    INFO(o.summary());
    CHECK(o.checked == 300);
    CHECK(o.ok());
}

// Objects 1..n assigned to shared (0), left (1) or right (2) by base-3 digits.
void split(int n, int code, ObjectSet& shared, ObjectSet& left, ObjectSet& right) {
    for (int v = 1; v <= n; ++v, code /= 3) (code % 3 == 0 ? shared : code % 3 == 1 ? left : right).insert(v);
}

ObjectSet join(ObjectSet a, const ObjectSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

} // namespace

TEST_CASE("convert agreement") { run_property("convert agreement", 1); }
TEST_CASE("determinacy transfer") { run_property("determinacy transfer", 2); }
TEST_CASE("introduce monotonicity") { run_property("introduce monotonicity", 3); }
TEST_CASE("forget monotonicity") { run_property("forget monotonicity", 4); }
TEST_CASE("union monotonicity") { run_property("union monotonicity", 5); }
TEST_CASE("eval reduce agreement") { run_property("eval reduce agreement", 6); }
TEST_CASE("combine equivalence") { run_property("combine equivalence", 7); }
TEST_CASE("forget equivalence") { run_property("forget equivalence", 8); }
TEST_CASE("nil replacement") { run_property("nil replacement", 9); }

TEST_CASE("unknown property names are reported") { CHECK_FALSE(check_property("no such property", 1, 0).ok()); }

TEST_CASE("combine equivalence on all small graphs and splits") {
    for (const char* name : {"vc", "ds"}) {
        Problem p = builtin(name);
        auto st = make_store(p.formula, p.vocabulary());
        int phi = p.formula.root();
        size_t checked = 0, bad = 0;
        for (int n = 1; n <= 4; ++n) {
            int codes = 1;
            for (int i = 0; i < n; ++i) codes *= 3;
            for (uint64_t mask = 0; mask < (uint64_t{1} << all_pairs(n).size()); ++mask) {
                Structure g = graph_from_mask(n, mask);
                for (int code = 0; code < codes; ++code) {
                    ObjectSet s, l, r;
                    split(n, code, s, l, r);
                    for (uint32_t cm = 0; cm < (1u << n); ++cm) {
                        ObjectSet c;
                        for (int v = 1; v <= n; ++v)
                            if (cm >> (v - 1) & 1) c.insert(v);
                        Structure full = expand(g, p.free[0].name, c);
                        Structure a1 = induced_substructure(full, join(s, l));
                        Structure a2 = induced_substructure(full, join(s, r));
                        Structure u = structure_union(a1, a2);
                        // Bags: both sides whole, or the left side forgetting its private part.
                        for (int variant = 0; variant < 2; ++variant) {
                            ObjectSet x1 = variant ? s : join(s, l), x2 = join(s, r);
                            Game g1 = reduced_emc(*st, a1, x1, phi), g2 = reduced_emc(*st, a2, x2, phi);
                            Game want = reduced_emc(*st, u, join(x1, x2), phi);
                            ++checked;
                            if (g1.is_sentinel() || g2.is_sentinel()) {
                                bad += want.node != (g1.is_sentinel() ? g1.node : g2.node);
                                continue;
                            }
                            bad += canonical_key(combine(g1, g2)) != canonical_key(want);
                        }
                    }
                }
            }
        }
        INFO(name << ": " << bad << " of " << checked);
        CHECK(bad == 0);
    }
}

TEST_CASE("forget equivalence on all small graphs") {
    for (const char* name : {"vc", "ds"}) {
        Problem p = builtin(name);
        auto st = make_store(p.formula, p.vocabulary());
        int phi = p.formula.root();
        size_t checked = 0, bad = 0;
        for (int n = 1; n <= 4; ++n)
            for (uint64_t mask = 0; mask < (uint64_t{1} << all_pairs(n).size()); ++mask) {
                Structure g = graph_from_mask(n, mask);
                for (uint32_t cm = 0; cm < (1u << n); ++cm)
                    for (uint32_t xm = 1; xm < (1u << n); ++xm) {
                        ObjectSet c, x;
                        for (int v = 1; v <= n; ++v) {
                            if (cm >> (v - 1) & 1) c.insert(v);
                            if (xm >> (v - 1) & 1) x.insert(v);
                        }
                        Structure a = expand(g, p.free[0].name, c);
                        Game r = reduced_emc(*st, a, x, phi);
                        for (Object v : x) {
                            ObjectSet rest = x;
                            rest.erase(v);
                            ++checked;
                            bad += canonical_key(forget(r, v)) != canonical_key(reduced_emc(*st, a, rest, phi));
                        }
                    }
            }
        INFO(name << ": " << bad << " of " << checked);
        CHECK(bad == 0);
    }
}

TEST_CASE("reference combine agrees with the engine on vertex cover") {
    Problem p = builtin("vc");
    auto st = make_store(p.formula, p.vocabulary());
    int phi = p.formula.root();
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        Structure g = random_graph(rng, 4, 0.5);
        Structure full = expand(g, "C", random_subset(rng, g.universe()));
        ObjectSet s{1 + below(rng, 4)}, l, r;
        for (Object v : g.universe())
            if (!s.count(v)) (coin(rng, 0.5) ? l : r).insert(v);
        Structure a1 = induced_substructure(full, join(s, l)), a2 = induced_substructure(full, join(s, r));
        Game g1 = reduced_emc(*st, a1, a1.universe(), phi), g2 = reduced_emc(*st, a2, a2.universe(), phi);
        if (g1.is_sentinel() || g2.is_sentinel()) continue;
        naive::NGame n1 = naive::reduce(p.formula, naive::emc(p.formula, a1, a1.universe(), phi));
        naive::NGame n2 = naive::reduce(p.formula, naive::emc(p.formula, a2, a2.universe(), phi));
        CHECK(canonical_key(combine(g1, g2)) == naive::key(naive::combine(p.formula, n1, n2)));
    }
}
