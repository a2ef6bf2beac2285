#include "linmso/treedec.hpp"

#include "linmso/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

namespace linmso {

namespace {

std::vector<Object> sorted(std::vector<Object> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool contains(const std::vector<Object>& sorted_bag, Object v) {
    return std::binary_search(sorted_bag.begin(), sorted_bag.end(), v);
}

// Adjacency lists of the bag tree; returns false if the edges do not form a tree.
bool tree_adjacency(size_t nbags, const std::vector<std::pair<int, int>>& edges,
                    std::vector<std::vector<int>>& adj, std::string& why) {
    adj.assign(nbags, {});
    for (auto [a, b] : edges) {
        if (a < 1 || b < 1 || static_cast<size_t>(a) > nbags || static_cast<size_t>(b) > nbags) {
            why = "tree edge " + std::to_string(a) + " " + std::to_string(b) + " references a missing bag";
            return false;
        }
        adj[static_cast<size_t>(a - 1)].push_back(b - 1);
        adj[static_cast<size_t>(b - 1)].push_back(a - 1);
    }
    if (nbags == 0) return true;
    if (edges.size() != nbags - 1) {
        why = "bag graph has " + std::to_string(edges.size()) + " edges, a tree on " +
              std::to_string(nbags) + " bags needs " + std::to_string(nbags - 1);
        return false;
    }
    std::vector<char> seen(nbags, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    size_t count = 1;
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        for (int u : adj[static_cast<size_t>(t)])
            if (!seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = 1;
                ++count;
                stack.push_back(u);
            }
    }
    if (count != nbags) {
        why = "bag graph is not a tree (disconnected or cyclic)";
        return false;
    }
    return true;
}

} // namespace

int TreeDecomposition::width() const {
    size_t w = 0;
    for (const auto& b : bags) w = std::max(w, sorted(b).size());
    return static_cast<int>(w) - 1;
}

TreeDecomposition parse_td(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    TreeDecomposition td;
    bool header = false;
    int nbags = 0, bagsize = 0;
    std::vector<char> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c") {
            td.comments.push_back(line);
            continue;
        }
        if (first == "s") {
            std::string kw;
            if (header || !(ls >> kw >> nbags >> bagsize >> td.n) || kw != "td" || nbags < 0 ||
                bagsize < 0 || td.n < 0)
                throw ParseError("malformed .td header", lineno, 1);
            header = true;
            td.bags.assign(static_cast<size_t>(nbags), {});
            seen.assign(static_cast<size_t>(nbags), 0);
            continue;
        }
        if (!header) throw ParseError("line before 's td' header", lineno, 1);
        if (first == "b") {
            int i;
            if (!(ls >> i)) throw ParseError("malformed bag line", lineno, 1);
            if (i < 1 || i > nbags) throw ParseError("bag index " + std::to_string(i) + " out of range", lineno, 1);
            if (seen[static_cast<size_t>(i - 1)]) throw ParseError("bag " + std::to_string(i) + " listed twice", lineno, 1);
            seen[static_cast<size_t>(i - 1)] = 1;
            std::string tok;
            while (ls >> tok) {
                int v;
                try {
                    size_t used = 0;
                    v = std::stoi(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw ParseError("malformed vertex '" + tok + "' in bag line", lineno, 1);
                }
                if (v < 1 || v > td.n)
                    throw ParseError("vertex " + std::to_string(v) + " out of range", lineno, 1);
                td.bags[static_cast<size_t>(i - 1)].push_back(v);
            }
            continue;
        }
        int a, b;
        std::string rest;
        try {
            a = std::stoi(first);
        } catch (const std::exception&) {
            throw ParseError("malformed line", lineno, 1);
        }
        if (!(ls >> b) || (ls >> rest)) throw ParseError("malformed tree edge line", lineno, 1);
        if (a < 1 || a > nbags || b < 1 || b > nbags)
            throw ParseError("bag index out of range in tree edge", lineno, 1);
        td.edges.emplace_back(a, b);
    }
    if (!header) throw ParseError("missing 's td' header", std::max(lineno, 1), 1);
    for (int i = 0; i < nbags; ++i)
        if (!seen[static_cast<size_t>(i)])
            throw ParseError("bag " + std::to_string(i + 1) + " is never listed", lineno, 1);
    if (nbags > 0 && td.width() + 1 != bagsize)
        throw ParseError("header announces bag size " + std::to_string(bagsize) + ", largest bag has " +
                             std::to_string(td.width() + 1),
                         1, 1);
    std::vector<std::vector<int>> adj;
    std::string why;
    if (!tree_adjacency(td.bags.size(), td.edges, adj, why)) throw ParseError(why, lineno, 1);
    return td;
}

std::string serialize_td(const TreeDecomposition& td) {
    std::ostringstream os;
    for (const auto& c : td.comments) os << c << '\n';
    os << "s td " << td.bags.size() << ' ' << (td.bags.empty() ? 0 : td.width() + 1) << ' ' << td.n << '\n';
    for (size_t i = 0; i < td.bags.size(); ++i) {
        os << "b " << i + 1;
        for (Object v : td.bags[i]) os << ' ' << v;
        os << '\n';
    }
    for (auto [a, b] : td.edges) os << a << ' ' << b << '\n';
    return os.str();
}

TdReport validate_td(const TreeDecomposition& td, const Structure& a) {
    TdReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    std::vector<std::vector<int>> adj;
    std::string why;
    if (!tree_adjacency(td.bags.size(), td.edges, adj, why)) {
        fail("tree structure: " + why);
        return rep;
    }
    std::vector<std::vector<Object>> bags;
    for (const auto& b : td.bags) bags.push_back(sorted(b));

    std::map<Object, std::vector<int>> where;
    for (size_t i = 0; i < bags.size(); ++i)
        for (Object v : bags[i]) {
            if (!a.universe().count(v)) {
                fail("bag " + std::to_string(i + 1) + " contains vertex " + std::to_string(v) +
                     " which is not in the structure");
                return rep;
            }
            where[v].push_back(static_cast<int>(i));
        }

    for (Object v : a.universe())
        if (!where.count(v)) {
            fail("vertex coverage: vertex " + std::to_string(v) + " occurs in no bag");
            break;
        }

    bool tuple_done = false;
    for (const auto& sym : a.vocabulary().relations()) {
        if (tuple_done) break;
        for (const auto& t : a.tuples(sym.name)) {
            auto it = where.find(t[0]);
            bool covered = false;
            if (it != where.end())
                for (int i : it->second)
                    if (std::all_of(t.begin(), t.end(),
                                    [&](Object o) { return contains(bags[static_cast<size_t>(i)], o); })) {
                        covered = true;
                        break;
                    }
            if (!covered) {
                std::string s;
                for (size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
                if (sym.name == "adj" && t.size() == 2)
                    fail("tuple coverage: edge {" + s + "} is not contained in any bag");
                else
                    fail("tuple coverage: " + sym.name + "(" + s + ") is not contained in any bag");
                tuple_done = true;
                break;
            }
        }
    }

    for (const auto& [v, list] : where) {
        std::vector<char> in(bags.size(), 0), seen(bags.size(), 0);
        for (int i : list) in[static_cast<size_t>(i)] = 1;
        std::vector<int> stack{list[0]};
        seen[static_cast<size_t>(list[0])] = 1;
        size_t count = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int u : adj[static_cast<size_t>(t)])
                if (in[static_cast<size_t>(u)] && !seen[static_cast<size_t>(u)]) {
                    seen[static_cast<size_t>(u)] = 1;
                    ++count;
                    stack.push_back(u);
                }
        }
        if (count != list.size()) {
            fail("connectivity: the bags containing vertex " + std::to_string(v) +
                 " do not form a connected subtree");
            break;
        }
    }
    return rep;
}

const char* nice_kind_name(NiceKind k) {
    switch (k) {
    case NiceKind::Leaf: return "leaf";
    case NiceKind::Introduce: return "introduce";
    case NiceKind::Forget: return "forget";
    case NiceKind::Join: return "join";
    }
    return "?";
}

int NiceTreeDecomposition::width() const {
    size_t w = 0;
    for (const auto& n : nodes) w = std::max(w, n.bag.size());
    return static_cast<int>(w) - 1;
}

void NiceTreeDecomposition::check() const {
    auto bad = [](size_t i, const std::string& msg) {
        throw InvariantError("nice decomposition node " + std::to_string(i) + ": " + msg);
    };
    if (nodes.empty()) {
        if (root != -1) throw InvariantError("nice decomposition: root set but no nodes");
        return;
    }
    if (root != static_cast<int>(nodes.size()) - 1) throw InvariantError("nice decomposition: root is not the last node");
    if (!nodes.back().bag.empty()) throw InvariantError("nice decomposition: root bag is not empty");
    std::vector<std::vector<Object>> below(nodes.size());
    std::vector<int> parents(nodes.size(), 0);
    for (size_t i = 0; i < nodes.size(); ++i) {
        const NiceNode& n = nodes[i];
        if (!std::is_sorted(n.bag.begin(), n.bag.end())) bad(i, "bag not sorted");
        for (int c : n.children) {
            if (c < 0 || static_cast<size_t>(c) >= i) bad(i, "child does not precede its parent");
            ++parents[static_cast<size_t>(c)];
        }
        auto child_bag = [&](size_t k) -> const std::vector<Object>& {
            return nodes[static_cast<size_t>(n.children[k])].bag;
        };
        switch (n.kind) {
        case NiceKind::Leaf:
            if (!n.children.empty() || n.bag != std::vector<Object>{n.vertex}) bad(i, "leaf must be a childless singleton");
            below[i] = n.bag;
            break;
        case NiceKind::Introduce: {
            if (n.children.size() != 1) bad(i, "introduce needs one child");
            const auto& cb = child_bag(0);
            const auto& ca = below[static_cast<size_t>(n.children[0])];
            if (contains(ca, n.vertex)) bad(i, "introduced vertex already occurs below");
            auto expect = cb;
            expect.push_back(n.vertex);
            if (sorted(expect) != n.bag) bad(i, "introduce bag mismatch");
            below[i] = sorted([&] { auto v = ca; v.push_back(n.vertex); return v; }());
            break;
        }
        case NiceKind::Forget: {
            if (n.children.size() != 1) bad(i, "forget needs one child");
            const auto& cb = child_bag(0);
            if (!contains(cb, n.vertex)) bad(i, "forgotten vertex not in child bag");
            auto expect = cb;
            expect.erase(std::find(expect.begin(), expect.end(), n.vertex));
            if (expect != n.bag) bad(i, "forget bag mismatch");
            below[i] = below[static_cast<size_t>(n.children[0])];
            break;
        }
        case NiceKind::Join: {
            if (n.children.size() != 2) bad(i, "join needs two children");
            if (child_bag(0) != n.bag || child_bag(1) != n.bag) bad(i, "join bags differ");
            const auto& l = below[static_cast<size_t>(n.children[0])];
            const auto& r = below[static_cast<size_t>(n.children[1])];
            std::vector<Object> inter, uni;
            std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(inter));
            if (inter != n.bag) bad(i, "join subtrees overlap outside the bag");
            std::set_union(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(uni));
            below[i] = uni;
            break;
        }
        }
    }
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
        if (parents[i] != 1) bad(i, "node does not have exactly one parent");
}

NiceTreeDecomposition nicify(const TreeDecomposition& td) {
    NiceTreeDecomposition out;
    std::vector<std::vector<int>> adj;
    std::string why;
    if (!tree_adjacency(td.bags.size(), td.edges, adj, why)) throw InputError("invalid tree decomposition: " + why);
    if (td.bags.empty()) return out;

    std::vector<std::vector<Object>> bags;
    for (const auto& b : td.bags) bags.push_back(sorted(b));

    auto add = [&](NiceKind k, Object v, std::vector<Object> bag, std::vector<int> ch) {
        out.nodes.push_back({k, v, std::move(bag), std::move(ch)});
        return static_cast<int>(out.nodes.size()) - 1;
    };

    // Moves the top of a chain with bag `from` to bag `to`.
    auto transform = [&](int top, const std::vector<Object>& to) {
        std::vector<Object> cur = out.nodes[static_cast<size_t>(top)].bag;
        for (Object v : std::vector<Object>(cur)) {
            if (contains(to, v)) continue;
            cur.erase(std::find(cur.begin(), cur.end(), v));
            top = add(NiceKind::Forget, v, cur, {top});
        }
        for (Object v : to) {
            if (contains(cur, v)) continue;
            cur.insert(std::upper_bound(cur.begin(), cur.end(), v), v);
            top = add(NiceKind::Introduce, v, cur, {top});
        }
        return top;
    };

    // Smallest vertex in each subtree (rooted at bag 0), for child ordering.
    std::vector<Object> submin(bags.size(), INT32_MAX);
    std::vector<int> parent(bags.size(), -1), order;
    {
        std::vector<int> stack{0};
        std::vector<char> seen(bags.size(), 0);
        seen[0] = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            order.push_back(t);
            for (int u : adj[static_cast<size_t>(t)])
                if (!seen[static_cast<size_t>(u)]) {
                    seen[static_cast<size_t>(u)] = 1;
                    parent[static_cast<size_t>(u)] = t;
                    stack.push_back(u);
                }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            size_t t = static_cast<size_t>(*it);
            if (!bags[t].empty()) submin[t] = std::min(submin[t], bags[t].front());
            if (parent[t] >= 0) submin[static_cast<size_t>(parent[t])] = std::min(submin[static_cast<size_t>(parent[t])], submin[t]);
        }
    }

    std::vector<int> top(bags.size(), -1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        size_t t = static_cast<size_t>(*it);
        std::vector<int> kids;
        for (int u : adj[t])
            if (u != parent[t] && top[static_cast<size_t>(u)] >= 0) kids.push_back(u);
        std::sort(kids.begin(), kids.end(), [&](int x, int y) {
            return submin[static_cast<size_t>(x)] != submin[static_cast<size_t>(y)]
                       ? submin[static_cast<size_t>(x)] < submin[static_cast<size_t>(y)]
                       : x < y;
        });
        if (kids.empty()) {
            if (bags[t].empty()) continue;
            int cur = add(NiceKind::Leaf, bags[t].front(), {bags[t].front()}, {});
            top[t] = transform(cur, bags[t]);
            continue;
        }
        int acc = -1;
        for (int u : kids) {
            int r = transform(top[static_cast<size_t>(u)], bags[t]);
            acc = acc < 0 ? r : add(NiceKind::Join, 0, bags[t], {acc, r});
        }
        top[t] = acc;
    }
    if (top[0] < 0) return out;
    out.root = transform(top[0], {});
    return out;
}

TreeDecomposition flatten(const NiceTreeDecomposition& ntd, int n) {
    TreeDecomposition td;
    td.n = n;
    if (ntd.nodes.empty()) {
        td.bags.push_back({});
        return td;
    }
    // Root becomes bag 1; number the rest in reverse storage order.
    size_t m = ntd.nodes.size();
    auto id = [&](size_t i) { return static_cast<int>(m - i); };
    td.bags.resize(m);
    for (size_t i = 0; i < m; ++i) {
        td.bags[static_cast<size_t>(id(i) - 1)] = ntd.nodes[i].bag;
        for (int c : ntd.nodes[i].children) td.edges.emplace_back(id(i), id(static_cast<size_t>(c)));
    }
    return td;
}

namespace {

std::vector<std::vector<char>> gaifman(const Structure& a, std::vector<Object>& verts,
                                       std::map<Object, int>& index) {
    verts.assign(a.universe().begin(), a.universe().end());
    for (size_t i = 0; i < verts.size(); ++i) index[verts[i]] = static_cast<int>(i);
    std::vector<std::vector<char>> m(verts.size(), std::vector<char>(verts.size(), 0));
    for (const auto& sym : a.vocabulary().relations())
        for (const auto& t : a.tuples(sym.name))
            for (Object x : t)
                for (Object y : t)
                    if (x != y) m[static_cast<size_t>(index[x])][static_cast<size_t>(index[y])] = 1;
    return m;
}

template <class Score>
std::vector<Object> greedy_order(const Structure& a, Score score) {
    std::vector<Object> verts;
    std::map<Object, int> index;
    auto m = gaifman(a, verts, index);
    size_t n = verts.size();
    std::vector<char> gone(n, 0);
    std::vector<Object> order;
    for (size_t step = 0; step < n; ++step) {
        long best_score = 0;
        int best = -1;
        for (size_t v = 0; v < n; ++v) {
            if (gone[v]) continue;
            std::vector<size_t> nb;
            for (size_t u = 0; u < n; ++u)
                if (!gone[u] && m[v][u]) nb.push_back(u);
            long s = score(m, nb);
            if (best < 0 || score.better(s, best_score)) {
                best = static_cast<int>(v);
                best_score = s;
            } else if (s == best_score && score.prefer_high_id()) {
                best = static_cast<int>(v);
            }
        }
        size_t v = static_cast<size_t>(best);
        std::vector<size_t> nb;
        for (size_t u = 0; u < n; ++u)
            if (!gone[u] && m[v][u]) nb.push_back(u);
        for (size_t x : nb)
            for (size_t y : nb)
                if (x != y) m[x][y] = 1;
        gone[v] = 1;
        order.push_back(verts[v]);
    }
    return order;
}

struct FillScore {
    long operator()(const std::vector<std::vector<char>>& m, const std::vector<size_t>& nb) const {
        long fill = 0;
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j)
                if (!m[nb[i]][nb[j]]) ++fill;
        return fill;
    }
    bool better(long s, long best) const { return s < best; }
    bool prefer_high_id() const { return false; }
};

struct DegreeScore {
    long operator()(const std::vector<std::vector<char>>&, const std::vector<size_t>& nb) const {
        return static_cast<long>(nb.size());
    }
    bool better(long s, long best) const { return s < best; }
    bool prefer_high_id() const { return true; }
};

} // namespace

std::vector<Object> min_fill_order(const Structure& a) { return greedy_order(a, FillScore{}); }

std::vector<Object> min_degree_order(const Structure& a) { return greedy_order(a, DegreeScore{}); }

TreeDecomposition elimination_td(const Structure& a, const std::vector<Object>& order) {
    std::vector<Object> verts;
    std::map<Object, int> index;
    auto m = gaifman(a, verts, index);
    size_t n = verts.size();
    TreeDecomposition td;
    td.n = verts.empty() ? 0 : verts.back();
    if (n == 0) {
        td.bags.push_back({});
        return td;
    }
    if (order.size() != n) throw InputError("elimination order must list every vertex once");
    std::vector<int> pos(n, -1);
    for (size_t k = 0; k < n; ++k) {
        auto it = index.find(order[k]);
        if (it == index.end() || pos[static_cast<size_t>(it->second)] >= 0)
            throw InputError("elimination order must list every vertex once");
        pos[static_cast<size_t>(it->second)] = static_cast<int>(k);
    }
    // Bag of the k-th eliminated vertex is stored as bag n-k (the last one is bag 1).
    td.bags.assign(n, {});
    std::vector<int> parent_step(n, -1);
    for (size_t k = 0; k < n; ++k) {
        size_t v = static_cast<size_t>(index[order[k]]);
        std::vector<size_t> nb;
        for (size_t u = 0; u < n; ++u)
            if (m[v][u] && pos[u] > static_cast<int>(k)) nb.push_back(u);
        for (size_t x : nb)
            for (size_t y : nb)
                if (x != y) m[x][y] = 1;
        std::vector<Object> bag{verts[v]};
        int first = -1;
        for (size_t u : nb) {
            bag.push_back(verts[u]);
            if (first < 0 || pos[u] < first) first = pos[u];
        }
        td.bags[n - 1 - k] = sorted(bag);
        parent_step[k] = first;
    }
    for (size_t k = 0; k + 1 < n; ++k) {
        int p = parent_step[k] >= 0 ? parent_step[k] : static_cast<int>(n - 1);
        td.edges.emplace_back(static_cast<int>(n - k), static_cast<int>(n - static_cast<size_t>(p)));
    }
    return td;
}

TreeDecomposition min_fill_td(const Structure& a) { return elimination_td(a, min_fill_order(a)); }

TreeDecomposition grid_path_td(int rows, int cols) {
    if (rows < 1 || cols < 1) throw InputError("grid dimensions must be positive");
    int n = rows * cols;
    TreeDecomposition td;
    td.n = n;
    if (n <= rows + 1) {
        std::vector<Object> all(static_cast<size_t>(n));
        std::iota(all.begin(), all.end(), 1);
        td.bags.push_back(all);
        return td;
    }
    for (int t = 1; t + rows <= n; ++t) {
        std::vector<Object> bag;
        for (int v = t; v <= t + rows; ++v) bag.push_back(v);
        td.bags.push_back(bag);
        if (t > 1) td.edges.emplace_back(t - 1, t);
    }
    return td;
}

} // namespace linmso
