#pragma once

#include "linmso/structure.hpp"

#include <string>
#include <vector>

namespace linmso {

/**
 * Tree decomposition in PACE numbering: bags are 1-based, the root is bag 1.
 */
struct TreeDecomposition {
    int n = 0; // number of vertices announced in the header
    std::vector<std::vector<Object>> bags;     // bags[i] is bag i+1, input order
    std::vector<std::pair<int, int>> edges;    // 1-based bag indices, input order
    std::vector<std::string> comments;         // preserved for round-tripping

    int width() const;
    size_t size() const { return bags.size(); }
};

TreeDecomposition parse_td(const std::string& text);
std::string serialize_td(const TreeDecomposition& td);

struct TdReport {
    bool ok = true;
    std::vector<std::string> violations;
};

TdReport validate_td(const TreeDecomposition& td, const Structure& a);

enum class NiceKind : uint8_t { Leaf, Introduce, Forget, Join };

const char* nice_kind_name(NiceKind k);

struct NiceNode {
    NiceKind kind = NiceKind::Leaf;
    Object vertex = 0;             // introduced/forgotten vertex, or the leaf vertex
    std::vector<Object> bag;       // sorted
    std::vector<int> children;     // indices into NiceTreeDecomposition::nodes
};

/**
 * Nice tree decomposition. Nodes are stored so that children precede their
 * parent; the root is the last node and has an empty bag.
 */
struct NiceTreeDecomposition {
    std::vector<NiceNode> nodes;
    int root = -1;

    int width() const;
    // Throws InvariantError on a malformed decomposition.
    void check() const;
};

NiceTreeDecomposition nicify(const TreeDecomposition& td);

// Plain tree decomposition of a nice one (for validation).
TreeDecomposition flatten(const NiceTreeDecomposition& ntd, int n);

// Elimination-ordering decomposition; `order` lists every object once.
TreeDecomposition elimination_td(const Structure& a, const std::vector<Object>& order);

// Greedy min-fill ordering, ties broken by smallest vertex id.
std::vector<Object> min_fill_order(const Structure& a);
// Greedy min-degree ordering, ties broken by largest vertex id.
std::vector<Object> min_degree_order(const Structure& a);

TreeDecomposition min_fill_td(const Structure& a);

// Path decomposition of a rows x cols grid with column-major vertex ids
// (v = c*rows + r + 1); bags are windows of rows+1 consecutive ids.
TreeDecomposition grid_path_td(int rows, int cols);

} // namespace linmso
