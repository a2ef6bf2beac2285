#pragma once

// Low-level game machinery shared by the public game API and the solver.
//
// A game node stores its position relative to the context X of the whole
// game: objects of X are addressed by their rank in sorted X, objects of H
// outside X are "anonymous" and numbered by the first object slot naming
// them. With that numbering an isomorphism fixing X is plain equality, so
// nodes are hash-consed and node identity is game equivalence within a
// context.

#include "linmso/logic.hpp"
#include "linmso/structure.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

namespace linmso {

using NodeId = uint32_t;
inline constexpr NodeId kTop = 0;
inline constexpr NodeId kBottom = 1;
inline bool is_sentinel(NodeId n) { return n <= kBottom; }

inline constexpr int kMaxArity = 7;
inline constexpr int kMaxSlots = 32;
inline constexpr int kMaxObjects = 64;
inline constexpr uint8_t kNil = 0;

/**
 * Formula compiled against a vocabulary: every subformula knows how many
 * object and set slots are in scope, atoms refer to slots and relation
 * indices.
 */
class Layout {
public:
    struct Node {
        Kind kind = Kind::Atom;
        Class cls = Class::Atomic;
        int left = -1;
        int right = -1;
        uint8_t nobj = 0;   // object slots in scope (constants first)
        uint8_t nset = 0;   // set slots in scope
        uint8_t slot = 0;   // quantifiers: slot bound for the body
        bool set_atom = false;
        uint8_t rel = 0;    // atoms: set slot or relation index
        uint8_t arity = 0;
        std::array<uint8_t, kMaxArity> args{};
    };

    Layout(Formula nnf, Vocabulary tau);

    const Formula& formula() const { return formula_; }
    const Vocabulary& vocabulary() const { return tau_; }
    int root() const { return formula_.root(); }
    const Node& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    size_t size() const { return nodes_.size(); }

    const std::vector<Symbol>& relations() const { return relations_; }
    int relation_index(const std::string& name) const;
    const std::vector<std::string>& constants() const { return constants_; }

    // Names of the object and set slots in scope at node i.
    const std::vector<std::string>& object_names(int i) const { return obj_names_[static_cast<size_t>(i)]; }
    const std::vector<std::string>& set_names(int i) const { return set_names_[static_cast<size_t>(i)]; }

    // Word offsets inside a position code.
    static size_t obj_words(int nobj) { return (static_cast<size_t>(nobj) + 7) / 8; }
    size_t fixed_words(int i) const {
        const Node& n = node(i);
        return 1 + obj_words(n.nobj) + n.nset;
    }

private:
    Formula formula_;
    Vocabulary tau_;
    std::vector<Node> nodes_;
    std::vector<Symbol> relations_;
    std::vector<std::string> constants_;
    std::vector<std::vector<std::string>> obj_names_;
    std::vector<std::vector<std::string>> set_names_;
};

// Relation tuples over local object indices, packed into one word.
inline uint64_t pack_tuple(int rel, const uint8_t* args, int arity) {
    uint64_t w = static_cast<uint64_t>(rel) << 56;
    for (int t = 0; t < arity; ++t) w |= static_cast<uint64_t>(args[t]) << (48 - 8 * t);
    return w;
}
inline int tuple_rel(uint64_t w) { return static_cast<int>(w >> 56); }
inline uint8_t tuple_arg(uint64_t w, int t) { return static_cast<uint8_t>(w >> (48 - 8 * t)); }

/**
 * Read-only view of an encoded position:
 *   word 0            number m of anonymous objects
 *   obj_words(nobj)   one byte per object slot, 0 = nil, else local index + 1
 *   nset words        set slot masks over the k + m local objects
 *   rest              sorted relation tuples mentioning an anonymous object
 */
struct PosView {
    const uint64_t* w = nullptr;
    size_t len = 0;
    int nobj = 0;
    int nset = 0;

    int anon() const { return static_cast<int>(w[0]); }
    uint8_t obj(int j) const { return static_cast<uint8_t>(w[1 + j / 8] >> (8 * (j % 8))); }
    uint64_t set(int j) const { return w[1 + Layout::obj_words(nobj) + static_cast<size_t>(j)]; }
    std::span<const uint64_t> tuples() const {
        size_t off = 1 + Layout::obj_words(nobj) + static_cast<size_t>(nset);
        return {w + off, len - off};
    }
};

// Builder for position codes.
struct PosCode {
    std::vector<uint64_t> w;

    void reset(int nobj, int nset) {
        w.assign(1 + Layout::obj_words(nobj) + static_cast<size_t>(nset), 0);
        nobj_ = nobj;
    }
    void set_anon(int m) { w[0] = static_cast<uint64_t>(m); }
    void set_obj(int j, uint8_t v) {
        w[1 + static_cast<size_t>(j / 8)] |= static_cast<uint64_t>(v) << (8 * (j % 8));
    }
    void set_mask(int j, uint64_t m) { w[1 + Layout::obj_words(nobj_) + static_cast<size_t>(j)] = m; }
    void add_tuple(uint64_t t) { w.push_back(t); }
    // Sorts and deduplicates the tuple section.
    void finish(int nset);

private:
    int nobj_ = 0;
};

struct Shape {
    int k = 0;
    std::vector<uint64_t> tuples; // sorted, all entries < k

    bool operator==(const Shape&) const = default;
    bool has(uint64_t t) const;
};

struct Context {
    std::vector<Object> X; // sorted
    uint32_t shape = 0;
};

/**
 * Interning arena for game nodes, contexts and the memo tables of the
 * combine/forget operations. Not thread-safe; use one store per thread.
 */
class GameStore {
public:
    explicit GameStore(Layout layout);
    GameStore(const GameStore&) = delete;
    GameStore& operator=(const GameStore&) = delete;

    const Layout& layout() const { return layout_; }

    int phi(NodeId n) const { return static_cast<int>(nodes_[n].phi); }
    PosView pos(NodeId n) const;
    std::span<const NodeId> children(NodeId n) const {
        const Rec& r = nodes_[n];
        return {kids_.data() + r.kid_off, r.kid_len};
    }
    size_t node_count() const { return nodes_.size(); }

    // Children are sorted and deduplicated here.
    NodeId intern(int phi, const std::vector<uint64_t>& code, std::vector<NodeId>& kids);

    uint32_t shape_id(const Shape& s);
    const Shape& shape(uint32_t id) const { return shapes_[id]; }
    uint32_t context_id(const std::vector<Object>& X, uint32_t shape);
    const Context& context(uint32_t id) const { return contexts_[id]; }
    const Shape& context_shape(uint32_t ctx) const { return shapes_[contexts_[ctx].shape]; }

    // Keeps the nodes reachable from `roots` (updated in place) and the bag
    // cache; clears the operation memos.
    void collect(std::vector<NodeId>& roots);

    // Memo tables, keyed by an operation signature and node ids.
    struct MemoKey {
        uint32_t sig, a, b;
        bool operator==(const MemoKey&) const = default;
    };
    struct MemoHash {
        size_t operator()(const MemoKey& k) const {
            uint64_t h = (static_cast<uint64_t>(k.sig) * 0x9E3779B97F4A7C15ULL) ^
                         (static_cast<uint64_t>(k.a) << 32 | k.b);
            h ^= h >> 29;
            h *= 0xBF58476D1CE4E5B9ULL;
            return static_cast<size_t>(h ^ (h >> 32));
        }
    };
    uint32_t signature(const std::vector<uint32_t>& s);
    std::unordered_map<MemoKey, NodeId, MemoHash>& memo() { return memo_; }

    // Reduced bag games, keyed by (context shape, formula node).
    std::unordered_map<uint64_t, NodeId>& bag_cache() { return bag_cache_; }

private:
    struct Rec {
        uint32_t phi;
        uint32_t code_len;
        uint64_t code_off;
        uint64_t kid_off;
        uint32_t kid_len;
        uint64_t hash;
    };

    Layout layout_;
    std::vector<Rec> nodes_;
    std::vector<uint64_t> codes_;
    std::vector<NodeId> kids_;
    std::vector<uint32_t> table_;
    size_t table_used_ = 0;

    std::deque<Shape> shapes_;
    std::map<std::pair<int, std::vector<uint64_t>>, uint32_t> shape_index_;
    std::deque<Context> contexts_;
    std::map<std::pair<std::vector<Object>, uint32_t>, uint32_t> context_index_;
    std::map<std::vector<uint32_t>, uint32_t> sig_index_;

    std::unordered_map<MemoKey, NodeId, MemoHash> memo_;
    std::unordered_map<uint64_t, NodeId> bag_cache_;

    static uint64_t hash_of(int phi, const uint64_t* code, size_t len, const NodeId* kids, size_t nk);
    NodeId find_or_add(int phi, const uint64_t* code, size_t len, const NodeId* kids, size_t nk, uint64_t h);
    void grow();
};

/**
 * A structure laid out for game construction: local objects 0..n-1 with
 * X = 0..k-1, relation tuples packed over local indices, and the initial
 * values of the slots in scope at the start node.
 */
struct LocalStructure {
    std::vector<Object> ids; // local index -> object id; X first, both parts sorted
    int k = 0;
    std::vector<uint64_t> tuples;        // sorted
    std::vector<uint64_t> sets;          // initial set slot masks
    std::vector<uint8_t> objs;           // initial object slot values
};

LocalStructure localize(const Layout& layout, const Structure& a, const ObjectSet& X, int phi);

namespace engine {

// Context (X, A[X]) of a local structure.
uint32_t context_of(GameStore& store, const LocalStructure& ls);

// EMC unfolding from node phi. `reduced` applies reduce while building;
// `nil_moves` = false yields the classical game.
NodeId build(GameStore& store, const LocalStructure& ls, int phi, bool reduced, bool nil_moves = true);

// Truth of an atomic position: 1 true, 0 false, -1 undetermined.
int literal_value(const GameStore& store, const Shape& shape, NodeId n);

NodeId eval(GameStore& store, uint32_t ctx, NodeId n);
NodeId reduce(GameStore& store, uint32_t ctx, NodeId n);
// Result lives in the empty context, returned through out_ctx.
NodeId convert(GameStore& store, uint32_t ctx, NodeId n, uint32_t& out_ctx);
bool convert_eval_top(GameStore& store, uint32_t ctx, NodeId n);

class Combiner {
public:
    // Throws InputError if the contexts disagree on shared objects.
    Combiner(GameStore& store, uint32_t ctx1, uint32_t ctx2);
    uint32_t result_context() const { return out_ctx_; }
    // Both roots must be non-sentinel nodes at the same subformula.
    NodeId run(NodeId a, NodeId b);
    bool compatible(NodeId a, NodeId b) const;

private:
    struct Side {
        int k = 0;
        std::vector<uint8_t> map;  // X index -> union X index
        uint64_t shared = 0;       // X indices that are shared
    };
    GameStore& store_;
    Side s1_, s2_;
    int k_ = 0;
    uint64_t shared_union_ = 0;
    uint32_t out_ctx_ = 0;
    uint32_t sig_ = 0;
    const Shape* shape_ = nullptr;

    struct Sig {
        std::vector<uint64_t> key;
        uint64_t priv = 0;
    };
    Sig signature(const Side& s, NodeId c) const;
    bool unite(NodeId a, NodeId b, PosCode& out) const;
    NodeId rec(NodeId a, NodeId b);
};

class Forgetter {
public:
    // x_index: rank of the forgotten object in the context's X.
    Forgetter(GameStore& store, uint32_t ctx, int x_index);
    uint32_t result_context() const { return out_ctx_; }
    NodeId run(NodeId n);

private:
    GameStore& store_;
    int k_ = 0;
    int x_ = 0;
    std::vector<uint64_t> x_tuples_; // shape tuples mentioning x
    uint32_t out_ctx_ = 0;
    uint32_t sig_ = 0;
    const Shape* out_shape_ = nullptr;

    void recode(NodeId n, PosCode& out) const;
};

// Number of distinct nodes reachable from n (sentinels excluded).
size_t dag_size(const GameStore& store, NodeId n);

} // namespace engine
} // namespace linmso
