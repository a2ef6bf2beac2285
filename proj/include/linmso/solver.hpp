#pragma once

#include "linmso/engine.hpp"
#include "linmso/treedec.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace linmso {

using Cost = int64_t;
inline constexpr Cost kInfinity = std::numeric_limits<Cost>::max();

// Sum with infinity absorbing; throws InputError on overflow.
Cost add_cost(Cost a, Cost b);
std::string cost_to_string(Cost c);

struct FreeSymbol {
    std::string name;
    int64_t weight = 1;
    bool operator==(const FreeSymbol&) const = default;
};

/**
 * LinMSO minimization problem: minimize sum weight_k * |R_k| subject to the
 * formula. `maximize` records that the weights were negated from a max
 * objective; the optimum is negated back by user_value().
 */
struct Problem {
    std::string name;
    Vocabulary base;              // relational
    std::vector<FreeSymbol> free; // unary, disjoint from base
    Formula formula;              // NNF
    bool maximize = false;

    // Base vocabulary plus the free symbols.
    Vocabulary vocabulary() const;
    // Throws InputError if the problem is malformed.
    void validate() const;
};

Cost user_value(const Problem& p, Cost internal);

struct CellEntry {
    NodeId game = kBottom;
    Cost value = kInfinity;
};

// One DP table; cells are keyed by one bag-local mask per free symbol.
struct NodeTable {
    int node = -1;
    const NiceNode* nice = nullptr;
    std::map<std::vector<uint64_t>, uint32_t> contexts;
    std::map<std::vector<uint64_t>, std::vector<CellEntry>> cells;
};

struct SolverStats {
    size_t nodes = 0;
    size_t max_cells = 0;
    size_t max_entries = 0;   // per cell
    size_t max_game_size = 0; // only with SolverOptions::game_sizes
    double seconds[4] = {0, 0, 0, 0}; // indexed by NiceKind
    double root_seconds = 0;
    size_t store_nodes = 0;
};

struct SolveResult {
    Cost opt = kInfinity; // internal (minimization) value
    SolverStats stats;
};

struct SolverOptions {
    bool game_sizes = false;
    // Garbage-collect the game store once it holds this many nodes.
    size_t gc_threshold = size_t{1} << 22;
};

class Solver {
public:
    explicit Solver(Problem problem, SolverOptions opts = {});

    const Problem& problem() const { return problem_; }
    GameStore& store() { return *store_; }

    using Observer = std::function<void(const NodeTable&)>;
    void set_observer(Observer obs) { observer_ = std::move(obs); }

    // A must be over the problem's base vocabulary; ntd must decompose it.
    SolveResult solve(const Structure& a, const NiceTreeDecomposition& ntd);

private:
    Problem problem_;
    SolverOptions opts_;
    std::unique_ptr<GameStore> store_;
    Observer observer_;
    std::vector<int> free_rel_; // relation index of each free symbol

    struct Run;
    friend struct Run;
};

// Convenience wrapper: fresh solver, min-fill decomposition when ntd is null.
SolveResult solve(const Structure& a, const Problem& p, const NiceTreeDecomposition* ntd = nullptr);

} // namespace linmso
