#pragma once

// Public interface to extended model checking games.
//
// Games live in a GameStore bound to one NNF formula and one base vocabulary.
// A Game value is a handle (store, context, node); sentinels TOP and BOTTOM
// are node ids kTop and kBottom in any context. Sibling subgames that are
// equivalent share one node, so child lists behave as sets.

#include "linmso/engine.hpp"

#include <memory>
#include <string>
#include <vector>

namespace linmso {

enum class Owner : uint8_t { Falsifier, Verifier, Neither };

const char* owner_name(Owner o);

struct Position {
    Structure H;
    ObjectSet X;
    int phi = -1;
    Owner owner = Owner::Neither;
};

struct Game {
    GameStore* store = nullptr;
    uint32_t ctx = 0;
    NodeId node = kBottom;

    bool is_top() const { return node == kTop; }
    bool is_bottom() const { return node == kBottom; }
    bool is_sentinel() const { return linmso::is_sentinel(node); }
};

// The formula must be in NNF; tau is the vocabulary of the structures the
// games are built on (without quantified symbols).
std::unique_ptr<GameStore> make_store(const Formula& nnf, const Vocabulary& tau);

// Full unfolding. A's vocabulary is tau plus the symbols bound above phi.
Game emc(GameStore& store, const Structure& a, const ObjectSet& x, int phi);
// reduce(emc(...)) computed without materializing the full game.
Game reduced_emc(GameStore& store, const Structure& a, const ObjectSet& x, int phi);
// Classical game: X empty and no nil moves. A must be fully interpreted.
Game mc(GameStore& store, const Structure& a, int phi);

Game eval(const Game& g);
Game reduce(const Game& g);
Game convert(const Game& g);
Game combine(const Game& g1, const Game& g2);
Game forget(const Game& g, Object x);

bool equivalent(const Game& g1, const Game& g2);
std::string canonical_key(const Game& g);

// Undefined for sentinels (throws InputError).
Position root_position(const Game& g);
std::vector<Game> subgames(const Game& g);
// Number of distinct positions (sentinels excluded).
size_t game_size(const Game& g);
std::string to_debug_string(const Game& g);

} // namespace linmso
