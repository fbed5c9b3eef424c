// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_GAMES_HPP
#define ACS_GAMES_HPP

#include "acs/attacks.hpp"

namespace acs {

struct GameConfig {
  unsigned b = 16;
  unsigned va_size = 39;
  int64_t q = 64;
  bool masked = true;
  uint64_t trials = 1000;
  uint64_t seed = 1;
  double tolerance_z = 3.0;

  PointerLayout layout() const {
    PointerLayout l;
    l.va_size = va_size;
    l.pac_bits = b;
    return l;
  }
};

enum class CollisionAdversary {
  kRandomGuess,         // ignores the oracle, outputs fresh inputs
  kEqualityHeuristic,   // picks the first pair of equal observed tokens
};

// Collision-finding game: the adversary gets q (masked) tokens of chosen
// inputs and must output (x, y, y') with y != y' whose true tokens collide.
// With masking the heuristic adversary does no better than chance; with
// masks disabled it wins whenever a collision occurred among its queries.
TrialReport game_pac_collision(const GameConfig& cfg,
                               CollisionAdversary adversary);

enum class AcsAdversary {
  kBlindGuess,       // no oracle use, substitutes a random word
  kHarvestReplay,    // harvests q chain words, replays one of them
  kOffGraphRequest,  // asks the oracle for a path outside the call graph
};

// Chain-integrity game over a call graph: the adversary may query masked
// chain words for paths through the graph, then must substitute a word
// (different from the true one) that authenticates at the jumper site.
// Winning rate is bounded by 2^-b; off-graph oracle requests lose the
// trial.
TrialReport game_acs(const GameConfig& cfg, AcsAdversary adversary,
                     const CallGraphProgram* program = nullptr);

}  // namespace acs

#endif  // ACS_GAMES_HPP
