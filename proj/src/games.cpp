// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/games.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "acs/analytics.hpp"
#include "acs/stats.hpp"

namespace acs {

namespace {

struct GameAgg {
  uint64_t trials = 0;
  uint64_t wins = 0;
  void add(bool won) {
    trials++;
    if (won) wins++;
  }
  TrialReport finish(std::string name, double ref, double z,
                     bool one_sided) const {
    TrialReport r;
    r.name = std::move(name);
    r.trials = trials;
    r.successes = wins;
    r.rate = trials ? double(wins) / double(trials) : 0.0;
    const Interval ci = binomial_ci(wins, trials, z);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.ci_degenerate = trials < 2;
    r.analytic_ref = ref;
    r.within_tolerance =
        one_sided ? r.rate <= ref + z * binomial_se(ref, trials)
                  : rate_within(r.rate, ref, trials, z);
    return r;
  }
};

}  // namespace

TrialReport game_pac_collision(const GameConfig& cfg,
                               CollisionAdversary adversary) {
  const PointerLayout layout = cfg.layout();
  layout.check();
  GameAgg agg;

  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    const PacKey key = derive_key(derive_stream_seed(cfg.seed, trial));
    std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0x6A3E, trial));
    auto tok = [&](uint64_t x, uint64_t y) {
      return mac_token(key, x, y, layout);
    };
    auto oracle = [&](uint64_t x, uint64_t y) {
      return cfg.masked ? tok(x, y) ^ tok(0, y) : tok(x, y);
    };

    uint64_t out_x = 0, out_y = 0, out_y2 = 0;
    if (adversary == CollisionAdversary::kRandomGuess) {
      out_x = eng();
      out_y = eng();
      do {
        out_y2 = eng();
      } while (out_y2 == out_y);
    } else {
      // Query a fixed pointer with q distinct modifiers; output the first
      // pair whose observed tokens match, falling back to a random pair.
      const uint64_t x = eng();
      std::vector<uint64_t> ys;
      ys.reserve(size_t(cfg.q));
      std::unordered_map<uint64_t, size_t> first_obs;
      std::optional<std::pair<size_t, size_t>> hit;
      for (int64_t i = 0; i < cfg.q; ++i) {
        const uint64_t y = eng();
        ys.push_back(y);
        const uint64_t obs = oracle(x, y);
        auto [it, fresh] = first_obs.emplace(obs, size_t(i));
        if (!fresh && !hit && ys[it->second] != y) {
          hit = {it->second, size_t(i)};
        }
      }
      out_x = x;
      if (hit) {
        out_y = ys[hit->first];
        out_y2 = ys[hit->second];
      } else if (ys.size() >= 2) {
        const size_t i = eng() % ys.size();
        size_t j;
        do {
          j = eng() % ys.size();
        } while (j == i);
        out_y = ys[i];
        out_y2 = ys[j];
      } else {
        out_y = eng();
        do {
          out_y2 = eng();
        } while (out_y2 == out_y);
      }
    }
    const bool win = out_y != out_y2 && tok(out_x, out_y) == tok(out_x, out_y2);
    agg.add(win);
  }

  const double pb = std::ldexp(1.0, -int(cfg.b));
  double ref = pb;
  std::string name = "game-pac-collision/";
  if (adversary == CollisionAdversary::kRandomGuess) {
    name += "random";
  } else if (cfg.masked) {
    name += "heuristic-masked";
  } else {
    // Wins whenever a collision occurred among q queries, or the fallback
    // pair happens to collide.
    const double pc = p_collision(cfg.q, cfg.b);
    ref = pc + (1.0 - pc) * pb;
    name += "detector-unmasked";
  }
  return agg.finish(name, ref, cfg.tolerance_z, /*one_sided=*/false);
}

namespace {

// Fold of the chain construction along a path of return sites, starting
// from the zero seed. Matches the machine's chained-call update.
uint64_t chain_word(const PacKey& key, const PointerLayout& layout,
                    bool masked, const std::vector<uint64_t>& sites) {
  uint64_t w = 0;
  for (uint64_t site : sites) {
    uint64_t next = pac_add(key, layout, site, w);
    if (masked) {
      next ^= mac_token(key, 0, w, layout) << layout.pac_lo();
    }
    w = next;
  }
  return w;
}

// Resolves a step sequence (call-site indices from the entry) to return
// site addresses; nullopt when a step leaves the call graph.
std::optional<std::vector<uint64_t>> resolve_path(
    const CallGraphProgram& prog, const std::vector<int>& steps) {
  std::vector<uint64_t> sites;
  int cur = prog.entry();
  for (int s : steps) {
    const FunctionDef& fn = prog.function(cur);
    if (s < 0 || size_t(s) >= fn.call_sites.size()) return std::nullopt;
    sites.push_back(fn.call_sites[size_t(s)].return_site);
    cur = fn.call_sites[size_t(s)].callee;
  }
  return sites;
}

}  // namespace

TrialReport game_acs(const GameConfig& cfg, AcsAdversary adversary,
                     const CallGraphProgram* program) {
  const CallGraphProgram prog = program ? *program : fig4_program();
  const PointerLayout layout = cfg.layout();
  layout.check();
  prog.validate(layout);
  require_fig4_shape(prog);
  GameAgg agg;

  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    const PacKey key = derive_key(derive_stream_seed(cfg.seed, trial));
    std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0xAC5, trial));
    auto tag = [&](uint64_t x, uint64_t y) {
      // Masked verification comparand, exactly what the machine computes.
      return mac_token(key, x, y, layout) ^ mac_token(key, 0, y, layout);
    };

    // Benign current state: entry -> cycle -> A -> C, with the loader call
    // site of C as the jumper. The true word is the chain element the
    // loader-return verifies.
    const std::vector<int> base_steps{0, 0, 2, 0};
    const auto base_sites = resolve_path(prog, base_steps);
    if (!base_sites) {
      throw std::invalid_argument("program does not have the expected shape");
    }
    const uint64_t jumper =
        CallGraphProgram::site_address(5, 0);  // C's loader site
    const uint64_t w_true = chain_word(key, layout, true, *base_sites);

    std::optional<uint64_t> w_adv;
    bool lost = false;
    switch (adversary) {
      case AcsAdversary::kBlindGuess: {
        uint64_t w;
        do {
          w = eng();
        } while (w == w_true);
        w_adv = w;
        break;
      }
      case AcsAdversary::kHarvestReplay: {
        std::vector<uint64_t> harvested;
        for (int64_t i = 0; i < cfg.q; ++i) {
          // Branch walk through the cycle, exiting via A or B.
          std::vector<int> steps{0};
          uint64_t bits = eng();
          const int len = 3 + int(eng() % 5);
          for (int j = 0; j < len; ++j) {
            steps.push_back(int(bits & 1));
            bits >>= 1;
          }
          steps.push_back(2 + int(eng() % 2));
          steps.push_back(0);
          const auto sites = resolve_path(prog, steps);
          if (!sites) {
            lost = true;
            break;
          }
          const uint64_t w = chain_word(key, layout, true, *sites);
          if (w != w_true) harvested.push_back(w);
        }
        if (!lost && !harvested.empty()) {
          w_adv = harvested[eng() % harvested.size()];
        }
        break;
      }
      case AcsAdversary::kOffGraphRequest: {
        // A request that violates the call graph loses the trial.
        const auto sites = resolve_path(prog, std::vector<int>{0, 9});
        if (!sites) lost = true;
        break;
      }
    }

    bool win = false;
    if (!lost && w_adv && *w_adv != w_true) {
      win = tag(jumper, *w_adv) == tag(jumper, w_true);
    }
    agg.add(win);
  }

  const double ref = std::ldexp(1.0, -int(cfg.b));
  std::string name = "game-acs/";
  switch (adversary) {
    case AcsAdversary::kBlindGuess: name += "blind"; break;
    case AcsAdversary::kHarvestReplay: name += "harvest"; break;
    case AcsAdversary::kOffGraphRequest: name += "off-graph-request"; break;
  }
  return agg.finish(name, ref, cfg.tolerance_z, /*one_sided=*/true);
}

}  // namespace acs
