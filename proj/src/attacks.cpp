// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/attacks.hpp"

#include <algorithm>
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

// Canonical address that is neither a function entry nor any return site.
constexpr uint64_t kArbitraryTarget = (uint64_t{0x7F} << 20) | 0xBEEF0;

class OutcomeAgg {
 public:
  void add(const AttackOutcome& o) {
    trials_++;
    if (o.success) successes_++;
    if (o.crashed) crashes_++;
    guesses_.add(double(o.guesses_used));
    harvested_.add(double(o.tokens_harvested));
  }

  TrialReport finish(std::string name, double analytic_ref, double z) const {
    TrialReport r;
    r.name = std::move(name);
    r.trials = trials_;
    r.successes = successes_;
    r.crashes = crashes_;
    r.rate = trials_ ? double(successes_) / double(trials_) : 0.0;
    const Interval ci = binomial_ci(successes_, trials_, z);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.ci_degenerate = trials_ < 2;
    r.mean_guesses = guesses_.mean();
    r.sd_guesses = guesses_.stddev();
    r.mean_harvested = harvested_.mean();
    r.sd_harvested = harvested_.stddev();
    r.analytic_ref = analytic_ref;
    r.within_tolerance = rate_within(r.rate, analytic_ref, trials_, z);
    return r;
  }

 private:
  uint64_t trials_ = 0;
  uint64_t successes_ = 0;
  uint64_t crashes_ = 0;
  RunningStat guesses_;
  RunningStat harvested_;
};

bool is_chained(Scheme s) {
  return s == Scheme::kAcsNomask || s == Scheme::kAcsFull;
}

int64_t default_harvest_budget(unsigned b) {
  const unsigned shift = std::min(20u, b / 2 + 4);
  return int64_t{1} << shift;
}

unsigned ceil_log2(uint64_t v) {
  unsigned n = 0;
  while ((uint64_t{1} << n) < v) n++;
  return n;
}

}  // namespace

CallGraphProgram listing2_program() {
  CallGraphProgram p;
  p.add_function(1);  // caller with two same-SP call sites
  p.add_function(2);
  p.add_function(3);
  p.add_function(4);
  p.add_call(1, 2);
  p.add_call(1, 3);
  p.add_call(2, 4);
  p.add_call(3, 4);
  p.set_entry(1);
  return p;
}

CallGraphProgram fig4_program() {
  CallGraphProgram p;
  p.add_function(1);  // entry
  p.add_function(2);  // cycle
  p.add_function(3);  // caller A
  p.add_function(4);  // caller B
  p.add_function(5);  // shared callee C
  p.add_function(6);  // loader
  p.add_function(7);  // leaf
  p.add_call(1, 2);
  p.add_call(2, 2);  // site 0: cycle left
  p.add_call(2, 2);  // site 1: cycle right
  p.add_call(2, 3);  // site 2: exit via A
  p.add_call(2, 4);  // site 3: exit via B
  p.add_call(3, 5);
  p.add_call(4, 5);
  p.add_call(5, 6);
  p.add_call(6, 7);
  p.set_entry(1);
  return p;
}

CallGraphProgram off_graph_program() {
  CallGraphProgram p;
  p.add_function(1);  // entry
  p.add_function(2);  // A: benign caller of C
  p.add_function(3);  // C
  p.add_function(4);  // loader
  p.add_function(5);  // B: harvest-only subtree, never calls C
  p.add_function(6);  // F
  p.add_function(7);  // G
  p.add_call(1, 2);
  p.add_call(1, 5);
  p.add_call(2, 3);
  p.add_call(3, 4);
  p.add_call(5, 6);
  p.add_call(6, 7);
  p.set_entry(1);
  return p;
}

CallGraphProgram fork_program() {
  CallGraphProgram p;
  p.add_function(1);
  p.add_function(2);
  p.add_function(3);
  p.add_call(1, 2);
  p.add_call(2, 3);
  p.set_entry(1);
  return p;
}

CallGraphProgram tail_call_program() {
  CallGraphProgram p;
  p.add_function(1);  // entry
  p.add_function(2);  // A, calls Mid
  p.add_function(3);  // Mid, tail-calls B
  p.add_function(4);  // B
  p.add_function(5);  // harvest subtree
  p.add_function(6);
  p.add_function(7);
  p.add_call(1, 2);
  p.add_call(1, 5);
  p.add_call(2, 3);
  p.add_call(3, 4);
  p.add_call(5, 6);
  p.add_call(6, 7);
  p.set_entry(1);
  return p;
}

void require_listing2_shape(const CallGraphProgram& program) {
  const FunctionDef& entry = program.function(program.entry());
  if (entry.call_sites.size() < 2) {
    throw std::invalid_argument(
        "reuse attack needs two call sites at equal SP in one function");
  }
  for (int i = 0; i < 2; ++i) {
    if (program.function(entry.call_sites[size_t(i)].callee).is_leaf()) {
      throw std::invalid_argument(
          "reuse attack needs callees that call further down");
    }
  }
}

void require_fig4_shape(const CallGraphProgram& program) {
  bool has_cycle = false;
  for (const auto& [id, fn] : program.functions()) {
    for (const CallSite& s : fn.call_sites) {
      if (s.callee == id) has_cycle = true;
    }
  }
  if (!has_cycle) {
    throw std::invalid_argument(
        "on-graph attack needs a call-graph cycle for unbounded paths");
  }
  // Two distinct callers of some function, each reachable from the cycle.
  std::unordered_map<int, int> caller_count;
  for (const auto& [id, fn] : program.functions()) {
    for (const CallSite& s : fn.call_sites) {
      if (s.callee != id) caller_count[s.callee]++;
    }
  }
  const bool has_shared = std::any_of(
      caller_count.begin(), caller_count.end(),
      [](const auto& kv) { return kv.second >= 2; });
  if (!has_shared) {
    throw std::invalid_argument(
        "on-graph attack needs a function with two distinct callers");
  }
}

TrialReport attack_reuse_sp_modifier(const AttackConfig& cfg,
                                     const CallGraphProgram* program) {
  const CallGraphProgram prog = program ? *program : listing2_program();
  require_listing2_shape(prog);
  const PointerLayout layout = cfg.layout();
  const uint64_t target = CallGraphProgram::site_address(prog.entry(), 0);

  OutcomeAgg agg;
  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    MachineConfig mc;
    mc.scheme = cfg.scheme;
    mc.layout = layout;
    mc.rng_seed = derive_stream_seed(cfg.seed, trial);
    mc.stack_words = 64;
    Machine m(prog, mc);
    AdversaryView adv = m.adversary();

    // First invocation: observe the words the instrumentation stores.
    m.call(0);
    m.call(0);
    const uint64_t snap0 = adv.read(0);
    const uint64_t snap1 = adv.read(1);
    m.ret();
    m.ret();

    // Second invocation from the same SP; replay the observation.
    m.call(1);
    m.call(0);
    AttackOutcome out;
    out.guesses_used = 1;
    out.hijack_target = target;
    if (is_chained(cfg.scheme)) {
      adv.write(1, snap1);
    } else {
      adv.write(0, snap0);
    }
    m.ret();  // inner return
    if (!m.alive()) {
      out.crashed = true;
      agg.add(out);
      continue;
    }
    Event e = m.ret();  // the targeted return
    if (!m.alive()) {
      out.crashed = true;
    } else if (e.kind == EventKind::kReturn && e.addr == target) {
      out.ag_load = true;
      out.success = true;
    }
    agg.add(out);
  }

  double ref = 0.0;
  switch (cfg.scheme) {
    case Scheme::kUninstrumented:
    case Scheme::kSpModifier:
      ref = 1.0;
      break;
    case Scheme::kAcsNomask:
    case Scheme::kAcsFull:
      ref = std::ldexp(1.0, -int(cfg.b));
      break;
    case Scheme::kShadowStack:
      ref = 0.0;
      break;
  }
  return agg.finish(std::string("reuse-sp/") + scheme_name(cfg.scheme), ref,
                    cfg.tolerance_z);
}

namespace {

struct HarvestRec {
  uint64_t chain_word = 0;  // the stored word the loader-return verifies
  uint64_t below_word = 0;  // its own creation modifier, one slot lower
  uint64_t variant = 0;
};

// Drives entry -> cycle^L -> {A|B} -> C -> loader -> leaf. Bit j of
// `variant` selects the cycle branch at step j; the lowest bit picks the
// exit class. Returns the stack pointer at the innermost activation.
size_t drive_fig4_path(Machine& m, uint64_t variant, unsigned branch_bits) {
  m.call(0);  // entry -> cycle
  const uint64_t branches = variant >> 1;
  for (unsigned j = 0; j < branch_bits; ++j) {
    m.call(int((branches >> j) & 1));
  }
  m.call(2 + int(variant & 1));  // cycle -> A or B
  m.call(0);                     // A/B -> C
  m.call(0);                     // C -> loader
  m.call(0);                     // loader -> leaf
  return m.sp();
}

void unwind_fig4_path(Machine& m, unsigned branch_bits) {
  for (unsigned j = 0; j < branch_bits + 5; ++j) m.ret();
}

}  // namespace

TrialReport attack_on_graph(const AttackConfig& cfg,
                            const CallGraphProgram* program) {
  if (!is_chained(cfg.scheme)) {
    throw std::invalid_argument("on-graph attack applies to chained schemes");
  }
  const CallGraphProgram prog = program ? *program : fig4_program();
  require_fig4_shape(prog);
  const bool masked = cfg.scheme == Scheme::kAcsFull;
  const PointerLayout layout = cfg.layout();
  const int64_t budget =
      cfg.q_budget > 0 ? cfg.q_budget : default_harvest_budget(cfg.b);
  const unsigned branch_bits = std::max(4u, ceil_log2(uint64_t(budget)) + 1);

  OutcomeAgg agg;
  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    MachineConfig mc;
    mc.scheme = cfg.scheme;
    mc.layout = layout;
    mc.rng_seed = derive_stream_seed(cfg.seed, trial);
    mc.stack_words = branch_bits + 16;
    Machine m(prog, mc);
    AdversaryView adv = m.adversary();
    std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0xA77ACC, trial));

    AttackOutcome out;
    std::vector<HarvestRec> recs;
    std::unordered_map<uint64_t, size_t> word_seen;
    std::unordered_map<uint64_t, size_t> token_first;

    auto harvest_one = [&](uint64_t variant) -> std::optional<size_t> {
      const size_t sp = drive_fig4_path(m, variant, branch_bits);
      const uint64_t chain = adv.read(sp - 2);
      const uint64_t below = adv.read(sp - 3);
      const uint64_t jumper_tok = token_of(layout, adv.read(sp - 1));
      unwind_fig4_path(m, branch_bits);
      if (word_seen.count(chain)) return std::nullopt;
      const size_t idx = recs.size();
      recs.push_back(HarvestRec{chain, below, variant});
      word_seen.emplace(chain, idx);
      out.tokens_harvested++;
      if (!masked) {
        auto [it, fresh] = token_first.emplace(jumper_tok, idx);
        if (!fresh) return it->second;  // collision with an earlier word
      }
      return std::nullopt;
    };

    auto replay = [&](uint64_t variant, const HarvestRec& subst) {
      const size_t sp = drive_fig4_path(m, variant, branch_bits);
      adv.write(sp - 2, subst.chain_word);
      adv.write(sp - 3, subst.below_word);
      m.ret();  // leaf returns, untouched
      m.ret();  // loader returns: the substituted word must authenticate
      out.guesses_used++;
      if (!m.alive()) {
        out.crashed = true;
        return;
      }
      out.ag_load = true;
      Event e = m.ret();  // C returns to the substituted address
      if (m.alive() && e.kind == EventKind::kReturn &&
          e.addr == address_of(layout, subst.chain_word)) {
        out.success = true;
        out.hijack_target = e.addr;
      } else if (!m.alive()) {
        out.crashed = true;
      }
    };

    if (!masked) {
      std::optional<size_t> hit;
      uint64_t v = 0;
      while (out.tokens_harvested < uint64_t(budget)) {
        if ((v >> 1) >= (uint64_t{1} << branch_bits)) break;
        hit = harvest_one(v);
        if (hit) {
          // Replay the colliding partner along the current word's path.
          replay(recs.back().variant, recs[*hit]);
          break;
        }
        v++;
      }
    } else {
      const int64_t k = std::min<int64_t>(budget, 8);
      uint64_t v = 0;
      while (out.tokens_harvested < uint64_t(k) &&
             (v >> 1) < (uint64_t{1} << branch_bits)) {
        harvest_one(v);
        v++;
      }
      // Fresh path; collisions are hidden, so substitute a uniformly chosen
      // candidate distinct from the word actually stored there.
      const size_t sp = drive_fig4_path(m, v, branch_bits);
      const uint64_t own = adv.read(sp - 2);
      std::vector<size_t> candidates;
      for (size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].chain_word != own) candidates.push_back(i);
      }
      if (!candidates.empty()) {
        const HarvestRec& pick =
            recs[candidates[eng() % candidates.size()]];
        adv.write(sp - 2, pick.chain_word);
        adv.write(sp - 3, pick.below_word);
        m.ret();
        m.ret();
        out.guesses_used++;
        if (!m.alive()) {
          out.crashed = true;
        } else {
          out.ag_load = true;
          Event e = m.ret();
          if (m.alive() && e.kind == EventKind::kReturn &&
              e.addr == address_of(layout, pick.chain_word)) {
            out.success = true;
            out.hijack_target = e.addr;
          } else if (!m.alive()) {
            out.crashed = true;
          }
        }
      }
    }
    agg.add(out);
  }

  const double ref =
      table1_reference(ViolationType::kOnGraph, masked, cfg.b);
  return agg.finish(masked ? "on-graph/masked" : "on-graph/unmasked", ref,
                    cfg.tolerance_z);
}

TrialReport attack_off_graph(const AttackConfig& cfg, OffGraphTarget target,
                             const CallGraphProgram* program) {
  if (!is_chained(cfg.scheme)) {
    throw std::invalid_argument("off-graph attack applies to chained schemes");
  }
  const CallGraphProgram prog = program ? *program : off_graph_program();
  const PointerLayout layout = cfg.layout();

  OutcomeAgg agg;
  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    MachineConfig mc;
    mc.scheme = cfg.scheme;
    mc.layout = layout;
    mc.rng_seed = derive_stream_seed(cfg.seed, trial);
    mc.stack_words = 32;
    Machine m(prog, mc);
    AdversaryView adv = m.adversary();
    std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0x0FF6, trial));

    uint64_t forged_word;
    uint64_t second_word;
    if (target == OffGraphTarget::kCallSite) {
      // Harvest a valid chain word (and its modifier) from the disjoint
      // subtree; the path from there to the victim does not exist in the
      // call graph.
      m.call(1);
      m.call(0);
      m.call(0);
      forged_word = adv.read(2);
      second_word = adv.read(1);
      m.ret();
      m.ret();
      m.ret();
    } else {
      const uint64_t guess = eng() & layout.token_mask();
      forged_word = (guess << layout.pac_lo()) | kArbitraryTarget;
      second_word = eng();
    }

    m.call(0);  // entry -> A
    m.call(0);  // A -> C
    m.call(0);  // C -> loader
    AttackOutcome out;
    out.hijack_target = address_of(layout, forged_word);
    adv.write(2, forged_word);
    out.guesses_used = 1;
    m.ret();  // loader returns: first authentication
    if (!m.alive()) {
      out.crashed = true;
      agg.add(out);
      continue;
    }
    out.ag_load = true;
    adv.write(1, second_word);
    if (target == OffGraphTarget::kArbitrary) out.guesses_used++;
    Event e = m.ret();  // C returns: second authentication
    if (!m.alive()) {
      out.crashed = true;
    } else if (e.kind == EventKind::kReturn && e.addr == out.hijack_target) {
      out.success = true;
    }
    agg.add(out);
  }

  const ViolationType vt = target == OffGraphTarget::kCallSite
                               ? ViolationType::kOffGraphCallSite
                               : ViolationType::kOffGraphArbitrary;
  const double ref =
      table1_reference(vt, cfg.scheme == Scheme::kAcsFull, cfg.b);
  return agg.finish(target == OffGraphTarget::kCallSite
                        ? "off-graph/call-site"
                        : "off-graph/arbitrary",
                    ref, cfg.tolerance_z);
}

TrialReport attack_fork_bruteforce(const AttackConfig& cfg, bool reseeded,
                                   const CallGraphProgram* program) {
  if (cfg.process_model != ProcessModel::kLenient) {
    throw std::invalid_argument(
        "fork brute force requires the lenient process model");
  }
  if (!is_chained(cfg.scheme)) {
    throw std::invalid_argument("fork brute force applies to chained schemes");
  }
  const CallGraphProgram prog = program ? *program : fork_program();
  const PointerLayout layout = cfg.layout();
  const uint64_t token_mask = layout.token_mask();

  OutcomeAgg agg;
  for (uint64_t trial = 0; trial < cfg.trials; ++trial) {
    // One campaign: siblings of one process tree share this key.
    const uint64_t tree_key_seed = derive_stream_seed(cfg.seed, trial);
    std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0xF02C, trial));
    AttackOutcome out;
    out.hijack_target = kArbitraryTarget;

    auto spawn = [&](uint64_t sibling_id) {
      MachineConfig mc;
      mc.scheme = cfg.scheme;
      mc.layout = layout;
      mc.rng_seed = tree_key_seed;
      mc.stack_words = 16;
      Machine m(prog, mc);
      if (reseeded) m.reseed(sibling_id);
      m.call(0);
      m.call(0);
      return m;
    };

    if (!reseeded) {
      // Stage 1: learn a token that authenticates the injected modifier.
      // Siblings are interchangeable, so every crash costs one guess only.
      std::optional<uint64_t> t1;
      while (!t1 && out.guesses_used < cfg.max_guesses) {
        const uint64_t t = eng() & token_mask;
        Machine m = spawn(0);
        m.adversary().write(1, (t << layout.pac_lo()) | kArbitraryTarget);
        out.guesses_used++;
        m.ret();
        if (m.alive()) t1 = t;
      }
      // Stage 2: with stage 1 pinned, guess the second-level modifier.
      // Replaying the known-good stage-1 word is not a guess.
      while (t1 && !out.success && out.guesses_used < cfg.max_guesses) {
        Machine m = spawn(0);
        m.adversary().write(1, (*t1 << layout.pac_lo()) | kArbitraryTarget);
        m.ret();
        m.adversary().write(0, eng());
        out.guesses_used++;
        Event e = m.ret();
        if (m.alive() && e.addr == kArbitraryTarget) out.success = true;
      }
    } else {
      // Each sibling has a distinct chain seed: nothing learned from one
      // sibling transfers, so both words must be guessed jointly.
      uint64_t sibling = 0;
      while (!out.success && out.guesses_used + 2 <= cfg.max_guesses) {
        Machine m = spawn(++sibling);
        const uint64_t t = eng() & token_mask;
        m.adversary().write(1, (t << layout.pac_lo()) | kArbitraryTarget);
        m.adversary().write(0, eng());
        out.guesses_used += 2;
        m.ret();
        if (!m.alive()) continue;
        Event e = m.ret();
        if (m.alive() && e.addr == kArbitraryTarget) out.success = true;
      }
    }
    agg.add(out);
  }

  const double per_stage = std::ldexp(1.0, int(cfg.b));
  const double ref = reseeded ? 2.0 * per_stage * per_stage : 2.0 * per_stage;
  TrialReport r = agg.finish(
      reseeded ? "fork-bruteforce/reseeded" : "fork-bruteforce/shared-seed",
      ref, cfg.tolerance_z);
  // Mean-style tolerance: relative band or three standard errors of the
  // sample mean, whichever is wider.
  const double se = r.sd_guesses / std::sqrt(double(std::max<uint64_t>(
                                       1, r.trials)));
  r.within_tolerance =
      std::abs(r.mean_guesses - ref) <=
      std::max(cfg.mean_tolerance * ref, cfg.tolerance_z * se);
  return r;
}

SigningGadgetReport attack_signing_gadget(const AttackConfig& cfg) {
  if (!is_chained(cfg.scheme)) {
    throw std::invalid_argument(
        "signing gadget attack applies to chained schemes");
  }
  const PointerLayout layout = cfg.layout();
  SigningGadgetReport report;

  // Stage 1, the raw primitive: strip-then-re-sign of a pointer with an
  // invalid token yields the valid pac with exactly the gadget bit flipped.
  {
    OutcomeAgg agg;
    for (uint64_t i = 0; i < cfg.trials; ++i) {
      std::mt19937_64 eng(derive_stream_seed(cfg.seed ^ 0x6AD6E7, i));
      const PacKey key = derive_key(eng());
      const uint64_t addr = eng() & layout.addr_mask();
      const uint64_t modifier = eng();
      const uint64_t valid = pac_add(key, layout, addr, modifier);
      uint64_t junk;
      do {
        junk = eng() & layout.token_mask();
      } while (junk == token_of(layout, valid));
      const uint64_t poisoned = (junk << layout.pac_lo()) | addr;
      const uint64_t stripped = aut(key, layout, poisoned, modifier);
      const uint64_t resigned = pac_add(key, layout, stripped, modifier);
      const uint64_t expected =
          valid ^ (uint64_t{1} << (layout.pac_lo() + layout.gadget_bit));
      AttackOutcome out;
      out.success = resigned == expected;
      agg.add(out);
    }
    report.stage1 = agg.finish("signing-gadget/stage1", 1.0, cfg.tolerance_z);
  }

  // Stage 2: the gadget embedded in tail-call instrumentation. The
  // re-signed chain element carries the flipped bit inside CR, which the
  // adversary cannot clear, so the corruption is detected at return.
  {
    const CallGraphProgram prog = tail_call_program();
    OutcomeAgg agg;
    uint64_t detected = 0;
    const uint64_t trials2 = std::min<uint64_t>(cfg.trials, 1000);
    for (uint64_t trial = 0; trial < trials2; ++trial) {
      MachineConfig mc;
      mc.scheme = cfg.scheme;
      mc.layout = layout;
      mc.rng_seed = derive_stream_seed(cfg.seed, trial);
      mc.stack_words = 32;
      mc.writable_cr = cfg.writable_cr;
      Machine m(prog, mc);
      AdversaryView adv = m.adversary();

      // Harvest a valid chain word and its modifier from the side tree.
      m.call(1);
      m.call(0);
      m.call(0);
      const uint64_t harvested = adv.read(2);
      const uint64_t harvested_below = adv.read(1);
      m.ret();
      m.ret();
      m.ret();

      // Victim path; inject the harvested word before the tail call's
      // epilogue load.
      m.call(0);  // entry -> A
      m.call(0);  // A -> Mid
      adv.write(1, harvested);
      m.tail_call(0);  // Mid -> B: aut-then-pac over the injected word
      AttackOutcome out;
      out.guesses_used = 1;
      out.hijack_target = address_of(layout, harvested);
      if (cfg.writable_cr) {
        adv.corrupt_cr(uint64_t{1} << (layout.pac_lo() + layout.gadget_bit));
      }
      Event e = m.ret();  // B returns
      if (!m.alive()) {
        // The flipped bit in CR fails verification before the return.
        out.crashed = true;
        detected++;
      } else if (m.alive()) {
        out.ag_load = true;
        adv.write(0, harvested_below);
        e = m.ret();
        out.success = m.alive() && e.kind == EventKind::kReturn &&
                      e.addr == out.hijack_target;
      }
      agg.add(out);
    }
    report.stage2 = agg.finish(cfg.writable_cr
                                   ? "signing-gadget/stage2-writable-cr"
                                   : "signing-gadget/stage2-detection",
                               1.0, cfg.tolerance_z);
    if (!cfg.writable_cr) {
      // The reported rate is the detection rate.
      report.stage2.successes = detected;
      report.stage2.rate =
          trials2 ? double(detected) / double(trials2) : 0.0;
      const Interval ci = binomial_ci(detected, trials2, cfg.tolerance_z);
      report.stage2.ci_low = ci.low;
      report.stage2.ci_high = ci.high;
      report.stage2.within_tolerance =
          rate_within(report.stage2.rate, 1.0, trials2, cfg.tolerance_z);
    }
  }
  return report;
}

}  // namespace acs
