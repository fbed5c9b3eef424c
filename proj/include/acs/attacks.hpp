// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_ATTACKS_HPP
#define ACS_ATTACKS_HPP

#include <cstdint>
#include <string>

#include "acs/machine.hpp"

namespace acs {

// Strict: any authentication fault kills the whole simulated process tree
// and the key is reset for the next trial. Lenient: sibling processes share
// the key and survive each other's crashes.
enum class ProcessModel { kStrict, kLenient };

struct AttackConfig {
  Scheme scheme = Scheme::kAcsNomask;
  unsigned b = 16;
  unsigned va_size = 39;
  uint64_t trials = 1000;
  uint64_t seed = 1;
  int64_t q_budget = -1;  // harvest budget; -1 selects a per-attack default
  ProcessModel process_model = ProcessModel::kStrict;
  uint64_t max_guesses = uint64_t{1} << 26;
  double tolerance_z = 3.0;
  double mean_tolerance = 0.05;
  bool writable_cr = false;  // sanity knob for the signing-gadget stage 2

  PointerLayout layout() const {
    PointerLayout l;
    l.va_size = va_size;
    l.pac_bits = b;
    return l;
  }
};

// Per-trial outcome. success means the full hijack goal was reached: a
// Return event in the machine trace targeting the adversary's chosen
// address. ag_load means a substituted chain word passed authentication.
struct AttackOutcome {
  bool success = false;
  bool ag_load = false;
  bool crashed = false;
  uint64_t guesses_used = 0;
  uint64_t tokens_harvested = 0;
  uint64_t hijack_target = 0;
};

struct TrialReport {
  std::string name;
  uint64_t trials = 0;
  uint64_t successes = 0;
  uint64_t crashes = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_guesses = 0.0;
  double sd_guesses = 0.0;
  double mean_harvested = 0.0;
  double sd_harvested = 0.0;
  double analytic_ref = 0.0;
  bool within_tolerance = false;
  bool ci_degenerate = false;
};

// Canonical program shapes used by the attack runners.
CallGraphProgram listing2_program();   // one caller with two same-SP sites
CallGraphProgram fig4_program();       // cycle with two paths into C
CallGraphProgram off_graph_program();  // disjoint victim and harvest trees
CallGraphProgram fork_program();       // minimal two-level chain
CallGraphProgram tail_call_program();  // tail-call victim plus harvest tree

// Throws std::invalid_argument unless the entry function has at least two
// call sites whose callees each make a further call.
void require_listing2_shape(const CallGraphProgram& program);
// Throws unless the program contains a cycle and two distinct paths into a
// shared harvest target.
void require_fig4_shape(const CallGraphProgram& program);

// Replays a previously observed signed return address where key and
// modifier recur. Deterministic win against kSpModifier, a 2^-b guess
// against the chained schemes, hopeless against kShadowStack.
TrialReport attack_reuse_sp_modifier(const AttackConfig& cfg,
                                     const CallGraphProgram* program = nullptr);

// Harvests chain words over distinct call-graph paths, detects a token
// collision (unmasked) or substitutes blind (masked), then replays the
// colliding word plus its prefix. Masking is selected by cfg.scheme.
TrialReport attack_on_graph(const AttackConfig& cfg,
                            const CallGraphProgram* program = nullptr);

enum class OffGraphTarget { kCallSite, kArbitrary };

// Substitutes a chain word for a target never composed with this path:
// either a valid return site harvested elsewhere in the graph or an
// arbitrary address with a forged token.
TrialReport attack_off_graph(const AttackConfig& cfg, OffGraphTarget target,
                             const CallGraphProgram* program = nullptr);

// Brute-force guessing against sibling processes sharing one key. Without
// re-seeding the two b-bit guesses are separable; with re-seeding each
// sibling needs a joint guess. Requires the lenient process model.
TrialReport attack_fork_bruteforce(const AttackConfig& cfg, bool reseeded,
                                   const CallGraphProgram* program = nullptr);

// Stage 1 result is reported in `successes` over `trials` pointers (every
// re-signed corrupt pointer must equal the valid pac with exactly the
// gadget bit flipped). Stage 2 drives the tail-call scenario; rate is the
// detection rate, or the hijack rate when cfg.writable_cr removes the
// register protection.
struct SigningGadgetReport {
  TrialReport stage1;
  TrialReport stage2;
};
SigningGadgetReport attack_signing_gadget(const AttackConfig& cfg);

}  // namespace acs

#endif  // ACS_ATTACKS_HPP
