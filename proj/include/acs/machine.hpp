// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_MACHINE_HPP
#define ACS_MACHINE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "acs/call_graph.hpp"
#include "acs/pa.hpp"

namespace acs {

// Backward-edge protection scheme executed by the machine.
//
//  kUninstrumented  return addresses stored in plain words.
//  kSpModifier      return address signed with the stack pointer as the
//                   modifier (the -mbranch-protection style).
//  kAcsNomask       chained authenticated return addresses: each pushed
//                   word is the previous chain element and the link
//                   register is re-signed with it as modifier.
//  kAcsFull         as kAcsNomask, with the stored token masked by a
//                   pseudo-random value derived from the previous element.
//  kShadowStack     reference copies kept in adversary-inaccessible memory;
//                   returns use the shadow copy unconditionally.
enum class Scheme {
  kUninstrumented,
  kSpModifier,
  kAcsNomask,
  kAcsFull,
  kShadowStack,
};

const char* scheme_name(Scheme s);

enum class EventKind {
  kCall,
  kReturn,
  kTranslationFault,
  kTermination,
  kSetJmp,
  kLongJmp,
  kSignalDeliver,
  kSigReturn,
};

enum class TermCause {
  kNone,
  kStackOverflow,
  kLongjmpAuthFail,
  kSignalAuthFail,
};

struct Event {
  EventKind kind;
  uint64_t addr = 0;  // Call: return site; Return/SigReturn: target;
                      // TranslationFault: the offending pointer.
  TermCause cause = TermCause::kNone;
};

struct MachineConfig {
  Scheme scheme = Scheme::kAcsNomask;
  PointerLayout layout{};
  uint64_t rng_seed = 0;
  uint64_t seed_init = 0;  // initial chain value held in CR
  size_t stack_words = 4096;
  size_t jmp_buf_slots = 8;
  size_t signal_frames = 8;
  // Sanity knob for experiments only: lets the adversary XOR bits into CR,
  // i.e. removes the register-protection assumption.
  bool writable_cr = false;
  const MacFunction* mac = nullptr;  // defaults to Mix64Mac
};

class Machine;

// The adversary's window on the target process: arbitrary read/write over
// stack, jmp_buf and signal-frame words. No registers, no shadow stack, no
// keys. Memory is word-addressed.
class AdversaryView {
 public:
  uint64_t read(size_t index) const;
  void write(size_t index, uint64_t value);
  size_t size() const;

  size_t stack_base() const;
  size_t jmp_buf_base(int slot) const;    // 3 words: blob, cr, sp
  size_t signal_frame_base(int n) const;  // 3 words: pc, cr, prev

  // Active only when MachineConfig::writable_cr is set; throws otherwise.
  void corrupt_cr(uint64_t xor_mask);

 private:
  friend class Machine;
  explicit AdversaryView(Machine* m) : m_(m) {}
  Machine* m_;
};

// An abstract call machine executing call/return traces over
// adversary-writable memory. Granularity is one semantic step per
// call/return; memory is at rest between steps, which is exactly where
// adversary hooks run. Each call pushes one word, so the stack pointer
// doubles as the activation depth.
class Machine {
 public:
  Machine(CallGraphProgram program, MachineConfig config);

  bool alive() const { return alive_; }
  const std::vector<Event>& trace() const { return trace_; }

  // Executes a call through the given site of the current function.
  void call(int site_index);
  // Pops one activation and authenticates per the scheme. Returns the
  // resulting event (kReturn or kTranslationFault).
  Event ret();
  // Tail call: unwinds the current chain element and re-signs the return
  // address for the tail callee, reusing the same stack slot.
  void tail_call(int site_index);

  // Saves the current environment into a jmp_buf slot in adversary-writable
  // memory. Returns the slot id.
  int set_jmp();
  // Restores the environment from an (possibly tampered) jmp_buf. On
  // authentication failure the process terminates.
  Event long_jmp(int slot);

  // Restarts the token chain with a per-process/thread seed. Only valid at
  // depth zero, before any activation.
  void reseed(uint64_t id);

  // Delivers a signal at the current point; the frame lands in
  // adversary-writable memory and the kernel keeps one private reference.
  void deliver_signal();
  // Returns from the innermost signal handler, validating the frame
  // against the kernel reference.
  Event sig_return();

  AdversaryView adversary() { return AdversaryView(this); }

  // Observation surface for drivers and tests. Not reachable through
  // AdversaryView.
  uint64_t cr() const { return cr_; }
  uint64_t lr() const { return lr_; }
  uint64_t scratch_x15() const { return x15_; }
  size_t sp() const { return sp_; }
  size_t depth() const { return sp_; }
  int current_function() const { return cur_fid_; }
  int jmp_buf_count() const { return jmp_count_; }
  int signal_depth() const { return sig_depth_; }
  const PacKey& key() const { return key_; }
  const PointerLayout& layout() const { return cfg_.layout; }
  Scheme scheme() const { return cfg_.scheme; }
  const CallGraphProgram& program() const { return program_; }
  uint64_t seed_init() const { return seed_init_; }

 private:
  friend class AdversaryView;

  const MacFunction& mac() const {
    return cfg_.mac ? *cfg_.mac : Mix64Mac::instance();
  }
  uint64_t token(uint64_t value, uint64_t modifier) const {
    return mac_token(key_, value, modifier, cfg_.layout, mac());
  }
  uint64_t sign(uint64_t word, uint64_t modifier) const {
    return pac_add(key_, cfg_.layout, word, modifier, mac());
  }
  uint64_t auth(uint64_t word, uint64_t modifier) const {
    return aut(key_, cfg_.layout, word, modifier, mac());
  }
  // Token mask derived from the previous chain element, shifted into the
  // token field (the pac of address zero).
  uint64_t mask_field(uint64_t prev) const {
    return token(0, prev) << cfg_.layout.pac_lo();
  }

  uint64_t synth_pc(unsigned tag, int seq) const;
  void push_event(Event e);
  Event fault(uint64_t bad_ptr);
  Event terminate(TermCause cause);
  void control_transfer(uint64_t addr);

  CallGraphProgram program_;
  MachineConfig cfg_;
  PacKey key_;
  uint64_t seed_init_ = 0;

  uint64_t cr_ = 0;
  uint64_t lr_ = 0;
  uint64_t x15_ = 0;
  size_t sp_ = 0;
  int cur_fid_ = 0;
  bool alive_ = true;

  std::vector<uint64_t> mem_;     // stack | jmp_bufs | signal frames
  std::vector<uint64_t> shadow_;  // adversary-inaccessible
  size_t jmp_base_ = 0;
  size_t sig_base_ = 0;
  int jmp_count_ = 0;
  int sig_depth_ = 0;
  int sig_seq_ = 0;
  int setjmp_seq_ = 0;
  uint64_t sig_ref_ = 0;  // kernel-private reference (full word; only the
                          // token takes part in validation)

  std::vector<Event> trace_;
};

// Scripted trace actions. `arg` is the call-site index for kCall/kTailCall,
// the jmp_buf slot for kLongJmp, the hook id for kHook and the new seed for
// kFork.
enum class ActionKind {
  kCall,
  kReturn,
  kTailCall,
  kSetJmp,
  kLongJmp,
  kHook,
  kFork,
  kSignal,
  kSigReturn,
};

struct Action {
  ActionKind kind;
  uint64_t arg = 0;
};

inline Action ActCall(int site) { return {ActionKind::kCall, uint64_t(site)}; }
inline Action ActReturn() { return {ActionKind::kReturn, 0}; }
inline Action ActTailCall(int site) {
  return {ActionKind::kTailCall, uint64_t(site)};
}
inline Action ActSetJmp() { return {ActionKind::kSetJmp, 0}; }
inline Action ActLongJmp(int slot) {
  return {ActionKind::kLongJmp, uint64_t(slot)};
}
inline Action ActHook(int id) { return {ActionKind::kHook, uint64_t(id)}; }
inline Action ActFork(uint64_t seed) { return {ActionKind::kFork, seed}; }
inline Action ActSignal() { return {ActionKind::kSignal, 0}; }
inline Action ActSigReturn() { return {ActionKind::kSigReturn, 0}; }

using AdversaryHook = std::function<void(AdversaryView, int hook_id)>;

// Validates the action list against the program (call sites must belong to
// the current function, returns must not underflow, longjmp targets must
// exist) and then executes it, invoking the hook between steps. Throws
// std::invalid_argument on an ill-formed trace before executing anything.
// Execution stops early once the machine is no longer alive.
std::vector<Event> run_trace(Machine& m, const std::vector<Action>& actions,
                             const AdversaryHook& hook = {});

}  // namespace acs

#endif  // ACS_MACHINE_HPP
