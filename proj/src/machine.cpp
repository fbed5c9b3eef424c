// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/machine.hpp"

#include <stdexcept>
#include <string>

namespace acs {

namespace {
// Tag nibble (bits 16..19) distinguishing synthesized non-call-site
// addresses from return sites, which keep the nibble clear.
constexpr unsigned kSetjmpTag = 0x8;
constexpr unsigned kSignalTag = 0x4;
}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kUninstrumented: return "uninstrumented";
    case Scheme::kSpModifier: return "sp-modifier";
    case Scheme::kAcsNomask: return "acs-nomask";
    case Scheme::kAcsFull: return "acs-full";
    case Scheme::kShadowStack: return "shadow-stack";
  }
  return "?";
}

uint64_t AdversaryView::read(size_t index) const {
  return m_->mem_.at(index);
}

void AdversaryView::write(size_t index, uint64_t value) {
  m_->mem_.at(index) = value;
}

size_t AdversaryView::size() const { return m_->mem_.size(); }

size_t AdversaryView::stack_base() const { return 0; }

size_t AdversaryView::jmp_buf_base(int slot) const {
  return m_->jmp_base_ + 3 * size_t(slot);
}

size_t AdversaryView::signal_frame_base(int n) const {
  return m_->sig_base_ + 3 * size_t(n);
}

void AdversaryView::corrupt_cr(uint64_t xor_mask) {
  if (!m_->cfg_.writable_cr) {
    throw std::logic_error("CR is not adversary-writable");
  }
  m_->cr_ ^= xor_mask;
}

Machine::Machine(CallGraphProgram program, MachineConfig config)
    : program_(std::move(program)), cfg_(config) {
  cfg_.layout.check();
  program_.validate(cfg_.layout);
  key_ = derive_key(cfg_.rng_seed);
  seed_init_ = cfg_.seed_init;
  cr_ = seed_init_;
  cur_fid_ = program_.entry();
  jmp_base_ = cfg_.stack_words;
  sig_base_ = jmp_base_ + 3 * cfg_.jmp_buf_slots;
  mem_.assign(sig_base_ + 3 * cfg_.signal_frames, 0);
  if (cfg_.scheme == Scheme::kShadowStack) {
    shadow_.assign(cfg_.stack_words, 0);
  }
}

uint64_t Machine::synth_pc(unsigned tag, int seq) const {
  return (uint64_t(cur_fid_) << CallGraphProgram::kFunctionShift) |
         (uint64_t(tag) << 16) | (uint64_t(seq) << 4);
}

void Machine::push_event(Event e) { trace_.push_back(e); }

Event Machine::fault(uint64_t bad_ptr) {
  Event e{EventKind::kTranslationFault, bad_ptr, TermCause::kNone};
  push_event(e);
  alive_ = false;
  return e;
}

Event Machine::terminate(TermCause cause) {
  Event e{EventKind::kTermination, 0, cause};
  push_event(e);
  alive_ = false;
  return e;
}

void Machine::control_transfer(uint64_t addr) {
  const int fid = CallGraphProgram::function_of_address(addr);
  cur_fid_ = program_.has_function(fid) ? fid : -1;
}

void Machine::call(int site_index) {
  if (!alive_) throw std::logic_error("call on terminated machine");
  const FunctionDef& fn = program_.function(cur_fid_);
  const CallSite& site = fn.call_sites.at(size_t(site_index));
  const uint64_t ret_addr = site.return_site;

  if (sp_ >= cfg_.stack_words) {
    terminate(TermCause::kStackOverflow);
    return;
  }

  switch (cfg_.scheme) {
    case Scheme::kUninstrumented:
      mem_[sp_] = ret_addr;
      lr_ = ret_addr;
      break;
    case Scheme::kShadowStack:
      mem_[sp_] = ret_addr;
      shadow_[sp_] = ret_addr;
      lr_ = ret_addr;
      break;
    case Scheme::kSpModifier:
      lr_ = sign(ret_addr, sp_);
      mem_[sp_] = lr_;
      break;
    case Scheme::kAcsNomask:
      mem_[sp_] = cr_;
      lr_ = sign(ret_addr, cr_);
      cr_ = lr_;
      break;
    case Scheme::kAcsFull:
      mem_[sp_] = cr_;
      x15_ = mask_field(cr_);
      lr_ = sign(ret_addr, cr_) ^ x15_;
      cr_ = lr_;
      x15_ = 0;  // scratch never survives past the step
      break;
  }
  sp_++;
  cur_fid_ = site.callee;
  push_event(Event{EventKind::kCall, ret_addr, TermCause::kNone});
}

Event Machine::ret() {
  if (!alive_) throw std::logic_error("ret on terminated machine");
  if (sp_ == 0) throw std::logic_error("return at depth zero");
  sp_--;
  const uint64_t w = mem_[sp_];

  switch (cfg_.scheme) {
    case Scheme::kUninstrumented:
      lr_ = w;
      break;
    case Scheme::kShadowStack:
      lr_ = shadow_[sp_];  // stack copy ignored
      break;
    case Scheme::kSpModifier:
      lr_ = auth(w, sp_);
      break;
    case Scheme::kAcsNomask:
      lr_ = auth(cr_, w);
      cr_ = w;
      break;
    case Scheme::kAcsFull:
      x15_ = mask_field(w);  // mask recreated from the loaded word
      lr_ = auth(cr_ ^ x15_, w);
      x15_ = 0;
      cr_ = w;
      break;
  }

  if (!is_canonical(cfg_.layout, lr_)) {
    return fault(lr_);
  }
  control_transfer(lr_);
  Event e{EventKind::kReturn, lr_, TermCause::kNone};
  push_event(e);
  return e;
}

void Machine::tail_call(int site_index) {
  if (!alive_) throw std::logic_error("tail_call on terminated machine");
  if (sp_ == 0) throw std::logic_error("tail call at depth zero");
  const FunctionDef& fn = program_.function(cur_fid_);
  const CallSite& site = fn.call_sites.at(size_t(site_index));

  // Epilogue half: unwind one chain element without dereferencing the
  // result, then prologue half: re-sign it for the tail callee. A corrupt
  // intermediate pointer is re-signed with the gadget-bit flip and the
  // mismatch surfaces at the eventual return.
  sp_--;
  const uint64_t w = mem_[sp_];
  switch (cfg_.scheme) {
    case Scheme::kUninstrumented:
    case Scheme::kShadowStack:
      lr_ = w;
      break;
    case Scheme::kSpModifier:
      lr_ = auth(w, sp_);
      break;
    case Scheme::kAcsNomask:
      lr_ = auth(cr_, w);
      cr_ = w;
      break;
    case Scheme::kAcsFull:
      x15_ = mask_field(w);
      lr_ = auth(cr_ ^ x15_, w);
      x15_ = 0;
      cr_ = w;
      break;
  }

  switch (cfg_.scheme) {
    case Scheme::kUninstrumented:
    case Scheme::kShadowStack:
      // The slot keeps holding the inherited return target; the shadow
      // entry is already correct.
      mem_[sp_] = lr_;
      break;
    case Scheme::kSpModifier:
      lr_ = sign(lr_, sp_);
      mem_[sp_] = lr_;
      break;
    case Scheme::kAcsNomask:
      mem_[sp_] = cr_;
      lr_ = sign(lr_, cr_);
      cr_ = lr_;
      break;
    case Scheme::kAcsFull:
      mem_[sp_] = cr_;
      x15_ = mask_field(cr_);
      lr_ = sign(lr_, cr_) ^ x15_;
      cr_ = lr_;
      x15_ = 0;
      break;
  }
  sp_++;
  cur_fid_ = site.callee;
}

int Machine::set_jmp() {
  if (!alive_) throw std::logic_error("set_jmp on terminated machine");
  if (jmp_count_ >= int(cfg_.jmp_buf_slots)) {
    throw std::invalid_argument("jmp_buf slots exhausted");
  }
  const int slot = jmp_count_++;
  const uint64_t ret_b = synth_pc(kSetjmpTag, setjmp_seq_++);
  const size_t base = jmp_base_ + 3 * size_t(slot);

  uint64_t blob;
  switch (cfg_.scheme) {
    case Scheme::kAcsNomask:
    case Scheme::kAcsFull:
      // Bound return value: the signed return site XOR-combined, across the
      // full token||address composite, with the signed stack pointer. Both
      // use the current chain element as the modifier.
      blob = sign(ret_b, cr_) ^ sign(sp_, cr_);
      break;
    default:
      blob = ret_b;
      break;
  }
  mem_[base] = blob;
  mem_[base + 1] = cr_;
  mem_[base + 2] = sp_;
  push_event(Event{EventKind::kSetJmp, ret_b, TermCause::kNone});
  return slot;
}

Event Machine::long_jmp(int slot) {
  if (!alive_) throw std::logic_error("long_jmp on terminated machine");
  if (slot < 0 || slot >= jmp_count_) {
    throw std::invalid_argument("no such jmp_buf slot");
  }
  const size_t base = jmp_base_ + 3 * size_t(slot);
  const uint64_t blob = mem_[base];
  const uint64_t buf_cr = mem_[base + 1];
  const uint64_t buf_sp = mem_[base + 2];

  push_event(Event{EventKind::kLongJmp, 0, TermCause::kNone});

  switch (cfg_.scheme) {
    case Scheme::kAcsNomask:
    case Scheme::kAcsFull: {
      const uint64_t recomposed = blob ^ sign(buf_sp, buf_cr);
      lr_ = auth(recomposed, buf_cr);
      if (!is_canonical(cfg_.layout, lr_)) {
        return terminate(TermCause::kLongjmpAuthFail);
      }
      break;
    }
    default:
      lr_ = blob;
      if (!is_canonical(cfg_.layout, lr_)) {
        return fault(lr_);
      }
      break;
  }

  if (buf_sp >= cfg_.stack_words) {
    return fault(buf_sp);
  }
  sp_ = size_t(buf_sp);
  cr_ = buf_cr;
  control_transfer(lr_);
  Event e{EventKind::kReturn, lr_, TermCause::kNone};
  push_event(e);
  return e;
}

void Machine::reseed(uint64_t id) {
  if (!alive_) throw std::logic_error("reseed on terminated machine");
  if (sp_ != 0) throw std::logic_error("reseed is only valid at depth zero");
  seed_init_ = id;
  cr_ = id;
}

void Machine::deliver_signal() {
  if (!alive_) throw std::logic_error("signal on terminated machine");
  if (sig_depth_ >= int(cfg_.signal_frames)) {
    throw std::invalid_argument("signal frames exhausted");
  }
  const uint64_t pc = synth_pc(kSignalTag, sig_seq_++);
  const size_t base = sig_base_ + 3 * size_t(sig_depth_);
  const uint64_t prev = sig_depth_ == 0 ? 0 : sig_ref_;
  mem_[base] = pc;
  mem_[base + 1] = cr_;
  mem_[base + 2] = prev;
  switch (cfg_.scheme) {
    case Scheme::kAcsNomask:
    case Scheme::kAcsFull: {
      const uint64_t modifier = sig_depth_ == 0 ? cr_ : sig_ref_;
      sig_ref_ = (token(pc, modifier) << cfg_.layout.pac_lo()) | pc;
      break;
    }
    default:
      sig_ref_ = pc;
      break;
  }
  sig_depth_++;
  push_event(Event{EventKind::kSignalDeliver, pc, TermCause::kNone});
}

Event Machine::sig_return() {
  if (!alive_) throw std::logic_error("sigreturn on terminated machine");
  if (sig_depth_ < 1) throw std::logic_error("sigreturn with no pending signal");
  const size_t base = sig_base_ + 3 * size_t(sig_depth_ - 1);
  const uint64_t pc = mem_[base];
  const uint64_t frame_cr = mem_[base + 1];
  const uint64_t prev = mem_[base + 2];

  switch (cfg_.scheme) {
    case Scheme::kAcsNomask:
    case Scheme::kAcsFull: {
      // The kernel reference binds the frame through the token alone; only
      // the innermost frame validates against the live chain element.
      const uint64_t expect = token_of(cfg_.layout, sig_ref_);
      const uint64_t got = sig_depth_ == 1 ? token(pc, frame_cr)
                                           : token(pc, prev);
      if (got != expect) {
        return terminate(TermCause::kSignalAuthFail);
      }
      cr_ = frame_cr;
      sig_ref_ = sig_depth_ == 1 ? 0 : prev;
      break;
    }
    default:
      cr_ = frame_cr;
      break;
  }
  sig_depth_--;
  if (!is_canonical(cfg_.layout, pc)) {
    return fault(pc);
  }
  control_transfer(pc);
  Event e{EventKind::kSigReturn, pc, TermCause::kNone};
  push_event(e);
  return e;
}

namespace {

// Static shape check of a scripted trace against the benign control flow.
void validate_trace(const Machine& m, const std::vector<Action>& actions) {
  const CallGraphProgram& prog = m.program();
  std::vector<int> fids{prog.entry()};
  struct SlotRec {
    std::vector<int> fids;
    int sig_depth;
  };
  std::vector<SlotRec> slots;
  int sig_depth = 0;

  for (const Action& a : actions) {
    switch (a.kind) {
      case ActionKind::kCall:
      case ActionKind::kTailCall: {
        const FunctionDef& fn = prog.function(fids.back());
        if (a.arg >= fn.call_sites.size()) {
          throw std::invalid_argument("call through nonexistent site");
        }
        const int callee = fn.call_sites[size_t(a.arg)].callee;
        if (a.kind == ActionKind::kTailCall) {
          if (fids.size() < 2) {
            throw std::invalid_argument("tail call at depth zero");
          }
          fids.back() = callee;
        } else {
          fids.push_back(callee);
        }
        break;
      }
      case ActionKind::kReturn:
        if (fids.size() < 2) {
          throw std::invalid_argument("return at depth zero");
        }
        fids.pop_back();
        break;
      case ActionKind::kSetJmp:
        slots.push_back(SlotRec{fids, sig_depth});
        break;
      case ActionKind::kLongJmp:
        if (a.arg >= slots.size()) {
          throw std::invalid_argument("longjmp to unknown jmp_buf");
        }
        fids = slots[size_t(a.arg)].fids;
        sig_depth = slots[size_t(a.arg)].sig_depth;
        break;
      case ActionKind::kHook:
        break;
      case ActionKind::kFork:
        if (fids.size() != 1) {
          throw std::invalid_argument("fork below depth zero");
        }
        break;
      case ActionKind::kSignal:
        sig_depth++;
        break;
      case ActionKind::kSigReturn:
        if (sig_depth < 1) {
          throw std::invalid_argument("sigreturn with no pending signal");
        }
        sig_depth--;
        break;
    }
  }
}

}  // namespace

std::vector<Event> run_trace(Machine& m, const std::vector<Action>& actions,
                             const AdversaryHook& hook) {
  validate_trace(m, actions);
  for (const Action& a : actions) {
    if (!m.alive()) break;
    switch (a.kind) {
      case ActionKind::kCall:
        m.call(int(a.arg));
        break;
      case ActionKind::kReturn:
        m.ret();
        break;
      case ActionKind::kTailCall:
        m.tail_call(int(a.arg));
        break;
      case ActionKind::kSetJmp:
        m.set_jmp();
        break;
      case ActionKind::kLongJmp:
        m.long_jmp(int(a.arg));
        break;
      case ActionKind::kHook:
        if (hook) hook(m.adversary(), int(a.arg));
        break;
      case ActionKind::kFork:
        m.reseed(a.arg);
        break;
      case ActionKind::kSignal:
        m.deliver_signal();
        break;
      case ActionKind::kSigReturn:
        m.sig_return();
        break;
    }
  }
  return m.trace();
}

}  // namespace acs
