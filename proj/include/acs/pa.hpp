// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_PA_HPP
#define ACS_PA_HPP

#include <cstdint>

namespace acs {

// Bit layout of a 64-bit authenticated pointer.
//
//   63      62          va_size+b    va_size              0
//   +--------+--------------+------------+----------------+
//   | 0      | reserved     | token (b)  | address        |
//   +--------+--------------+------------+----------------+
//
// The low va_size bits hold the virtual address, the b token bits sit
// directly above them, and everything higher is reserved. Bit 63 is always
// zero for canonical user pointers. corrupt_bit marks a failed
// authentication; it must lie above the token field so the marker never
// aliases token bits. gadget_bit is the token bit flipped when a pointer
// with corrupt high-order bits is re-signed.
struct PointerLayout {
  unsigned va_size = 39;
  unsigned pac_bits = 16;
  unsigned corrupt_bit = 62;
  unsigned gadget_bit = 0;

  constexpr unsigned pac_lo() const { return va_size; }
  constexpr uint64_t addr_mask() const {
    return (uint64_t{1} << va_size) - 1;
  }
  constexpr uint64_t token_mask() const {
    return pac_bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << pac_bits) - 1;
  }
  constexpr uint64_t token_field_mask() const {
    return token_mask() << va_size;
  }
  constexpr uint64_t corrupt_mask() const { return uint64_t{1} << corrupt_bit; }

  bool valid() const;
  // Throws std::invalid_argument when the field constraints are violated.
  void check() const;
};

// 128-bit MAC key, generated once per simulated process. Never reachable
// through any adversary-facing interface.
struct PacKey {
  uint64_t k1 = 0;
  uint64_t k2 = 0;
};

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Deterministic key derivation from an experiment seed.
PacKey derive_key(uint64_t rng_seed);

// Keyed tweakable MAC interface. Implementations produce a full 64-bit tag;
// token extraction truncates to the layout's token width. Pluggable so a
// cryptographic MAC can stand in for the default mixer.
class MacFunction {
 public:
  virtual ~MacFunction() = default;
  virtual uint64_t tag64(const PacKey& key, uint64_t value,
                         uint64_t modifier) const = 0;
};

// Default MAC: tag = mix64(value ^ k1 ^ mix64(modifier ^ k2)).
class Mix64Mac final : public MacFunction {
 public:
  uint64_t tag64(const PacKey& key, uint64_t value,
                 uint64_t modifier) const override {
    return mix64(value ^ key.k1 ^ mix64(modifier ^ key.k2));
  }
  static const Mix64Mac& instance();
};

inline uint64_t address_of(const PointerLayout& layout, uint64_t word) {
  return word & layout.addr_mask();
}

inline uint64_t token_of(const PointerLayout& layout, uint64_t word) {
  return (word >> layout.pac_lo()) & layout.token_mask();
}

// True iff all bits at or above va_size are zero. Dereferencing a
// non-canonical pointer raises a translation fault in the machine model.
inline bool is_canonical(const PointerLayout& layout, uint64_t word) {
  return (word & ~layout.addr_mask()) == 0;
}

inline uint64_t set_corrupt(const PointerLayout& layout, uint64_t word) {
  return word | layout.corrupt_mask();
}

// b-bit authentication token for (value, modifier) under the given key.
uint64_t mac_token(const PacKey& key, uint64_t value, uint64_t modifier,
                   const PointerLayout& layout,
                   const MacFunction& mac = Mix64Mac::instance());

// Signs a pointer: embeds mac_token(address, modifier) into the token
// field. The token is computed as though the high-order bits were correct;
// if any bit at or above va_size of the input was nonzero, the gadget bit
// of the resulting token is flipped. High bits above the token are cleared.
uint64_t pac_add(const PacKey& key, const PointerLayout& layout, uint64_t word,
                 uint64_t modifier, const MacFunction& mac = Mix64Mac::instance());

// Verifies a signed pointer. On token match returns the canonical address;
// otherwise returns the address with the corrupt bit set. Verification is a
// pure token comparison; failure is encoded in the returned word.
uint64_t aut(const PacKey& key, const PointerLayout& layout, uint64_t word,
             uint64_t modifier, const MacFunction& mac = Mix64Mac::instance());

// Strips the token field and all bits above the address, unconditionally.
uint64_t xpac(const PointerLayout& layout, uint64_t word);

}  // namespace acs

#endif  // ACS_PA_HPP
