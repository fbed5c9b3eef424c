// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/pa.hpp"

#include <stdexcept>
#include <string>

namespace acs {

bool PointerLayout::valid() const {
  if (va_size == 0 || va_size > 62) return false;
  if (pac_bits < 1 || va_size + pac_bits > 63) return false;
  if (corrupt_bit < va_size + pac_bits || corrupt_bit > 63) return false;
  if (gadget_bit >= pac_bits) return false;
  return true;
}

void PointerLayout::check() const {
  if (!valid()) {
    throw std::invalid_argument(
        "invalid pointer layout: va_size=" + std::to_string(va_size) +
        " pac_bits=" + std::to_string(pac_bits) +
        " corrupt_bit=" + std::to_string(corrupt_bit) +
        " gadget_bit=" + std::to_string(gadget_bit));
  }
}

const Mix64Mac& Mix64Mac::instance() {
  static const Mix64Mac mac;
  return mac;
}

PacKey derive_key(uint64_t rng_seed) {
  // splitmix64 stream; two draws form the 128-bit key.
  uint64_t s = rng_seed;
  PacKey key;
  s += 0x9E3779B97F4A7C15ULL;
  key.k1 = mix64(s);
  s += 0x9E3779B97F4A7C15ULL;
  key.k2 = mix64(s);
  return key;
}

uint64_t mac_token(const PacKey& key, uint64_t value, uint64_t modifier,
                   const PointerLayout& layout, const MacFunction& mac) {
  return mac.tag64(key, value, modifier) & layout.token_mask();
}

uint64_t pac_add(const PacKey& key, const PointerLayout& layout, uint64_t word,
                 uint64_t modifier, const MacFunction& mac) {
  const uint64_t addr = address_of(layout, word);
  const bool corrupt_input = (word & ~layout.addr_mask()) != 0;
  uint64_t token = mac_token(key, addr, modifier, layout, mac);
  if (corrupt_input) {
    token ^= uint64_t{1} << layout.gadget_bit;
  }
  return addr | (token << layout.pac_lo());
}

uint64_t aut(const PacKey& key, const PointerLayout& layout, uint64_t word,
             uint64_t modifier, const MacFunction& mac) {
  const uint64_t addr = address_of(layout, word);
  const uint64_t stored = token_of(layout, word);
  const uint64_t expected = mac_token(key, addr, modifier, layout, mac);
  if (stored == expected) {
    return addr;
  }
  return set_corrupt(layout, addr);
}

uint64_t xpac(const PointerLayout& layout, uint64_t word) {
  return address_of(layout, word);
}

}  // namespace acs
