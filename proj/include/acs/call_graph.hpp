// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_CALL_GRAPH_HPP
#define ACS_CALL_GRAPH_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "acs/pa.hpp"

namespace acs {

struct CallSite {
  int callee = 0;
  uint64_t return_site = 0;
};

struct FunctionDef {
  int id = 0;
  std::vector<CallSite> call_sites;
  bool is_leaf() const { return call_sites.empty(); }
};

// Static call graph driving call/return traces. Return-site addresses are
// synthesized canonical values, unique per (function, site index):
//
//   address = (function_id << 20) | (site_index << 4)
//
// Function ids start at 1 so no return site collides with address zero,
// which the masking construction reserves.
class CallGraphProgram {
 public:
  static constexpr unsigned kFunctionShift = 20;
  static constexpr unsigned kSiteShift = 4;

  static uint64_t site_address(int function_id, int site_index) {
    return (uint64_t(function_id) << kFunctionShift) |
           (uint64_t(site_index) << kSiteShift);
  }
  static int function_of_address(uint64_t addr) {
    return int(addr >> kFunctionShift);
  }

  // Adds a function with the given id (>= 1). Returns the id.
  int add_function(int id);
  // Appends a call site to `caller` targeting `callee`; the return site
  // address is synthesized from the caller id and the new site index.
  // Returns the site index within the caller.
  int add_call(int caller, int callee);

  void set_entry(int id) { entry_ = id; }
  int entry() const { return entry_; }

  bool has_function(int id) const { return functions_.count(id) != 0; }
  const FunctionDef& function(int id) const;
  const std::map<int, FunctionDef>& functions() const { return functions_; }

  // Throws std::invalid_argument unless every edge is unique, every callee
  // exists, every return site is canonical, nonzero, and pairwise distinct,
  // and the entry function exists.
  void validate(const PointerLayout& layout) const;

 private:
  std::map<int, FunctionDef> functions_;
  int entry_ = 0;
};

}  // namespace acs

#endif  // ACS_CALL_GRAPH_HPP
