// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acs/call_graph.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace acs {

int CallGraphProgram::add_function(int id) {
  if (id < 1) {
    throw std::invalid_argument("function id must be >= 1");
  }
  if (functions_.count(id)) {
    throw std::invalid_argument("duplicate function id " + std::to_string(id));
  }
  functions_[id] = FunctionDef{id, {}};
  if (entry_ == 0) entry_ = id;
  return id;
}

int CallGraphProgram::add_call(int caller, int callee) {
  auto it = functions_.find(caller);
  if (it == functions_.end()) {
    throw std::invalid_argument("unknown caller " + std::to_string(caller));
  }
  const int site_index = int(it->second.call_sites.size());
  it->second.call_sites.push_back(
      CallSite{callee, site_address(caller, site_index)});
  return site_index;
}

const FunctionDef& CallGraphProgram::function(int id) const {
  auto it = functions_.find(id);
  if (it == functions_.end()) {
    throw std::invalid_argument("unknown function " + std::to_string(id));
  }
  return it->second;
}

void CallGraphProgram::validate(const PointerLayout& layout) const {
  if (functions_.empty() || entry_ == 0 || !has_function(entry_)) {
    throw std::invalid_argument("program has no entry function");
  }
  std::set<uint64_t> addresses;
  std::set<std::pair<int, uint64_t>> edges;
  for (const auto& [id, fn] : functions_) {
    if (id < 1) throw std::invalid_argument("function id must be >= 1");
    for (const CallSite& site : fn.call_sites) {
      if (!has_function(site.callee)) {
        throw std::invalid_argument("call to unknown function " +
                                    std::to_string(site.callee));
      }
      if (site.return_site == 0 || !is_canonical(layout, site.return_site)) {
        throw std::invalid_argument("return site not canonical");
      }
      if (!addresses.insert(site.return_site).second) {
        throw std::invalid_argument("duplicate return site address");
      }
      if (!edges.insert({site.callee, site.return_site}).second) {
        throw std::invalid_argument("duplicate call edge");
      }
    }
  }
}

}  // namespace acs
