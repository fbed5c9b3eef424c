// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ACS_EXPERIMENT_HPP
#define ACS_EXPERIMENT_HPP

#include <string>

#include "acs/attacks.hpp"
#include "acs/games.hpp"

namespace acs {

struct ExperimentConfig {
  std::string kind = "attack";  // "attack" | "game"
  std::string name;             // experiment selector
  Scheme scheme = Scheme::kAcsNomask;
  unsigned b = 16;
  unsigned va_size = 39;
  uint64_t trials = 1000;
  int64_t q = -1;
  uint64_t seed = 1;
  bool masked = false;
  bool reseeded = false;
  ProcessModel process_model = ProcessModel::kStrict;
  double tolerance_z = 3.0;
  double mean_tolerance = 0.05;
  std::string adversary;  // game adversary selector, empty = default
  std::string format = "json";
  std::string out_path;
};

struct ExperimentResult {
  TrialReport report;
  bool pass = false;
};

// Runs the named attack or game. Throws std::invalid_argument for unknown
// names or inconsistent options.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Deterministic serializations: no timestamps, fixed key order, so a fixed
// (config, seed) produces byte-identical bodies.
std::string report_json(const ExperimentConfig& cfg, const TrialReport& r);
std::string report_csv(const ExperimentConfig& cfg, const TrialReport& r);

// Writes the report in the configured format; throws std::runtime_error on
// an unwritable path. Returns the serialized body.
std::string write_report(const ExperimentConfig& cfg, const TrialReport& r);

Scheme scheme_from_name(const std::string& name);
ProcessModel process_model_from_name(const std::string& name);

}  // namespace acs

#endif  // ACS_EXPERIMENT_HPP
