// acs-sim: simulator for chained-MAC return address protection
// Copyright 2026 The acs-sim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "acs/analytics.hpp"
#include "acs/experiment.hpp"
#include "acs/suite.hpp"

namespace {

int run_analytic(const std::string& formula, unsigned b, int64_t q, double p,
                 const std::string& violation, bool masked) {
  double value = 0.0;
  if (formula == "p-collision" || formula == "p_collision") {
    value = acs::p_collision(q, b);
  } else if (formula == "expected-tokens" || formula == "expected_tokens") {
    value = acs::expected_tokens_to_collision(b);
  } else if (formula == "guesses" || formula == "guesses_for_success") {
    value = acs::guesses_for_success(p, b);
  } else if (formula == "table1" || formula == "table1_reference") {
    acs::ViolationType vt;
    if (violation == "on-graph") {
      vt = acs::ViolationType::kOnGraph;
    } else if (violation == "off-graph-callsite") {
      vt = acs::ViolationType::kOffGraphCallSite;
    } else if (violation == "off-graph-arbitrary") {
      vt = acs::ViolationType::kOffGraphArbitrary;
    } else {
      throw std::invalid_argument("unknown violation type: " + violation);
    }
    value = acs::table1_reference(vt, masked, b);
  } else {
    throw std::invalid_argument("unknown formula: " + formula);
  }
  std::printf("%.17g\n", value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Call-stack authentication simulator and analysis toolkit"};
  app.require_subcommand(1);

  // analytic ---------------------------------------------------------------
  auto* analytic = app.add_subcommand("analytic", "evaluate a closed form");
  std::string formula;
  unsigned b = 16;
  int64_t q = 0;
  double p = 0.5;
  std::string violation = "on-graph";
  bool masked = false;
  analytic->add_option("--formula", formula,
                       "p-collision | expected-tokens | guesses | table1")
      ->required();
  analytic->add_option("--b", b, "token width in bits");
  analytic->add_option("--q", q, "harvested token count");
  analytic->add_option("--p", p, "target success probability");
  analytic->add_option("--violation", violation,
                       "on-graph | off-graph-callsite | off-graph-arbitrary");
  analytic->add_flag("--masked", masked, "tokens are masked");

  // attack / game ------------------------------------------------------------
  acs::ExperimentConfig cfg;
  std::string scheme = "acs-nomask";
  std::string process_model = "strict";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--b", cfg.b, "token width in bits");
    cmd->add_option("--va-size", cfg.va_size, "virtual address bits");
    cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
    cmd->add_option("--seed", cfg.seed, "master seed")->required();
    cmd->add_option("--q", cfg.q, "harvest/query budget");
    cmd->add_flag("--masked", cfg.masked, "use token masking");
    cmd->add_option("--tolerance-z", cfg.tolerance_z,
                    "tolerance in binomial standard errors");
    cmd->add_option("--out", cfg.out_path, "report output path");
    cmd->add_option("--format", cfg.format, "json | csv");
  };

  auto* attack = app.add_subcommand("attack", "run an attack experiment");
  attack
      ->add_option("--type", cfg.name,
                   "reuse-sp | on-graph | off-graph-callsite | "
                   "off-graph-arbitrary | fork-bruteforce | signing-gadget")
      ->required();
  attack->add_option("--scheme", scheme,
                     "uninstrumented | sp-modifier | acs-nomask | acs-full | "
                     "shadow-stack");
  attack->add_option("--process-model", process_model, "strict | lenient");
  attack->add_flag("--reseeded", cfg.reseeded,
                   "re-seed sibling chains (fork-bruteforce)");
  add_common(attack);

  auto* game = app.add_subcommand("game", "run a security game");
  game->add_option("--name", cfg.name, "pac-collision | acs")->required();
  game->add_option("--adversary", cfg.adversary,
                   "pac-collision: heuristic | random; acs: harvest | blind | "
                   "off-graph-request");
  add_common(game);

  // suite --------------------------------------------------------------------
  auto* suite = app.add_subcommand("suite", "run verification suites");
  bool acceptance = false;
  uint64_t suite_seed = acs::kAcceptanceSeed;
  suite->add_flag("--acceptance", acceptance, "run the acceptance matrix");
  suite->add_option("--seed", suite_seed, "master seed for the suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analytic->parsed()) {
      return run_analytic(formula, b, q, p, violation, masked);
    }
    if (attack->parsed() || game->parsed()) {
      cfg.kind = attack->parsed() ? "attack" : "game";
      cfg.scheme = acs::scheme_from_name(scheme);
      cfg.process_model = acs::process_model_from_name(process_model);
      const acs::ExperimentResult res = acs::run_experiment(cfg);
      std::cout << acs::write_report(cfg, res.report);
      return res.pass ? 0 : 1;
    }
    if (suite->parsed()) {
      if (!acceptance) {
        std::cerr << "nothing to do: pass --acceptance\n";
        return 2;
      }
      bool all = true;
      acs::run_acceptance_suite(suite_seed, [&](const acs::CriterionResult& r) {
        std::cout << acs::format_criterion_line(r) << std::endl;
        all = all && r.pass;
      });
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
