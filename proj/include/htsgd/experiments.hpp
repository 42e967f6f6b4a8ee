// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "htsgd/config.hpp"
#include "htsgd/engine.hpp"

namespace htsgd {

enum class ExperimentKind {
  moment_rate,
  limit_law,
  averaging_law,
  mean_measure,
  drift_check,
  lemma_sweep,
  complexity_table,
};

enum class OutputFormat { csv, jsonl };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from(const std::string& name);

// Fully resolved experiment description. `resolved` holds the canonical
// flattened key/value view written to the manifest; re-running from it
// reproduces the outputs byte for byte.
struct ExperimentSetup {
  ExperimentKind kind = ExperimentKind::moment_rate;
  std::uint64_t master_seed = 1;
  std::int64_t replications = 1000;
  std::string output_dir = "out";
  OutputFormat format = OutputFormat::csv;

  std::string problem_type = "quadratic";  // quadratic | linear_regression
  std::vector<double> curvature_diag{1.0};
  std::vector<double> theta_star{0.0};
  std::vector<double> theta0{1.0};
  PredictorLaw predictors;

  TailModel noise = TailModel::pareto(1.5);
  ScheduleSpec schedule;
  std::vector<std::int64_t> n_grid{1000};

  double p = 1.2;
  double s_threshold = 1.0;
  double ks_level = 0.01;
  double tolerance = 0.05;
  double drift_tol = 1e-6;
  double max_divergence_fraction = 0.01;
  double slope_margin = 0.08;
  double bound_ratio_max = 1.5;
  int series_terms = 1000;
  std::int64_t oracle_draws = 0;  // 0 means "match replications"

  std::int64_t triangle_trials = 200000;
  std::int64_t contraction_trials = 20000;
  std::int64_t toeplitz_n = 100000;

  std::map<std::string, std::string> resolved;
};

ExperimentSetup resolve_experiment(const ConfigFile& cfg);

std::unique_ptr<Problem> make_problem(const ExperimentSetup& setup);

struct ExperimentStatus {
  int exit_code = 0;  // 0 ok, 2 config error, 3 validation failure
  bool warning = false;
  bool overall_pass = true;
  std::string message;
};

// Executes the experiment and writes manifest.json, results.(csv|jsonl),
// summary.json (plus oracle.(csv|jsonl) for the distributional kinds) into
// setup.output_dir.
ExperimentStatus run_experiment(const ExperimentSetup& setup);

// CLI entry points; `path` may be a config file or a manifest.json from a
// previous run. Return process exit codes.
int cli_run(const std::string& path);
int cli_validate(const std::string& path);
int cli_seeds(const std::string& path);
int cli_report(const std::string& results_dir);

}  // namespace htsgd
