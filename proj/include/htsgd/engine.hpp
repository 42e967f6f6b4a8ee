// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "htsgd/problems.hpp"
#include "htsgd/schedules.hpp"

namespace htsgd {

enum class RecordMode { endpoint, every_k, full };

struct RunConfig {
  const Problem* problem = nullptr;
  ScheduleSpec schedule;
  std::int64_t iterations = 0;
  Eigen::VectorXd theta0;
  RecordMode record = RecordMode::endpoint;
  std::int64_t every_k = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;

  // When set, the run fills the normalized endpoint statistics. A Pareto model
  // yields the exact quantile-based normalizers; the stable model falls back to
  // the power-law normalizer (iterates) and batch-tail-sum root (averages),
  // which carry its oracle-side constants instead.
  std::optional<TailModel> normalization_tail;
};

struct RunResult {
  Eigen::VectorXd theta_final;
  Eigen::VectorXd error_final;   // theta_N - optimum
  Eigen::VectorXd partial_sum;   // sum_{i=1..N} (theta_i - optimum)
  double iterate_normalizer_value = std::numeric_limits<double>::quiet_NaN();
  double averaging_normalizer_value = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd normalized_iterate;  // w_N * error_final
  Eigen::VectorXd normalized_average;  // partial_sum / c_N
  std::vector<std::int64_t> snapshot_iterations;
  std::vector<Eigen::VectorXd> snapshot_errors;
  std::int64_t samples_consumed = 0;
  bool diverged = false;
  std::int64_t diverged_at_iteration = -1;
};

// Draws b_i fresh data from the stream and averages the per-sample gradients.
// Single-pass: every datum is consumed exactly once.
Eigen::VectorXd minibatch_gradient(const Problem& problem, const ScheduleSpec& schedule,
                                   const Eigen::VectorXd& theta, std::int64_t iteration,
                                   RngStream& rng, std::int64_t* samples_drawn = nullptr);

// Runs theta_{i} = theta_{i-1} - gamma_i * (batch-averaged gradient) for
// i = 1..N. A non-finite iterate stops the run and is reported as a
// divergence; no clipping or projection is applied.
RunResult sgd_run(const RunConfig& config);

enum class EnsembleStatistic {
  error_p_moment,      // |theta_N - optimum|^p
  normalized_iterate,  // w_N (theta_N - optimum), dimension 1 only
  normalized_average,  // c_N^{-1} sum (theta_i - optimum), dimension 1 only
};

struct EnsembleResult {
  std::vector<double> values;  // in replication order, diverged runs removed
  std::int64_t replications = 0;
  std::int64_t diverged_count = 0;
  double wall_seconds = 0.0;
};

// Runs `replications` independent copies (replication r uses the stream
// (master_seed, data, r)) and collects the requested endpoint statistic.
// Deterministic for fixed (config, replications) regardless of thread count.
EnsembleResult monte_carlo(const RunConfig& config, std::int64_t replications,
                           EnsembleStatistic statistic, double p = 1.0, int threads = 0);

// One pass per replication, collecting |theta_n - optimum|^p at each n in
// `grid` (grid must be increasing). Row-major: values[g] is the ensemble for
// grid[g]. Cheaper than separate runs and shares no state across entries.
struct GridEnsembleResult {
  std::vector<std::int64_t> grid;
  std::vector<std::vector<double>> values;
  std::int64_t diverged_count = 0;
  double wall_seconds = 0.0;
};

GridEnsembleResult monte_carlo_error_grid(const RunConfig& config, std::int64_t replications,
                                          const std::vector<std::int64_t>& grid, double p,
                                          int threads = 0);

}  // namespace htsgd
