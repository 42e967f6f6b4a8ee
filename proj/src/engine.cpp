// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/engine.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "htsgd/parallel.hpp"

namespace htsgd {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void require_config(const RunConfig& config) {
  if (config.problem == nullptr) throw std::invalid_argument("run config has no problem");
  if (config.iterations < 1) throw std::invalid_argument("iteration count must be at least 1");
  if (config.theta0.size() != config.problem->dim())
    throw std::invalid_argument("theta0 dimension does not match the problem");
  if (!all_finite(config.theta0)) throw std::invalid_argument("theta0 must be finite");
  if (config.record == RecordMode::every_k && config.every_k < 1)
    throw std::invalid_argument("every_k recording requires a positive stride");
}

void fill_normalizers(const RunConfig& config, RunResult& result) {
  if (!config.normalization_tail) return;
  const TailModel& tail = *config.normalization_tail;
  if (tail.exact_quantile()) {
    result.iterate_normalizer_value =
        iterate_normalizer(config.schedule, tail, config.iterations);
    result.averaging_normalizer_value =
        averaging_normalizer(config.schedule, tail, config.iterations).value;
  } else {
    result.iterate_normalizer_value =
        power_law_normalizer(config.schedule, tail.alpha, config.iterations);
    double beta = 0.0;
    for (std::int64_t i = 1; i <= config.iterations; ++i)
      beta += std::pow(static_cast<double>(batch_size(config.schedule, i)), 1.0 - tail.alpha);
    result.averaging_normalizer_value = std::pow(beta, 1.0 / tail.alpha);
  }
  if (!result.diverged) {
    result.normalized_iterate = result.iterate_normalizer_value * result.error_final;
    result.normalized_average = result.partial_sum / result.averaging_normalizer_value;
  }
}

}  // namespace

Eigen::VectorXd minibatch_gradient(const Problem& problem, const ScheduleSpec& schedule,
                                   const Eigen::VectorXd& theta, std::int64_t iteration,
                                   RngStream& rng, std::int64_t* samples_drawn) {
  const std::int64_t b = batch_size(schedule, iteration);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(problem.dim());
  for (std::int64_t j = 0; j < b; ++j) {
    acc += problem.grad(theta, problem.sample_datum(rng));
  }
  if (samples_drawn != nullptr) *samples_drawn += b;
  return acc / static_cast<double>(b);
}

RunResult sgd_run(const RunConfig& config) {
  require_config(config);
  const Problem& problem = *config.problem;
  RngStream rng(config.master_seed, StreamDomain::data, config.replication);

  RunResult result;
  Eigen::VectorXd theta = config.theta0;
  Eigen::VectorXd partial_sum = Eigen::VectorXd::Zero(problem.dim());
  std::int64_t samples = 0;

  for (std::int64_t i = 1; i <= config.iterations; ++i) {
    const Eigen::VectorXd g = minibatch_gradient(problem, config.schedule, theta, i, rng, &samples);
    theta -= learning_rate(config.schedule, i) * g;
    if (!all_finite(theta)) {
      result.diverged = true;
      result.diverged_at_iteration = i;
      break;
    }
    partial_sum += theta - problem.optimum();
    const bool snapshot = config.record == RecordMode::full ||
                          (config.record == RecordMode::every_k && i % config.every_k == 0);
    if (snapshot) {
      result.snapshot_iterations.push_back(i);
      result.snapshot_errors.push_back(theta - problem.optimum());
    }
  }

  result.theta_final = theta;
  result.error_final = theta - problem.optimum();
  result.partial_sum = partial_sum;
  result.samples_consumed = samples;
  fill_normalizers(config, result);
  return result;
}

EnsembleResult monte_carlo(const RunConfig& config, std::int64_t replications,
                           EnsembleStatistic statistic, double p, int threads) {
  require_config(config);
  if (replications < 1) throw std::invalid_argument("replication count must be at least 1");
  const bool needs_scalar = statistic != EnsembleStatistic::error_p_moment;
  if (needs_scalar && config.problem->dim() != 1)
    throw std::invalid_argument("normalized ensemble statistics require a 1-d problem");
  if (needs_scalar && !config.normalization_tail)
    throw std::invalid_argument("normalized ensemble statistics require a normalization tail");

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> slots(static_cast<std::size_t>(replications),
                            std::numeric_limits<double>::quiet_NaN());
  parallel_for_index(replications, threads, [&](std::int64_t rep) {
    RunConfig local = config;
    local.replication = static_cast<std::uint64_t>(rep);
    local.record = RecordMode::endpoint;
    const RunResult run = sgd_run(local);
    if (run.diverged) return;
    switch (statistic) {
      case EnsembleStatistic::error_p_moment:
        slots[static_cast<std::size_t>(rep)] = std::pow(run.error_final.norm(), p);
        break;
      case EnsembleStatistic::normalized_iterate:
        slots[static_cast<std::size_t>(rep)] = run.normalized_iterate(0);
        break;
      case EnsembleStatistic::normalized_average:
        slots[static_cast<std::size_t>(rep)] = run.normalized_average(0);
        break;
    }
  });

  EnsembleResult out;
  out.replications = replications;
  out.values.reserve(static_cast<std::size_t>(replications));
  for (double v : slots) {
    if (std::isnan(v))
      ++out.diverged_count;
    else
      out.values.push_back(v);
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

GridEnsembleResult monte_carlo_error_grid(const RunConfig& config, std::int64_t replications,
                                          const std::vector<std::int64_t>& grid, double p,
                                          int threads) {
  require_config(config);
  if (grid.empty()) throw std::invalid_argument("grid must not be empty");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] < 1 || grid[g] > config.iterations || (g > 0 && grid[g] <= grid[g - 1]))
      throw std::invalid_argument("grid must be increasing within [1, iterations]");
  }

  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_grid = grid.size();
  std::vector<std::vector<double>> slots(
      n_grid, std::vector<double>(static_cast<std::size_t>(replications),
                                  std::numeric_limits<double>::quiet_NaN()));
  std::vector<char> diverged(static_cast<std::size_t>(replications), 0);

  parallel_for_index(replications, threads, [&](std::int64_t rep) {
    const Problem& problem = *config.problem;
    RngStream rng(config.master_seed, StreamDomain::data, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd theta = config.theta0;
    std::size_t next = 0;
    std::int64_t samples = 0;
    for (std::int64_t i = 1; i <= grid.back() && next < n_grid; ++i) {
      const Eigen::VectorXd g = minibatch_gradient(problem, config.schedule, theta, i, rng, &samples);
      theta -= learning_rate(config.schedule, i) * g;
      if (!all_finite(theta)) {
        diverged[static_cast<std::size_t>(rep)] = 1;
        return;
      }
      if (i == grid[next]) {
        slots[next][static_cast<std::size_t>(rep)] =
            std::pow((theta - problem.optimum()).norm(), p);
        ++next;
      }
    }
  });

  GridEnsembleResult out;
  out.grid = grid;
  out.values.resize(n_grid);
  for (std::size_t g = 0; g < n_grid; ++g) {
    out.values[g].reserve(static_cast<std::size_t>(replications));
    for (double v : slots[g])
      if (!std::isnan(v)) out.values[g].push_back(v);
  }
  for (char d : diverged) out.diverged_count += d;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace htsgd
