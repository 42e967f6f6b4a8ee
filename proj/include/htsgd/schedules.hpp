// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htsgd/noise.hpp"

namespace htsgd {

// Power-law learning-rate / batch-size pair:
//   gamma_i = c_gamma * i^(-rho),  b_i = ceil(c_batch * i^r).
struct ScheduleSpec {
  double rho = 0.5;
  double c_gamma = 1.0;
  double r = 0.0;
  double c_batch = 1.0;
};

double learning_rate(const ScheduleSpec& spec, std::int64_t i);
std::int64_t batch_size(const ScheduleSpec& spec, std::int64_t i);

// Cumulative batch boundaries pi_0 = 0 < pi_1 < ... < pi_N.
struct BatchLayout {
  std::vector<std::int64_t> boundaries;  // size N+1, boundaries[i] = pi_i
  std::int64_t iterations() const { return static_cast<std::int64_t>(boundaries.size()) - 1; }
  std::int64_t total_samples() const { return boundaries.back(); }
};

BatchLayout batch_layout(const ScheduleSpec& spec, std::int64_t iterations);

// Iteration whose batch contains sample j (1-based): the unique q with
// pi_{q-1} < j <= pi_q.
std::int64_t iteration_of_sample(const BatchLayout& layout, std::int64_t j);

// w_i = b_i / (gamma_i * F0^{-1}(1 - gamma_i/b_i)); w_0 = 1 by convention.
// Requires a tail model with an exact quantile.
double iterate_normalizer(const ScheduleSpec& spec, const TailModel& tail, std::int64_t i);

struct AveragingNormalizer {
  double batch_tail_sum = 0.0;  // sum_{i<=N} b_i^{1-alpha}
  double value = 0.0;           // c_N = F0^{-1}(1 - 1/(batch_tail_sum * b_N^alpha)) / b_N
};

AveragingNormalizer averaging_normalizer(const ScheduleSpec& spec, const TailModel& tail,
                                         std::int64_t iterations);

// (b_N/gamma_N)^{1-1/alpha}: the normalizer with the slowly varying part dropped.
// Used for the symmetric stable driver, whose norm quantile has no closed form.
double power_law_normalizer(const ScheduleSpec& spec, double alpha, std::int64_t iterations);

// i * (w_{i+1} - w_i) / w_i, evaluated on the real-valued batch envelope
// c_batch * i^r. Integer rounding of the batch sizes puts isolated O(i/b_i)
// spikes into the literal difference quotient that say nothing about the
// regular-variation index this diagnostic tracks, so the envelope is used.
double normalizer_increment_ratio(const ScheduleSpec& spec, const TailModel& tail, std::int64_t i);

// Normalizing sequences for one run, built front-to-back by a single owner.
struct NormalizerState {
  std::vector<double> w;     // w_0..w_N
  std::vector<double> beta;  // beta_1..beta_N running batch tail sums
  double c = 0.0;            // c_N
  double alpha = 0.0;
};

NormalizerState build_normalizer_state(const ScheduleSpec& spec, const TailModel& tail,
                                       std::int64_t iterations);

enum class SchedulePurpose { moment, limit, averaging };

struct ScheduleCondition {
  std::string name;
  bool pass = false;
  bool boundary = false;  // satisfied only with equality
  std::string detail;
};

struct ScheduleReport {
  std::vector<ScheduleCondition> conditions;
  bool ok() const;
  std::string first_failure() const;
};

// Checks the schedule against the conditions required for the requested kind
// of guarantee. Throws on parameters outside the supported ranges
// (alpha outside (1,2), rho outside [0,1), non-positive constants).
ScheduleReport validate_schedule(const ScheduleSpec& spec, double alpha, double a_min,
                                 double a_max, SchedulePurpose purpose);

}  // namespace htsgd
