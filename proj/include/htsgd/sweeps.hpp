// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htsgd/schedules.hpp"

namespace htsgd {

struct SweepOutcome {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double statistic = 0.0;  // check-specific headline number
  std::string detail;
};

enum class TriangleForm { euclidean, componentwise };

// Randomized check of |x+y|^p <= |x|^p + 4|y|^p + p y . x^{<p-1>} over
// dimensions up to 5, p in [1,2], mixed component scales. The euclidean form
// has genuine counterexamples in d >= 2 (see lemma_oracles.hpp); the
// componentwise form holds everywhere.
SweepOutcome triangle_inequality_sweep(std::int64_t trials, std::uint64_t master_seed,
                                       TriangleForm form = TriangleForm::euclidean,
                                       int threads = 0);

// Randomized check of |I - tA|_op^p <= 1 - t lambda_min over random SPD
// matrices with spectrum in [0.5, 4], t in [0, 1/lambda_max], p in {1, 1.3, 2}.
SweepOutcome contraction_inequality_sweep(std::int64_t trials, std::uint64_t master_seed,
                                          int threads = 0);

// Weighted-recursion ratio for the moment-bound instance
// u_i = (gamma_i/b_i)^{p-1}, v_i = 1 - gamma_i/2, z_i = gamma_i with
// gamma_i = i^{-1/2}, b_i = i, p = 3/2. statistic = max ratio at n;
// detail records the growth against the half-length scan.
SweepOutcome toeplitz_moment_instance(std::int64_t n);

// Same scan for the truncation instance u = 1, v_i = (1 - gamma_i)^{alpha-eta},
// z_i = gamma_i with gamma_i = i^{-0.7}/2, alpha = 1.5, eta = 0.2.
SweepOutcome toeplitz_truncation_instance(std::int64_t n);

// delta-recursion form of the moment-bound instance.
SweepOutcome recursion_moment_instance(std::int64_t n);

// Two-sided bound on the step-weight sums G_{N,i}: searches the smallest
// index i0 with G <= (1+eps)/a for all i >= i0 across the grid, and the
// smallest dyadic window T with G >= (1-eps)/a for all i <= N - T/gamma_N.
struct SandwichOutcome {
  bool found_upper = false;
  bool found_lower = false;
  std::int64_t upper_from = 0;  // i0
  double lower_window = 0.0;    // T
  double eps = 0.0;
};

SandwichOutcome step_weight_sandwich(const ScheduleSpec& spec, double a,
                                     const std::vector<std::int64_t>& n_grid, double eps);

}  // namespace htsgd
