// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "htsgd/rng.hpp"

namespace htsgd {

enum class TailKind { pareto_symmetric, stable_symmetric };

// Descriptor of the per-sample noise law. The Pareto variants expose the exact
// distribution function of the norm; the symmetric stable variant only has a
// sampler, so everything that needs an exact quantile rejects it.
struct TailModel {
  TailKind kind = TailKind::pareto_symmetric;
  double alpha = 1.5;               // tail index in (1,2)
  double scale = 1.0;               // support start x_m (Pareto) or stable scale sigma
  std::optional<double> log_kappa;  // optional log-perturbation exponent (Pareto, scale 1)

  static TailModel pareto(double alpha, double x_m = 1.0);
  static TailModel pareto_log_perturbed(double alpha, double kappa);
  static TailModel stable(double alpha, double sigma = 1.0);

  bool exact_quantile() const { return kind == TailKind::pareto_symmetric; }
};

// P(|zeta| > x). Exact for the Pareto variants; throws for the stable model.
double tail_prob(const TailModel& tail, double x);

// Left-continuous inverse of the norm cdf, u in [0,1). At u = 0 this is the
// support minimum. Throws for the stable model ("no exact quantile").
double quantile_F0(const TailModel& tail, double u);

// Same inverse addressed from the survival side: quantile_tail(tail, s) is
// the point with tail mass s, for s in (0, 1]. Use this for tiny tail masses;
// 1 - s underflows to 1 in double precision below s ~ 1e-16.
double quantile_tail(const TailModel& tail, double survival);

// Support start of |zeta| for the Pareto variants (x_m, or the point where the
// log-perturbed survival function reaches 1).
double support_start(const TailModel& tail);

// One draw of the norm |zeta|.
double sample_radius(const TailModel& tail, RngStream& rng);

// One draw of a standard symmetric stable variate scaled by sigma
// (Chambers-Mallows-Stuck transform; characteristic function exp(-sigma^a|u|^a)).
double sample_stable_symmetric(double alpha, double sigma, RngStream& rng);

// One centered noise vector. Pareto: Pareto radius with a uniform direction
// (Rademacher sign when dim == 1). Stable: dim == 1 only.
Eigen::VectorXd sample_zeta(const TailModel& tail, int dim, RngStream& rng);

// Hill estimator of the tail index from the k upper order statistics.
double hill_estimate(std::vector<double> samples, std::size_t k);

}  // namespace htsgd
