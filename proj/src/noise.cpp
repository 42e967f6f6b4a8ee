// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htsgd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_tail_params(double alpha, double scale) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("tail index alpha must lie in (1,2)");
  if (!(scale > 0.0)) throw std::invalid_argument("tail scale must be positive");
}

// Survival function of the log-perturbed Pareto variant on (1, inf):
// S(x) = x^{-alpha} * (alpha * ln x)^{-kappa}. Strictly decreasing for kappa > 0.
double log_perturbed_survival(double alpha, double kappa, double x) {
  return std::pow(x, -alpha) * std::pow(alpha * std::log(x), -kappa);
}

// Solves S(x) = target on (1, inf) by bisection after bracketing.
double log_perturbed_inverse_survival(double alpha, double kappa, double target) {
  double lo = 1.0 + 1e-12;
  double hi = 2.0;
  while (log_perturbed_survival(alpha, kappa, hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("log-perturbed quantile bracketing failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_perturbed_survival(alpha, kappa, mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TailModel TailModel::pareto(double alpha, double x_m) {
  require_tail_params(alpha, x_m);
  return TailModel{TailKind::pareto_symmetric, alpha, x_m, std::nullopt};
}

TailModel TailModel::pareto_log_perturbed(double alpha, double kappa) {
  require_tail_params(alpha, 1.0);
  if (!(kappa > 0.0)) throw std::invalid_argument("log perturbation exponent must be positive");
  return TailModel{TailKind::pareto_symmetric, alpha, 1.0, kappa};
}

TailModel TailModel::stable(double alpha, double sigma) {
  require_tail_params(alpha, sigma);
  return TailModel{TailKind::stable_symmetric, alpha, sigma, std::nullopt};
}

double support_start(const TailModel& tail) {
  if (tail.kind != TailKind::pareto_symmetric)
    throw std::domain_error("stable tail model has no exact distribution function");
  if (!tail.log_kappa) return tail.scale;
  return log_perturbed_inverse_survival(tail.alpha, *tail.log_kappa, 1.0);
}

double tail_prob(const TailModel& tail, double x) {
  if (tail.kind != TailKind::pareto_symmetric)
    throw std::domain_error("stable tail model has no exact distribution function");
  if (!(x > 0.0)) throw std::invalid_argument("tail_prob requires x > 0");
  if (!tail.log_kappa) {
    if (x <= tail.scale) return 1.0;
    return std::pow(x / tail.scale, -tail.alpha);
  }
  if (x <= support_start(tail)) return 1.0;
  return log_perturbed_survival(tail.alpha, *tail.log_kappa, x);
}

double quantile_F0(const TailModel& tail, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("quantile argument must lie in [0,1)");
  return quantile_tail(tail, 1.0 - u);
}

double quantile_tail(const TailModel& tail, double survival) {
  if (tail.kind != TailKind::pareto_symmetric)
    throw std::domain_error("stable tail model has no exact quantile");
  if (!(survival > 0.0 && survival <= 1.0))
    throw std::invalid_argument("tail mass must lie in (0,1]");
  if (!tail.log_kappa) return tail.scale * std::pow(survival, -1.0 / tail.alpha);
  const double start = support_start(tail);
  if (survival == 1.0) return start;
  return std::max(start, log_perturbed_inverse_survival(tail.alpha, *tail.log_kappa, survival));
}

double sample_radius(const TailModel& tail, RngStream& rng) {
  // Inverse-cdf draw: survival(radius) = U with U uniform on (0,1).
  if (tail.kind != TailKind::pareto_symmetric)
    throw std::domain_error("stable tail model samples signed values, not radii");
  const double u = rng.uniform01();
  if (!tail.log_kappa) return tail.scale * std::pow(u, -1.0 / tail.alpha);
  return quantile_F0(tail, 1.0 - u);
}

double sample_stable_symmetric(double alpha, double sigma, RngStream& rng) {
  const double v = kPi * (rng.uniform01() - 0.5);
  const double w = rng.exponential();
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return sigma * x;
}

Eigen::VectorXd sample_zeta(const TailModel& tail, int dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
  if (tail.kind == TailKind::stable_symmetric) {
    if (dim != 1) throw std::invalid_argument("stable noise is supported in dimension 1 only");
    Eigen::VectorXd z(1);
    z(0) = sample_stable_symmetric(tail.alpha, tail.scale, rng);
    return z;
  }
  const double radius = sample_radius(tail, rng);
  if (dim == 1) {
    Eigen::VectorXd z(1);
    z(0) = rng.sign() * radius;
    return z;
  }
  Eigen::VectorXd dir(dim);
  double norm = 0.0;
  do {
    for (int j = 0; j < dim; ++j) dir(j) = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  return (radius / norm) * dir;
}

double hill_estimate(std::vector<double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 1 || k >= n) throw std::invalid_argument("hill_estimate requires 1 <= k < sample count");
  for (double x : samples)
    if (!(x > 0.0)) throw std::invalid_argument("hill_estimate requires positive samples");
  std::sort(samples.begin(), samples.end());
  const double log_ref = std::log(samples[n - k - 1]);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(samples[n - 1 - i]) - log_ref;
  if (!(acc > 0.0)) throw std::domain_error("hill_estimate: degenerate upper order statistics");
  return static_cast<double>(k) / acc;
}

}  // namespace htsgd
