// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace htsgd {

namespace {

void require_spec(const ScheduleSpec& spec) {
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw std::invalid_argument("rho out of range [0,1)");
  if (!(spec.c_gamma > 0.0)) throw std::invalid_argument("c_gamma must be positive");
  if (!(spec.r >= 0.0)) throw std::invalid_argument("r must be non-negative");
  if (!(spec.c_batch >= 1.0)) throw std::invalid_argument("c_batch must be at least 1");
}

void require_iteration(std::int64_t i) {
  if (i < 1) throw std::invalid_argument("iteration index must be at least 1");
}

double continuous_batch(const ScheduleSpec& spec, double i) {
  return spec.c_batch * std::pow(i, spec.r);
}

// Ratios gamma_i/b_i above 1 can only occur for the first iterations of an
// aggressive schedule; they map to the quantile at the support minimum.
double normalizer_from(const TailModel& tail, double gamma_i, double b_i) {
  const double tail_mass = std::min(1.0, gamma_i / b_i);
  return b_i / (gamma_i * quantile_tail(tail, tail_mass));
}

}  // namespace

double learning_rate(const ScheduleSpec& spec, std::int64_t i) {
  require_spec(spec);
  require_iteration(i);
  return spec.c_gamma * std::pow(static_cast<double>(i), -spec.rho);
}

std::int64_t batch_size(const ScheduleSpec& spec, std::int64_t i) {
  require_spec(spec);
  require_iteration(i);
  const double v = continuous_batch(spec, static_cast<double>(i));
  const double nearest = std::round(v);
  // Absorb floating-point error in pow: values within 1e-9 of an integer are
  // that integer, so ceil(c * i^r) is exact for exact power laws.
  const double up = (std::abs(v - nearest) <= 1e-9 * std::max(1.0, v)) ? nearest : std::ceil(v);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(up)));
}

BatchLayout batch_layout(const ScheduleSpec& spec, std::int64_t iterations) {
  require_spec(spec);
  if (iterations < 0) throw std::invalid_argument("iteration count must be non-negative");
  BatchLayout layout;
  layout.boundaries.resize(static_cast<std::size_t>(iterations) + 1);
  layout.boundaries[0] = 0;
  for (std::int64_t i = 1; i <= iterations; ++i)
    layout.boundaries[static_cast<std::size_t>(i)] =
        layout.boundaries[static_cast<std::size_t>(i - 1)] + batch_size(spec, i);
  return layout;
}

std::int64_t iteration_of_sample(const BatchLayout& layout, std::int64_t j) {
  if (j < 1 || j > layout.total_samples())
    throw std::out_of_range("sample index outside [1, pi_N]");
  const auto it = std::lower_bound(layout.boundaries.begin(), layout.boundaries.end(), j);
  return static_cast<std::int64_t>(it - layout.boundaries.begin());
}

double iterate_normalizer(const ScheduleSpec& spec, const TailModel& tail, std::int64_t i) {
  require_spec(spec);
  if (i < 0) throw std::invalid_argument("iteration index must be non-negative");
  if (i == 0) return 1.0;
  return normalizer_from(tail, learning_rate(spec, i), static_cast<double>(batch_size(spec, i)));
}

AveragingNormalizer averaging_normalizer(const ScheduleSpec& spec, const TailModel& tail,
                                         std::int64_t iterations) {
  require_spec(spec);
  require_iteration(iterations);
  AveragingNormalizer norm;
  for (std::int64_t i = 1; i <= iterations; ++i)
    norm.batch_tail_sum += std::pow(static_cast<double>(batch_size(spec, i)), 1.0 - tail.alpha);
  const double b_n = static_cast<double>(batch_size(spec, iterations));
  const double tail_mass =
      std::min(1.0, 1.0 / (norm.batch_tail_sum * std::pow(b_n, tail.alpha)));
  norm.value = quantile_tail(tail, tail_mass) / b_n;
  return norm;
}

double power_law_normalizer(const ScheduleSpec& spec, double alpha, std::int64_t iterations) {
  require_spec(spec);
  require_iteration(iterations);
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha out of range (1,2)");
  const double ratio =
      static_cast<double>(batch_size(spec, iterations)) / learning_rate(spec, iterations);
  return std::pow(ratio, 1.0 - 1.0 / alpha);
}

double normalizer_increment_ratio(const ScheduleSpec& spec, const TailModel& tail,
                                  std::int64_t i) {
  require_spec(spec);
  require_iteration(i);
  const double id = static_cast<double>(i);
  const double w_i = normalizer_from(tail, learning_rate(spec, i), continuous_batch(spec, id));
  const double w_next =
      normalizer_from(tail, learning_rate(spec, i + 1), continuous_batch(spec, id + 1.0));
  return id * (w_next - w_i) / w_i;
}

NormalizerState build_normalizer_state(const ScheduleSpec& spec, const TailModel& tail,
                                       std::int64_t iterations) {
  require_spec(spec);
  require_iteration(iterations);
  NormalizerState state;
  state.alpha = tail.alpha;
  state.w.reserve(static_cast<std::size_t>(iterations) + 1);
  state.beta.reserve(static_cast<std::size_t>(iterations));
  state.w.push_back(1.0);
  double beta = 0.0;
  for (std::int64_t i = 1; i <= iterations; ++i) {
    state.w.push_back(iterate_normalizer(spec, tail, i));
    beta += std::pow(static_cast<double>(batch_size(spec, i)), 1.0 - tail.alpha);
    state.beta.push_back(beta);
  }
  state.c = averaging_normalizer(spec, tail, iterations).value;
  return state;
}

bool ScheduleReport::ok() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

std::string ScheduleReport::first_failure() const {
  for (const auto& c : conditions)
    if (!c.pass) return c.name + ": " + c.detail;
  return {};
}

ScheduleReport validate_schedule(const ScheduleSpec& spec, double alpha, double a_min,
                                 double a_max, SchedulePurpose purpose) {
  require_spec(spec);
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha out of range (1,2)");
  if (!(a_min > 0.0 && a_min <= a_max))
    throw std::invalid_argument("spectrum bounds require 0 < a_min <= a_max");

  ScheduleReport report;
  auto add = [&report](std::string name, bool pass, bool boundary, std::string detail) {
    report.conditions.push_back({std::move(name), pass, boundary, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };

  add("learning_rate_sum_diverges", spec.rho < 1.0, false,
      "rho = " + fmt(spec.rho) + " < 1, so the learning-rate series diverges");

  const bool ratio_vanishes = spec.rho > 0.0 || spec.r > 0.0;
  add("step_ratio_vanishes", ratio_vanishes, false,
      ratio_vanishes ? "gamma_i/b_i -> 0" : "constant gamma_i/b_i does not tend to 0");

  // A product step gamma_1 * a == 1 drives the first contraction factor to
  // exactly 0, which is admissible; anything above 1 is not.
  const double gamma1 = spec.c_gamma;
  auto contraction = [&](const char* name, double a_bound) {
    const double v = gamma1 * a_bound;
    const bool boundary = std::abs(v - 1.0) <= 1e-12;
    const bool pass = v < 1.0 || boundary;
    std::string detail = std::string("gamma_1 * ") + name + " = " + fmt(v);
    if (boundary) detail += " (boundary: first contraction factor is 0)";
    add(std::string("step_stability_") + name, pass, boundary, std::move(detail));
  };
  contraction("a_max", a_max);
  contraction("a_min", a_min);

  if (purpose == SchedulePurpose::averaging) {
    const double growth = spec.r * (alpha - 1.0);
    add("batch_growth_tail_sum", growth < 1.0, false,
        "r(alpha-1) = " + fmt(growth) + (growth < 1.0 ? " < 1" : " >= 1"));
    const double lhs = spec.rho * alpha;
    const double rhs = 1.0 - growth;
    add("averaging_rate_balance", lhs > rhs, false,
        "rho*alpha = " + fmt(lhs) + " vs 1 - r(alpha-1) = " + fmt(rhs));
    add("inverse_rate_concavity", true, false,
        "1/gamma_i = i^rho / c_gamma is concave for rho <= 1");
  }
  return report;
}

}  // namespace htsgd
