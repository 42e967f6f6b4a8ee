// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/sweeps.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>

#include "htsgd/lemma_oracles.hpp"
#include "htsgd/limits.hpp"
#include "htsgd/parallel.hpp"
#include "htsgd/rng.hpp"

namespace htsgd {

namespace {

std::string format_growth(double base, double doubled) {
  std::ostringstream os;
  os << "max ratio " << doubled << ", growth over half-length scan "
     << (base > 0.0 ? (doubled - base) / base : 0.0);
  return os.str();
}

}  // namespace

SweepOutcome triangle_inequality_sweep(std::int64_t trials, std::uint64_t master_seed,
                                       TriangleForm form, int threads) {
  // Chunked so each worker owns a stream; per-chunk counts are summed in
  // index order, keeping the outcome independent of the thread count.
  const std::int64_t chunk = 4096;
  const std::int64_t chunks = (trials + chunk - 1) / chunk;
  std::vector<std::int64_t> violations(static_cast<std::size_t>(chunks), 0);
  std::atomic<double> worst{0.0};
  parallel_for_index(chunks, threads, [&](std::int64_t c) {
    RngStream rng(master_seed, StreamDomain::scratch, static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(trials, lo + chunk);
    std::int64_t bad = 0;
    for (std::int64_t t = lo; t < hi; ++t) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 5);
      const double p = 1.0 + rng.uniform01();
      Eigen::VectorXd x(d), y(d);
      for (int j = 0; j < d; ++j) {
        x(j) = rng.normal() * std::pow(10.0, 4.0 * rng.uniform01() - 2.0);
        y(j) = rng.normal() * std::pow(10.0, 4.0 * rng.uniform01() - 2.0);
      }
      const InequalityCheck check = form == TriangleForm::euclidean
                                        ? p_norm_triangle_check(x, y, p)
                                        : p_norm_triangle_componentwise_check(x, y, p);
      const double slack = check.rhs - check.lhs;
      if (slack < -1e-9 * (std::abs(check.rhs) + 1.0)) ++bad;
      double seen = worst.load();
      while (-slack > seen && !worst.compare_exchange_weak(seen, -slack)) {
      }
    }
    violations[static_cast<std::size_t>(c)] = bad;
  });
  SweepOutcome out;
  out.name = form == TriangleForm::euclidean ? "p_norm_triangle_euclidean"
                                             : "p_norm_triangle_componentwise";
  out.trials = trials;
  for (auto v : violations) out.violations += v;
  out.statistic = worst.load();
  out.detail = "worst lhs - rhs over sweep";
  return out;
}

SweepOutcome contraction_inequality_sweep(std::int64_t trials, std::uint64_t master_seed,
                                          int threads) {
  const std::int64_t chunk = 512;
  const std::int64_t chunks = (trials + chunk - 1) / chunk;
  std::vector<std::int64_t> violations(static_cast<std::size_t>(chunks), 0);
  std::atomic<double> worst{0.0};
  const double p_choices[3] = {1.0, 1.3, 2.0};
  parallel_for_index(chunks, threads, [&](std::int64_t c) {
    RngStream rng(master_seed, StreamDomain::scratch, 0x10000000ULL + static_cast<std::uint64_t>(c));
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(trials, lo + chunk);
    std::int64_t bad = 0;
    for (std::int64_t t = lo; t < hi; ++t) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 5);
      Eigen::MatrixXd g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      const Eigen::MatrixXd q = qr.householderQ();
      Eigen::VectorXd spectrum(d);
      for (int j = 0; j < d; ++j) spectrum(j) = 0.5 + 3.5 * rng.uniform01();
      const Eigen::MatrixXd m = q * spectrum.asDiagonal() * q.transpose();
      const Eigen::MatrixXd a = 0.5 * (m + m.transpose());
      const double t_step = rng.uniform01() / spectrum.maxCoeff();
      const double p = p_choices[rng.next_u64() % 3];
      const InequalityCheck check = contraction_norm_check(a, t_step, p);
      const double slack = check.rhs - check.lhs;
      if (slack < -1e-12 * (std::abs(check.rhs) + 1.0)) ++bad;
      double seen = worst.load();
      while (-slack > seen && !worst.compare_exchange_weak(seen, -slack)) {
      }
    }
    violations[static_cast<std::size_t>(c)] = bad;
  });
  SweepOutcome out;
  out.name = "operator_norm_contraction";
  out.trials = trials;
  for (auto v : violations) out.violations += v;
  out.statistic = worst.load();
  out.detail = "worst lhs - rhs over sweep";
  return out;
}

namespace {

SweepOutcome scan_with_growth(const std::string& name, std::int64_t n,
                              const std::function<void(std::int64_t, std::vector<double>&,
                                                       std::vector<double>&, std::vector<double>&)>&
                                  build,
                              bool recursion_form) {
  std::vector<double> u, v, z;
  build(n / 2, u, v, z);
  const double half_max = recursion_form ? recursion_bound_scan(1.0, u, v, z).sup_ratio
                                         : toeplitz_ratio_scan(u, v, z).max_ratio;
  build(n, u, v, z);
  double full_max = 0.0;
  bool hypotheses_ok = false;
  if (recursion_form) {
    const RecursionBoundReport rep = recursion_bound_scan(1.0, u, v, z);
    full_max = rep.sup_ratio;
    hypotheses_ok = rep.hypotheses_ok;
  } else {
    const SequenceBoundReport rep = toeplitz_ratio_scan(u, v, z);
    full_max = rep.max_ratio;
    hypotheses_ok = rep.hypotheses_ok;
  }
  SweepOutcome out;
  out.name = name;
  out.trials = n;
  const double growth = half_max > 0.0 ? (full_max - half_max) / half_max : 0.0;
  out.statistic = full_max;
  out.detail = format_growth(half_max, full_max);
  out.violations = (growth < 0.02 && hypotheses_ok) ? 0 : 1;
  return out;
}

void build_moment_instance(std::int64_t n, std::vector<double>& u, std::vector<double>& v,
                           std::vector<double>& z) {
  u.assign(static_cast<std::size_t>(n), 0.0);
  v.assign(static_cast<std::size_t>(n), 0.0);
  z.assign(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 1; i <= n; ++i) {
    const double gamma_i = std::pow(static_cast<double>(i), -0.5);
    const double b_i = static_cast<double>(i);
    u[static_cast<std::size_t>(i - 1)] = std::pow(gamma_i / b_i, 0.5);  // p - 1 = 1/2
    v[static_cast<std::size_t>(i - 1)] = 1.0 - 0.5 * gamma_i;
    z[static_cast<std::size_t>(i - 1)] = gamma_i;
  }
}

void build_truncation_instance(std::int64_t n, std::vector<double>& u, std::vector<double>& v,
                               std::vector<double>& z) {
  u.assign(static_cast<std::size_t>(n), 1.0);
  v.assign(static_cast<std::size_t>(n), 0.0);
  z.assign(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 1; i <= n; ++i) {
    const double gamma_i = 0.5 * std::pow(static_cast<double>(i), -0.7);
    v[static_cast<std::size_t>(i - 1)] = std::pow(1.0 - gamma_i, 1.5 - 0.2);
    z[static_cast<std::size_t>(i - 1)] = gamma_i;
  }
}

}  // namespace

SweepOutcome toeplitz_moment_instance(std::int64_t n) {
  return scan_with_growth("toeplitz_moment_instance", n, build_moment_instance, false);
}

SweepOutcome toeplitz_truncation_instance(std::int64_t n) {
  return scan_with_growth("toeplitz_truncation_instance", n, build_truncation_instance, false);
}

SweepOutcome recursion_moment_instance(std::int64_t n) {
  return scan_with_growth("recursion_moment_instance", n, build_moment_instance, true);
}

SandwichOutcome step_weight_sandwich(const ScheduleSpec& spec, double a,
                                     const std::vector<std::int64_t>& n_grid, double eps) {
  SandwichOutcome out;
  out.eps = eps;
  const double upper = (1.0 + eps) / a;
  const double lower = (1.0 - eps) / a;

  std::vector<std::vector<double>> weights;
  weights.reserve(n_grid.size());
  for (std::int64_t n : n_grid) weights.push_back(step_weight_sums(spec, a, n));

  // Smallest i0 such that G_{N,i} <= (1+eps)/a for every grid N and i >= i0.
  std::int64_t i0 = 1;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::int64_t last_bad = 0;
    for (std::int64_t i = 1; i <= n_grid[g]; ++i)
      if (weights[g][static_cast<std::size_t>(i - 1)] > upper) last_bad = i;
    i0 = std::max(i0, last_bad + 1);
  }
  out.found_upper = true;
  for (std::size_t g = 0; g < n_grid.size(); ++g)
    if (i0 > n_grid[g]) out.found_upper = false;  // no admissible index on this grid entry
  out.upper_from = i0;

  // Smallest dyadic T such that G_{N,i} >= (1-eps)/a whenever i <= N - T/gamma_N.
  for (double t = 1.0; t <= 1024.0; t *= 2.0) {
    bool ok = true;
    for (std::size_t g = 0; g < n_grid.size() && ok; ++g) {
      const std::int64_t n = n_grid[g];
      const auto cut = static_cast<std::int64_t>(
          std::floor(static_cast<double>(n) - t / learning_rate(spec, n)));
      for (std::int64_t i = 1; i <= cut; ++i)
        if (weights[g][static_cast<std::size_t>(i - 1)] < lower) {
          ok = false;
          break;
        }
    }
    if (ok) {
      out.found_lower = true;
      out.lower_window = t;
      break;
    }
  }
  return out;
}

}  // namespace htsgd
