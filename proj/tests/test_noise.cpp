// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "htsgd/analysis.hpp"
#include "htsgd/noise.hpp"

using namespace htsgd;

namespace {

std::vector<double> draw_radii(const TailModel& tail, std::size_t n, std::uint64_t rep) {
  RngStream rng(7001, StreamDomain::scratch, rep);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_radius(tail, rng);
  return out;
}

}  // namespace

TEST_CASE("plain power-tail quantiles") {
  CHECK(quantile_F0(TailModel::pareto(2.0 - 1e-12, 1.0), 0.75) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(quantile_F0(TailModel::pareto(1.5, 1.0), 1.0 - 1.0 / 8.0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(quantile_F0(TailModel::pareto(1.5, 3.0), 0.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(quantile_F0(TailModel::stable(1.5), 0.5), std::domain_error);
  CHECK_THROWS_AS(quantile_F0(TailModel::pareto(1.5), 1.0), std::invalid_argument);
}

TEST_CASE("survival probabilities") {
  CHECK(tail_prob(TailModel::pareto(1.5, 1.0), 4.0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(tail_prob(TailModel::pareto(1.5, 1.0), 0.5) == 1.0);
  const double expected = std::exp(-1.2 * std::log(4.0));
  CHECK(tail_prob(TailModel::pareto(1.2, 2.0), 8.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(tail_prob(TailModel::stable(1.5), 1.0), std::domain_error);
}

TEST_CASE("quantile and survival invert each other") {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  for (double u = 1e-1; u >= 1e-8; u /= 10.0)
    CHECK(tail_prob(tail, quantile_F0(tail, 1.0 - u)) == doctest::Approx(u).epsilon(1e-10));
}

TEST_CASE("log-perturbed tail model") {
  const TailModel tail = TailModel::pareto_log_perturbed(1.5, 1.0);
  CHECK(support_start(tail) > 1.0);
  for (double u : {0.1, 0.5, 0.99, 0.9999}) {
    const double x = quantile_F0(tail, u);
    CHECK(tail_prob(tail, x) == doctest::Approx(1.0 - u).epsilon(1e-9));
  }
  // The slowly-varying inverse (x / ln x)^{1/alpha} is approached with an
  // error of order lnln x / ln x, so the agreement tightens only
  // logarithmically in the depth: about 11% at 1e8, 2% at 1e100.
  double previous_gap = 1.0;
  for (double x : {1e8, 1e16, 1e100}) {
    const double q = quantile_tail(tail, 1.0 / x);
    const double conjugate_form = std::pow(x / std::log(x), 1.0 / 1.5);
    const double gap = q / conjugate_form - 1.0;
    CHECK(gap > 0.0);
    CHECK(gap < previous_gap);
    previous_gap = gap;
    CHECK(tail_prob(tail, q) == doctest::Approx(1.0 / x).epsilon(1e-9));
  }
  CHECK(previous_gap < 0.02);
  CHECK_THROWS_AS(TailModel::pareto_log_perturbed(1.5, -1.0), std::invalid_argument);
}

TEST_CASE("sampler determinism and stream separation") {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  RngStream a(42, StreamDomain::data, 3);
  RngStream b(42, StreamDomain::data, 3);
  for (int i = 0; i < 100; ++i) CHECK(sample_zeta(tail, 2, a) == sample_zeta(tail, 2, b));

  // distinct replications decorrelate: compare the uniform transforms
  const std::size_t m = 100000;
  const auto r0 = draw_radii(tail, m, 0);
  const auto r1 = draw_radii(tail, m, 1);
  double mean0 = 0.0, mean1 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean0 += tail_prob(tail, r0[i]);
    mean1 += tail_prob(tail, r1[i]);
  }
  mean0 /= static_cast<double>(m);
  mean1 /= static_cast<double>(m);
  double cov = 0.0, var0 = 0.0, var1 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u0 = tail_prob(tail, r0[i]) - mean0;
    const double u1 = tail_prob(tail, r1[i]) - mean1;
    cov += u0 * u1;
    var0 += u0 * u0;
    var1 += u1 * u1;
  }
  const double corr = cov / std::sqrt(var0 * var1);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("power-tail Monte Carlo matches the survival function") {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  RngStream rng(90210, StreamDomain::scratch, 0);
  const std::size_t n = 1000000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(sample_zeta(tail, 1, rng)(0)) > 4.0) ++hits;
  const double frac = static_cast<double>(hits) / static_cast<double>(n);
  CHECK(frac == doctest::Approx(0.125).epsilon(0.016));  // +/- 0.002 absolute

  const auto radii = draw_radii(tail, 100000, 17);
  const KsResult ks =
      ks_one_sample(radii, [&](double x) { return 1.0 - tail_prob(tail, x); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("signed samples are symmetric") {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  RngStream rng(5150, StreamDomain::scratch, 0);
  std::vector<double> draws(100000), flipped;
  for (auto& x : draws) x = sample_zeta(tail, 1, rng)(0);
  flipped = draws;
  for (auto& x : flipped) x = -x;
  CHECK(ks_two_sample(draws, flipped).p_value > 0.01);
}

TEST_CASE("stable sampler is closed under normalized sums") {
  const double alpha = 1.5;
  RngStream rng(31415, StreamDomain::scratch, 0);
  const std::size_t m = 100000;
  std::vector<double> fresh(m);
  for (auto& x : fresh) x = sample_stable_symmetric(alpha, 1.0, rng);
  for (int n : {2, 8, 32}) {
    std::vector<double> sums(m);
    const double norm = std::pow(static_cast<double>(n), 1.0 / alpha);
    for (auto& s : sums) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += sample_stable_symmetric(alpha, 1.0, rng);
      s = acc / norm;
    }
    CHECK(ks_two_sample(sums, fresh).p_value > 0.01);
  }
}

TEST_CASE("multivariate samples keep the radial law") {
  const TailModel tail = TailModel::pareto(1.5, 1.0);
  RngStream rng(777, StreamDomain::scratch, 0);
  const std::size_t m = 30000;
  std::vector<double> norms(m);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto& x : norms) {
    const Eigen::VectorXd z = sample_zeta(tail, 3, rng);
    x = z.norm();
    mean += z.head<3>() / static_cast<double>(m);
  }
  const KsResult ks = ks_one_sample(norms, [&](double x) { return 1.0 - tail_prob(tail, x); });
  CHECK(ks.p_value > 0.01);
  // direction symmetry: the truncated mean stays near zero
  CHECK(mean.norm() < 0.2);
  CHECK_THROWS_AS(sample_zeta(TailModel::stable(1.5), 2, rng), std::invalid_argument);
}

TEST_CASE("upper order statistics estimator") {
  CHECK(hill_estimate({1.0, 2.0, 4.0}, 2) ==
        doctest::Approx(2.0 / (3.0 * std::log(2.0))).epsilon(1e-12));
  CHECK_THROWS_AS(hill_estimate({2.0, 2.0, 2.0}, 2), std::domain_error);
  CHECK_THROWS_AS(hill_estimate({1.0, 2.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(hill_estimate({1.0, 2.0, 4.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(hill_estimate({-1.0, 2.0, 4.0}, 1), std::invalid_argument);

  const auto radii = draw_radii(TailModel::pareto(1.5, 1.0), 1000000, 23);
  const double estimate = hill_estimate(radii, 10000);
  CHECK(estimate > 1.4);
  CHECK(estimate < 1.6);
}
