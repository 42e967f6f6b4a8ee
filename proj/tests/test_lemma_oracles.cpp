// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htsgd/lemma_oracles.hpp"
#include "htsgd/rng.hpp"
#include "htsgd/sweeps.hpp"

using namespace htsgd;

namespace {

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("componentwise signed power") {
  const Eigen::VectorXd squared = signed_power(vec2(-2.0, 3.0), 2.0);
  CHECK(squared(0) == doctest::Approx(-4.0));
  CHECK(squared(1) == doctest::Approx(9.0));

  const Eigen::VectorXd same = signed_power(vec2(-1.75, 0.5), 1.0);
  CHECK(same(0) == doctest::Approx(-1.75));
  CHECK(same(1) == doctest::Approx(0.5));

  const Eigen::VectorXd signs = signed_power(Eigen::Vector3d(-5.0, 0.0, 2.0), 0.0);
  CHECK(signs(0) == -1.0);
  CHECK(signs(1) == 0.0);
  CHECK(signs(2) == 1.0);
}

TEST_CASE("p-norm triangle bound") {
  const InequalityCheck basic = p_norm_triangle_check(vec2(1.0, 0.0), vec2(0.0, 1.0), 2.0);
  CHECK(basic.lhs == doctest::Approx(2.0));
  CHECK(basic.rhs == doctest::Approx(5.0));
  CHECK(basic.holds());

  // y = 0 reduces both sides to the same x term
  const InequalityCheck degenerate = p_norm_triangle_check(vec2(3.0, -4.0), vec2(0.0, 0.0), 1.5);
  CHECK(degenerate.lhs == doctest::Approx(degenerate.rhs).epsilon(1e-14));

  CHECK_THROWS_AS(p_norm_triangle_check(vec2(1, 0), vec2(0, 1), 2.5), std::invalid_argument);
  CHECK_THROWS_AS(p_norm_triangle_check(vec2(1, 0), Eigen::VectorXd::Zero(3), 1.5),
                  std::invalid_argument);
}

TEST_CASE("p = 2 expansion is exact") {
  RngStream rng(414243, StreamDomain::scratch, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    Eigen::VectorXd x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x(j) = rng.normal();
      y(j) = rng.normal();
    }
    const InequalityCheck check = p_norm_triangle_check(x, y, 2.0);
    CHECK(check.rhs - check.lhs ==
          doctest::Approx(3.0 * y.squaredNorm()).epsilon(1e-11));
  }
}

TEST_CASE("componentwise triangle sweep stays clean") {
  const SweepOutcome sweep =
      triangle_inequality_sweep(100000, 5150, TriangleForm::componentwise);
  CHECK(sweep.violations == 0);
}

TEST_CASE("euclidean triangle form fails in dimension two") {
  // Known counterexample, verified in 60-digit arithmetic: the cross term is
  // not the gradient of the euclidean norm, so small adversarial y wins at
  // first order when the components of x have very different magnitudes.
  Eigen::VectorXd x(2), y(2);
  x << 66.379177360414758, -2.9536207315060148;
  y << 0.063924806739193776, 0.015554643459623867;
  const InequalityCheck euclidean = p_norm_triangle_check(x, y, 1.89027147781613);
  CHECK(euclidean.lhs > euclidean.rhs);
  CHECK(euclidean.lhs - euclidean.rhs == doctest::Approx(7.481408706e-4).epsilon(1e-4));
  // the coordinatewise form absorbs the same pair
  const InequalityCheck componentwise =
      p_norm_triangle_componentwise_check(x, y, 1.89027147781613);
  CHECK(componentwise.holds());

  // and the randomized sweep keeps finding such pairs
  const SweepOutcome sweep = triangle_inequality_sweep(100000, 5150, TriangleForm::euclidean);
  CHECK(sweep.violations > 0);
}

TEST_CASE("operator-norm contraction bound") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const InequalityCheck quarter = contraction_norm_check(a, 0.25, 1.0);
  CHECK(quarter.lhs == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(quarter.rhs == doctest::Approx(0.75).epsilon(1e-14));

  const InequalityCheck at_zero = contraction_norm_check(a, 0.0, 1.7);
  CHECK(at_zero.lhs == doctest::Approx(1.0));
  CHECK(at_zero.rhs == doctest::Approx(1.0));

  // equality witness at the inverse spectral radius with p = 1
  const InequalityCheck witness = contraction_norm_check(a, 0.5, 1.0);
  CHECK(witness.lhs == doctest::Approx(witness.rhs).epsilon(1e-14));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.4, -0.4, 1.0;
  CHECK_THROWS_AS(contraction_norm_check(asym, 0.1, 1.0), std::invalid_argument);
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(contraction_norm_check(indefinite, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("randomized contraction sweep stays clean") {
  const SweepOutcome sweep = contraction_inequality_sweep(20000, 6789);
  CHECK(sweep.violations == 0);
}

TEST_CASE("weighted recursion scans") {
  // z = 0 keeps the sum at zero
  const std::vector<double> ones(100, 1.0);
  const std::vector<double> zeros(100, 0.0);
  const SequenceBoundReport trivial = toeplitz_ratio_scan(ones, ones, zeros);
  CHECK(trivial.max_ratio == 0.0);
  CHECK(trivial.hypotheses_ok);

  // the moment-bound instance stays bounded with small doubling growth
  const SweepOutcome moment = toeplitz_moment_instance(100000);
  CHECK(moment.violations == 0);
  CHECK(moment.statistic > 0.0);
  CHECK(moment.statistic < 10.0);

  const SweepOutcome truncation = toeplitz_truncation_instance(100000);
  CHECK(truncation.violations == 0);
  // the stationary level of s_n = v_n s_{n-1} + gamma_n with
  // v_n = (1 - gamma_n)^{alpha - eta} is 1/(alpha - eta)
  CHECK(truncation.statistic == doctest::Approx(1.0 / 1.3).epsilon(0.1));

  const SweepOutcome recursion = recursion_moment_instance(100000);
  CHECK(recursion.violations == 0);
}

TEST_CASE("recursion scan with vanishing forcing") {
  // delta_n = delta_0 prod v stays below delta_0 once w is non-decreasing
  std::vector<double> u(200), v(200), z(200, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = 1.0;
    v[i] = 0.9;
  }
  const RecursionBoundReport report = recursion_bound_scan(2.0, u, v, z);
  CHECK(report.hypotheses_ok);
  CHECK(report.sup_ratio <= 2.0 * 0.9 + 1e-15);
}

TEST_CASE("hypothesis violations are reported, not judged") {
  // u decreasing with v = 1 makes w decreasing everywhere
  std::vector<double> u(100), v(100, 1.0), z(100, 0.1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::pow(0.9, static_cast<double>(i));
  const RecursionBoundReport report = recursion_bound_scan(1.0, u, v, z);
  CHECK_FALSE(report.hypotheses_ok);
  const SequenceBoundReport scan = toeplitz_ratio_scan(u, v, z);
  CHECK_FALSE(scan.hypotheses_ok);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(toeplitz_ratio_scan({1.0}, {1.0, 1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_ratio_scan({-1.0}, {1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_ratio_scan({1.0}, {1.5}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(recursion_bound_scan(-1.0, {1.0}, {1.0}, {0.0}), std::invalid_argument);
}
