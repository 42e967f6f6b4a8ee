// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htsgd/schedules.hpp"

using namespace htsgd;

namespace {
const TailModel kPareto15 = TailModel::pareto(1.5, 1.0);
}

TEST_CASE("learning rate follows the power law") {
  CHECK(learning_rate({0.5, 1.0, 0.0, 1.0}, 4) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(learning_rate({0.0, 1.0, 0.0, 1.0}, 7) == doctest::Approx(1.0).epsilon(1e-14));
  // independent evaluation via exp/log
  const double expected = 2.0 * std::exp(-0.7 * std::log(10.0));
  CHECK(learning_rate({0.7, 2.0, 0.0, 1.0}, 10) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("batch size is the rounded-up power law") {
  CHECK(batch_size({0.0, 1.0, 0.5, 1.0}, 9) == 3);
  CHECK(batch_size({0.0, 1.0, 0.0, 1.0}, 100) == 1);
  CHECK(batch_size({0.0, 1.0, 1.0, 1.0}, 5) == 5);
  CHECK(batch_size({0.0, 1.0, 0.5, 1.0}, 10) == 4);  // ceil(sqrt(10))
  CHECK(batch_size({0.0, 1.0, 0.3, 2.5}, 1) == 3);   // ceil(2.5)
}

TEST_CASE("monotonicity of the schedule pair") {
  for (double rho : {0.0, 0.3, 0.7, 0.95}) {
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
      const ScheduleSpec spec{rho, 0.8, r, 1.0};
      for (std::int64_t i = 1; i < 500; ++i) {
        CHECK(learning_rate(spec, i + 1) <= learning_rate(spec, i) + 1e-15);
        CHECK(batch_size(spec, i + 1) >= batch_size(spec, i));
      }
    }
  }
}

TEST_CASE("batch layout boundaries and sample lookup") {
  const ScheduleSpec spec{0.5, 1.0, 1.0, 1.0};  // b_i = i
  const BatchLayout layout = batch_layout(spec, 3);
  REQUIRE(layout.boundaries.size() == 4);
  CHECK(layout.boundaries[0] == 0);
  CHECK(layout.boundaries[1] == 1);
  CHECK(layout.boundaries[2] == 3);
  CHECK(layout.boundaries[3] == 6);
  CHECK(layout.total_samples() == 6);
  CHECK(iteration_of_sample(layout, 4) == 3);
  CHECK(iteration_of_sample(layout, 1) == 1);
  CHECK_THROWS_AS(iteration_of_sample(layout, 0), std::out_of_range);
  CHECK_THROWS_AS(iteration_of_sample(layout, 7), std::out_of_range);
}

TEST_CASE("sample lookup matches block membership exhaustively") {
  for (const ScheduleSpec& spec :
       {ScheduleSpec{0.5, 1.0, 0.7, 1.0}, ScheduleSpec{0.2, 1.0, 0.0, 3.0},
        ScheduleSpec{0.9, 1.0, 1.3, 2.0}}) {
    const BatchLayout layout = batch_layout(spec, 100);
    for (std::int64_t q = 1; q <= 100; ++q) {
      for (std::int64_t j = layout.boundaries[static_cast<std::size_t>(q - 1)] + 1;
           j <= layout.boundaries[static_cast<std::size_t>(q)]; ++j)
        REQUIRE(iteration_of_sample(layout, j) == q);
    }
  }
}

TEST_CASE("iterate normalizer closed form for plain power tails") {
  const ScheduleSpec spec{0.5, 1.0, 1.0, 1.0};  // gamma = i^{-1/2}, b = i
  // b/gamma = 8 at i = 4; quantile at 1 - 1/8 is 8^{2/3} = 4; w = 8 / 4 = 2.
  CHECK(iterate_normalizer(spec, kPareto15, 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(iterate_normalizer(spec, kPareto15, 0) == 1.0);
  // constant gamma/b = 1/8 gives the same value
  const ScheduleSpec flat{0.0, 0.125, 0.0, 1.0};
  CHECK(iterate_normalizer(flat, kPareto15, 33) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("iterate normalizer equals the pure power law for plain tails") {
  for (double alpha : {1.2, 1.5, 1.9}) {
    const TailModel tail = TailModel::pareto(alpha, 1.0);
    const ScheduleSpec spec{0.7, 1.0, 0.3, 1.0};
    for (std::int64_t i : {2, 7, 50, 1000, 44721}) {
      const double ratio =
          static_cast<double>(batch_size(spec, i)) / learning_rate(spec, i);
      CHECK(iterate_normalizer(spec, tail, i) ==
            doctest::Approx(std::pow(ratio, 1.0 - 1.0 / alpha)).epsilon(1e-12));
      CHECK(power_law_normalizer(spec, alpha, i) ==
            doctest::Approx(std::pow(ratio, 1.0 - 1.0 / alpha)).epsilon(1e-12));
    }
  }
  // scale enters inversely
  const TailModel wide = TailModel::pareto(1.5, 2.0);
  const ScheduleSpec spec{0.5, 1.0, 1.0, 1.0};
  CHECK(iterate_normalizer(spec, wide, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("averaging normalizer values") {
  const ScheduleSpec unit{0.5, 1.0, 0.0, 1.0};  // b = 1
  const AveragingNormalizer n8 = averaging_normalizer(unit, kPareto15, 8);
  CHECK(n8.batch_tail_sum == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(n8.value == doctest::Approx(4.0).epsilon(1e-12));  // 8^{2/3}
  const AveragingNormalizer n1 = averaging_normalizer(unit, kPareto15, 1);
  CHECK(n1.batch_tail_sum == doctest::Approx(1.0));
  CHECK(n1.value == doctest::Approx(1.0));

  const ScheduleSpec linear{0.5, 1.0, 1.0, 1.0};  // b_i = i
  const AveragingNormalizer n3 = averaging_normalizer(linear, kPareto15, 3);
  const double beta = 1.0 + 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(3.0);
  CHECK(n3.batch_tail_sum == doctest::Approx(beta).epsilon(1e-14));
  // two independent routes to the same normalizer
  const double direct = std::pow(beta * std::pow(3.0, 1.5), 2.0 / 3.0) / 3.0;
  CHECK(direct == doctest::Approx(std::pow(beta, 2.0 / 3.0)).epsilon(1e-13));
  CHECK(n3.value == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("averaging normalizer is the tail-sum root for unit batches") {
  for (double alpha : {1.3, 1.5, 1.8}) {
    const TailModel tail = TailModel::pareto(alpha, 1.0);
    const ScheduleSpec spec{0.6, 1.0, 0.0, 1.0};
    for (std::int64_t n : {2, 10, 100}) {
      const AveragingNormalizer norm = averaging_normalizer(spec, tail, n);
      CHECK(norm.value ==
            doctest::Approx(std::pow(norm.batch_tail_sum, 1.0 / alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalizer increment ratio") {
  // flat schedule: w constant
  const ScheduleSpec flat{0.0, 0.25, 0.0, 1.0};
  for (std::int64_t i : {1, 10, 1000})
    CHECK(normalizer_increment_ratio(flat, kPareto15, i) == doctest::Approx(0.0).epsilon(1e-9));

  // limit (1 - 1/alpha)(rho + r) = (1/3)(3/2) = 1/2 at large i
  const ScheduleSpec spec{0.5, 1.0, 1.0, 1.0};
  CHECK(normalizer_increment_ratio(spec, kPareto15, 1000000) ==
        doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normalizer increment ratio stays bounded on the schedule grid") {
  for (double rho : {0.0, 0.5, 0.9}) {
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
      const ScheduleSpec spec{rho, 1.0, r, 1.0};
      const double limit = (1.0 - 1.0 / 1.5) * (rho + r);
      double worst = 0.0;
      for (double x = 1.0; x <= 1e6; x *= 1.12) {
        const auto i = static_cast<std::int64_t>(x);
        worst = std::max(worst, std::abs(normalizer_increment_ratio(spec, kPareto15, i)));
      }
      CHECK(worst <= limit + 0.6);
    }
  }
  // dense scan for one representative pair
  const ScheduleSpec spec{0.5, 1.0, 1.0, 1.0};
  double worst = 0.0;
  for (std::int64_t i = 1; i <= 100000; ++i)
    worst = std::max(worst, std::abs(normalizer_increment_ratio(spec, kPareto15, i)));
  CHECK(worst <= 1.1);
}

TEST_CASE("normalizer state accumulates consistently") {
  const ScheduleSpec spec{0.5, 1.0, 0.5, 1.0};
  const NormalizerState state = build_normalizer_state(spec, kPareto15, 50);
  REQUIRE(state.w.size() == 51);
  REQUIRE(state.beta.size() == 50);
  CHECK(state.w[0] == 1.0);
  for (double w : state.w) CHECK(w > 0.0);
  for (std::size_t i = 1; i < state.beta.size(); ++i) CHECK(state.beta[i] > state.beta[i - 1]);
  CHECK(state.c == doctest::Approx(averaging_normalizer(spec, kPareto15, 50).value));
  CHECK(state.alpha == 1.5);
}

TEST_CASE("schedule validation for the averaging conditions") {
  const ScheduleSpec good{0.7, 0.9, 0.5, 1.0};
  const ScheduleReport pass = validate_schedule(good, 1.5, 1.0, 1.0, SchedulePurpose::averaging);
  CHECK(pass.ok());  // r(alpha-1) = 0.25 < 1 and rho*alpha = 1.05 > 0.75

  const ScheduleSpec bad{0.2, 0.9, 0.0, 1.0};
  const ScheduleReport fail = validate_schedule(bad, 1.5, 1.0, 1.0, SchedulePurpose::averaging);
  CHECK_FALSE(fail.ok());  // rho*alpha = 0.3 < 1
  CHECK(fail.first_failure().find("averaging_rate_balance") != std::string::npos);
}

TEST_CASE("schedule validation rejects out-of-range parameters") {
  CHECK_THROWS_WITH_AS(
      validate_schedule({1.0, 1.0, 0.0, 1.0}, 1.5, 1.0, 1.0, SchedulePurpose::moment),
      "rho out of range [0,1)", std::invalid_argument);
  CHECK_THROWS_AS(validate_schedule({0.5, 1.0, 0.0, 1.0}, 2.5, 1.0, 1.0, SchedulePurpose::moment),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_schedule({0.5, 1.0, 0.0, 1.0}, 1.5, -1.0, 1.0, SchedulePurpose::moment),
                  std::invalid_argument);
}

TEST_CASE("schedule validation step-size conditions") {
  // gamma_1 * a = 1 is the admissible boundary
  const ScheduleReport boundary =
      validate_schedule({0.7, 1.0, 0.5, 1.0}, 1.5, 1.0, 1.0, SchedulePurpose::moment);
  CHECK(boundary.ok());
  bool saw_boundary = false;
  for (const auto& c : boundary.conditions) saw_boundary |= c.boundary;
  CHECK(saw_boundary);

  const ScheduleReport unstable =
      validate_schedule({0.7, 1.2, 0.5, 1.0}, 1.5, 1.0, 1.0, SchedulePurpose::moment);
  CHECK_FALSE(unstable.ok());

  // constant gamma with constant batch never drives gamma/b to zero
  const ScheduleReport flat =
      validate_schedule({0.0, 0.5, 0.0, 1.0}, 1.5, 1.0, 1.0, SchedulePurpose::moment);
  CHECK_FALSE(flat.ok());
  CHECK(flat.first_failure().find("step_ratio_vanishes") != std::string::npos);
}
