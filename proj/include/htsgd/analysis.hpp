// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace htsgd {

// Least squares fit of log y against log x.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double lambda);

// Two-sided tests with the asymptotic p-value (Stephens' small-sample
// correction of the effective sample size). Sizes below 50 are rejected; the
// asymptotic p-value is not trustworthy there.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

struct EcfPoint {
  double u = 0.0;
  std::complex<double> value;
  double se_real = 0.0;
  double se_imag = 0.0;
};

std::vector<EcfPoint> empirical_cf(const std::vector<double>& samples,
                                   const std::vector<double>& u_grid);

// Median of group means over contiguous groups; the standing estimator for
// moments of heavy-tailed statistics (plain means are consistent but wild).
double median_of_means(const std::vector<double>& values, int groups = 32);

// Sample-count exponents for driving the error below eps with the power-law
// schedules gamma_i ~ i^{-rho}, b_i ~ i^r.
struct ComplexityCount {
  double iterations = 0.0;  // N(eps)
  double samples = 0.0;     // n(eps)
};

ComplexityCount complexity_iterations(double eps, double p, double rho, double r);

// Exponent of n(eps) as a function of eps: p(r+1) / ((p-1)(rho+r)).
double complexity_E(double p, double rho, double r);

// Exponent of the averaging normalizer as a power of the sample count:
// (1 - r(alpha-1)) / (alpha (1+r)).
double complexity_B(double alpha, double r);

}  // namespace htsgd
