// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htsgd {

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_rate needs matching vectors");
  if (x.size() < 3) throw std::invalid_argument("fit_rate needs at least 3 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0))
      throw std::invalid_argument("fit_rate needs strictly positive points");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_rate needs distinct abscissae");
  RateFit fit;
  fit.points = static_cast<int>(x.size());
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  return fit;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  const double t = std::exp(-2.0 * lambda * lambda);
  if (t >= 1.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::pow(t, static_cast<double>(k) * k);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_from(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 50 || b.size() < 50)
    throw std::invalid_argument("ks_two_sample needs at least 50 samples per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult out;
  out.statistic = d;
  out.p_value = ks_p_from(d, na * nb / (na + nb));
  return out;
}

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 50) throw std::invalid_argument("ks_one_sample needs at least 50 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  KsResult out;
  out.statistic = d;
  out.p_value = ks_p_from(d, n);
  return out;
}

std::vector<EcfPoint> empirical_cf(const std::vector<double>& samples,
                                   const std::vector<double>& u_grid) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf needs samples");
  const double n = static_cast<double>(samples.size());
  std::vector<EcfPoint> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    double sc = 0.0, ss = 0.0, scc = 0.0, sss = 0.0;
    for (double x : samples) {
      const double c = std::cos(u * x);
      const double s = std::sin(u * x);
      sc += c;
      ss += s;
      scc += c * c;
      sss += s * s;
    }
    EcfPoint p;
    p.u = u;
    const double mc = sc / n;
    const double ms = ss / n;
    p.value = {mc, ms};
    p.se_real = std::sqrt(std::max(0.0, scc / n - mc * mc) / n);
    p.se_imag = std::sqrt(std::max(0.0, sss / n - ms * ms) / n);
    out.push_back(p);
  }
  return out;
}

double median_of_means(const std::vector<double>& values, int groups) {
  if (values.empty()) throw std::invalid_argument("median_of_means needs values");
  if (groups < 1) throw std::invalid_argument("median_of_means needs positive group count");
  const auto n = static_cast<std::int64_t>(values.size());
  const auto g = std::min<std::int64_t>(groups, n);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(g));
  std::int64_t start = 0;
  for (std::int64_t k = 0; k < g; ++k) {
    const std::int64_t len = n / g + (k < n % g ? 1 : 0);
    double acc = 0.0;
    for (std::int64_t i = start; i < start + len; ++i) acc += values[static_cast<std::size_t>(i)];
    means.push_back(acc / static_cast<double>(len));
    start += len;
  }
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  return means.size() % 2 == 1 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
}

ComplexityCount complexity_iterations(double eps, double p, double rho, double r) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(rho + r > 0.0)) throw std::invalid_argument("rho + r must be positive");
  ComplexityCount out;
  out.iterations = std::pow(eps, -p / ((p - 1.0) * (rho + r)));
  out.samples = std::pow(eps, -complexity_E(p, rho, r));
  return out;
}

double complexity_E(double p, double rho, double r) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(rho + r > 0.0)) throw std::invalid_argument("rho + r must be positive");
  return p * (r + 1.0) / ((p - 1.0) * (rho + r));
}

double complexity_B(double alpha, double r) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha out of range (1,2)");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be non-negative");
  return (1.0 - r * (alpha - 1.0)) / (alpha * (1.0 + r));
}

}  // namespace htsgd
