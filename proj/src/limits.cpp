// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "htsgd/parallel.hpp"
#include "htsgd/quadrature.hpp"

namespace htsgd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_measure(const ExponentMeasure1D& m) {
  if (!(m.alpha > 1.0 && m.alpha < 2.0)) throw std::invalid_argument("alpha out of range (1,2)");
  if (!(m.c_plus >= 0.0 && m.c_minus >= 0.0 && m.c_plus + m.c_minus > 0.0))
    throw std::invalid_argument("tail weights must be non-negative with positive sum");
}

void require_rate(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("contraction rate a must be positive");
}

// Integral over [b, inf) of trig(u x) * alpha x^{-alpha-1} dx, summed over
// half-period panels. Consecutive panels alternate in sign with decreasing
// magnitude, so the remainder after stopping is below the first omitted panel.
double oscillatory_tail(double alpha, double u, double b, bool use_sin, double tol) {
  const double half_period = kPi / u;
  auto envelope = [&](double x) { return alpha * std::pow(x, -alpha - 1.0); };
  // Per-panel tolerance proportional to the panel envelope so the total error
  // budget stays near 0.1 * tol.
  const double budget_scale = 0.1 * tol * half_period / std::pow(b, -alpha);
  auto f = [&](double y) {
    return (use_sin ? std::sin(u * y) : std::cos(u * y)) * envelope(y);
  };
  double total = 0.0;
  double x = b;
  const int max_panels = 1000000;
  for (int k = 0; k < max_panels; ++k) {
    const double x1 = x + half_period;
    const double panel_tol = std::max(budget_scale * envelope(x), 1e-300);
    total += integrate_adaptive(f, x, x1, panel_tol);
    if (k >= 1 && envelope(x1) * 2.0 / u <= 0.4 * tol) return total;
    x = x1;
  }
  throw QuadratureError("oscillatory tail did not settle", envelope(x) * 2.0 / u);
}

// Integral over [lo, hi] split at geometric breakpoints (and at 1) so each
// adaptive panel spans a bounded dynamic range.
double integrate_graded(const std::function<double(double)>& f, double lo, double hi,
                        double tol) {
  std::vector<double> breaks{lo};
  for (double x = lo * 4.0; x < hi; x *= 4.0) breaks.push_back(x);
  if (lo < 1.0 && 1.0 < hi) breaks.push_back(1.0);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double panel_tol = tol / static_cast<double>(breaks.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += integrate_adaptive(f, breaks[i], breaks[i + 1], panel_tol);
  return total;
}

// integral over (0, inf) of (cos(ux) - 1) alpha x^{-alpha-1} dx, u > 0.
double cos_part(double alpha, double u, double tol) {
  const double x0 = std::min(0.5, 1e-3 / u);
  // Power-series head: cos(v) - 1 = -v^2/2 + v^4/24 - ...
  double value = -u * u * alpha * std::pow(x0, 2.0 - alpha) / (2.0 * (2.0 - alpha)) +
                 std::pow(u, 4) * alpha * std::pow(x0, 4.0 - alpha) / (24.0 * (4.0 - alpha));
  const double b = std::max(2.0 * x0, kPi / u);
  auto smooth = [&](double x) {
    const double s = std::sin(0.5 * u * x);
    return -2.0 * s * s * alpha * std::pow(x, -alpha - 1.0);
  };
  value += integrate_graded(smooth, x0, b, 0.3 * tol);
  value += oscillatory_tail(alpha, u, b, /*use_sin=*/false, tol) - std::pow(b, -alpha);
  return value;
}

// integral over (0, inf) of (sin(ux) - ux) alpha x^{-alpha-1} dx, u > 0.
double sin_part(double alpha, double u, double tol) {
  const double x0 = std::min(0.5, 1e-3 / u);
  double value = -std::pow(u, 3) * alpha * std::pow(x0, 3.0 - alpha) / (6.0 * (3.0 - alpha)) +
                 std::pow(u, 5) * alpha * std::pow(x0, 5.0 - alpha) / (120.0 * (5.0 - alpha));
  const double b = std::max(2.0 * x0, kPi / u);
  auto smooth = [&](double x) {
    return (std::sin(u * x) - u * x) * alpha * std::pow(x, -alpha - 1.0);
  };
  value += integrate_graded(smooth, x0, b, 0.3 * tol);
  value += oscillatory_tail(alpha, u, b, /*use_sin=*/true, tol) -
           u * alpha * std::pow(b, 1.0 - alpha) / (alpha - 1.0);
  return value;
}

}  // namespace

double ExponentMeasure1D::tail_positive(double x) const {
  return c_plus * std::pow(x, -alpha);
}

double ExponentMeasure1D::tail_negative(double x) const {
  return c_minus * std::pow(x, -alpha);
}

double ExponentMeasure1D::tail_abs(double x) const {
  return (c_plus + c_minus) * std::pow(x, -alpha);
}

bool ExponentMeasure1D::symmetric() const {
  return std::abs(c_plus - c_minus) <= 1e-12 * (c_plus + c_minus);
}

ExponentMeasure1D ExponentMeasure1D::symmetric_unit(double alpha) {
  ExponentMeasure1D m{alpha, 0.5, 0.5};
  require_measure(m);
  return m;
}

ExponentMeasure1D ou_stationary_measure(const ExponentMeasure1D& measure, double a) {
  require_measure(measure);
  require_rate(a);
  const double shrink = 1.0 / (measure.alpha * a);
  return {measure.alpha, measure.c_plus * shrink, measure.c_minus * shrink};
}

ExponentMeasure1D linear_image_measure(const ExponentMeasure1D& measure, double a) {
  require_measure(measure);
  require_rate(a);
  const double shrink = std::pow(a, -measure.alpha);
  return {measure.alpha, measure.c_plus * shrink, measure.c_minus * shrink};
}

SeriesStableSampler::SeriesStableSampler(ExponentMeasure1D measure, int truncation_terms)
    : measure_(measure), terms_(truncation_terms) {
  require_measure(measure_);
  if (!measure_.symmetric())
    throw std::invalid_argument("series sampler supports symmetric measures only");
  if (terms_ < 1) throw std::invalid_argument("truncation_terms must be positive");
  const double k = measure_.c_plus + measure_.c_minus;
  weight_root_ = std::pow(k, 1.0 / measure_.alpha);

  // Variance of the dropped tail: sum_{i>terms} E[Gamma_i^{-2/alpha}] with
  // Gamma_i ~ Gamma(i,1), i.e. Gamma(i - 2/alpha)/Gamma(i), summed exactly for
  // 2e5 terms and completed with the Euler-Maclaurin tail of i^{-2/alpha}.
  const double s = 2.0 / measure_.alpha;
  double acc = 0.0;
  const std::int64_t exact_until = terms_ + 200000;
  for (std::int64_t i = terms_ + 1; i <= exact_until; ++i)
    acc += std::exp(std::lgamma(static_cast<double>(i) - s) - std::lgamma(static_cast<double>(i)));
  acc += std::pow(static_cast<double>(exact_until) + 0.5, 1.0 - s) / (s - 1.0);
  completion_sd_ = weight_root_ * std::sqrt(acc);
}

double SeriesStableSampler::sample(RngStream& rng) const {
  const double inv_alpha = 1.0 / measure_.alpha;
  double arrival = 0.0;
  double acc = 0.0;
  for (int i = 0; i < terms_; ++i) {
    arrival += rng.exponential();
    acc += rng.sign() * std::pow(arrival, -inv_alpha);
  }
  return weight_root_ * acc + completion_sd_ * rng.normal();
}

std::vector<double> sample_many(const SeriesStableSampler& sampler, std::int64_t n,
                                std::uint64_t master_seed, int threads) {
  std::vector<double> out(static_cast<std::size_t>(n));
  parallel_for_index(n, threads, [&](std::int64_t i) {
    RngStream rng(master_seed, StreamDomain::series_oracle, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = sampler.sample(rng);
  });
  return out;
}

OuStationaryStableSampler::OuStationaryStableSampler(double alpha, double sigma, double a)
    : alpha_(alpha), sigma_(sigma), a_(a) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("alpha out of range (1,2)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  require_rate(a);
  scale_ = sigma * std::pow(alpha * a, -1.0 / alpha);
}

double OuStationaryStableSampler::sample(RngStream& rng) const {
  return sample_stable_symmetric(alpha_, scale_, rng);
}

double OuStationaryStableSampler::sample_discretized(RngStream& rng, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double decay = alpha_ * a_ * dt;
  // Stop once the omitted geometric tail is below double precision in scale.
  const auto steps = static_cast<std::int64_t>(std::ceil(38.0 / decay));
  const double increment_scale =
      sigma_ * std::pow((1.0 - std::exp(-decay)) / (alpha_ * a_), 1.0 / alpha_);
  double acc = 0.0;
  for (std::int64_t k = 0; k < steps; ++k)
    acc += std::exp(-a_ * static_cast<double>(k) * dt) *
           sample_stable_symmetric(alpha_, increment_scale, rng);
  return acc;
}

std::vector<double> sample_many(const OuStationaryStableSampler& sampler, std::int64_t n,
                                std::uint64_t master_seed, int threads, double dt) {
  std::vector<double> out(static_cast<std::size_t>(n));
  parallel_for_index(n, threads, [&](std::int64_t i) {
    RngStream rng(master_seed, StreamDomain::stable_oracle, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] =
        dt > 0.0 ? sampler.sample_discretized(rng, dt) : sampler.sample(rng);
  });
  return out;
}

std::complex<double> cf_from_measure(const ExponentMeasure1D& measure, double u, double abs_tol) {
  require_measure(measure);
  if (u == 0.0) return {1.0, 0.0};
  const double au = std::abs(u);
  const double weight = measure.c_plus + measure.c_minus;
  const double log_re = weight * cos_part(measure.alpha, au, abs_tol / (2.0 * weight));
  double log_im = 0.0;
  const double skew = measure.c_plus - measure.c_minus;
  if (skew != 0.0) {
    log_im = skew * sin_part(measure.alpha, au, abs_tol / (2.0 * std::abs(skew)));
    if (u < 0.0) log_im = -log_im;
  }
  return std::exp(std::complex<double>(log_re, log_im));
}

DriftDecomposition drift_decomposition(const ExponentMeasure1D& measure, double a,
                                       double abs_tol) {
  require_measure(measure);
  require_rate(a);
  const double alpha = measure.alpha;

  // First moment above level 1, in log coordinates x = e^s:
  // integral of x * alpha c x^{-alpha-1} dx over (1, inf) = alpha c * int e^{-(alpha-1)s} ds.
  const double s_max = 80.0 / (alpha - 1.0);
  const double base =
      integrate_adaptive([&](double s) { return std::exp(-(alpha - 1.0) * s); }, 0.0, s_max,
                         0.1 * abs_tol / (alpha * (measure.c_plus + measure.c_minus + 1.0)));
  DriftDecomposition out;
  out.tail_first_moment = alpha * (measure.c_plus - measure.c_minus) * base;
  out.boundary_term = -out.tail_first_moment / a;

  // Indicator mismatch term: for fixed t only the band 1 < |x| <= e^{at}
  // contributes e^{-at} x, which integrates (per side, log coordinates) to
  // alpha c e^{-at} * int_0^{at} e^{-(alpha-1)s} ds.
  const double skew = measure.c_plus - measure.c_minus;
  if (skew != 0.0) {
    const double t_max = 45.0 / a;
    auto inner = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double band = integrate_adaptive(
          [&](double s) { return std::exp(-(alpha - 1.0) * s); }, 0.0, a * t, 1e-12);
      return std::exp(-a * t) * alpha * skew * band;
    };
    out.interchange_term =
        integrate_adaptive(inner, 0.0, t_max, 0.4 * abs_tol);
  }
  out.total = out.boundary_term + out.interchange_term;
  out.measure_integral = skew / (a * (alpha - 1.0));
  return out;
}

std::vector<double> contraction_products(const ScheduleSpec& spec, double a, std::int64_t n) {
  require_rate(a);
  if (n < 1) throw std::invalid_argument("iteration count must be at least 1");
  std::vector<double> products(static_cast<std::size_t>(n));
  products[static_cast<std::size_t>(n - 1)] = 1.0;
  for (std::int64_t i = n - 1; i >= 1; --i)
    products[static_cast<std::size_t>(i - 1)] =
        products[static_cast<std::size_t>(i)] * (1.0 - learning_rate(spec, i + 1) * a);
  return products;
}

std::vector<double> step_weight_sums(const ScheduleSpec& spec, double a, std::int64_t n) {
  require_rate(a);
  if (n < 1) throw std::invalid_argument("iteration count must be at least 1");
  std::vector<double> sums(static_cast<std::size_t>(n));
  double tail = 1.0;  // sum_{j=i..N} prod_{k=i+1..j} (1 - gamma_k a)
  sums[static_cast<std::size_t>(n - 1)] = learning_rate(spec, n);
  for (std::int64_t i = n - 1; i >= 1; --i) {
    tail = 1.0 + (1.0 - learning_rate(spec, i + 1) * a) * tail;
    sums[static_cast<std::size_t>(i - 1)] = learning_rate(spec, i) * tail;
  }
  return sums;
}

double scalar_contraction_product(const ScheduleSpec& spec, double sigma, std::int64_t n,
                                  std::int64_t i) {
  if (i < 1 || i > n) throw std::invalid_argument("index i must lie in [1, n]");
  double prod = 1.0;
  for (std::int64_t k = i + 1; k <= n; ++k) prod *= 1.0 - sigma * learning_rate(spec, k);
  return prod;
}

Eigen::MatrixXd contraction_product_matrix(const ScheduleSpec& spec, const Eigen::MatrixXd& a,
                                           std::int64_t n, std::int64_t i) {
  if (i < 1 || i > n) throw std::invalid_argument("index i must lie in [1, n]");
  const auto d = a.rows();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(d, d);
  for (std::int64_t k = i + 1; k <= n; ++k)
    prod = (Eigen::MatrixXd::Identity(d, d) - learning_rate(spec, k) * a) * prod;
  return prod;
}

Eigen::MatrixXd step_weight_sum_matrix(const ScheduleSpec& spec, const Eigen::MatrixXd& a,
                                       std::int64_t n, std::int64_t i) {
  if (i < 1 || i > n) throw std::invalid_argument("index i must lie in [1, n]");
  const auto d = a.rows();
  Eigen::MatrixXd tail = Eigen::MatrixXd::Identity(d, d);
  for (std::int64_t j = n - 1; j >= i; --j)
    tail = Eigen::MatrixXd::Identity(d, d) +
           (Eigen::MatrixXd::Identity(d, d) - learning_rate(spec, j + 1) * a) * tail;
  return learning_rate(spec, i) * tail;
}

RecursionWeights recursion_weights(const ScheduleSpec& spec, const TailModel& tail, double a,
                                   std::int64_t n, std::int64_t i, double sigma) {
  if (i < 1 || i > n) throw std::invalid_argument("index i must lie in [1, n]");
  RecursionWeights w;
  w.contraction_product = 1.0;
  for (std::int64_t k = i + 1; k <= n; ++k)
    w.contraction_product *= 1.0 - learning_rate(spec, k) * a;
  const double ratio =
      std::min(1.0, learning_rate(spec, i) / static_cast<double>(batch_size(spec, i)));
  w.tail_scaled_product = w.contraction_product / quantile_tail(tail, ratio);
  w.scalar_contraction = scalar_contraction_product(spec, sigma, n, i);
  double tail_sum = 1.0;
  for (std::int64_t j = n - 1; j >= i; --j)
    tail_sum = 1.0 + (1.0 - learning_rate(spec, j + 1) * a) * tail_sum;
  w.step_weight_sum = learning_rate(spec, i) * tail_sum;
  return w;
}

double mean_measure_sum_iterates(const ScheduleSpec& spec, const TailModel& tail, double a,
                                 std::int64_t n, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("threshold s must be positive");
  const auto products = contraction_products(spec, a, n);
  double sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double b = static_cast<double>(batch_size(spec, i));
    const double ratio = std::min(1.0, learning_rate(spec, i) / b);
    const double q = quantile_tail(tail, ratio);
    const double contraction = std::abs(products[static_cast<std::size_t>(i - 1)]);
    if (contraction <= 0.0) continue;
    sum += b * tail_prob(tail, s * q / contraction);
  }
  return sum;
}

double mean_measure_sum_averages(const ScheduleSpec& spec, const TailModel& tail, double a,
                                 std::int64_t n, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("threshold s must be positive");
  const double c_n = averaging_normalizer(spec, tail, n).value;
  const auto weights = step_weight_sums(spec, a, n);
  double sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double b = static_cast<double>(batch_size(spec, i));
    const double w = std::abs(weights[static_cast<std::size_t>(i - 1)]);
    if (w <= 0.0) continue;
    sum += b * tail_prob(tail, s * b * c_n / w);
  }
  return sum;
}

double batch_tail_characterization_sum(const ScheduleSpec& spec, const TailModel& tail,
                                       std::int64_t n) {
  const double c_n = averaging_normalizer(spec, tail, n).value;
  double sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double b = static_cast<double>(batch_size(spec, i));
    sum += b * tail_prob(tail, b * c_n);
  }
  return sum;
}

}  // namespace htsgd
