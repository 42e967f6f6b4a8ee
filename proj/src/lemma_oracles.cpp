// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/lemma_oracles.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace htsgd {

namespace {

// First index m such that log w is non-decreasing (up to rounding) on [m, N].
std::int64_t monotone_tail_start(const std::vector<double>& log_w) {
  const auto n = static_cast<std::int64_t>(log_w.size());
  std::int64_t start = n;  // no tail at all
  for (std::int64_t i = n - 1; i >= 1; --i) {
    if (log_w[static_cast<std::size_t>(i)] >= log_w[static_cast<std::size_t>(i - 1)] - 1e-12)
      start = i;
    else
      break;
  }
  return start;  // 1-based: w_{start} begins the non-decreasing tail
}

void require_sequences(const std::vector<double>& u, const std::vector<double>& v,
                       const std::vector<double>& z) {
  if (u.empty() || u.size() != v.size() || u.size() != z.size())
    throw std::invalid_argument("sequence scan needs equal non-empty u, v, z");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw std::invalid_argument("u must be positive");
    if (!(v[i] > 0.0 && v[i] <= 1.0)) throw std::invalid_argument("v must lie in (0,1]");
    if (!(z[i] >= 0.0)) throw std::invalid_argument("z must be non-negative");
  }
}

// Hypothesis bookkeeping shared by both scans. log w_n = log u_n - sum log v_i.
void scan_hypotheses(const std::vector<double>& u, const std::vector<double>& v,
                     const std::vector<double>& z, std::int64_t& monotone_from,
                     bool& hypotheses_ok, double& max_increment_quotient) {
  const auto n = static_cast<std::int64_t>(u.size());
  std::vector<double> log_w(u.size());
  double log_prod = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    log_prod += std::log(v[i]);
    log_w[i] = std::log(u[i]) - log_prod;
  }
  monotone_from = monotone_tail_start(log_w);
  max_increment_quotient = 0.0;
  for (std::int64_t i = std::max<std::int64_t>(monotone_from, 2); i <= n; ++i) {
    const double denom = u[static_cast<std::size_t>(i - 1)] -
                         u[static_cast<std::size_t>(i - 2)] * v[static_cast<std::size_t>(i - 1)];
    if (denom <= 0.0) continue;  // flat stretch of w
    const double q = z[static_cast<std::size_t>(i - 1)] * u[static_cast<std::size_t>(i - 1)] / denom;
    max_increment_quotient = std::max(max_increment_quotient, q);
  }
  hypotheses_ok = monotone_from <= n / 2 && std::isfinite(max_increment_quotient);
}

}  // namespace

InequalityCheck p_norm_triangle_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("p must lie in [1,2]");
  if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal dimension");
  InequalityCheck check;
  check.lhs = std::pow((x + y).norm(), p);
  check.rhs = std::pow(x.norm(), p) + 4.0 * std::pow(y.norm(), p) +
              p * y.dot(signed_power(x, p - 1.0));
  return check;
}

InequalityCheck p_norm_triangle_componentwise_check(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("p must lie in [1,2]");
  if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal dimension");
  InequalityCheck check;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    check.lhs += std::pow(std::abs(x(j) + y(j)), p);
    check.rhs += std::pow(std::abs(x(j)), p) + 4.0 * std::pow(std::abs(y(j)), p);
  }
  check.rhs += p * y.dot(signed_power(x, p - 1.0));
  return check;
}

InequalityCheck contraction_norm_check(const Eigen::MatrixXd& a, double t, double p) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const auto& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) throw std::invalid_argument("matrix must be positive definite");
  double op_norm = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j)
    op_norm = std::max(op_norm, std::abs(1.0 - t * lambda(j)));
  InequalityCheck check;
  check.lhs = std::pow(op_norm, p);
  check.rhs = 1.0 - t * lambda.minCoeff();
  return check;
}

SequenceBoundReport toeplitz_ratio_scan(const std::vector<double>& u,
                                        const std::vector<double>& v,
                                        const std::vector<double>& z) {
  require_sequences(u, v, z);
  SequenceBoundReport report;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s = v[i] * s + z[i] * u[i];
    const double ratio = s / u[i];
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax = static_cast<std::int64_t>(i) + 1;
    }
  }
  scan_hypotheses(u, v, z, report.monotone_from, report.hypotheses_ok,
                  report.max_increment_quotient);
  return report;
}

RecursionBoundReport recursion_bound_scan(double delta0, const std::vector<double>& u,
                                          const std::vector<double>& v,
                                          const std::vector<double>& z) {
  require_sequences(u, v, z);
  if (!(delta0 >= 0.0)) throw std::invalid_argument("delta0 must be non-negative");
  RecursionBoundReport report;
  double delta = delta0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    delta = v[i] * delta + z[i] * u[i];
    const double ratio = delta / u[i];
    if (ratio > report.sup_ratio) {
      report.sup_ratio = ratio;
      report.argmax = static_cast<std::int64_t>(i) + 1;
    }
  }
  double unused = 0.0;
  scan_hypotheses(u, v, z, report.monotone_from, report.hypotheses_ok, unused);
  return report;
}

}  // namespace htsgd
