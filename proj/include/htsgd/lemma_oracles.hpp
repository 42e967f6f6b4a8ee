// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <vector>

namespace htsgd {

// Componentwise sign(v_j) |v_j|^q; q = 1 is the identity, q = 0 maps to the
// sign vector with 0 -> 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> signed_power(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar q) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const Scalar x = v(j);
    out(j) = x == Scalar(0) ? Scalar(0) : std::copysign(std::pow(std::abs(x), q), x);
  }
  return out;
}

// Both sides of an inequality, so callers can assert the inequality itself
// rather than a cached verdict.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

// |x+y|^p <= |x|^p + 4|y|^p + p y . x^{<p-1>} for p in [1,2], Euclidean norm.
// Caution: this combination is FALSE in dimension >= 2 (the cross term is not
// the Euclidean gradient); the checker reports both sides so the boundary of
// validity can be probed. It always holds for d = 1 and at p = 2.
InequalityCheck p_norm_triangle_check(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      double p);

// Coordinatewise variant: sum_j |x_j+y_j|^p against
// sum_j (|x_j|^p + 4 |y_j|^p) + p y . x^{<p-1>}. This is the form the
// moment recursion uses per coordinate, and it holds in every dimension.
InequalityCheck p_norm_triangle_componentwise_check(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y, double p);

// |I - tA|_op^p <= 1 - t lambda_min(A) for symmetric positive definite A and
// t within the inverse spectral radius. Throws on non-SPD input.
InequalityCheck contraction_norm_check(const Eigen::MatrixXd& a, double t, double p);

// Running ratio of the weighted backward sum
//   s_n = sum_{i<=n} z_i u_i prod_{j=i+1..n} v_j
// against u_n, plus the numeric status of the hypotheses behind the O(u_n)
// bound: w_n = u_n prod v_i^{-1} ultimately non-decreasing, and
// z_n u_n / (u_n - u_{n-1} v_n) bounded.
struct SequenceBoundReport {
  double max_ratio = 0.0;
  std::int64_t argmax = 0;  // 1-based
  bool hypotheses_ok = false;
  std::int64_t monotone_from = 0;        // first index with non-decreasing w tail
  double max_increment_quotient = 0.0;   // over the monotone tail
};

SequenceBoundReport toeplitz_ratio_scan(const std::vector<double>& u,
                                        const std::vector<double>& v,
                                        const std::vector<double>& z);

// Iterates delta_{i+1} = v_{i+1} delta_i + z_{i+1} u_{i+1} and tracks
// sup delta_n / u_n. When the hypotheses fail the ratio is still reported but
// hypotheses_ok is false and no boundedness conclusion is implied.
struct RecursionBoundReport {
  double sup_ratio = 0.0;
  std::int64_t argmax = 0;
  bool hypotheses_ok = false;
  std::int64_t monotone_from = 0;
};

RecursionBoundReport recursion_bound_scan(double delta0, const std::vector<double>& u,
                                          const std::vector<double>& v,
                                          const std::vector<double>& z);

}  // namespace htsgd
