// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/problems.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace htsgd {

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd curvature, Eigen::VectorXd optimum,
                                   TailModel noise)
    : curvature_(std::move(curvature)), optimum_(std::move(optimum)), noise_(noise) {
  if (curvature_.rows() != curvature_.cols())
    throw std::invalid_argument("curvature matrix must be square");
  if (optimum_.size() != curvature_.rows())
    throw std::invalid_argument("optimum dimension must match the curvature matrix");
  const double scale = std::max(1.0, curvature_.cwiseAbs().maxCoeff());
  if ((curvature_ - curvature_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("curvature matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(curvature_);
  a_min_ = eig.eigenvalues().minCoeff();
  a_max_ = eig.eigenvalues().maxCoeff();
  if (!(a_min_ > 0.0)) throw std::invalid_argument("curvature matrix must be positive definite");
}

QuadraticProblem::QuadraticProblem(double curvature, double optimum, TailModel noise)
    : QuadraticProblem(Eigen::MatrixXd::Constant(1, 1, curvature),
                       Eigen::VectorXd::Constant(1, optimum), noise) {}

Eigen::VectorXd QuadraticProblem::mean_field(const Eigen::VectorXd& theta) const {
  return curvature_ * (theta - optimum_);
}

Eigen::VectorXd QuadraticProblem::sample_datum(RngStream& rng) const {
  return sample_zeta(noise_, dim(), rng);
}

Eigen::VectorXd QuadraticProblem::grad(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& xi) const {
  return curvature_ * (theta - optimum_) + xi;
}

double PredictorLaw::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::rademacher:
      return scale * rng.sign();
    case Kind::gaussian:
      return scale * rng.normal();
  }
  return 0.0;
}

LinearRegressionProblem::LinearRegressionProblem(double optimum, PredictorLaw predictors,
                                                 TailModel errors)
    : optimum_(Eigen::VectorXd::Constant(1, optimum)),
      jacobian_(Eigen::MatrixXd::Constant(1, 1, predictors.second_moment())),
      predictors_(predictors),
      errors_(errors) {
  if (!(predictors.scale > 0.0)) throw std::invalid_argument("predictor scale must be positive");
}

Eigen::VectorXd LinearRegressionProblem::mean_field(const Eigen::VectorXd& theta) const {
  return jacobian_ * (theta - optimum_);
}

Eigen::VectorXd LinearRegressionProblem::sample_datum(RngStream& rng) const {
  const double x = predictors_.sample(rng);
  const double eps = sample_zeta(errors_, 1, rng)(0);
  Eigen::VectorXd xi(2);
  xi << x, optimum_(0) * x + eps;
  return xi;
}

Eigen::VectorXd LinearRegressionProblem::grad(const Eigen::VectorXd& theta,
                                              const Eigen::VectorXd& xi) const {
  const double x = xi(0);
  const double y = xi(1);
  return Eigen::VectorXd::Constant(1, -x * (y - theta(0) * x));
}

}  // namespace htsgd
