// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <memory>

#include "htsgd/noise.hpp"
#include "htsgd/rng.hpp"

namespace htsgd {

// An optimization instance exposing per-sample gradients, the mean field H,
// the optimum and the Jacobian of H there. Implementations must keep the
// per-sample gradient centered at the optimum: E[grad(optimum, xi)] = 0.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int dim() const = 0;
  virtual const Eigen::VectorXd& optimum() const = 0;
  virtual Eigen::VectorXd mean_field(const Eigen::VectorXd& theta) const = 0;
  virtual const Eigen::MatrixXd& jacobian_at_optimum() const = 0;
  virtual double a_min() const = 0;
  virtual double a_max() const = 0;

  virtual Eigen::VectorXd sample_datum(RngStream& rng) const = 0;
  virtual Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Eigen::VectorXd& xi) const = 0;

  // Centered gradient noise at the optimum. Since E[grad(optimum, .)] = 0 for
  // conforming problems this is just the gradient there.
  Eigen::VectorXd zeta_at_optimum(const Eigen::VectorXd& xi) const { return grad(optimum(), xi); }
};

// grad(theta, xi) = A (theta - optimum) + zeta(xi) with additive heavy-tailed
// noise. The mean field is exactly linear, so the first-order expansion of H
// around the optimum has zero remainder.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(Eigen::MatrixXd curvature, Eigen::VectorXd optimum, TailModel noise);
  QuadraticProblem(double curvature, double optimum, TailModel noise);

  int dim() const override { return static_cast<int>(curvature_.rows()); }
  const Eigen::VectorXd& optimum() const override { return optimum_; }
  Eigen::VectorXd mean_field(const Eigen::VectorXd& theta) const override;
  const Eigen::MatrixXd& jacobian_at_optimum() const override { return curvature_; }
  double a_min() const override { return a_min_; }
  double a_max() const override { return a_max_; }
  Eigen::VectorXd sample_datum(RngStream& rng) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Eigen::VectorXd& xi) const override;

  const TailModel& noise() const { return noise_; }

 private:
  Eigen::MatrixXd curvature_;
  Eigen::VectorXd optimum_;
  TailModel noise_;
  double a_min_ = 0.0;
  double a_max_ = 0.0;
};

// Predictor law for the univariate regression problem. Both choices have all
// even moments finite, which the gradient-increment bound needs.
struct PredictorLaw {
  enum class Kind { rademacher, gaussian };
  Kind kind = Kind::rademacher;
  double scale = 1.0;

  double second_moment() const { return scale * scale; }
  double sample(RngStream& rng) const;
};

// Squared loss on y = theta* x + eps with heavy-tailed eps:
// grad(theta, (x,y)) = -x (y - theta x), so H(theta) = E[X^2] (theta - theta*).
class LinearRegressionProblem final : public Problem {
 public:
  LinearRegressionProblem(double optimum, PredictorLaw predictors, TailModel errors);

  int dim() const override { return 1; }
  const Eigen::VectorXd& optimum() const override { return optimum_; }
  Eigen::VectorXd mean_field(const Eigen::VectorXd& theta) const override;
  const Eigen::MatrixXd& jacobian_at_optimum() const override { return jacobian_; }
  double a_min() const override { return predictors_.second_moment(); }
  double a_max() const override { return predictors_.second_moment(); }
  Eigen::VectorXd sample_datum(RngStream& rng) const override;  // (x, y)
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Eigen::VectorXd& xi) const override;

  const TailModel& errors() const { return errors_; }
  const PredictorLaw& predictors() const { return predictors_; }

 private:
  Eigen::VectorXd optimum_;
  Eigen::MatrixXd jacobian_;
  PredictorLaw predictors_;
  TailModel errors_;
};

}  // namespace htsgd
