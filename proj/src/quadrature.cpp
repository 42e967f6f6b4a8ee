// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#include "htsgd/quadrature.hpp"

#include <cmath>

namespace htsgd {

namespace {

struct Panel {
  double value;
  double worst_residual = 0.0;
  bool converged = true;
};

Panel simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || h <= 1e-300) {
    return {left + right + delta / 15.0, std::abs(delta) / 15.0, true};
  }
  if (depth <= 0) {
    return {left + right + delta / 15.0, std::abs(delta) / 15.0, false};
  }
  const Panel l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
  const Panel r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.worst_residual + r.worst_residual, l.converged && r.converged};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const Panel p = simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
  if (!p.converged)
    throw QuadratureError("adaptive quadrature did not converge", p.worst_residual);
  return p.value;
}

}  // namespace htsgd
