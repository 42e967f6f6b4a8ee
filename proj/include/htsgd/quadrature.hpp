// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace htsgd {

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
        achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

// Adaptive Simpson with Richardson correction on [a, b]. Throws
// QuadratureError when the absolute tolerance cannot be met.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

}  // namespace htsgd
