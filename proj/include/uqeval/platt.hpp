#pragma once

#include <cstdint>
#include <span>

#include "uqeval/tensor.hpp"

namespace uqeval {

/// Logistic map from an uncertainty u to a confidence sigmoid(a * (-u) + b).
struct PlattParams {
  static constexpr double kClamp = 50.0;

  double a = 0.0;  // per nat
  double b = 0.0;
  Measure measure = Measure::TU;
  bool degenerate = false;  // all labels identical; a = 0, b = +-kClamp
  int iterations = 0;
  double gradient_norm = 0.0;

  double confidence(double u) const noexcept;
};

struct PlattOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
};

/// Minimizes the mean binary cross-entropy of sigmoid(-a u + b) against the
/// correctness labels with a box-constrained damped Newton method, |a|, |b| <= 50.
/// All-identical labels skip the fit and return the flagged clamp solution.
PlattParams fit_platt(std::span<const double> u, std::span<const std::uint8_t> correct, Measure measure,
                      const PlattOptions& options = {});

}  // namespace uqeval
