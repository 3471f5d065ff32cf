#include "uqeval/platt.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace uqeval {

namespace {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Evaluation {
  double loss = 0.0;
  std::array<double, 2> grad{};     // d/da, d/db
  std::array<double, 3> hessian{};  // aa, ab, bb
};

class Objective {
 public:
  Objective(std::span<const double> u, std::span<const std::uint8_t> y) : u_(u), y_(y) {}

  double loss(double a, double b) const {
    double total = 0.0;
    for (std::size_t i = 0; i < u_.size(); ++i) {
      const double z = -a * u_[i] + b;
      total += softplus(z) - (y_[i] != 0 ? z : 0.0);
    }
    return total / static_cast<double>(u_.size());
  }

  Evaluation evaluate(double a, double b) const {
    Evaluation e;
    for (std::size_t i = 0; i < u_.size(); ++i) {
      const double z = -a * u_[i] + b;
      const double y = y_[i] != 0 ? 1.0 : 0.0;
      const double p = sigmoid(z);
      const double w = p * (1.0 - p);
      e.loss += softplus(z) - y * z;
      e.grad[0] += (p - y) * -u_[i];
      e.grad[1] += p - y;
      e.hessian[0] += w * u_[i] * u_[i];
      e.hessian[1] += -w * u_[i];
      e.hessian[2] += w;
    }
    const auto n = static_cast<double>(u_.size());
    e.loss /= n;
    for (double& g : e.grad) g /= n;
    for (double& h : e.hessian) h /= n;
    return e;
  }

 private:
  std::span<const double> u_;
  std::span<const std::uint8_t> y_;
};

double clamp_param(double v) noexcept { return std::clamp(v, -PlattParams::kClamp, PlattParams::kClamp); }

}  // namespace

double PlattParams::confidence(double u) const noexcept { return sigmoid(-a * u + b); }

PlattParams fit_platt(std::span<const double> u, std::span<const std::uint8_t> correct, Measure measure,
                      const PlattOptions& options) {
  if (u.size() != correct.size()) {
    throw Error(ErrorKind::ShapeMismatch, "uncertainties and correctness labels differ in length");
  }
  if (u.size() < 2) throw Error(ErrorKind::EmptyInput, "Platt scaling needs at least two pixels");
  for (double v : u) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "Platt scaling received a non-finite uncertainty");
  }

  PlattParams params;
  params.measure = measure;
  const auto positives = static_cast<std::size_t>(std::count_if(correct.begin(), correct.end(),
                                                                [](std::uint8_t c) { return c != 0; }));
  if (positives == 0 || positives == u.size()) {
    params.degenerate = true;
    params.a = 0.0;
    params.b = positives == 0 ? -PlattParams::kClamp : PlattParams::kClamp;
    return params;
  }

  const Objective objective(u, correct);
  const double rate = static_cast<double>(positives) / static_cast<double>(u.size());
  std::array<double, 2> x{0.0, clamp_param(std::log(rate / (1.0 - rate)))};

  for (int it = 0; it < options.max_iterations; ++it) {
    const Evaluation e = objective.evaluate(x[0], x[1]);
    params.iterations = it;

    // Variables pinned at a bound with the descent direction pointing outward stay fixed.
    std::array<bool, 2> free{};
    for (int k = 0; k < 2; ++k) {
      const bool at_upper = x[k] >= PlattParams::kClamp && e.grad[k] < 0.0;
      const bool at_lower = x[k] <= -PlattParams::kClamp && e.grad[k] > 0.0;
      free[k] = !(at_upper || at_lower);
    }
    double pg = 0.0;
    for (int k = 0; k < 2; ++k) pg += free[k] ? e.grad[k] * e.grad[k] : 0.0;
    params.gradient_norm = std::sqrt(pg);
    if (params.gradient_norm <= options.gradient_tolerance) break;

    std::array<double, 2> d{0.0, 0.0};
    const double damping = 1e-10 * (e.hessian[0] + e.hessian[2]) + 1e-300;
    if (free[0] && free[1]) {
      const double haa = e.hessian[0] + damping;
      const double hbb = e.hessian[2] + damping;
      const double hab = e.hessian[1];
      const double det = haa * hbb - hab * hab;
      if (det > 0.0 && std::isfinite(det)) {
        d[0] = (-hbb * e.grad[0] + hab * e.grad[1]) / det;
        d[1] = (hab * e.grad[0] - haa * e.grad[1]) / det;
      }
    } else {
      for (int k = 0; k < 2; ++k) {
        if (!free[k]) continue;
        const double h = (k == 0 ? e.hessian[0] : e.hessian[2]) + damping;
        d[k] = -e.grad[k] / h;
      }
    }
    double slope = 0.0;
    for (int k = 0; k < 2; ++k) slope += free[k] ? e.grad[k] * d[k] : 0.0;
    if (!(slope < 0.0) || !std::isfinite(slope)) {
      for (int k = 0; k < 2; ++k) d[k] = free[k] ? -e.grad[k] : 0.0;
    }

    bool accepted = false;
    std::array<double, 2> next = x;
    for (double t = 1.0; t > 1e-18; t *= 0.5) {
      next = {clamp_param(x[0] + t * d[0]), clamp_param(x[1] + t * d[1])};
      const double decrease = e.grad[0] * (next[0] - x[0]) + e.grad[1] * (next[1] - x[1]);
      if (objective.loss(next[0], next[1]) <= e.loss + 1e-4 * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double step = std::max(std::abs(next[0] - x[0]), std::abs(next[1] - x[1]));
    x = next;
    if (step <= 1e-15) break;
  }
  params.a = x[0];
  params.b = x[1];
  return params;
}

}  // namespace uqeval
