#include "uqeval/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uqeval/reduce.hpp"

namespace uqeval {

namespace {

constexpr double kEuAbortTolerance = 1e-6;

// Entropy without the input checks. `sum` is the vector's total mass.
double entropy_unchecked(std::span<const double> probs, double sum) noexcept {
  double h = 0.0;
  for (double p : probs) {
    if (p <= 0.0) continue;
    const double q = sum == 1.0 ? p : p / sum;
    h -= q * std::log(q);
  }
  return h;
}

}  // namespace

double shannon_entropy(std::span<const double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p)) throw Error(ErrorKind::NonFinite, "non-finite probability");
    if (p < -SampleGrid::kNegativeTolerance) {
      throw Error(ErrorKind::NegativeProbability, "probability " + std::to_string(p) + " is negative");
    }
    sum += std::max(p, 0.0);
  }
  if (std::abs(sum - 1.0) > SampleGrid::kSimplexTolerance) {
    throw Error(ErrorKind::NonNormalized, "probabilities sum to " + std::to_string(sum));
  }
  return entropy_unchecked(probs, sum);
}

BmaMap bma(const SampleGrid& grid) {
  const auto& s = grid.shape();
  BmaMap out(s.classes, s.rows, s.cols);
  std::vector<double> along_samples(s.samples);
  std::vector<double> along_instances(s.instances);
  for (std::size_t c = 0; c < s.classes; ++c) {
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t w = 0; w < s.cols; ++w) {
        for (std::size_t m = 0; m < s.instances; ++m) {
          for (std::size_t n = 0; n < s.samples; ++n) along_samples[n] = grid(m, n, c, r, w);
          along_instances[m] = pairwise_mean(along_samples);
        }
        out(c, r, w) = pairwise_mean(along_instances);
      }
    }
  }
  return out;
}

UncertaintyMaps decompose(const SampleGrid& grid) {
  const auto& s = grid.shape();
  UncertaintyMaps maps{Map(s.rows, s.cols), Map(s.rows, s.cols), Map(s.rows, s.cols)};

  std::vector<double> along_samples(s.samples);
  std::vector<double> along_instances(s.instances);
  std::vector<double> instance_mean(s.instances * s.classes);  // [m][c]
  std::vector<double> instance_entropy(s.instances);
  std::vector<double> average(s.classes);

  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t w = 0; w < s.cols; ++w) {
      for (std::size_t m = 0; m < s.instances; ++m) {
        const std::span<double> mean_m(instance_mean.data() + m * s.classes, s.classes);
        double mass = 0.0;
        for (std::size_t c = 0; c < s.classes; ++c) {
          for (std::size_t n = 0; n < s.samples; ++n) along_samples[n] = std::max(grid(m, n, c, r, w), 0.0);
          mean_m[c] = pairwise_mean(along_samples);
          mass += mean_m[c];
        }
        instance_entropy[m] = entropy_unchecked(mean_m, mass);
      }
      double mass = 0.0;
      for (std::size_t c = 0; c < s.classes; ++c) {
        for (std::size_t m = 0; m < s.instances; ++m) along_instances[m] = instance_mean[m * s.classes + c];
        average[c] = pairwise_mean(along_instances);
        mass += average[c];
      }
      const double au = pairwise_mean(instance_entropy);
      const double tu = entropy_unchecked(average, mass);
      const double eu = tu - au;
      if (eu < -kEuAbortTolerance) {
        throw Error(ErrorKind::InvariantViolation, "mutual information " + std::to_string(eu) + " at (" +
                                                       std::to_string(r) + ", " + std::to_string(w) +
                                                       ") is negative beyond numerical round-off");
      }
      maps.au(r, w) = au;
      maps.tu(r, w) = tu;
      maps.eu(r, w) = std::max(eu, 0.0);
    }
  }
  return maps;
}

UncertaintyMaps decompose_no_eu(const SampleGrid& grid) {
  const auto& s = grid.shape();
  if (s.instances != 1) {
    throw Error(ErrorKind::ShapeError, "No-EU decomposition expects a single model instance, got " + to_string(s));
  }
  if (s.samples < 2) {
    throw Error(ErrorKind::ShapeError,
                "a deterministic model (M = N = 1) has no uncertainty decomposition");
  }
  return decompose(grid.samples_as_instances());
}

}  // namespace uqeval
