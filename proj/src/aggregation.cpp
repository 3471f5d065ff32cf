#include "uqeval/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "uqeval/reduce.hpp"

namespace uqeval {

namespace {

void require_same_shape(const Map& u, const LabelMap& labels) {
  if (!u.same_shape(labels)) {
    throw Error(ErrorKind::ShapeMismatch, "uncertainty map is " + std::to_string(u.rows()) + "x" +
                                              std::to_string(u.cols()) + " but labels are " +
                                              std::to_string(labels.rows()) + "x" + std::to_string(labels.cols()));
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string strategy_name(const AggregationStrategy& strategy) {
  return std::visit(overloaded{
                        [](const ImageMean&) { return std::string("mean"); },
                        [](const PatchMax& p) { return "patch_max(" + std::to_string(p.patch_side) + ")"; },
                        [](const Threshold&) { return std::string("threshold"); },
                        [](const AreaNormalized&) { return std::string("area"); },
                        [](const BorderNormalized&) { return std::string("border"); },
                    },
                    strategy);
}

double aggregate_mean(const Map& u) {
  if (u.size() == 0) throw Error(ErrorKind::EmptyInput, "cannot aggregate an empty map");
  return pairwise_mean(u.values());
}

double aggregate_patch_max(const Map& u, std::size_t patch_side) {
  if (patch_side < 1 || patch_side > std::min(u.rows(), u.cols())) {
    throw Error(ErrorKind::PatchTooLarge, "patch side " + std::to_string(patch_side) + " does not fit a " +
                                              std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + " map");
  }
  if (patch_side == u.rows() && patch_side == u.cols()) return aggregate_mean(u);

  // Horizontal window sums, then vertical sums of those. Each window is summed
  // directly (no running differences), so a 1x1 patch returns a pixel exactly.
  const std::size_t h = u.rows();
  const std::size_t w = u.cols();
  const std::size_t wc = w - patch_side + 1;
  std::vector<double> rows(h * wc, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < wc; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < patch_side; ++k) s += u(r, c + k);
      rows[r * wc + c] = s;
    }
  }
  const double area = static_cast<double>(patch_side * patch_side);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r + patch_side <= h; ++r) {
    for (std::size_t c = 0; c < wc; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < patch_side; ++k) s += rows[(r + k) * wc + c];
      best = std::max(best, s / area);
    }
  }
  return best;
}

double aggregate_threshold(const Map& u, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::BadConfig, "threshold tau must be >= 0");
  if (u.size() == 0) throw Error(ErrorKind::EmptyInput, "cannot aggregate an empty map");
  const auto above = std::count_if(u.values().begin(), u.values().end(), [tau](double v) { return v > tau; });
  return static_cast<double>(above) / static_cast<double>(u.size());
}

double aggregate_area_normalized(const Map& u, const LabelMap& labels, std::int32_t background_class) {
  require_same_shape(u, labels);
  const auto area = std::count_if(labels.values().begin(), labels.values().end(),
                                  [background_class](std::int32_t l) { return l != background_class; });
  return pairwise_sum(u.values()) / static_cast<double>(std::max<std::ptrdiff_t>(area, 1));
}

std::size_t border_length(const LabelMap& labels) {
  std::size_t count = 0;
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      if (c + 1 < labels.cols() && labels(r, c) != labels(r, c + 1)) ++count;
      if (r + 1 < labels.rows() && labels(r, c) != labels(r + 1, c)) ++count;
    }
  }
  return count;
}

double aggregate_border_normalized(const Map& u, const LabelMap& labels) {
  require_same_shape(u, labels);
  return pairwise_sum(u.values()) / static_cast<double>(std::max<std::size_t>(border_length(labels), 1));
}

double aggregate(const Map& u, const AggregationStrategy& strategy, const LabelMap* labels) {
  const auto need_labels = [labels]() -> const LabelMap& {
    if (labels == nullptr) throw Error(ErrorKind::BadConfig, "aggregation strategy needs a label map");
    return *labels;
  };
  return std::visit(overloaded{
                        [&](const ImageMean&) { return aggregate_mean(u); },
                        [&](const PatchMax& p) { return aggregate_patch_max(u, p.patch_side); },
                        [&](const Threshold& t) { return aggregate_threshold(u, t.tau); },
                        [&](const AreaNormalized& a) {
                          return aggregate_area_normalized(u, need_labels(), a.background_class);
                        },
                        [&](const BorderNormalized&) { return aggregate_border_normalized(u, need_labels()); },
                    },
                    strategy);
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw Error(ErrorKind::BadConfig, "percentile must lie in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace uqeval
