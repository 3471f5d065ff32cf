#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "uqeval/tensor.hpp"

namespace uqeval {

// Reduction of a pixel-wise uncertainty map to one image-level OOD score.

struct ImageMean {};
struct PatchMax {
  std::size_t patch_side = 10;
};
struct Threshold {
  double tau = 0.0;
};
struct AreaNormalized {
  std::int32_t background_class = 0;
};
struct BorderNormalized {};

using AggregationStrategy = std::variant<ImageMean, PatchMax, Threshold, AreaNormalized, BorderNormalized>;

std::string strategy_name(const AggregationStrategy& strategy);

double aggregate_mean(const Map& u);

/// Maximum over all stride-1 patch_side x patch_side windows of the window mean.
double aggregate_patch_max(const Map& u, std::size_t patch_side);

/// Fraction of pixels strictly above tau.
double aggregate_threshold(const Map& u, double tau);

/// Sum of u divided by the foreground area (pixels not labelled
/// background_class), or by 1 when the area is zero.
double aggregate_area_normalized(const Map& u, const LabelMap& labels, std::int32_t background_class);

/// Number of 4-connected neighbouring pixel pairs whose labels differ.
std::size_t border_length(const LabelMap& labels);

/// Sum of u divided by border_length(labels), or by 1 when it is zero.
double aggregate_border_normalized(const Map& u, const LabelMap& labels);

/// Dispatches on the strategy. `labels` is required by the area and border variants.
double aggregate(const Map& u, const AggregationStrategy& strategy, const LabelMap* labels = nullptr);

/// Linear-interpolation percentile (numpy's default), q in [0, 100].
double percentile(std::span<const double> values, double q);

}  // namespace uqeval
