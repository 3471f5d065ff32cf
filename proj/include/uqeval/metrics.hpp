#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqeval/tensor.hpp"

namespace uqeval {

/// R >= 1 label maps of identical shape for one image.
class AnnotationSet {
 public:
  explicit AnnotationSet(std::vector<LabelMap> annotations);

  std::size_t raters() const noexcept { return annotations_.size(); }
  std::size_t rows() const noexcept { return annotations_.front().rows(); }
  std::size_t cols() const noexcept { return annotations_.front().cols(); }
  const LabelMap& operator[](std::size_t r) const noexcept { return annotations_[r]; }
  std::span<const LabelMap> maps() const noexcept { return annotations_; }

 private:
  std::vector<LabelMap> annotations_;
};

/// Rank-based AUROC with OOD as the positive class; tied scores get midranks.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Per pixel, sum over classes of the population variance of the one-hot
/// annotator votes: sum_c f_c (1 - f_c).
Map annotator_variance_map(const AnnotationSet& annotations, std::size_t classes);

/// Zero-mean normalized cross-correlation with population statistics.
/// Returns 0 when either map is constant.
double ncc(const Map& a, const Map& b);

/// Mean over images of ncc(annotator variance, chosen uncertainty map).
/// Every image needs at least two annotations.
double amb_score(std::span<const AnnotationSet> annotations, std::span<const UncertaintyMaps> maps,
                 std::size_t classes, Measure measure);

/// Per-pixel majority vote; ties go to the lowest class index.
LabelMap majority_vote(const AnnotationSet& annotations, std::size_t classes);

/// 1 where argmax of the BMA equals the majority-vote label, else 0.
Image<std::uint8_t> correctness_map(const BmaMap& bma, const AnnotationSet& annotations);

/// Average calibration error: unweighted mean of |mean confidence - accuracy|
/// over the non-empty bins of an equal-width partition of [0, 1].
/// The last bin is closed on the right.
double ace(std::span<const double> confidences, std::span<const std::uint8_t> correct, std::size_t bins = 20);

/// Mean over foreground classes [1, C) of the Dice coefficient; a class
/// absent from both maps scores 1.
double dice(const LabelMap& pred, const LabelMap& ref, std::size_t classes);

/// 1 - mean foreground IoU, with empty-vs-empty IoU = 1.
double iou_distance(const LabelMap& a, const LabelMap& b, std::size_t classes);

/// Generalized energy distance between predicted samples and annotations
/// under iou_distance, using V-statistics over all ordered pairs.
double ged(std::span<const LabelMap> samples, std::span<const LabelMap> annotations, std::size_t classes);

}  // namespace uqeval
