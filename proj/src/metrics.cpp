#include "uqeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "uqeval/reduce.hpp"

namespace uqeval {

namespace {

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                              std::to_string(b.cols()));
  }
}

std::vector<std::size_t> vote_counts(const AnnotationSet& ann, std::size_t classes, std::size_t pixel) {
  std::vector<std::size_t> counts(classes, 0);
  for (const auto& a : ann.maps()) {
    const auto label = a[pixel];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw Error(ErrorKind::LabelRangeError, "annotation label " + std::to_string(label) + " outside [0, " +
                                                  std::to_string(classes) + ")");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  return counts;
}

long double iou_distance_ld(const LabelMap& a, const LabelMap& b, std::size_t classes) {
  require_same_shape(a, b, "IoU inputs differ in shape");
  if (classes < 2) throw Error(ErrorKind::BadConfig, "IoU needs at least one foreground class");
  long double total = 0.0L;
  for (std::size_t c = 1; c < classes; ++c) {
    const auto label = static_cast<std::int32_t>(c);
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool in_a = a[i] == label;
      const bool in_b = b[i] == label;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
    total += uni == 0 ? 1.0L : static_cast<long double>(inter) / static_cast<long double>(uni);
  }
  return 1.0L - total / static_cast<long double>(classes - 1);
}

}  // namespace

AnnotationSet::AnnotationSet(std::vector<LabelMap> annotations) : annotations_(std::move(annotations)) {
  if (annotations_.empty()) throw Error(ErrorKind::EmptyInput, "an annotation set needs at least one label map");
  for (const auto& a : annotations_) require_same_shape(annotations_.front(), a, "annotation shapes differ");
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    throw Error(ErrorKind::EmptySplit, "AUROC needs at least one ID and one OOD score");
  }
  std::vector<std::pair<double, bool>> all;
  all.reserve(id_scores.size() + ood_scores.size());
  for (double s : id_scores) all.emplace_back(s, false);
  for (double s : ood_scores) all.emplace_back(s, true);
  for (const auto& [s, _] : all) {
    if (!std::isfinite(s)) throw Error(ErrorKind::NonFinite, "AUROC received a non-finite score");
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  // Ranks are 1-based; a tie group spanning [i, j) shares the midrank.
  double ood_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].second) ood_rank_sum += midrank;
    }
    i = j;
  }
  const auto n_ood = static_cast<double>(ood_scores.size());
  const auto n_id = static_cast<double>(id_scores.size());
  const double u = ood_rank_sum - n_ood * (n_ood + 1.0) / 2.0;
  return u / (n_ood * n_id);
}

Map annotator_variance_map(const AnnotationSet& annotations, std::size_t classes) {
  Map out(annotations.rows(), annotations.cols(), 0.0);
  const auto raters = static_cast<double>(annotations.raters());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto counts = vote_counts(annotations, classes, i);
    double v = 0.0;
    for (std::size_t n : counts) {
      const double f = static_cast<double>(n) / raters;
      v += f * (1.0 - f);
    }
    out[i] = v;
  }
  return out;
}

double ncc(const Map& a, const Map& b) {
  require_same_shape(a, b, "NCC inputs differ in shape");
  if (a.size() < 2) throw Error(ErrorKind::EmptyInput, "NCC needs at least two pixels");
  const auto constant = [](const Map& m) {
    const auto [lo, hi] = std::minmax_element(m.values().begin(), m.values().end());
    return *lo == *hi;
  };
  if (constant(a) || constant(b)) return 0.0;

  const double mean_a = pairwise_mean(a.values());
  const double mean_b = pairwise_mean(b.values());
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sxx += da * da;
    syy += db * db;
    sxy += da * db;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double amb_score(std::span<const AnnotationSet> annotations, std::span<const UncertaintyMaps> maps,
                 std::size_t classes, Measure measure) {
  if (annotations.size() != maps.size()) {
    throw Error(ErrorKind::ShapeMismatch, "annotation and uncertainty lists differ in length");
  }
  if (annotations.empty()) throw Error(ErrorKind::EmptySplit, "ambiguity score over an empty split");
  std::vector<double> per_image(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (annotations[i].raters() < 2) {
      throw Error(ErrorKind::ShapeError, "ambiguity scoring needs at least two annotations per image");
    }
    per_image[i] = ncc(annotator_variance_map(annotations[i], classes), maps[i].get(measure));
  }
  return pairwise_mean(per_image);
}

LabelMap majority_vote(const AnnotationSet& annotations, std::size_t classes) {
  LabelMap out(annotations.rows(), annotations.cols(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto counts = vote_counts(annotations, classes, i);
    out[i] = static_cast<std::int32_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  return out;
}

Image<std::uint8_t> correctness_map(const BmaMap& bma, const AnnotationSet& annotations) {
  require_same_shape(bma, annotations, "BMA and annotations differ in shape");
  const LabelMap predicted = argmax_labels(bma);
  const LabelMap reference = majority_vote(annotations, bma.classes());
  Image<std::uint8_t> out(bma.rows(), bma.cols(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predicted[i] == reference[i] ? 1 : 0;
  return out;
}

double ace(std::span<const double> confidences, std::span<const std::uint8_t> correct, std::size_t bins) {
  if (bins < 1) throw Error(ErrorKind::BadConfig, "ACE needs at least one bin");
  if (confidences.size() != correct.size()) {
    throw Error(ErrorKind::ShapeMismatch, "confidences and correctness labels differ in length");
  }
  if (confidences.empty()) throw Error(ErrorKind::EmptyInput, "ACE over no pixels");

  struct Bin {
    std::size_t count = 0;
    std::size_t hits = 0;
    double anchor = 0.0;     // first confidence seen in the bin
    double deviation = 0.0;  // sum of (confidence - anchor)
  };
  std::vector<Bin> table(bins);
  const auto nbins = static_cast<double>(bins);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorKind::BadConfig, "confidence " + std::to_string(c) + " outside [0, 1]");
    }
    const auto k = std::min(static_cast<std::size_t>(c * nbins), bins - 1);
    Bin& b = table[k];
    if (b.count == 0) b.anchor = c;
    ++b.count;
    b.hits += correct[i] != 0 ? 1 : 0;
    b.deviation += c - b.anchor;
  }
  double gap_sum = 0.0;
  std::size_t occupied = 0;
  for (const Bin& b : table) {
    if (b.count == 0) continue;
    const auto n = static_cast<double>(b.count);
    const double mean_conf = b.anchor + b.deviation / n;
    const double accuracy = static_cast<double>(b.hits) / n;
    gap_sum += std::abs(mean_conf - accuracy);
    ++occupied;
  }
  return gap_sum / static_cast<double>(occupied);
}

double dice(const LabelMap& pred, const LabelMap& ref, std::size_t classes) {
  require_same_shape(pred, ref, "Dice inputs differ in shape");
  if (classes < 2) throw Error(ErrorKind::BadConfig, "Dice needs at least one foreground class");
  double total = 0.0;
  for (std::size_t c = 1; c < classes; ++c) {
    const auto label = static_cast<std::int32_t>(c);
    std::size_t p = 0, r = 0, both = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool in_p = pred[i] == label;
      const bool in_r = ref[i] == label;
      p += in_p;
      r += in_r;
      both += in_p && in_r;
    }
    total += (p + r == 0) ? 1.0 : 2.0 * static_cast<double>(both) / static_cast<double>(p + r);
  }
  return total / static_cast<double>(classes - 1);
}

double iou_distance(const LabelMap& a, const LabelMap& b, std::size_t classes) {
  return static_cast<double>(iou_distance_ld(a, b, classes));
}

namespace {

// Identical masks are common (e.g. one-hot samples of a confident model), so
// the energy is taken over the distinct masks of both sets. With q = p_s - p_y
// on the union support, 2 E d(s,y) - E d(s,s') - E d(y,y') = -q^T D q.
// Equal empirical distributions give q == 0 exactly, hence GED == 0.
struct SignedSupport {
  std::vector<const LabelMap*> masks;
  std::vector<std::size_t> count_s;
  std::vector<std::size_t> count_y;
};

void add_masks(SignedSupport& u, std::map<std::vector<std::int32_t>, std::size_t>& index,
               std::span<const LabelMap> maps, bool is_sample) {
  for (const auto& m : maps) {
    std::vector<std::int32_t> key(m.values().begin(), m.values().end());
    auto [it, inserted] = index.try_emplace(std::move(key), u.masks.size());
    if (inserted) {
      u.masks.push_back(&m);
      u.count_s.push_back(0);
      u.count_y.push_back(0);
    }
    ++(is_sample ? u.count_s : u.count_y)[it->second];
  }
}

}  // namespace

double ged(std::span<const LabelMap> samples, std::span<const LabelMap> annotations, std::size_t classes) {
  if (samples.empty() || annotations.empty()) {
    throw Error(ErrorKind::EmptyInput, "GED needs at least one sample and one annotation");
  }
  for (const auto& s : samples) require_same_shape(s, annotations.front(), "GED mask shapes differ");
  for (const auto& a : annotations) require_same_shape(a, annotations.front(), "GED mask shapes differ");
  SignedSupport u;
  std::map<std::vector<std::int32_t>, std::size_t> index;
  add_masks(u, index, samples, true);
  add_masks(u, index, annotations, false);

  const std::size_t k = u.masks.size();
  std::vector<long double> q(k);
  for (std::size_t i = 0; i < k; ++i) {
    q[i] = static_cast<long double>(u.count_s[i]) / samples.size() -
           static_cast<long double>(u.count_y[i]) / annotations.size();
  }
  long double energy = 0.0L;
  for (std::size_t i = 0; i < k; ++i) {
    if (q[i] == 0.0L) continue;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (q[j] == 0.0L) continue;
      energy -= 2.0L * q[i] * q[j] * iou_distance_ld(*u.masks[i], *u.masks[j], classes);
    }
  }
  return static_cast<double>(std::sqrt(std::max(energy, 0.0L)));
}

}  // namespace uqeval
