#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uqeval/error.hpp"

namespace uqeval {

/// Dense row-major 2-D array.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Image(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::ShapeMismatch, "image buffer holds " + std::to_string(data_.size()) +
                                                " values, expected " + std::to_string(rows_ * cols_));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const auto& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Map = Image<double>;
using LabelMap = Image<std::int32_t>;

/// Throws LabelRangeError if any label falls outside [0, classes).
void validate_labels(const LabelMap& labels, std::size_t classes, const std::string& what = "label map");

enum class Measure { AU, EU, TU };
inline constexpr Measure kMeasures[] = {Measure::AU, Measure::EU, Measure::TU};

std::string_view to_string(Measure m) noexcept;
Measure measure_from_string(std::string_view text);

struct GridShape {
  std::size_t instances = 1;  // M: epistemic model instances
  std::size_t samples = 1;    // N: aleatoric samples per instance
  std::size_t classes = 2;    // C
  std::size_t rows = 1;       // H
  std::size_t cols = 1;       // W

  std::size_t pixels() const noexcept { return rows * cols; }
  std::size_t size() const noexcept { return instances * samples * classes * rows * cols; }
  bool operator==(const GridShape&) const = default;
};

std::string to_string(const GridShape& shape);

/// Per-image probability tensor [M][N][C][H][W] in row-major order.
///
/// Construction validates every class vector: entries must be finite and
/// non-negative (down to -1e-9) and each vector must sum to 1 within 1e-5.
/// Stored values are kept verbatim so that file round-trips are bit-exact;
/// the entropy routines renormalize each vector by its sum when they read it.
class SampleGrid {
 public:
  static constexpr double kSimplexTolerance = 1e-5;
  static constexpr double kNegativeTolerance = 1e-9;

  SampleGrid(GridShape shape, std::vector<double> probs);

  const GridShape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return probs_; }

  std::size_t index(std::size_t m, std::size_t n, std::size_t c, std::size_t r, std::size_t w) const noexcept {
    return (((m * shape_.samples + n) * shape_.classes + c) * shape_.rows + r) * shape_.cols + w;
  }
  double operator()(std::size_t m, std::size_t n, std::size_t c, std::size_t r, std::size_t w) const noexcept {
    return probs_[index(m, n, c, r, w)];
  }

  /// Keeps the first `max_instances` instances and `max_samples` samples.
  SampleGrid truncated(std::size_t max_instances, std::size_t max_samples) const;

  /// Same buffer viewed as [N][1][C][H][W]; only valid when M == 1.
  SampleGrid samples_as_instances() const;

 private:
  struct Trusted {};
  SampleGrid(GridShape shape, std::vector<double> probs, Trusted) : shape_(shape), probs_(std::move(probs)) {}

  GridShape shape_;
  std::vector<double> probs_;
};

/// Per-pixel class probabilities, [C][H][W].
class ClassMap {
 public:
  ClassMap(std::size_t classes, std::size_t rows, std::size_t cols)
      : classes_(classes), rows_(rows), cols_(cols), probs_(classes * rows * cols, 0.0) {}

  std::size_t classes() const noexcept { return classes_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t c, std::size_t r, std::size_t w) noexcept {
    return probs_[(c * rows_ + r) * cols_ + w];
  }
  double operator()(std::size_t c, std::size_t r, std::size_t w) const noexcept {
    return probs_[(c * rows_ + r) * cols_ + w];
  }
  std::span<const double> values() const noexcept { return probs_; }

 private:
  std::size_t classes_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> probs_;
};

/// Bayesian model average of a SampleGrid.
using BmaMap = ClassMap;

/// Per-pixel aleatoric, epistemic and total uncertainty in nats.
struct UncertaintyMaps {
  Map au;
  Map eu;
  Map tu;

  const Map& get(Measure m) const noexcept {
    switch (m) {
      case Measure::AU: return au;
      case Measure::EU: return eu;
      case Measure::TU: return tu;
    }
    return tu;
  }
};

/// Argmax over classes; ties go to the lowest class index.
LabelMap argmax_labels(const BmaMap& bma);

}  // namespace uqeval
