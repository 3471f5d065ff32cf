#include "uqeval/tensor.hpp"

#include <cmath>
#include <sstream>

namespace uqeval {

void validate_labels(const LabelMap& labels, std::size_t classes, const std::string& what) {
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      const auto v = labels(r, c);
      if (v < 0 || static_cast<std::size_t>(v) >= classes) {
        throw Error(ErrorKind::LabelRangeError, what + ": label " + std::to_string(v) + " at (" +
                                                    std::to_string(r) + ", " + std::to_string(c) +
                                                    ") outside [0, " + std::to_string(classes) + ")");
      }
    }
  }
}

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::AU: return "AU";
    case Measure::EU: return "EU";
    case Measure::TU: return "TU";
  }
  return "?";
}

Measure measure_from_string(std::string_view text) {
  if (text == "AU" || text == "au") return Measure::AU;
  if (text == "EU" || text == "eu") return Measure::EU;
  if (text == "TU" || text == "tu") return Measure::TU;
  throw Error(ErrorKind::BadConfig, "unknown measure '" + std::string(text) + "'");
}

std::string to_string(const GridShape& s) {
  std::ostringstream out;
  out << '[' << s.instances << "][" << s.samples << "][" << s.classes << "][" << s.rows << "][" << s.cols << ']';
  return out.str();
}

SampleGrid::SampleGrid(GridShape shape, std::vector<double> probs) : shape_(shape), probs_(std::move(probs)) {
  if (shape_.instances < 1 || shape_.samples < 1 || shape_.classes < 2 || shape_.rows < 1 || shape_.cols < 1) {
    throw Error(ErrorKind::ShapeError, "invalid grid shape " + to_string(shape_) + " (need M, N, H, W >= 1 and C >= 2)");
  }
  if (probs_.size() != shape_.size()) {
    throw Error(ErrorKind::ShapeError, "grid buffer holds " + std::to_string(probs_.size()) + " values, shape " +
                                           to_string(shape_) + " needs " + std::to_string(shape_.size()));
  }
  const auto where = [](std::size_t m, std::size_t n, std::size_t c, std::size_t r, std::size_t w) {
    std::ostringstream out;
    out << "(m=" << m << ", n=" << n << ", c=" << c << ", row=" << r << ", col=" << w << ')';
    return out.str();
  };
  for (std::size_t m = 0; m < shape_.instances; ++m) {
    for (std::size_t n = 0; n < shape_.samples; ++n) {
      for (std::size_t r = 0; r < shape_.rows; ++r) {
        for (std::size_t w = 0; w < shape_.cols; ++w) {
          double sum = 0.0;
          for (std::size_t c = 0; c < shape_.classes; ++c) {
            const double p = probs_[index(m, n, c, r, w)];
            if (!std::isfinite(p)) {
              throw Error(ErrorKind::NonFiniteData, "non-finite probability at " + where(m, n, c, r, w));
            }
            if (p < -kNegativeTolerance) {
              throw Error(ErrorKind::NegativeProbability,
                          "probability " + std::to_string(p) + " at " + where(m, n, c, r, w));
            }
            sum += p;
          }
          if (std::abs(sum - 1.0) > kSimplexTolerance) {
            throw Error(ErrorKind::NonNormalized,
                        "class vector sums to " + std::to_string(sum) + " at " + where(m, n, 0, r, w));
          }
        }
      }
    }
  }
}

SampleGrid SampleGrid::truncated(std::size_t max_instances, std::size_t max_samples) const {
  if (max_instances >= shape_.instances && max_samples >= shape_.samples) return *this;
  GridShape out = shape_;
  out.instances = std::min(max_instances, shape_.instances);
  out.samples = std::min(max_samples, shape_.samples);
  if (out.instances < 1 || out.samples < 1) {
    throw Error(ErrorKind::ShapeError, "cannot truncate a grid to zero instances or samples");
  }
  const std::size_t block = shape_.classes * shape_.pixels();
  std::vector<double> probs;
  probs.reserve(out.size());
  for (std::size_t m = 0; m < out.instances; ++m) {
    for (std::size_t n = 0; n < out.samples; ++n) {
      const auto first = probs_.begin() + static_cast<std::ptrdiff_t>(index(m, n, 0, 0, 0));
      probs.insert(probs.end(), first, first + static_cast<std::ptrdiff_t>(block));
    }
  }
  return SampleGrid(out, std::move(probs), Trusted{});
}

SampleGrid SampleGrid::samples_as_instances() const {
  if (shape_.instances != 1) {
    throw Error(ErrorKind::ShapeError, "samples can only be reinterpreted as instances when M == 1, got " +
                                           to_string(shape_));
  }
  GridShape out = shape_;
  out.instances = shape_.samples;
  out.samples = 1;
  return SampleGrid(out, probs_, Trusted{});
}

LabelMap argmax_labels(const BmaMap& bma) {
  LabelMap labels(bma.rows(), bma.cols(), 0);
  for (std::size_t r = 0; r < bma.rows(); ++r) {
    for (std::size_t w = 0; w < bma.cols(); ++w) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < bma.classes(); ++c) {
        if (bma(c, r, w) > bma(best, r, w)) best = c;
      }
      labels(r, w) = static_cast<std::int32_t>(best);
    }
  }
  return labels;
}

}  // namespace uqeval
