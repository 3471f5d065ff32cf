#pragma once

// Deliberately naive reference implementations used only by the tests.
// They share no code with the library: plain loops, long double, no
// pairwise summation, no grouping tricks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "uqeval/tensor.hpp"

namespace oracle {

inline long double entropy(const std::vector<long double>& p) {
  long double s = 0.0L;
  for (long double v : p) s += v;
  long double h = 0.0L;
  for (long double v : p) {
    const long double q = v / s;
    if (q > 0.0L) h -= q * std::log(q);
  }
  return h;
}

struct Maps {
  std::vector<long double> au, eu, tu;
};

/// AU = mean_m H(mean_n p), TU = H(mean_{m,n} p), EU = TU - AU (unclamped).
inline Maps decompose(const uqeval::SampleGrid& g) {
  const auto& s = g.shape();
  Maps out;
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t w = 0; w < s.cols; ++w) {
      std::vector<long double> total(s.classes, 0.0L);
      long double au = 0.0L;
      for (std::size_t m = 0; m < s.instances; ++m) {
        std::vector<long double> inst(s.classes, 0.0L);
        for (std::size_t n = 0; n < s.samples; ++n) {
          for (std::size_t c = 0; c < s.classes; ++c) {
            const long double v = g(m, n, c, r, w);
            inst[c] += v / s.samples;
            total[c] += v / (s.samples * s.instances);
          }
        }
        au += entropy(inst);
      }
      au /= s.instances;
      const long double tu = entropy(total);
      out.au.push_back(au);
      out.tu.push_back(tu);
      out.eu.push_back(tu - au);
    }
  }
  return out;
}

/// Fraction of (ood, id) pairs where ood > id, ties counting one half.
inline double auroc(const std::vector<double>& id, const std::vector<double>& ood) {
  long double wins = 0.0L;
  for (double o : ood) {
    for (double i : id) wins += o > i ? 1.0L : (o == i ? 0.5L : 0.0L);
  }
  return static_cast<double>(wins / (static_cast<long double>(id.size()) * ood.size()));
}

/// Every window enumerated explicitly.
inline double patch_max(const uqeval::Map& u, std::size_t k) {
  long double best = -1e300L;
  for (std::size_t r0 = 0; r0 + k <= u.rows(); ++r0) {
    for (std::size_t c0 = 0; c0 + k <= u.cols(); ++c0) {
      long double s = 0.0L;
      for (std::size_t r = r0; r < r0 + k; ++r) {
        for (std::size_t c = c0; c < c0 + k; ++c) s += u(r, c);
      }
      best = std::max(best, s / (k * k));
    }
  }
  return static_cast<double>(best);
}

inline long double iou_distance(const uqeval::LabelMap& a, const uqeval::LabelMap& b, std::size_t classes) {
  long double total = 0.0L;
  for (std::size_t c = 1; c < classes; ++c) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const bool x = a[i] == static_cast<std::int32_t>(c);
      const bool y = b[i] == static_cast<std::int32_t>(c);
      inter += x && y;
      uni += x || y;
    }
    total += uni == 0 ? 1.0L : static_cast<long double>(inter) / uni;
  }
  return 1.0L - total / (classes - 1);
}

/// sqrt(2 E d(s,y) - E d(s,s') - E d(y,y')) over all ordered pairs, with the
/// energy computed exactly: every IoU is scaled by lcm(1..pixels) into an
/// integer, so the only rounding is the final division and square root.
/// Exact for masks of up to 40 pixels.
inline double ged(const std::vector<uqeval::LabelMap>& s, const std::vector<uqeval::LabelMap>& y,
                  std::size_t classes) {
  using i128 = __int128;
  const std::size_t pixels = s.front().size();
  if (pixels > 40) throw std::logic_error("oracle::ged is limited to 40 pixels");
  i128 lcm = 1;
  for (std::size_t k = 2; k <= pixels; ++k) {
    i128 a = lcm, b = static_cast<i128>(k);
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    lcm = lcm / a * static_cast<i128>(k);
  }
  // L * sum over foreground classes of IoU(a, b).
  const auto scaled = [&](const uqeval::LabelMap& a, const uqeval::LabelMap& b) {
    i128 total = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      i128 inter = 0, uni = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] == static_cast<std::int32_t>(c);
        const bool z = b[i] == static_cast<std::int32_t>(c);
        inter += x && z;
        uni += x || z;
      }
      total += uni == 0 ? lcm : lcm / uni * inter;
    }
    return total;
  };
  i128 sy = 0, ss = 0, yy = 0;
  for (const auto& a : s) {
    for (const auto& b : y) sy += scaled(a, b);
  }
  for (const auto& a : s) {
    for (const auto& b : s) ss += scaled(a, b);
  }
  for (const auto& a : y) {
    for (const auto& b : y) yy += scaled(a, b);
  }
  const i128 ns = static_cast<i128>(s.size()), ny = static_cast<i128>(y.size());
  // d = 1 - IoU_mean, and the constant terms cancel in the energy.
  const i128 num = ny * ny * ss + ns * ns * yy - 2 * ns * ny * sy;
  const i128 den = lcm * static_cast<i128>(classes - 1) * ns * ns * ny * ny;
  if (num <= 0) return 0.0;
  return static_cast<double>(std::sqrt(static_cast<long double>(num) / static_cast<long double>(den)));
}

inline double ncc(const uqeval::Map& a, const uqeval::Map& b) {
  const std::size_t n = a.size();
  long double ma = 0.0L, mb = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  long double sab = 0.0L, saa = 0.0L, sbb = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0L || sbb == 0.0L) return 0.0;
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

/// Random valid grid: each class vector drawn from a flat Dirichlet, with
/// occasional exact one-hot vectors to exercise the 0 ln 0 branch.
inline uqeval::SampleGrid random_grid(std::mt19937_64& rng, const uqeval::GridShape& s) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> probs(s.size());
  const auto at = [&](std::size_t m, std::size_t n, std::size_t c, std::size_t r, std::size_t w) -> double& {
    return probs[(((m * s.samples + n) * s.classes + c) * s.rows + r) * s.cols + w];
  };
  for (std::size_t m = 0; m < s.instances; ++m) {
    for (std::size_t n = 0; n < s.samples; ++n) {
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t w = 0; w < s.cols; ++w) {
          if (unit(rng) < 0.1) {
            const std::size_t hot = static_cast<std::size_t>(unit(rng) * s.classes) % s.classes;
            for (std::size_t c = 0; c < s.classes; ++c) at(m, n, c, r, w) = c == hot ? 1.0 : 0.0;
            continue;
          }
          double z = 0.0;
          for (std::size_t c = 0; c < s.classes; ++c) z += at(m, n, c, r, w) = gamma(rng);
          for (std::size_t c = 0; c < s.classes; ++c) at(m, n, c, r, w) /= z;
        }
      }
    }
  }
  return uqeval::SampleGrid(s, std::move(probs));
}

}  // namespace oracle
