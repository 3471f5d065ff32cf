#pragma once

// Three models over OODD (two OOD splits), AMB (one split) and CAL (two
// splits, lower is better), with ties in OODD/ood:a and CAL/id.
//
//            OODD a  OODD b  | AMB id | CAL id  CAL ood
//   alpha     1       2      |   3    |  1.5     2
//   beta      2.5     1      |   1    |  1.5     1
//   gamma     2.5     3      |   2    |  3       3
//
// Per-task means then task mean:
//   alpha (1.5 + 3 + 1.75) / 3 = 25/12
//   beta  (1.75 + 1 + 1.25) / 3 = 4/3
//   gamma (2.75 + 2 + 3) / 3 = 31/12
// A flat mean over the five cells would give alpha 1.9 instead.

#include <vector>

#include "uqeval/entanglement.hpp"

namespace fixture {

inline std::vector<uqeval::RankInput> rank_inputs() {
  using uqeval::Task;
  return {
      {"alpha", Task::OODD, "ood:a", 0.9, 0.5},  {"beta", Task::OODD, "ood:a", 0.8, 0.5},
      {"gamma", Task::OODD, "ood:a", 0.8, 0.1},  {"alpha", Task::OODD, "ood:b", 0.7, 0.2},
      {"beta", Task::OODD, "ood:b", 0.9, 0.3},   {"gamma", Task::OODD, "ood:b", 0.6, 0.4},
      {"alpha", Task::AMB, "id", 0.1, -0.2},     {"beta", Task::AMB, "id", 0.3, 0.0},
      {"gamma", Task::AMB, "id", 0.2, 0.1},      {"alpha", Task::CAL, "id", 0.05, 0.3},
      {"beta", Task::CAL, "id", 0.05, 0.3},      {"gamma", Task::CAL, "id", 0.1, 0.3},
      {"alpha", Task::CAL, "ood", 0.2, 0.9},     {"beta", Task::CAL, "ood", 0.1, 0.8},
      {"gamma", Task::CAL, "ood", 0.3, 0.7},
  };
}

inline constexpr double kAlpha = 25.0 / 12.0;
inline constexpr double kBeta = 4.0 / 3.0;
inline constexpr double kGamma = 31.0 / 12.0;

}  // namespace fixture
