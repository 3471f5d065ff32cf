#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "uqeval/tensor.hpp"

namespace uqeval {

enum class Task { OODD, AMB, CAL };
inline constexpr Task kTasks[] = {Task::OODD, Task::AMB, Task::CAL};

std::string_view to_string(Task t) noexcept;
Task task_from_string(std::string_view text);

/// Which measure counts as "wrong" for calibration. BestOfBoth picks whichever
/// of AU and EU reaches the better (lower) ACE.
enum class CalWrongMeasure { AU, EU, BestOfBoth };
std::string_view to_string(CalWrongMeasure w) noexcept;
CalWrongMeasure cal_wrong_from_string(std::string_view text);

struct TaskSpec {
  Task task;
  Measure correct;
  Measure wrong;  // for CAL with BestOfBoth this is AU; resolve per result with pick_wrong_measure
  int sign;       // -1 when a lower task metric is better
  bool higher_is_better() const noexcept { return sign > 0; }
};

TaskSpec assign_measures(Task task, CalWrongMeasure cal_wrong = CalWrongMeasure::AU);

/// Resolves the wrong measure for one set of task scores (matters only for BestOfBoth).
Measure pick_wrong_measure(const TaskSpec& spec, CalWrongMeasure cal_wrong, double score_au, double score_eu);

struct DeltaValue {
  double value = 0.0;
  bool floored = false;     // a negative input was raised to 0
  bool degenerate = false;  // both inputs were 0 after flooring
};

/// Angle-based entanglement score s * (atan2(u_c, u_w) - pi/4) / (pi/4).
/// Negative inputs are floored at 0; both zero gives 0 with the degenerate flag.
DeltaValue delta(double u_correct, double u_wrong, int sign);

struct CollapseRatio {
  double value = 0.0;
  bool infinite = false;
};

/// (mean over images of image-mean EU) / (mean over images of image-mean AU).
CollapseRatio collapse_ratio(std::span<const double> image_mean_eu, std::span<const double> image_mean_au);
CollapseRatio collapse_ratio(std::span<const UncertaintyMaps> maps);

/// One scored cell of a results table.
struct RankInput {
  std::string model_id;
  Task task;
  std::string split;
  double performance;  // the correct measure's task metric
  double delta;
};

struct ModelRank {
  std::string model_id;
  double performance_rank = 0.0;
  double delta_rank = 0.0;
  std::map<Task, double> performance_rank_by_task;
  std::map<Task, double> delta_rank_by_task;
};

/// Ranks models within every (task, split) cell (1 = best, average rank for
/// ties), averages over splits within a task and then over tasks.
/// Throws MissingCell when some model lacks a cell another model has.
std::vector<ModelRank> rank_models(std::span<const RankInput> results);

/// Average ranks (1-based) of `values`; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values, bool higher_is_better);

struct MeanInterval {
  double mean = 0.0;
  double half_width = 0.0;  // 0 when fewer than two values
  std::size_t count = 0;
};

/// Mean and Student-t confidence half-width for the mean.
MeanInterval t_interval(std::span<const double> values, double confidence = 0.95);

}  // namespace uqeval
