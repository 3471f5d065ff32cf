#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqeval/aggregation.hpp"
#include "uqeval/entanglement.hpp"

namespace uqeval {

enum class AggregationKind { Mean, PatchMax, Threshold, Area, Border };
std::string_view to_string(AggregationKind k) noexcept;
AggregationKind aggregation_from_string(std::string_view text);

struct AggregationConfig {
  AggregationKind kind = AggregationKind::Border;
  std::size_t patch_side = 10;
  std::optional<double> tau;            // threshold; unset = percentile of ID validation pixels
  double threshold_percentile = 95.0;   // per measure
  std::optional<std::int32_t> background_class;  // unset = manifest value
};

struct RunConfig {
  std::string model_id = "model";
  AggregationConfig aggregation;
  std::size_t au_samples = 10;    // use at most N aleatoric samples per instance
  std::size_t eu_instances = 10;  // use at most M instances
  std::size_t ace_bins = 20;
  bool ace_per_image = false;
  CalWrongMeasure cal_wrong = CalWrongMeasure::AU;
  std::size_t platt_subsample_cap = 2'000'000;
  std::uint64_t seed = 0;
  std::vector<Task> tasks = {Task::OODD, Task::AMB, Task::CAL};
  bool segmentation_metrics = false;

  // Execution-only settings; never part of the echoed configuration.
  std::size_t threads = 0;  // 0 = default_thread_count()

  void validate() const;
  bool runs(Task t) const;
};

/// Parses a JSON object; unknown keys are rejected. Missing keys keep defaults.
RunConfig parse_run_config(const std::string& json_text, RunConfig base = {});
/// Canonical JSON echo (excludes execution-only settings).
std::string run_config_to_json(const RunConfig& config);

}  // namespace uqeval
