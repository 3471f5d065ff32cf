#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uqeval/pipeline.hpp"

namespace uqeval {

/// One merged (model, task, split) row: seed means of the three task scores
/// and of the entanglement score.
struct MergedRow {
  std::string model_id;
  Task task = Task::OODD;
  std::string split;
  std::array<double, 3> scores{};
  Measure correct = Measure::EU;
  Measure wrong = Measure::AU;
  double delta = 0.0;
  bool floored = false;
  bool degenerate = false;
  std::size_t runs = 0;
};

struct RankSummary {
  std::string model_id;
  MeanInterval performance;
  MeanInterval delta;
  std::map<Task, MeanInterval> performance_by_task;
  std::map<Task, MeanInterval> delta_by_task;
};

/// Rows of all bundles grouped by (model, task, split) in first-seen order.
std::vector<MergedRow> merge_rows(std::span<const ResultBundle> bundles);

/// Run k of every model is its k-th bundle in seed order. Each run is ranked
/// on its own; the per-model ranks are then summarized as mean and 95%
/// Student-t half-width over runs. Sorted by mean performance rank, then id.
std::vector<RankSummary> summarize_ranks(std::span<const ResultBundle> bundles);

/// Writes oodd.csv, amb.csv, cal.csv (tasks present in the bundles only),
/// ranks.csv, scatter.json and run_metadata.json into `out_dir`.
/// Every floating-point value is printed with 6 significant digits.
std::vector<std::filesystem::path> emit_reports(std::span<const ResultBundle> bundles,
                                                const std::filesystem::path& out_dir);

}  // namespace uqeval
