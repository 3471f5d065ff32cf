#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uqeval/config.hpp"
#include "uqeval/entanglement.hpp"
#include "uqeval/manifest.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/platt.hpp"
#include "uqeval/synthetic.hpp"

namespace uqeval {

/// One image as seen by the pipeline. Grids and annotations are loaded
/// lazily so that only the per-image maps stay resident.
struct PipelineImage {
  std::string image_id;
  std::string split;  // "id" or "ood:<tag>"
  std::string role;   // train images are ignored
  std::function<SampleGrid()> load_grid;
  std::function<std::vector<LabelMap>()> load_annotations;
};

struct PipelineDataset {
  std::string dataset_name;
  std::string seed_tag;
  std::size_t class_count = 2;
  std::int32_t background_class = 0;
  std::vector<PipelineImage> images;
  std::vector<std::string> warnings;
};

PipelineDataset from_manifest(const DatasetManifest& manifest);
/// The returned loaders reference `dataset`, which must outlive them.
PipelineDataset from_synthetic(const SyntheticDataset& dataset);

/// Scores of one (task, split) cell for all three measures.
struct TaskRow {
  Task task = Task::OODD;
  std::string split;
  std::array<double, 3> scores{};  // indexed by Measure
  Measure correct = Measure::EU;
  Measure wrong = Measure::AU;
  int sign = 1;
  DeltaValue delta;
  std::size_t images = 0;
  // Cell name used for ranking; empty for per-tag rows that are summarized
  // by an "ood" mean row.
  std::string rank_split;

  double score(Measure m) const noexcept { return scores[static_cast<std::size_t>(m)]; }
};

struct SplitCollapse {
  std::string split;
  CollapseRatio ratio;
  std::size_t images = 0;
};

struct SegmentationRow {
  std::string split;
  double dice = 0.0;
  double ged = 0.0;
  std::size_t images = 0;
};

struct ScoredImage {
  std::string image_id;
  std::string split;
  std::string role;
  std::size_t instances = 0;  // M after the eu_instances cap
  std::size_t samples = 0;    // N after the au_samples cap
  std::array<double, 3> mean{};        // image-mean AU, EU, TU
  std::array<double, 3> aggregated{};  // OODD image score (test images)
  std::optional<std::array<double, 3>> ncc;  // AMB, when >= 2 annotations
  std::optional<double> dice;
  std::optional<double> ged;
};

struct ResultBundle {
  std::string model_id;
  std::string dataset_name;
  std::string seed_tag;
  std::uint64_t seed = 0;
  std::string route;  // kendall_gal, no_eu or mixed
  std::string config_json;
  std::vector<TaskRow> rows;
  std::vector<SplitCollapse> collapse;
  std::vector<SegmentationRow> segmentation;
  std::vector<PlattParams> platt;
  std::optional<std::array<double, 3>> thresholds;
  std::vector<std::string> warnings;
  std::vector<ScoredImage> images;
};

/// Decomposes every val/test image, scores the selected tasks per split and
/// computes the entanglement score of every row. Deterministic for a given
/// dataset and configuration; the worker count never changes the result.
/// When `maps_dir` is set, the [3][H][W] uncertainty maps of each test image
/// are written there as <image_id>.npy.
ResultBundle run_pipeline(const PipelineDataset& dataset, const RunConfig& config,
                          const std::optional<std::filesystem::path>& maps_dir = std::nullopt);
ResultBundle run_pipeline(const DatasetManifest& manifest, const RunConfig& config,
                          const std::optional<std::filesystem::path>& maps_dir = std::nullopt);

/// The maps of one image, computed the way run_pipeline does.
UncertaintyMaps evaluate_image(const PipelineImage& image, const RunConfig& config);

/// Lossless JSON form (full double precision).
std::string bundle_to_json(const ResultBundle& bundle);
ResultBundle bundle_from_json(const std::string& text);
void save_bundle(const ResultBundle& bundle, const std::filesystem::path& path);
ResultBundle load_bundle(const std::filesystem::path& path);

}  // namespace uqeval
