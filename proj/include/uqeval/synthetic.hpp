#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uqeval/metrics.hpp"
#include "uqeval/tensor.hpp"

namespace uqeval {

// Toy segmentation worlds with known aleatoric and epistemic structure.
//
// Recipe (version 1), for image i and class c:
//   logit_c(r, w) = amplitude / sqrt(cosines) *
//                   sum_j cos(2 pi (fx_j w / W + fy_j r / H) + phase_j)
//   fx_j, fy_j ~ U(-max_frequency, max_frequency), phase_j ~ U(0, 2 pi)
//   annotator_dist = softmax(logit / temperature)
//   instance k     = softmax(logit / temperature + perturbation_scale * eps_k
//                            + [ood] ood_shift * xi_k)
// eps_k is i.i.d. standard normal per (class, pixel); xi_k is one standard
// normal per (instance, class), so on OOD images each instance is biased in
// its own direction and the instances disagree more.
// All randomness comes from CounterRng streams keyed by the world seed.

struct WorldConfig {
  std::size_t classes = 2;
  std::size_t rows = 16;
  std::size_t cols = 16;
  std::size_t instances = 10;  // K
  double perturbation_scale = 0.5;
  double ood_shift = 1.0;
  double amplitude = 3.0;
  double temperature = 1.0;
  std::size_t cosines = 8;
  double max_frequency = 2.0;
  std::uint64_t seed = 0;
  int recipe_version = 1;

  void validate() const;
};

/// Fields of one synthetic image.
struct ImageFields {
  ClassMap annotator_dist;
  std::vector<ClassMap> model_family;  // K predictive fields
};

struct SyntheticWorld {
  WorldConfig config;
  ClassMap annotator_dist;             // image 0, in-distribution
  std::vector<ClassMap> model_family;  // image 0, in-distribution
};

SyntheticWorld generate_world(const WorldConfig& config);

/// Deterministic fields for image `index`; `ood` adds the per-instance bias.
ImageFields image_fields(const SyntheticWorld& world, std::size_t index, bool ood);

enum class SampleMode {
  OneHot,   // categorical draws, one-hot encoded
  Soft,     // 0.5 * p_k + 0.5 * one-hot draw (same expectation as p_k)
  Softmax,  // N = 1, the predictive field itself
};
std::string_view to_string(SampleMode mode) noexcept;
SampleMode sample_mode_from_string(std::string_view text);

struct DatasetConfig {
  std::size_t images = 100;
  std::size_t annotators = 4;
  std::size_t au_samples = 10;  // N
  SampleMode mode = SampleMode::OneHot;
  double val_fraction = 0.2;
  double ood_fraction = 0.5;  // of the test images
  std::string ood_tag = "shift";
  std::string dataset_name = "synthetic";

  void validate() const;
};

struct SyntheticImage {
  std::string image_id;
  std::size_t index = 0;
  bool ood = false;
  std::string split;  // "id" or "ood:<tag>"
  std::string role;   // "val" or "test"
  SampleGrid grid;
  AnnotationSet annotations;
};

struct SyntheticDataset {
  std::string dataset_name;
  std::size_t classes = 2;
  std::uint64_t seed = 0;
  std::vector<SyntheticImage> images;
};

/// Validation images come first and are always in-distribution; the last
/// ood_fraction of the test images are OOD.
SyntheticDataset sample_dataset(const SyntheticWorld& world, const DatasetConfig& config);

/// Draws one grid of `samples` aleatoric samples for every instance.
SampleGrid sample_grid(const SyntheticWorld& world, const ImageFields& fields, std::size_t index,
                       std::size_t samples, SampleMode mode);

/// Writes grids, annotations and manifest.json under `out_dir`; returns the manifest path.
std::filesystem::path write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& out_dir,
                                    bool float32 = true);

/// Exact decomposition from the known predictive fields (no sampling).
UncertaintyMaps oracle_decompose(const ImageFields& fields);
UncertaintyMaps oracle_decompose(const SyntheticWorld& world, std::size_t index, bool ood);

struct ConvergencePoint {
  std::size_t samples = 0;
  double mad_au = 0.0;
  double mad_eu = 0.0;
  double mad_tu = 0.0;
  // Signed difference of the map means (sampled - exact). One-hot sampling
  // biases AU down and EU up by about (C - 1) / (2N).
  double bias_au = 0.0;
  double bias_eu = 0.0;
  double bias_tu = 0.0;
  double mad() const noexcept { return (mad_au + mad_eu + mad_tu) / 3.0; }
};

/// Mean absolute deviation between the sampled and the exact maps of image 0
/// for every sample count in `sample_counts`.
std::vector<ConvergencePoint> oracle_convergence_check(const SyntheticWorld& world,
                                                       std::span<const std::size_t> sample_counts,
                                                       SampleMode mode = SampleMode::OneHot);

}  // namespace uqeval
