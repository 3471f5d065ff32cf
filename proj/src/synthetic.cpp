#include "uqeval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "uqeval/decompose.hpp"
#include "uqeval/manifest.hpp"
#include "uqeval/npy.hpp"
#include "uqeval/reduce.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {

namespace {

using Field = std::vector<double>;  // [C][H][W] logits

Field base_logits(const WorldConfig& cfg, std::size_t image) {
  const std::size_t px = cfg.rows * cfg.cols;
  Field logits(cfg.classes * px, 0.0);
  const double scale = cfg.amplitude / std::sqrt(static_cast<double>(cfg.cosines));
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    CounterRng rng(cfg.seed, rng_purpose::kBaseField, static_cast<std::uint32_t>(image), static_cast<std::uint32_t>(c));
    for (std::size_t j = 0; j < cfg.cosines; ++j) {
      const double fx = (2.0 * rng.uniform() - 1.0) * cfg.max_frequency;
      const double fy = (2.0 * rng.uniform() - 1.0) * cfg.max_frequency;
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      for (std::size_t r = 0; r < cfg.rows; ++r) {
        for (std::size_t w = 0; w < cfg.cols; ++w) {
          const double x = static_cast<double>(w) / static_cast<double>(cfg.cols);
          const double y = static_cast<double>(r) / static_cast<double>(cfg.rows);
          logits[c * px + r * cfg.cols + w] += scale * std::cos(2.0 * std::numbers::pi * (fx * x + fy * y) + phase);
        }
      }
    }
  }
  for (double& v : logits) v /= cfg.temperature;
  return logits;
}

ClassMap softmax(const WorldConfig& cfg, const Field& logits) {
  ClassMap out(cfg.classes, cfg.rows, cfg.cols);
  const std::size_t px = cfg.rows * cfg.cols;
  for (std::size_t i = 0; i < px; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cfg.classes; ++c) top = std::max(top, logits[c * px + i]);
    double z = 0.0;
    for (std::size_t c = 0; c < cfg.classes; ++c) z += std::exp(logits[c * px + i] - top);
    for (std::size_t c = 0; c < cfg.classes; ++c) {
      out(c, i / cfg.cols, i % cfg.cols) = std::exp(logits[c * px + i] - top) / z;
    }
  }
  return out;
}

double entropy_ld(const long double* p, std::size_t n) {
  long double h = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0L) h -= p[i] * std::log(p[i]);
  }
  return static_cast<double>(h);
}

}  // namespace

void WorldConfig::validate() const {
  if (classes < 2) throw Error(ErrorKind::BadConfig, "a world needs at least two classes");
  if (rows < 1 || cols < 1) throw Error(ErrorKind::BadConfig, "world grid must be at least 1x1");
  if (instances < 1) throw Error(ErrorKind::BadConfig, "a world needs at least one model instance");
  if (!(perturbation_scale >= 0.0) || !(ood_shift >= 0.0)) {
    throw Error(ErrorKind::BadConfig, "perturbation_scale and ood_shift must be >= 0");
  }
  if (!(temperature > 0.0)) throw Error(ErrorKind::BadConfig, "temperature must be positive");
  if (cosines < 1) throw Error(ErrorKind::BadConfig, "cosines must be positive");
  if (recipe_version != 1) throw Error(ErrorKind::BadConfig, "unsupported recipe_version " + std::to_string(recipe_version));
}

void DatasetConfig::validate() const {
  if (images < 1 || annotators < 1 || au_samples < 1) {
    throw Error(ErrorKind::BadConfig, "image, annotator and sample counts must be positive");
  }
  if (mode == SampleMode::Softmax && au_samples != 1) {
    throw Error(ErrorKind::BadConfig, "softmax mode draws exactly one aleatoric sample");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw Error(ErrorKind::BadConfig, "val_fraction must lie in [0, 1)");
  if (!(ood_fraction >= 0.0 && ood_fraction <= 1.0)) throw Error(ErrorKind::BadConfig, "ood_fraction must lie in [0, 1]");
  if (ood_tag.empty()) throw Error(ErrorKind::BadConfig, "ood_tag must not be empty");
}

std::string_view to_string(SampleMode mode) noexcept {
  switch (mode) {
    case SampleMode::OneHot: return "onehot";
    case SampleMode::Soft: return "soft";
    case SampleMode::Softmax: return "softmax";
  }
  return "?";
}

SampleMode sample_mode_from_string(std::string_view text) {
  if (text == "onehot") return SampleMode::OneHot;
  if (text == "soft") return SampleMode::Soft;
  if (text == "softmax") return SampleMode::Softmax;
  throw Error(ErrorKind::BadConfig, "unknown sample mode '" + std::string(text) + "' (onehot, soft, softmax)");
}

ImageFields image_fields(const SyntheticWorld& world, std::size_t index, bool ood) {
  const WorldConfig& cfg = world.config;
  const Field base = base_logits(cfg, index);
  const std::size_t px = cfg.rows * cfg.cols;
  ImageFields out{softmax(cfg, base), {}};
  out.model_family.reserve(cfg.instances);
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    Field logits = base;
    if (cfg.perturbation_scale > 0.0) {
      CounterRng noise(cfg.seed, rng_purpose::kInstanceNoise, static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(k));
      for (double& v : logits) v += cfg.perturbation_scale * noise.normal();
    }
    if (ood && cfg.ood_shift > 0.0) {
      CounterRng bias(cfg.seed, rng_purpose::kOodBias, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(k));
      for (std::size_t c = 0; c < cfg.classes; ++c) {
        const double b = cfg.ood_shift * bias.normal();
        for (std::size_t i = 0; i < px; ++i) logits[c * px + i] += b;
      }
    }
    out.model_family.push_back(softmax(cfg, logits));
  }
  return out;
}

SyntheticWorld generate_world(const WorldConfig& config) {
  config.validate();
  SyntheticWorld world{config, ClassMap(config.classes, config.rows, config.cols), {}};
  ImageFields first = image_fields(world, 0, false);
  world.annotator_dist = std::move(first.annotator_dist);
  world.model_family = std::move(first.model_family);
  return world;
}

SampleGrid sample_grid(const SyntheticWorld& world, const ImageFields& fields, std::size_t index,
                       std::size_t samples, SampleMode mode) {
  const WorldConfig& cfg = world.config;
  if (mode == SampleMode::Softmax) samples = 1;
  const GridShape shape{cfg.instances, samples, cfg.classes, cfg.rows, cfg.cols};
  std::vector<double> probs(shape.size(), 0.0);
  const auto at = [&](std::size_t m, std::size_t n, std::size_t c, std::size_t r, std::size_t w) -> double& {
    return probs[(((m * samples + n) * cfg.classes + c) * cfg.rows + r) * cfg.cols + w];
  };
  std::vector<double> p(cfg.classes);
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    const ClassMap& field = fields.model_family[k];
    CounterRng rng(cfg.seed, rng_purpose::kAleatoricSample, static_cast<std::uint32_t>(index),
                   static_cast<std::uint32_t>(k));
    for (std::size_t n = 0; n < samples; ++n) {
      for (std::size_t r = 0; r < cfg.rows; ++r) {
        for (std::size_t w = 0; w < cfg.cols; ++w) {
          for (std::size_t c = 0; c < cfg.classes; ++c) p[c] = field(c, r, w);
          if (mode == SampleMode::Softmax) {
            for (std::size_t c = 0; c < cfg.classes; ++c) at(k, n, c, r, w) = p[c];
            continue;
          }
          const std::size_t drawn = rng.categorical(p.data(), p.size());
          for (std::size_t c = 0; c < cfg.classes; ++c) {
            const double hot = c == drawn ? 1.0 : 0.0;
            at(k, n, c, r, w) = mode == SampleMode::OneHot ? hot : 0.5 * p[c] + 0.5 * hot;
          }
        }
      }
    }
  }
  return SampleGrid(shape, std::move(probs));
}

SyntheticDataset sample_dataset(const SyntheticWorld& world, const DatasetConfig& config) {
  config.validate();
  const WorldConfig& cfg = world.config;
  const auto n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(config.images)));
  const std::size_t n_test = config.images - n_val;
  const auto n_ood = static_cast<std::size_t>(std::llround(config.ood_fraction * static_cast<double>(n_test)));

  SyntheticDataset out;
  out.dataset_name = config.dataset_name;
  out.classes = cfg.classes;
  out.seed = cfg.seed;
  out.images.reserve(config.images);
  for (std::size_t i = 0; i < config.images; ++i) {
    const bool is_val = i < n_val;
    const bool ood = !is_val && i >= config.images - n_ood;
    const ImageFields fields = image_fields(world, i, ood);

    std::vector<LabelMap> annotations;
    annotations.reserve(config.annotators);
    std::vector<double> p(cfg.classes);
    for (std::size_t a = 0; a < config.annotators; ++a) {
      CounterRng rng(cfg.seed, rng_purpose::kAnnotation, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(a));
      LabelMap labels(cfg.rows, cfg.cols, 0);
      for (std::size_t r = 0; r < cfg.rows; ++r) {
        for (std::size_t w = 0; w < cfg.cols; ++w) {
          for (std::size_t c = 0; c < cfg.classes; ++c) p[c] = fields.annotator_dist(c, r, w);
          labels(r, w) = static_cast<std::int32_t>(rng.categorical(p.data(), p.size()));
        }
      }
      annotations.push_back(std::move(labels));
    }

    char id[32];
    std::snprintf(id, sizeof id, "img_%05zu", i);
    out.images.push_back(SyntheticImage{
        .image_id = id,
        .index = i,
        .ood = ood,
        .split = ood ? "ood:" + config.ood_tag : "id",
        .role = is_val ? "val" : "test",
        .grid = sample_grid(world, fields, i, config.au_samples, config.mode),
        .annotations = AnnotationSet(std::move(annotations)),
    });
  }
  return out;
}

std::filesystem::path write_dataset(const SyntheticDataset& dataset, const std::filesystem::path& out_dir,
                                    bool float32) {
  DatasetManifest manifest;
  manifest.dataset_name = dataset.dataset_name;
  manifest.class_count = dataset.classes;
  manifest.background_class = 0;
  manifest.seed_tag = "seed=" + std::to_string(dataset.seed);
  for (const auto& img : dataset.images) {
    ManifestImage entry;
    entry.image_id = img.image_id;
    entry.split = img.split;
    entry.role = img.role;
    entry.grid_path = std::filesystem::path("grids") / (img.image_id + ".npy");
    write_grid(img.grid, out_dir / entry.grid_path, float32);
    for (std::size_t a = 0; a < img.annotations.raters(); ++a) {
      auto rel = std::filesystem::path("annotations") / (img.image_id + "_r" + std::to_string(a) + ".npy");
      write_label_map(img.annotations[a], out_dir / rel);
      entry.annotation_paths.push_back(std::move(rel));
    }
    manifest.images.push_back(std::move(entry));
  }
  const auto path = out_dir / "manifest.json";
  save_manifest(manifest, path);
  return path;
}

UncertaintyMaps oracle_decompose(const ImageFields& fields) {
  const std::size_t k_count = fields.model_family.size();
  const std::size_t classes = fields.annotator_dist.classes();
  const std::size_t rows = fields.annotator_dist.rows();
  const std::size_t cols = fields.annotator_dist.cols();
  UncertaintyMaps maps{Map(rows, cols), Map(rows, cols), Map(rows, cols)};
  std::vector<long double> p(classes), mean(classes);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t w = 0; w < cols; ++w) {
      long double au = 0.0L;
      std::fill(mean.begin(), mean.end(), 0.0L);
      for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t c = 0; c < classes; ++c) {
          p[c] = fields.model_family[k](c, r, w);
          mean[c] += p[c] / static_cast<long double>(k_count);
        }
        au += entropy_ld(p.data(), classes);
      }
      au /= static_cast<long double>(k_count);
      const double tu = entropy_ld(mean.data(), classes);
      maps.au(r, w) = static_cast<double>(au);
      maps.tu(r, w) = tu;
      maps.eu(r, w) = std::max(tu - static_cast<double>(au), 0.0);
    }
  }
  return maps;
}

UncertaintyMaps oracle_decompose(const SyntheticWorld& world, std::size_t index, bool ood) {
  return oracle_decompose(image_fields(world, index, ood));
}

std::vector<ConvergencePoint> oracle_convergence_check(const SyntheticWorld& world,
                                                       std::span<const std::size_t> sample_counts, SampleMode mode) {
  const ImageFields fields = image_fields(world, 0, false);
  const UncertaintyMaps exact = oracle_decompose(fields);
  std::vector<ConvergencePoint> curve;
  for (std::size_t n : sample_counts) {
    if (n < 1) throw Error(ErrorKind::BadConfig, "sample counts must be positive");
    const SampleGrid grid = sample_grid(world, fields, 0, n, mode);
    const UncertaintyMaps est = decompose(grid);
    ConvergencePoint pt;
    pt.samples = n;
    const auto mad = [](const Map& a, const Map& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
      return s / static_cast<double>(a.size());
    };
    pt.mad_au = mad(est.au, exact.au);
    pt.mad_eu = mad(est.eu, exact.eu);
    pt.mad_tu = mad(est.tu, exact.tu);
    pt.bias_au = pairwise_mean(est.au.values()) - pairwise_mean(exact.au.values());
    pt.bias_eu = pairwise_mean(est.eu.values()) - pairwise_mean(exact.eu.values());
    pt.bias_tu = pairwise_mean(est.tu.values()) - pairwise_mean(exact.tu.values());
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace uqeval
