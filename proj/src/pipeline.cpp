#include "uqeval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uqeval/aggregation.hpp"
#include "uqeval/decompose.hpp"
#include "uqeval/npy.hpp"
#include "uqeval/reduce.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t idx(Measure m) { return static_cast<std::size_t>(m); }

struct Processed {
  ScoredImage scored;
  UncertaintyMaps maps;
  LabelMap labels;
  std::optional<Image<std::uint8_t>> correct;
  bool no_eu = false;
};

Error annotate(const Error& e, const std::string& image_id, const char* stage) {
  return Error(e.kind(), "image '" + image_id + "' (" + stage + "): " + e.what());
}

SampleGrid load_capped(const PipelineImage& image, const RunConfig& config) {
  SampleGrid grid = image.load_grid();
  const GridShape& s = grid.shape();
  if (s.instances > config.eu_instances || s.samples > config.au_samples) {
    grid = grid.truncated(config.eu_instances, config.au_samples);
  }
  return grid;
}

UncertaintyMaps decompose_routed(const SampleGrid& grid, bool& no_eu) {
  no_eu = grid.shape().instances == 1;
  return no_eu ? decompose_no_eu(grid) : decompose(grid);
}

std::vector<LabelMap> sample_labels(const SampleGrid& grid) {
  const GridShape& s = grid.shape();
  std::vector<LabelMap> out;
  out.reserve(s.instances * s.samples);
  for (std::size_t m = 0; m < s.instances; ++m) {
    for (std::size_t n = 0; n < s.samples; ++n) {
      LabelMap labels(s.rows, s.cols, 0);
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t w = 0; w < s.cols; ++w) {
          std::size_t best = 0;
          for (std::size_t c = 1; c < s.classes; ++c) {
            if (grid(m, n, c, r, w) > grid(m, n, best, r, w)) best = c;
          }
          labels(r, w) = static_cast<std::int32_t>(best);
        }
      }
      out.push_back(std::move(labels));
    }
  }
  return out;
}

Processed process_image(const PipelineImage& image, const PipelineDataset& dataset, const RunConfig& config) {
  Processed out;
  out.scored.image_id = image.image_id;
  out.scored.split = image.split;
  out.scored.role = image.role;

  const char* stage = "load";
  try {
    const SampleGrid grid = load_capped(image, config);
    if (grid.shape().classes != dataset.class_count) {
      throw Error(ErrorKind::InconsistentClassCount, "grid has " + std::to_string(grid.shape().classes) +
                                                         " classes, dataset declares " +
                                                         std::to_string(dataset.class_count));
    }
    out.scored.instances = grid.shape().instances;
    out.scored.samples = grid.shape().samples;

    stage = "decompose";
    out.maps = decompose_routed(grid, out.no_eu);
    out.labels = argmax_labels(bma(grid));
    for (Measure m : kMeasures) out.scored.mean[idx(m)] = aggregate_mean(out.maps.get(m));

    stage = "annotations";
    std::vector<LabelMap> raw = image.load_annotations ? image.load_annotations() : std::vector<LabelMap>{};
    for (const auto& a : raw) {
      if (!a.same_shape(out.labels)) {
        throw Error(ErrorKind::ShapeMismatch, "annotation is " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + ", grid is " +
                                                  std::to_string(out.labels.rows()) + "x" +
                                                  std::to_string(out.labels.cols()));
      }
      validate_labels(a, dataset.class_count, "annotation of '" + image.image_id + "'");
    }
    if (raw.empty()) return out;
    const AnnotationSet annotations(std::move(raw));

    stage = "correctness";
    {
      BmaMap avg = bma(grid);
      out.correct = correctness_map(avg, annotations);
    }

    if (annotations.raters() >= 2 && image.role == "test") {
      stage = "amb";
      const Map variance = annotator_variance_map(annotations, dataset.class_count);
      std::array<double, 3> scores{};
      for (Measure m : kMeasures) scores[idx(m)] = ncc(variance, out.maps.get(m));
      out.scored.ncc = scores;
    }

    if (config.segmentation_metrics && image.role == "test") {
      stage = "segmentation";
      out.scored.dice = dice(out.labels, majority_vote(annotations, dataset.class_count), dataset.class_count);
      const auto samples = sample_labels(grid);
      out.scored.ged = ged(samples, annotations.maps(), dataset.class_count);
    }
  } catch (const Error& e) {
    throw annotate(e, image.image_id, stage);
  }
  return out;
}

AggregationStrategy make_strategy(const RunConfig& config, const PipelineDataset& dataset, Measure m,
                                  const std::optional<std::array<double, 3>>& taus) {
  const AggregationConfig& a = config.aggregation;
  switch (a.kind) {
    case AggregationKind::Mean: return ImageMean{};
    case AggregationKind::PatchMax: return PatchMax{a.patch_side};
    case AggregationKind::Threshold: return Threshold{(*taus)[idx(m)]};
    case AggregationKind::Area: return AreaNormalized{a.background_class.value_or(dataset.background_class)};
    case AggregationKind::Border: return BorderNormalized{};
  }
  return ImageMean{};
}

/// Algorithm S selection sampling: keeps `keep` of `total` positions, in order.
std::vector<bool> subsample_mask(std::size_t total, std::size_t keep, std::uint64_t seed) {
  std::vector<bool> mask(total, false);
  CounterRng rng(seed, rng_purpose::kSubsample);
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < total && chosen < keep; ++i) {
    const double remaining = static_cast<double>(total - i);
    if (rng.uniform() * remaining < static_cast<double>(keep - chosen)) {
      mask[i] = true;
      ++chosen;
    }
  }
  return mask;
}

TaskRow make_row(Task task, std::string split, const std::array<double, 3>& scores, std::size_t images,
                 std::string rank_split, const RunConfig& config) {
  const TaskSpec spec = assign_measures(task, config.cal_wrong);
  TaskRow row;
  row.task = task;
  row.split = std::move(split);
  row.scores = scores;
  row.correct = spec.correct;
  row.wrong = pick_wrong_measure(spec, config.cal_wrong, scores[idx(Measure::AU)], scores[idx(Measure::EU)]);
  row.sign = spec.sign;
  row.delta = delta(scores[idx(row.correct)], scores[idx(row.wrong)], row.sign);
  row.images = images;
  row.rank_split = std::move(rank_split);
  return row;
}

/// Appends per-tag rows and, for two or more tags, an "ood" mean row.
void push_ood_rows(std::vector<TaskRow>& rows, Task task,
                   const std::vector<std::pair<std::string, std::pair<std::array<double, 3>, std::size_t>>>& per_tag,
                   const RunConfig& config) {
  if (per_tag.empty()) return;
  const bool summarize = per_tag.size() > 1;
  std::array<std::vector<double>, 3> columns;
  std::size_t images = 0;
  for (const auto& [split, cell] : per_tag) {
    rows.push_back(make_row(task, split, cell.first, cell.second, summarize ? "" : "ood", config));
    for (Measure m : kMeasures) columns[idx(m)].push_back(cell.first[idx(m)]);
    images += cell.second;
  }
  if (!summarize) return;
  std::array<double, 3> mean{};
  for (Measure m : kMeasures) mean[idx(m)] = pairwise_mean(columns[idx(m)]);
  rows.push_back(make_row(task, "ood", mean, images, "ood", config));
}

}  // namespace

PipelineDataset from_manifest(const DatasetManifest& manifest) {
  PipelineDataset out;
  out.dataset_name = manifest.dataset_name;
  out.seed_tag = manifest.seed_tag;
  out.class_count = manifest.class_count;
  out.background_class = manifest.background_class;
  out.warnings = manifest.warnings;
  for (const auto& img : manifest.images) {
    PipelineImage p;
    p.image_id = img.image_id;
    p.split = img.split;
    p.role = img.role;
    const auto grid_path = manifest.resolve(img.grid_path);
    p.load_grid = [grid_path] { return read_grid(grid_path); };
    std::vector<std::filesystem::path> ann;
    for (const auto& a : img.annotation_paths) ann.push_back(manifest.resolve(a));
    p.load_annotations = [ann] {
      std::vector<LabelMap> maps;
      maps.reserve(ann.size());
      for (const auto& a : ann) maps.push_back(read_label_map(a));
      return maps;
    };
    out.images.push_back(std::move(p));
  }
  return out;
}

PipelineDataset from_synthetic(const SyntheticDataset& dataset) {
  PipelineDataset out;
  out.dataset_name = dataset.dataset_name;
  out.seed_tag = "seed=" + std::to_string(dataset.seed);
  out.class_count = dataset.classes;
  out.background_class = 0;
  for (const auto& img : dataset.images) {
    PipelineImage p;
    p.image_id = img.image_id;
    p.split = img.split;
    p.role = img.role;
    p.load_grid = [&img] { return img.grid; };
    p.load_annotations = [&img] {
      const auto maps = img.annotations.maps();
      return std::vector<LabelMap>(maps.begin(), maps.end());
    };
    out.images.push_back(std::move(p));
  }
  return out;
}

UncertaintyMaps evaluate_image(const PipelineImage& image, const RunConfig& config) {
  try {
    bool no_eu = false;
    return decompose_routed(load_capped(image, config), no_eu);
  } catch (const Error& e) {
    throw annotate(e, image.image_id, "decompose");
  }
}

ResultBundle run_pipeline(const DatasetManifest& manifest, const RunConfig& config,
                          const std::optional<std::filesystem::path>& maps_dir) {
  return run_pipeline(from_manifest(manifest), config, maps_dir);
}

ResultBundle run_pipeline(const PipelineDataset& dataset, const RunConfig& config,
                          const std::optional<std::filesystem::path>& maps_dir) {
  config.validate();
  const std::size_t threads = config.threads ? config.threads : default_thread_count();

  ResultBundle bundle;
  bundle.model_id = config.model_id;
  bundle.dataset_name = dataset.dataset_name;
  bundle.seed_tag = dataset.seed_tag;
  bundle.seed = config.seed;
  bundle.config_json = run_config_to_json(config);
  bundle.warnings = dataset.warnings;

  std::vector<const PipelineImage*> val, test;
  for (const auto& img : dataset.images) {
    if (img.role == "val" && img.split == "id") val.push_back(&img);
    if (img.role == "test") test.push_back(&img);
  }
  const auto by_id = [](const PipelineImage* a, const PipelineImage* b) { return a->image_id < b->image_id; };
  std::sort(val.begin(), val.end(), by_id);
  std::sort(test.begin(), test.end(), by_id);
  if (test.empty()) throw Error(ErrorKind::EmptySplit, "dataset has no test images");

  const auto process_all = [&](const std::vector<const PipelineImage*>& list) {
    std::vector<std::optional<Processed>> slots(list.size());
    parallel_for(list.size(), threads, [&](std::size_t i) { slots[i] = process_image(*list[i], dataset, config); });
    std::vector<Processed> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  };
  std::vector<Processed> val_done = process_all(val);
  std::vector<Processed> test_done = process_all(test);

  std::size_t no_eu = 0;
  for (const auto* list : {&val_done, &test_done}) {
    for (const auto& p : *list) no_eu += p.no_eu ? 1 : 0;
  }
  const std::size_t total = val_done.size() + test_done.size();
  bundle.route = no_eu == 0 ? "kendall_gal" : no_eu == total ? "no_eu" : "mixed";

  // Threshold aggregation: tau per measure from the ID validation pixels.
  if (config.aggregation.kind == AggregationKind::Threshold) {
    std::array<double, 3> taus{};
    if (config.aggregation.tau) {
      taus.fill(*config.aggregation.tau);
    } else {
      if (val_done.empty()) {
        throw Error(ErrorKind::BadConfig, "threshold aggregation without tau needs ID validation images");
      }
      for (Measure m : kMeasures) {
        std::vector<double> pooled;
        for (const auto& p : val_done) {
          const auto v = p.maps.get(m).values();
          pooled.insert(pooled.end(), v.begin(), v.end());
        }
        taus[idx(m)] = percentile(pooled, config.aggregation.threshold_percentile);
      }
    }
    bundle.thresholds = taus;
  }

  // OODD image scores.
  if (config.runs(Task::OODD)) {
    parallel_for(test_done.size(), threads, [&](std::size_t i) {
      Processed& p = test_done[i];
      try {
        for (Measure m : kMeasures) {
          p.scored.aggregated[idx(m)] =
              aggregate(p.maps.get(m), make_strategy(config, dataset, m, bundle.thresholds), &p.labels);
        }
      } catch (const Error& e) {
        throw annotate(e, p.scored.image_id, "aggregate");
      }
    });
  }

  if (maps_dir) {
    std::filesystem::create_directories(*maps_dir);
    for (const auto& p : test_done) write_uncertainty_maps(p.maps, *maps_dir / (p.scored.image_id + ".npy"));
  }

  std::vector<std::string> tags;
  for (const auto& p : test_done) {
    if (p.scored.split != "id") tags.push_back(p.scored.split);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  std::vector<std::string> splits = {"id"};
  splits.insert(splits.end(), tags.begin(), tags.end());

  const auto in_split = [&](const std::string& split) {
    std::vector<const Processed*> out;
    for (const auto& p : test_done) {
      if (p.scored.split == split) out.push_back(&p);
    }
    return out;
  };

  if (config.runs(Task::OODD)) {
    const auto id_images = in_split("id");
    if (id_images.empty()) throw Error(ErrorKind::EmptySplit, "OODD needs in-distribution test images");
    if (tags.empty()) throw Error(ErrorKind::EmptySplit, "OODD needs out-of-distribution test images");
    std::vector<std::pair<std::string, std::pair<std::array<double, 3>, std::size_t>>> per_tag;
    for (const auto& tag : tags) {
      const auto ood_images = in_split(tag);
      std::array<double, 3> scores{};
      for (Measure m : kMeasures) {
        std::vector<double> id_s, ood_s;
        for (const auto* p : id_images) id_s.push_back(p->scored.aggregated[idx(m)]);
        for (const auto* p : ood_images) ood_s.push_back(p->scored.aggregated[idx(m)]);
        scores[idx(m)] = auroc(id_s, ood_s);
      }
      per_tag.push_back({tag, {scores, id_images.size() + ood_images.size()}});
    }
    push_ood_rows(bundle.rows, Task::OODD, per_tag, config);
  }

  if (config.runs(Task::AMB)) {
    std::vector<std::pair<std::string, std::pair<std::array<double, 3>, std::size_t>>> per_tag;
    for (const auto& split : splits) {
      std::array<std::vector<double>, 3> values;
      for (const auto* p : in_split(split)) {
        if (!p->scored.ncc) continue;
        for (Measure m : kMeasures) values[idx(m)].push_back((*p->scored.ncc)[idx(m)]);
      }
      if (values[0].empty()) {
        bundle.warnings.push_back("AMB: split '" + split + "' has no test image with two or more annotations");
        continue;
      }
      std::array<double, 3> scores{};
      for (Measure m : kMeasures) scores[idx(m)] = pairwise_mean(values[idx(m)]);
      if (split == "id") {
        bundle.rows.push_back(make_row(Task::AMB, split, scores, values[0].size(), "id", config));
      } else {
        per_tag.push_back({split, {scores, values[0].size()}});
      }
    }
    push_ood_rows(bundle.rows, Task::AMB, per_tag, config);
  }

  if (config.runs(Task::CAL)) {
    std::vector<const Processed*> fit_images;
    for (const auto& p : val_done) {
      if (p.correct) fit_images.push_back(&p);
    }
    if (fit_images.empty()) {
      throw Error(ErrorKind::BadConfig, "CAL needs annotated ID validation images to fit the Platt parameters");
    }
    std::size_t pixels = 0;
    for (const auto* p : fit_images) pixels += p->labels.size();
    const std::size_t keep = std::min(pixels, config.platt_subsample_cap);
    const std::vector<bool> mask =
        keep < pixels ? subsample_mask(pixels, keep, config.seed) : std::vector<bool>(pixels, true);

    std::array<PlattParams, 3> params;
    std::vector<std::uint8_t> labels;
    labels.reserve(keep);
    {
      std::size_t pos = 0;
      for (const auto* p : fit_images) {
        for (std::size_t i = 0; i < p->labels.size(); ++i, ++pos) {
          if (mask[pos]) labels.push_back((*p->correct)[i]);
        }
      }
    }
    for (Measure m : kMeasures) {
      std::vector<double> u;
      u.reserve(keep);
      std::size_t pos = 0;
      for (const auto* p : fit_images) {
        const Map& map = p->maps.get(m);
        for (std::size_t i = 0; i < map.size(); ++i, ++pos) {
          if (mask[pos]) u.push_back(map[i]);
        }
      }
      params[idx(m)] = fit_platt(u, labels, m);
      if (params[idx(m)].degenerate) {
        bundle.warnings.push_back("CAL: validation correctness labels are all identical; Platt parameters for " +
                                  std::string(to_string(m)) + " are clamped");
      }
      bundle.platt.push_back(params[idx(m)]);
    }

    std::vector<std::pair<std::string, std::pair<std::array<double, 3>, std::size_t>>> per_tag;
    for (const auto& split : splits) {
      std::vector<const Processed*> images;
      for (const auto* p : in_split(split)) {
        if (p->correct) images.push_back(p);
      }
      if (images.empty()) {
        bundle.warnings.push_back("CAL: split '" + split + "' has no annotated test image");
        continue;
      }
      std::array<double, 3> scores{};
      for (Measure m : kMeasures) {
        const PlattParams& pp = params[idx(m)];
        if (config.ace_per_image) {
          std::vector<double> per_image;
          for (const auto* p : images) {
            const Map& map = p->maps.get(m);
            std::vector<double> conf(map.size());
            for (std::size_t i = 0; i < map.size(); ++i) conf[i] = pp.confidence(map[i]);
            per_image.push_back(ace(conf, p->correct->values(), config.ace_bins));
          }
          scores[idx(m)] = pairwise_mean(per_image);
        } else {
          std::vector<double> conf;
          std::vector<std::uint8_t> correct;
          for (const auto* p : images) {
            const Map& map = p->maps.get(m);
            for (std::size_t i = 0; i < map.size(); ++i) conf.push_back(pp.confidence(map[i]));
            const auto c = p->correct->values();
            correct.insert(correct.end(), c.begin(), c.end());
          }
          scores[idx(m)] = ace(conf, correct, config.ace_bins);
        }
      }
      if (split == "id") {
        bundle.rows.push_back(make_row(Task::CAL, split, scores, images.size(), "id", config));
      } else {
        per_tag.push_back({split, {scores, images.size()}});
      }
    }
    push_ood_rows(bundle.rows, Task::CAL, per_tag, config);
  }

  for (const auto& split : splits) {
    const auto images = in_split(split);
    if (images.empty()) continue;
    std::vector<double> eu, au;
    for (const auto* p : images) {
      eu.push_back(p->scored.mean[idx(Measure::EU)]);
      au.push_back(p->scored.mean[idx(Measure::AU)]);
    }
    bundle.collapse.push_back({split, collapse_ratio(eu, au), images.size()});
    if (config.segmentation_metrics) {
      std::vector<double> d, g;
      for (const auto* p : images) {
        if (p->scored.dice) d.push_back(*p->scored.dice);
        if (p->scored.ged) g.push_back(*p->scored.ged);
      }
      if (!d.empty()) bundle.segmentation.push_back({split, pairwise_mean(d), pairwise_mean(g), d.size()});
    }
  }

  for (auto* list : {&val_done, &test_done}) {
    for (auto& p : *list) bundle.images.push_back(std::move(p.scored));
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_number(const ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

ordered_json triple(const std::array<double, 3>& v) {
  return ordered_json{{"au", number(v[0])}, {"eu", number(v[1])}, {"tu", number(v[2])}};
}

std::array<double, 3> triple_from(const ordered_json& j) {
  return {to_number(j.at("au")), to_number(j.at("eu")), to_number(j.at("tu"))};
}

}  // namespace

std::string bundle_to_json(const ResultBundle& b) {
  ordered_json doc;
  doc["model_id"] = b.model_id;
  doc["dataset_name"] = b.dataset_name;
  doc["seed_tag"] = b.seed_tag;
  doc["seed"] = b.seed;
  doc["route"] = b.route;
  doc["config"] = ordered_json::parse(b.config_json);
  doc["rows"] = ordered_json::array();
  for (const auto& r : b.rows) {
    doc["rows"].push_back({{"task", to_string(r.task)},
                           {"split", r.split},
                           {"rank_split", r.rank_split},
                           {"scores", triple(r.scores)},
                           {"correct", to_string(r.correct)},
                           {"wrong", to_string(r.wrong)},
                           {"sign", r.sign},
                           {"delta", number(r.delta.value)},
                           {"floored", r.delta.floored},
                           {"degenerate", r.delta.degenerate},
                           {"images", r.images}});
  }
  doc["collapse"] = ordered_json::array();
  for (const auto& c : b.collapse) {
    doc["collapse"].push_back(
        {{"split", c.split}, {"ratio", number(c.ratio.value)}, {"infinite", c.ratio.infinite}, {"images", c.images}});
  }
  doc["segmentation"] = ordered_json::array();
  for (const auto& s : b.segmentation) {
    doc["segmentation"].push_back(
        {{"split", s.split}, {"dice", number(s.dice)}, {"ged", number(s.ged)}, {"images", s.images}});
  }
  doc["platt"] = ordered_json::array();
  for (const auto& p : b.platt) {
    doc["platt"].push_back({{"measure", to_string(p.measure)},
                            {"a", p.a},
                            {"b", p.b},
                            {"degenerate", p.degenerate},
                            {"iterations", p.iterations},
                            {"gradient_norm", number(p.gradient_norm)}});
  }
  doc["thresholds"] = b.thresholds ? triple(*b.thresholds) : ordered_json(nullptr);
  doc["warnings"] = b.warnings;
  doc["images"] = ordered_json::array();
  for (const auto& i : b.images) {
    ordered_json e{{"image_id", i.image_id},   {"split", i.split},          {"role", i.role},
                   {"instances", i.instances}, {"samples", i.samples},      {"mean", triple(i.mean)},
                   {"aggregated", triple(i.aggregated)}};
    e["ncc"] = i.ncc ? triple(*i.ncc) : ordered_json(nullptr);
    e["dice"] = i.dice ? number(*i.dice) : ordered_json(nullptr);
    e["ged"] = i.ged ? number(*i.ged) : ordered_json(nullptr);
    doc["images"].push_back(std::move(e));
  }
  return doc.dump(1) + "\n";
}

ResultBundle bundle_from_json(const std::string& text) {
  ResultBundle b;
  try {
    const ordered_json doc = ordered_json::parse(text);
    b.model_id = doc.at("model_id").get<std::string>();
    b.dataset_name = doc.at("dataset_name").get<std::string>();
    b.seed_tag = doc.at("seed_tag").get<std::string>();
    b.seed = doc.at("seed").get<std::uint64_t>();
    b.route = doc.at("route").get<std::string>();
    b.config_json = doc.at("config").dump();
    for (const auto& r : doc.at("rows")) {
      TaskRow row;
      row.task = task_from_string(r.at("task").get<std::string>());
      row.split = r.at("split").get<std::string>();
      row.rank_split = r.at("rank_split").get<std::string>();
      row.scores = triple_from(r.at("scores"));
      row.correct = measure_from_string(r.at("correct").get<std::string>());
      row.wrong = measure_from_string(r.at("wrong").get<std::string>());
      row.sign = r.at("sign").get<int>();
      row.delta = {to_number(r.at("delta")), r.at("floored").get<bool>(), r.at("degenerate").get<bool>()};
      row.images = r.at("images").get<std::size_t>();
      b.rows.push_back(std::move(row));
    }
    for (const auto& c : doc.at("collapse")) {
      b.collapse.push_back({c.at("split").get<std::string>(),
                            {to_number(c.at("ratio")), c.at("infinite").get<bool>()},
                            c.at("images").get<std::size_t>()});
    }
    for (const auto& s : doc.at("segmentation")) {
      b.segmentation.push_back({s.at("split").get<std::string>(), to_number(s.at("dice")), to_number(s.at("ged")),
                                s.at("images").get<std::size_t>()});
    }
    for (const auto& p : doc.at("platt")) {
      PlattParams pp;
      pp.measure = measure_from_string(p.at("measure").get<std::string>());
      pp.a = p.at("a").get<double>();
      pp.b = p.at("b").get<double>();
      pp.degenerate = p.at("degenerate").get<bool>();
      pp.iterations = p.at("iterations").get<int>();
      pp.gradient_norm = to_number(p.at("gradient_norm"));
      b.platt.push_back(pp);
    }
    if (!doc.at("thresholds").is_null()) b.thresholds = triple_from(doc.at("thresholds"));
    b.warnings = doc.at("warnings").get<std::vector<std::string>>();
    for (const auto& e : doc.at("images")) {
      ScoredImage i;
      i.image_id = e.at("image_id").get<std::string>();
      i.split = e.at("split").get<std::string>();
      i.role = e.at("role").get<std::string>();
      i.instances = e.at("instances").get<std::size_t>();
      i.samples = e.at("samples").get<std::size_t>();
      i.mean = triple_from(e.at("mean"));
      i.aggregated = triple_from(e.at("aggregated"));
      if (!e.at("ncc").is_null()) i.ncc = triple_from(e.at("ncc"));
      if (!e.at("dice").is_null()) i.dice = to_number(e.at("dice"));
      if (!e.at("ged").is_null()) i.ged = to_number(e.at("ged"));
      b.images.push_back(std::move(i));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("result bundle: ") + e.what());
  }
  return b;
}

void save_bundle(const ResultBundle& bundle, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << bundle_to_json(bundle);
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

ResultBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return bundle_from_json(text.str());
}

}  // namespace uqeval
