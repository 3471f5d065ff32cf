#include "uqeval/config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace uqeval {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AggregationKind k) noexcept {
  switch (k) {
    case AggregationKind::Mean: return "mean";
    case AggregationKind::PatchMax: return "patch_max";
    case AggregationKind::Threshold: return "threshold";
    case AggregationKind::Area: return "area";
    case AggregationKind::Border: return "border";
  }
  return "?";
}

AggregationKind aggregation_from_string(std::string_view text) {
  for (auto k : {AggregationKind::Mean, AggregationKind::PatchMax, AggregationKind::Threshold, AggregationKind::Area,
                 AggregationKind::Border}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorKind::BadConfig, "unknown aggregation strategy '" + std::string(text) +
                                        "' (mean, patch_max, threshold, area, border)");
}

void RunConfig::validate() const {
  if (au_samples < 1 || eu_instances < 1) throw Error(ErrorKind::BadConfig, "sample and instance counts must be positive");
  if (ace_bins < 1) throw Error(ErrorKind::BadConfig, "ace_bins must be positive");
  if (platt_subsample_cap < 2) throw Error(ErrorKind::BadConfig, "platt_subsample_cap must be at least 2");
  if (aggregation.patch_side < 1) throw Error(ErrorKind::BadConfig, "patch_side must be positive");
  if (aggregation.tau && !(*aggregation.tau >= 0.0)) throw Error(ErrorKind::BadConfig, "tau must be >= 0");
  if (!(aggregation.threshold_percentile >= 0.0 && aggregation.threshold_percentile <= 100.0)) {
    throw Error(ErrorKind::BadConfig, "threshold_percentile must lie in [0, 100]");
  }
  if (tasks.empty()) throw Error(ErrorKind::BadConfig, "no tasks selected");
  if (model_id.empty()) throw Error(ErrorKind::BadConfig, "model_id must not be empty");
}

bool RunConfig::runs(Task t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }

RunConfig parse_run_config(const std::string& json_text, RunConfig c) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("run config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "run config must be a JSON object");

  static const std::set<std::string> keys = {"model_id", "aggregation", "au_samples", "eu_instances",
                                             "ace_bins", "ace_per_image", "cal_wrong_measure",
                                             "platt_subsample_cap", "seed", "tasks", "segmentation_metrics",
                                             "threads"};
  static const std::set<std::string> agg_keys = {"strategy", "patch_side", "tau", "threshold_percentile",
                                                 "background_class"};
  try {
    for (const auto& [k, v] : doc.items()) {
      if (!keys.contains(k)) throw Error(ErrorKind::BadConfig, "unknown run config key '" + k + "'");
    }
    if (doc.contains("model_id")) c.model_id = doc["model_id"].get<std::string>();
    if (doc.contains("au_samples")) c.au_samples = doc["au_samples"].get<std::size_t>();
    if (doc.contains("eu_instances")) c.eu_instances = doc["eu_instances"].get<std::size_t>();
    if (doc.contains("ace_bins")) c.ace_bins = doc["ace_bins"].get<std::size_t>();
    if (doc.contains("ace_per_image")) c.ace_per_image = doc["ace_per_image"].get<bool>();
    if (doc.contains("cal_wrong_measure")) c.cal_wrong = cal_wrong_from_string(doc["cal_wrong_measure"].get<std::string>());
    if (doc.contains("platt_subsample_cap")) c.platt_subsample_cap = doc["platt_subsample_cap"].get<std::size_t>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("segmentation_metrics")) c.segmentation_metrics = doc["segmentation_metrics"].get<bool>();
    if (doc.contains("threads")) c.threads = doc["threads"].get<std::size_t>();
    if (doc.contains("tasks")) {
      c.tasks.clear();
      for (const auto& t : doc["tasks"]) c.tasks.push_back(task_from_string(t.get<std::string>()));
    }
    if (doc.contains("aggregation")) {
      const auto& a = doc["aggregation"];
      for (const auto& [k, v] : a.items()) {
        if (!agg_keys.contains(k)) throw Error(ErrorKind::BadConfig, "unknown aggregation key '" + k + "'");
      }
      if (a.contains("strategy")) c.aggregation.kind = aggregation_from_string(a["strategy"].get<std::string>());
      if (a.contains("patch_side")) c.aggregation.patch_side = a["patch_side"].get<std::size_t>();
      if (a.contains("tau")) {
        if (a["tau"].is_null()) {
          c.aggregation.tau.reset();
        } else {
          c.aggregation.tau = a["tau"].get<double>();
        }
      }
      if (a.contains("threshold_percentile")) c.aggregation.threshold_percentile = a["threshold_percentile"].get<double>();
      if (a.contains("background_class")) {
        if (a["background_class"].is_null()) {
          c.aggregation.background_class.reset();
        } else {
          c.aggregation.background_class = a["background_class"].get<std::int32_t>();
        }
      }
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::BadConfig, std::string("run config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json doc;
  doc["model_id"] = c.model_id;
  ordered_json agg;
  agg["strategy"] = std::string(to_string(c.aggregation.kind));
  agg["patch_side"] = c.aggregation.patch_side;
  agg["tau"] = c.aggregation.tau ? ordered_json(*c.aggregation.tau) : ordered_json(nullptr);
  agg["threshold_percentile"] = c.aggregation.threshold_percentile;
  agg["background_class"] =
      c.aggregation.background_class ? ordered_json(*c.aggregation.background_class) : ordered_json(nullptr);
  doc["aggregation"] = agg;
  doc["au_samples"] = c.au_samples;
  doc["eu_instances"] = c.eu_instances;
  doc["ace_bins"] = c.ace_bins;
  doc["ace_per_image"] = c.ace_per_image;
  doc["cal_wrong_measure"] = std::string(to_string(c.cal_wrong));
  doc["platt_subsample_cap"] = c.platt_subsample_cap;
  doc["seed"] = c.seed;
  doc["tasks"] = ordered_json::array();
  for (Task t : c.tasks) doc["tasks"].push_back(std::string(to_string(t)));
  doc["segmentation_metrics"] = c.segmentation_metrics;
  return doc.dump();
}

}  // namespace uqeval
