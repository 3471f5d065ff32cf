#include "uqeval/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "uqeval/reduce.hpp"

namespace uqeval {

std::string_view to_string(Task t) noexcept {
  switch (t) {
    case Task::OODD: return "oodd";
    case Task::AMB: return "amb";
    case Task::CAL: return "cal";
  }
  return "?";
}

Task task_from_string(std::string_view text) {
  if (text == "oodd" || text == "OODD") return Task::OODD;
  if (text == "amb" || text == "AMB") return Task::AMB;
  if (text == "cal" || text == "CAL") return Task::CAL;
  throw Error(ErrorKind::UnknownTask, "unknown task '" + std::string(text) + "'");
}

std::string_view to_string(CalWrongMeasure w) noexcept {
  switch (w) {
    case CalWrongMeasure::AU: return "AU";
    case CalWrongMeasure::EU: return "EU";
    case CalWrongMeasure::BestOfBoth: return "best";
  }
  return "?";
}

CalWrongMeasure cal_wrong_from_string(std::string_view text) {
  if (text == "AU" || text == "au") return CalWrongMeasure::AU;
  if (text == "EU" || text == "eu") return CalWrongMeasure::EU;
  if (text == "best" || text == "best_of_both") return CalWrongMeasure::BestOfBoth;
  throw Error(ErrorKind::BadConfig, "unknown calibration wrong measure '" + std::string(text) + "'");
}

TaskSpec assign_measures(Task task, CalWrongMeasure cal_wrong) {
  switch (task) {
    case Task::OODD: return {Task::OODD, Measure::EU, Measure::AU, +1};
    case Task::AMB: return {Task::AMB, Measure::AU, Measure::EU, +1};
    case Task::CAL:
      return {Task::CAL, Measure::TU, cal_wrong == CalWrongMeasure::EU ? Measure::EU : Measure::AU, -1};
  }
  throw Error(ErrorKind::UnknownTask, "unknown task");
}

Measure pick_wrong_measure(const TaskSpec& spec, CalWrongMeasure cal_wrong, double score_au, double score_eu) {
  if (spec.task != Task::CAL || cal_wrong != CalWrongMeasure::BestOfBoth) return spec.wrong;
  return score_eu < score_au ? Measure::EU : Measure::AU;
}

DeltaValue delta(double u_correct, double u_wrong, int sign) {
  if (!std::isfinite(u_correct) || !std::isfinite(u_wrong)) {
    throw Error(ErrorKind::NonFinite, "entanglement needs finite task scores");
  }
  if (sign != 1 && sign != -1) throw Error(ErrorKind::BadConfig, "entanglement sign must be +1 or -1");
  DeltaValue out;
  out.floored = u_correct < 0.0 || u_wrong < 0.0;
  const double c = std::max(u_correct, 0.0);
  const double w = std::max(u_wrong, 0.0);
  if (c == 0.0 && w == 0.0) {
    out.degenerate = true;
    return out;
  }
  constexpr double quarter_pi = std::numbers::pi / 4.0;
  out.value = static_cast<double>(sign) * (std::atan2(c, w) - quarter_pi) / quarter_pi;
  return out;
}

CollapseRatio collapse_ratio(std::span<const double> image_mean_eu, std::span<const double> image_mean_au) {
  if (image_mean_eu.size() != image_mean_au.size()) {
    throw Error(ErrorKind::ShapeMismatch, "EU and AU lists differ in length");
  }
  if (image_mean_eu.empty()) throw Error(ErrorKind::EmptySplit, "collapse ratio over an empty split");
  const double eu = pairwise_mean(image_mean_eu);
  const double au = pairwise_mean(image_mean_au);
  if (au == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {eu / au, false};
}

CollapseRatio collapse_ratio(std::span<const UncertaintyMaps> maps) {
  std::vector<double> eu, au;
  for (const auto& m : maps) {
    eu.push_back(pairwise_mean(m.eu.values()));
    au.push_back(pairwise_mean(m.au.values()));
  }
  return collapse_ratio(eu, au);
}

std::vector<double> average_ranks(std::span<const double> values, bool higher_is_better) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return higher_is_better ? values[x] > values[y] : values[x] < values[y];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::vector<ModelRank> rank_models(std::span<const RankInput> results) {
  using Cell = std::pair<Task, std::string>;
  std::set<std::string> models;
  std::map<Cell, std::map<std::string, const RankInput*>> cells;
  for (const auto& r : results) {
    if (!std::isfinite(r.performance) || !std::isfinite(r.delta)) {
      throw Error(ErrorKind::NonFinite, "model " + r.model_id + " has a non-finite score in " +
                                            std::string(to_string(r.task)) + "/" + r.split);
    }
    models.insert(r.model_id);
    auto& slot = cells[{r.task, r.split}][r.model_id];
    if (slot != nullptr) {
      throw Error(ErrorKind::BadConfig, "duplicate cell for model " + r.model_id + " in " +
                                            std::string(to_string(r.task)) + "/" + r.split);
    }
    slot = &r;
  }
  std::string missing;
  for (const auto& [cell, by_model] : cells) {
    for (const auto& m : models) {
      if (!by_model.contains(m)) {
        missing += (missing.empty() ? "" : ", ") + std::string("(") + m + ", " +
                   std::string(to_string(cell.first)) + ", " + cell.second + ")";
      }
    }
  }
  if (!missing.empty()) throw Error(ErrorKind::MissingCell, "missing results: " + missing);

  const std::vector<std::string> ids(models.begin(), models.end());
  // task -> model -> ranks over that task's splits
  std::map<Task, std::vector<std::vector<double>>> perf_by_task, delta_by_task;
  for (const auto& [cell, by_model] : cells) {
    std::vector<double> perf, del;
    for (const auto& m : ids) {
      perf.push_back(by_model.at(m)->performance);
      del.push_back(by_model.at(m)->delta);
    }
    const bool higher = assign_measures(cell.first).higher_is_better();
    const auto pr = average_ranks(perf, higher);
    const auto dr = average_ranks(del, true);
    auto& pt = perf_by_task[cell.first];
    auto& dt = delta_by_task[cell.first];
    pt.resize(ids.size());
    dt.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      pt[i].push_back(pr[i]);
      dt[i].push_back(dr[i]);
    }
  }
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  std::vector<ModelRank> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i].model_id = ids[i];
    std::vector<double> perf_tasks, delta_tasks;
    for (const auto& [task, per_model] : perf_by_task) {
      out[i].performance_rank_by_task[task] = mean(per_model[i]);
      perf_tasks.push_back(out[i].performance_rank_by_task[task]);
    }
    for (const auto& [task, per_model] : delta_by_task) {
      out[i].delta_rank_by_task[task] = mean(per_model[i]);
      delta_tasks.push_back(out[i].delta_rank_by_task[task]);
    }
    out[i].performance_rank = mean(perf_tasks);
    out[i].delta_rank = mean(delta_tasks);
  }
  return out;
}

MeanInterval t_interval(std::span<const double> values, double confidence) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "interval over no values");
  MeanInterval out;
  out.count = values.size();
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const auto n = static_cast<double>(values.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  out.half_width = t * sd / std::sqrt(n);
  return out;
}

}  // namespace uqeval
