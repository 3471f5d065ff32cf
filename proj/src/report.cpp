#include "uqeval/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "uqeval/format.hpp"
#include "uqeval/reduce.hpp"

namespace uqeval {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Bundles grouped by model (sorted by id), each list in seed order.
std::map<std::string, std::vector<const ResultBundle*>> runs_by_model(std::span<const ResultBundle> bundles) {
  std::map<std::string, std::vector<const ResultBundle*>> out;
  for (const auto& b : bundles) out[b.model_id].push_back(&b);
  for (auto& [_, list] : out) {
    std::stable_sort(list.begin(), list.end(), [](const auto* a, const auto* b) { return a->seed < b->seed; });
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json rounded(double v) {
  if (std::isfinite(v)) return round_significant(v, 6);
  return format_number(v);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace

std::vector<MergedRow> merge_rows(std::span<const ResultBundle> bundles) {
  struct Acc {
    MergedRow row;
    std::array<std::vector<double>, 3> scores;
    std::vector<double> deltas;
  };
  std::vector<Acc> cells;
  std::map<std::tuple<std::string, Task, std::string>, std::size_t> where;
  for (const auto& [model, runs] : runs_by_model(bundles)) {
    for (const ResultBundle* b : runs) {
      for (const TaskRow& r : b->rows) {
        const auto key = std::make_tuple(model, r.task, r.split);
        auto it = where.find(key);
        if (it == where.end()) {
          it = where.emplace(key, cells.size()).first;
          Acc a;
          a.row.model_id = model;
          a.row.task = r.task;
          a.row.split = r.split;
          a.row.correct = r.correct;
          a.row.wrong = r.wrong;
          cells.push_back(std::move(a));
        }
        Acc& a = cells[it->second];
        for (std::size_t m = 0; m < 3; ++m) a.scores[m].push_back(r.scores[m]);
        a.deltas.push_back(r.delta.value);
        a.row.floored = a.row.floored || r.delta.floored;
        a.row.degenerate = a.row.degenerate || r.delta.degenerate;
        ++a.row.runs;
      }
    }
  }
  std::vector<MergedRow> out;
  out.reserve(cells.size());
  for (auto& a : cells) {
    for (std::size_t m = 0; m < 3; ++m) a.row.scores[m] = pairwise_mean(a.scores[m]);
    a.row.delta = pairwise_mean(a.deltas);
    out.push_back(std::move(a.row));
  }
  return out;
}

std::vector<RankSummary> summarize_ranks(std::span<const ResultBundle> bundles) {
  const auto models = runs_by_model(bundles);
  if (models.empty()) return {};
  std::size_t runs = models.begin()->second.size();
  for (const auto& [model, list] : models) {
    if (list.size() != runs) {
      throw Error(ErrorKind::MissingCell, "model '" + model + "' has " + std::to_string(list.size()) +
                                              " runs, model '" + models.begin()->first + "' has " +
                                              std::to_string(runs));
    }
  }

  struct Acc {
    std::vector<double> performance, delta;
    std::map<Task, std::vector<double>> performance_by_task, delta_by_task;
  };
  std::map<std::string, Acc> acc;
  for (std::size_t k = 0; k < runs; ++k) {
    std::vector<RankInput> inputs;
    for (const auto& [model, list] : models) {
      for (const TaskRow& r : list[k]->rows) {
        if (r.rank_split.empty()) continue;
        inputs.push_back({model, r.task, r.rank_split, r.score(r.correct), r.delta.value});
      }
    }
    if (inputs.empty()) continue;
    for (const ModelRank& mr : rank_models(inputs)) {
      Acc& a = acc[mr.model_id];
      a.performance.push_back(mr.performance_rank);
      a.delta.push_back(mr.delta_rank);
      for (const auto& [t, v] : mr.performance_rank_by_task) a.performance_by_task[t].push_back(v);
      for (const auto& [t, v] : mr.delta_rank_by_task) a.delta_by_task[t].push_back(v);
    }
  }

  std::vector<RankSummary> out;
  for (const auto& [model, a] : acc) {
    RankSummary s;
    s.model_id = model;
    s.performance = t_interval(a.performance);
    s.delta = t_interval(a.delta);
    for (const auto& [t, v] : a.performance_by_task) s.performance_by_task[t] = t_interval(v);
    for (const auto& [t, v] : a.delta_by_task) s.delta_by_task[t] = t_interval(v);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankSummary& x, const RankSummary& y) {
    return x.performance.mean < y.performance.mean;
  });
  return out;
}

std::vector<std::filesystem::path> emit_reports(std::span<const ResultBundle> bundles,
                                                const std::filesystem::path& out_dir) {
  if (bundles.empty()) throw Error(ErrorKind::EmptyInput, "no result bundles to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  const std::vector<MergedRow> merged = merge_rows(bundles);

  for (Task task : kTasks) {
    std::string csv = "model_id,split,u_au,u_eu,u_tu,delta,runs,flags\n";
    bool any = false;
    for (const auto& r : merged) {
      if (r.task != task) continue;
      any = true;
      std::string flags;
      if (r.floored) flags = "floored";
      if (r.degenerate) flags += flags.empty() ? "degenerate" : ";degenerate";
      csv += csv_field(r.model_id) + "," + csv_field(r.split) + "," + format_number(r.scores[0]) + "," +
             format_number(r.scores[1]) + "," + format_number(r.scores[2]) + "," + format_number(r.delta) + "," +
             std::to_string(r.runs) + "," + flags + "\n";
    }
    if (!any) continue;
    const auto path = out_dir / (std::string(to_string(task)) + ".csv");
    write_text(path, csv);
    written.push_back(path);
  }

  {
    const auto ranks = summarize_ranks(bundles);
    std::set<Task> tasks;
    for (const auto& r : ranks) {
      for (const auto& [t, _] : r.performance_by_task) tasks.insert(t);
    }
    std::string csv = "model_id,runs,performance_rank,performance_rank_ci,delta_rank,delta_rank_ci";
    for (Task t : tasks) {
      csv += "," + std::string(to_string(t)) + "_performance_rank," + std::string(to_string(t)) + "_delta_rank";
    }
    csv += "\n";
    for (const auto& r : ranks) {
      csv += csv_field(r.model_id) + "," + std::to_string(r.performance.count) + "," +
             format_number(r.performance.mean) + "," + format_number(r.performance.half_width) + "," +
             format_number(r.delta.mean) + "," + format_number(r.delta.half_width);
      for (Task t : tasks) {
        const auto p = r.performance_by_task.find(t);
        const auto d = r.delta_by_task.find(t);
        csv += "," + (p == r.performance_by_task.end() ? std::string() : format_number(p->second.mean));
        csv += "," + (d == r.delta_by_task.end() ? std::string() : format_number(d->second.mean));
      }
      csv += "\n";
    }
    const auto path = out_dir / "ranks.csv";
    write_text(path, csv);
    written.push_back(path);
  }

  {
    ordered_json points = ordered_json::array();
    for (const auto& r : merged) {
      points.push_back({{"model_id", r.model_id},
                        {"task", to_string(r.task)},
                        {"split", r.split},
                        {"x_measure", to_string(r.wrong)},
                        {"y_measure", to_string(r.correct)},
                        {"x", rounded(r.scores[static_cast<std::size_t>(r.wrong)])},
                        {"y", rounded(r.scores[static_cast<std::size_t>(r.correct)])},
                        {"delta", rounded(r.delta)}});
    }
    const auto path = out_dir / "scatter.json";
    write_text(path, ordered_json{{"points", points}}.dump(2) + "\n");
    written.push_back(path);
  }

  {
    ordered_json runs = ordered_json::array();
    for (const auto& [model, list] : runs_by_model(bundles)) {
      for (const ResultBundle* b : list) {
        ordered_json collapse = ordered_json::array();
        for (const auto& c : b->collapse) {
          collapse.push_back({{"split", c.split}, {"eu_au_ratio", c.ratio.infinite ? ordered_json("inf") : rounded(c.ratio.value)}, {"images", c.images}});
        }
        ordered_json platt = ordered_json::array();
        for (const auto& p : b->platt) {
          platt.push_back({{"measure", to_string(p.measure)},
                           {"a", rounded(p.a)},
                           {"b", rounded(p.b)},
                           {"degenerate", p.degenerate}});
        }
        ordered_json segmentation = ordered_json::array();
        for (const auto& s : b->segmentation) {
          segmentation.push_back(
              {{"split", s.split}, {"dice", rounded(s.dice)}, {"ged", rounded(s.ged)}, {"images", s.images}});
        }
        runs.push_back({{"model_id", b->model_id},
                        {"seed", b->seed},
                        {"dataset_name", b->dataset_name},
                        {"seed_tag", b->seed_tag},
                        {"route", b->route},
                        {"config", ordered_json::parse(b->config_json)},
                        {"collapse", collapse},
                        {"platt", platt},
                        {"segmentation", segmentation},
                        {"warnings", b->warnings}});
      }
    }
    const ordered_json meta{{"tool", "uqeval"}, {"version", UQEVAL_VERSION}, {"runs", runs}};
    const auto path = out_dir / "run_metadata.json";
    write_text(path, meta.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace uqeval
