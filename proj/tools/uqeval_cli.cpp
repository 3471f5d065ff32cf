#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uqeval/config.hpp"
#include "uqeval/format.hpp"
#include "uqeval/manifest.hpp"
#include "uqeval/pipeline.hpp"
#include "uqeval/report.hpp"
#include "uqeval/synthetic.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw uqeval::Error(uqeval::ErrorKind::MissingFile, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct SynthArgs {
  uqeval::WorldConfig world;
  uqeval::DatasetConfig data;
  std::string mode = "onehot";
  std::string out;
  bool float64 = false;
};

struct EvalArgs {
  std::string manifest;
  std::string config_file;
  std::string out = "bundle.json";
  std::string maps_dir;
  std::string report_dir;
  uqeval::RunConfig run;
  std::string aggregation, cal_wrong;
  double tau = 0.0;
  std::int32_t background = 0;
  std::vector<std::string> tasks;
};

void add_run_flags(CLI::App* cmd, EvalArgs& a, std::vector<CLI::Option*>& given) {
  const auto keep = [&given](CLI::Option* o) { given.push_back(o); return o; };
  keep(cmd->add_option("--model-id", a.run.model_id, "Model identifier used in reports"));
  keep(cmd->add_option("--aggregation", a.aggregation, "mean | patch_max | threshold | area | border"));
  keep(cmd->add_option("--patch-side", a.run.aggregation.patch_side, "Patch side for patch_max"));
  keep(cmd->add_option("--tau", a.tau, "Fixed threshold for threshold aggregation"));
  keep(cmd->add_option("--threshold-percentile", a.run.aggregation.threshold_percentile,
                       "Percentile of ID validation pixels used when --tau is not given"));
  keep(cmd->add_option("--background-class", a.background, "Background class for area aggregation"));
  keep(cmd->add_option("--au-samples", a.run.au_samples, "Use at most N aleatoric samples per instance"));
  keep(cmd->add_option("--eu-instances", a.run.eu_instances, "Use at most M model instances"));
  keep(cmd->add_option("--ace-bins", a.run.ace_bins, "Number of ACE bins"));
  keep(cmd->add_flag("--ace-per-image", a.run.ace_per_image, "Average ACE over images instead of pooling"));
  keep(cmd->add_option("--cal-wrong", a.cal_wrong, "Wrong measure for CAL: au | eu | best"));
  keep(cmd->add_option("--platt-cap", a.run.platt_subsample_cap, "Pixel cap for the Platt fit"));
  keep(cmd->add_option("--seed", a.run.seed, "Run seed"));
  keep(cmd->add_option("--tasks", a.tasks, "Tasks to run (oodd, amb, cal)")->delimiter(','));
  keep(cmd->add_flag("--segmentation", a.run.segmentation_metrics, "Also compute Dice and GED"));
  cmd->add_option("--threads", a.run.threads, "Worker threads (default: UQEVAL_THREADS or all cores)");
}

uqeval::RunConfig resolve_run_config(const EvalArgs& a, const std::vector<CLI::Option*>& given) {
  uqeval::RunConfig base;
  if (!a.config_file.empty()) base = uqeval::parse_run_config(read_text(a.config_file));
  const auto set = [&given](const std::string& name) {
    for (const auto* o : given) {
      if (o->get_name() == name) return o->count() > 0;
    }
    return false;
  };
  if (set("--model-id")) base.model_id = a.run.model_id;
  if (set("--aggregation")) base.aggregation.kind = uqeval::aggregation_from_string(a.aggregation);
  if (set("--patch-side")) base.aggregation.patch_side = a.run.aggregation.patch_side;
  if (set("--tau")) base.aggregation.tau = a.tau;
  if (set("--threshold-percentile")) base.aggregation.threshold_percentile = a.run.aggregation.threshold_percentile;
  if (set("--background-class")) base.aggregation.background_class = a.background;
  if (set("--au-samples")) base.au_samples = a.run.au_samples;
  if (set("--eu-instances")) base.eu_instances = a.run.eu_instances;
  if (set("--ace-bins")) base.ace_bins = a.run.ace_bins;
  if (set("--ace-per-image")) base.ace_per_image = a.run.ace_per_image;
  if (set("--cal-wrong")) base.cal_wrong = uqeval::cal_wrong_from_string(a.cal_wrong);
  if (set("--platt-cap")) base.platt_subsample_cap = a.run.platt_subsample_cap;
  if (set("--seed")) base.seed = a.run.seed;
  if (set("--segmentation")) base.segmentation_metrics = a.run.segmentation_metrics;
  if (set("--tasks")) {
    base.tasks.clear();
    for (const auto& t : a.tasks) base.tasks.push_back(uqeval::task_from_string(t));
  }
  base.threads = a.run.threads;
  base.validate();
  return base;
}

void print_map_csv(const uqeval::Map& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) std::cout << ',';
      std::cout << uqeval::format_number(m(r, c));
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqeval: uncertainty decomposition and downstream-task evaluation for segmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UQEVAL_VERSION));

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic world and write a dataset");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--classes", synth.world.classes);
  s->add_option("--rows", synth.world.rows);
  s->add_option("--cols", synth.world.cols);
  s->add_option("--instances", synth.world.instances, "Model instances M");
  s->add_option("--perturbation", synth.world.perturbation_scale, "Instance logit noise scale");
  s->add_option("--ood-shift", synth.world.ood_shift, "OOD per-instance bias scale");
  s->add_option("--amplitude", synth.world.amplitude);
  s->add_option("--temperature", synth.world.temperature);
  s->add_option("--world-seed", synth.world.seed);
  s->add_option("--images", synth.data.images);
  s->add_option("--annotators", synth.data.annotators);
  s->add_option("--samples", synth.data.au_samples, "Aleatoric samples N");
  s->add_option("--mode", synth.mode, "onehot | soft | softmax");
  s->add_option("--val-fraction", synth.data.val_fraction);
  s->add_option("--ood-fraction", synth.data.ood_fraction);
  s->add_option("--ood-tag", synth.data.ood_tag);
  s->add_option("--name", synth.data.dataset_name);
  s->add_flag("--float64", synth.float64, "Write grids as float64 instead of float32");

  EvalArgs ev;
  std::vector<CLI::Option*> given;
  auto* e = app.add_subcommand("eval", "Run the evaluation pipeline on a manifest");
  e->add_option("--manifest", ev.manifest)->required()->check(CLI::ExistingFile);
  e->add_option("--config", ev.config_file, "Run configuration JSON; flags override it")->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Result bundle path");
  e->add_option("--maps-dir", ev.maps_dir, "Write per-image uncertainty maps here");
  e->add_option("--report-dir", ev.report_dir, "Also emit reports for this single bundle");
  add_run_flags(e, ev, given);

  std::vector<std::string> bundles;
  std::string report_out;
  auto* r = app.add_subcommand("report", "Merge result bundles (e.g. seed runs) and emit tables");
  r->add_option("bundles", bundles, "Result bundle files")->required()->check(CLI::ExistingFile);
  r->add_option("--out", report_out, "Report directory")->required();

  EvalArgs in;
  std::vector<CLI::Option*> in_given;
  std::string image_id, measure = "all";
  auto* i = app.add_subcommand("inspect", "Print one image's uncertainty maps as CSV grids");
  i->add_option("--manifest", in.manifest)->required()->check(CLI::ExistingFile);
  i->add_option("--image", image_id)->required();
  i->add_option("--measure", measure, "au | eu | tu | all");
  i->add_option("--au-samples", in.run.au_samples);
  i->add_option("--eu-instances", in.run.eu_instances);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) {
      synth.data.mode = uqeval::sample_mode_from_string(synth.mode);
      const auto world = uqeval::generate_world(synth.world);
      const auto dataset = uqeval::sample_dataset(world, synth.data);
      const auto path = uqeval::write_dataset(dataset, synth.out, !synth.float64);
      std::cout << path.string() << '\n';
    } else if (*e) {
      const uqeval::RunConfig config = resolve_run_config(ev, given);
      const auto manifest = uqeval::load_manifest(ev.manifest);
      for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << '\n';
      std::optional<std::filesystem::path> maps;
      if (!ev.maps_dir.empty()) maps = ev.maps_dir;
      const auto bundle = uqeval::run_pipeline(manifest, config, maps);
      uqeval::save_bundle(bundle, ev.out);
      if (!ev.report_dir.empty()) uqeval::emit_reports(std::span(&bundle, 1), ev.report_dir);
      for (const auto& row : bundle.rows) {
        std::cout << uqeval::to_string(row.task) << ' ' << row.split << " delta=" << uqeval::format_number(row.delta.value)
                  << '\n';
      }
    } else if (*r) {
      std::vector<uqeval::ResultBundle> loaded;
      for (const auto& b : bundles) loaded.push_back(uqeval::load_bundle(b));
      for (const auto& p : uqeval::emit_reports(loaded, report_out)) std::cout << p.string() << '\n';
    } else if (*i) {
      const auto manifest = uqeval::load_manifest(in.manifest);
      const auto data = uqeval::from_manifest(manifest);
      const uqeval::PipelineImage* hit = nullptr;
      for (const auto& img : data.images) {
        if (img.image_id == image_id) hit = &img;
      }
      if (!hit) throw uqeval::Error(uqeval::ErrorKind::MissingFile, "no image '" + image_id + "' in the manifest");
      const auto maps = uqeval::evaluate_image(*hit, in.run);
      for (uqeval::Measure m : uqeval::kMeasures) {
        if (measure != "all" && uqeval::measure_from_string(measure) != m) continue;
        std::cout << "# " << uqeval::to_string(m) << '\n';
        print_map_csv(maps.get(m));
      }
    }
  } catch (const uqeval::Error& err) {
    std::cerr << "uqeval: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "uqeval: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
