#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uqeval/aggregation.hpp"
#include "uqeval/config.hpp"
#include "uqeval/decompose.hpp"
#include "uqeval/entanglement.hpp"
#include "uqeval/manifest.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/npy.hpp"
#include "uqeval/pipeline.hpp"
#include "uqeval/platt.hpp"
#include "uqeval/report.hpp"
#include "uqeval/synthetic.hpp"

namespace py = pybind11;
using namespace uqeval;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using I32 = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

SampleGrid grid_from(const F64& a) {
  if (a.ndim() != 5) {
    throw Error(ErrorKind::ShapeRankError, "grid must be [M][N][C][H][W], got rank " + std::to_string(a.ndim()));
  }
  const GridShape s{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                    static_cast<std::size_t>(a.shape(2)), static_cast<std::size_t>(a.shape(3)),
                    static_cast<std::size_t>(a.shape(4))};
  return SampleGrid(s, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> grid_to(const SampleGrid& g) {
  const GridShape& s = g.shape();
  py::array_t<double> out({s.instances, s.samples, s.classes, s.rows, s.cols});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

Map map_from(const F64& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::ShapeRankError, "map must be 2-D");
  return Map(a.shape(0), a.shape(1), std::vector<double>(a.data(), a.data() + a.size()));
}

template <typename T>
py::array_t<T> image_to(const Image<T>& m) {
  py::array_t<T> out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

LabelMap labels_from(const I32& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::ShapeRankError, "label map must be 2-D");
  return LabelMap(a.shape(0), a.shape(1), std::vector<std::int32_t>(a.data(), a.data() + a.size()));
}

std::vector<LabelMap> label_stack(const I32& a) {
  if (a.ndim() != 3) throw Error(ErrorKind::ShapeRankError, "label stack must be [R][H][W]");
  std::vector<LabelMap> out;
  const std::size_t h = a.shape(1), w = a.shape(2);
  for (py::ssize_t r = 0; r < a.shape(0); ++r) {
    const std::int32_t* p = a.data() + r * h * w;
    out.emplace_back(h, w, std::vector<std::int32_t>(p, p + h * w));
  }
  return out;
}

py::dict maps_to(const UncertaintyMaps& m) {
  py::dict d;
  d["au"] = image_to(m.au);
  d["eu"] = image_to(m.eu);
  d["tu"] = image_to(m.tu);
  return d;
}

AggregationStrategy strategy_from(const std::string& name, std::size_t patch_side, double tau,
                                  std::int32_t background) {
  switch (aggregation_from_string(name)) {
    case AggregationKind::Mean: return ImageMean{};
    case AggregationKind::PatchMax: return PatchMax{patch_side};
    case AggregationKind::Threshold: return Threshold{tau};
    case AggregationKind::Area: return AreaNormalized{background};
    case AggregationKind::Border: return BorderNormalized{};
  }
  return ImageMean{};
}

}  // namespace

PYBIND11_MODULE(_uqeval, m) {
  m.doc() = "uqeval native core";
  m.attr("__version__") = UQEVAL_VERSION;

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&m] { return py::exception<Error>(m, "UqevalError"); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = error_type.get_stored();
      py::object exc = type(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  m.def("shannon_entropy", [](const F64& p) {
    return shannon_entropy(std::span<const double>(p.data(), p.size()));
  });
  m.def("decompose", [](const F64& grid) { return maps_to(decompose(grid_from(grid))); },
        "AU/EU/TU maps of an [M][N][C][H][W] grid");
  m.def("decompose_no_eu", [](const F64& grid) { return maps_to(decompose_no_eu(grid_from(grid))); });
  m.def("bma", [](const F64& grid) {
    const BmaMap b = bma(grid_from(grid));
    py::array_t<double> out({b.classes(), b.rows(), b.cols()});
    std::copy(b.values().begin(), b.values().end(), out.mutable_data());
    return out;
  });

  m.def("aggregate",
        [](const F64& u, const std::string& strategy, std::size_t patch_side, double tau, std::int32_t background,
           std::optional<I32> labels) {
          const auto s = strategy_from(strategy, patch_side, tau, background);
          if (labels) {
            const LabelMap l = labels_from(*labels);
            return aggregate(map_from(u), s, &l);
          }
          return aggregate(map_from(u), s, nullptr);
        },
        py::arg("u"), py::arg("strategy") = "mean", py::arg("patch_side") = 10, py::arg("tau") = 0.0,
        py::arg("background_class") = 0, py::arg("labels") = py::none());
  m.def("border_length", [](const I32& labels) { return border_length(labels_from(labels)); });

  m.def("auroc", [](const F64& id, const F64& ood) {
    return auroc(std::span<const double>(id.data(), id.size()), std::span<const double>(ood.data(), ood.size()));
  });
  m.def("ncc", [](const F64& a, const F64& b) { return ncc(map_from(a), map_from(b)); });
  m.def("annotator_variance_map", [](const I32& stack, std::size_t classes) {
    return image_to(annotator_variance_map(AnnotationSet(label_stack(stack)), classes));
  });
  m.def("ace",
        [](const F64& conf, const U8& correct, std::size_t bins) {
          return ace(std::span<const double>(conf.data(), conf.size()),
                     std::span<const std::uint8_t>(correct.data(), correct.size()), bins);
        },
        py::arg("confidences"), py::arg("correct"), py::arg("bins") = 20);
  m.def("dice", [](const I32& pred, const I32& ref, std::size_t classes) {
    return dice(labels_from(pred), labels_from(ref), classes);
  });
  m.def("ged", [](const I32& samples, const I32& annotations, std::size_t classes) {
    return ged(label_stack(samples), label_stack(annotations), classes);
  });

  py::class_<PlattParams>(m, "PlattParams")
      .def_readonly("a", &PlattParams::a)
      .def_readonly("b", &PlattParams::b)
      .def_readonly("degenerate", &PlattParams::degenerate)
      .def_readonly("iterations", &PlattParams::iterations)
      .def_readonly("gradient_norm", &PlattParams::gradient_norm)
      .def("confidence", &PlattParams::confidence);
  m.def("fit_platt",
        [](const F64& u, const U8& correct, const std::string& measure) {
          return fit_platt(std::span<const double>(u.data(), u.size()),
                           std::span<const std::uint8_t>(correct.data(), correct.size()),
                           measure_from_string(measure));
        },
        py::arg("u"), py::arg("correct"), py::arg("measure") = "TU");

  m.def("delta", [](double c, double w, int sign) { return delta(c, w, sign).value; }, py::arg("u_correct"),
        py::arg("u_wrong"), py::arg("sign") = 1);
  m.def("assign_measures", [](const std::string& task, const std::string& cal_wrong) {
    const TaskSpec s = assign_measures(task_from_string(task), cal_wrong_from_string(cal_wrong));
    return py::make_tuple(std::string(to_string(s.correct)), std::string(to_string(s.wrong)), s.sign);
  }, py::arg("task"), py::arg("cal_wrong") = "AU");

  m.def("read_grid", [](const std::filesystem::path& p) { return grid_to(read_grid(p)); });
  m.def("write_grid", [](const F64& g, const std::filesystem::path& p, bool float32) { write_grid(grid_from(g), p, float32); },
        py::arg("grid"), py::arg("path"), py::arg("float32") = true);
  m.def("read_label_map", [](const std::filesystem::path& p) { return image_to(read_label_map(p)); });
  m.def("write_label_map", [](const I32& l, const std::filesystem::path& p) { write_label_map(labels_from(l), p); });

  m.def("validate_manifest", [](const std::filesystem::path& p) {
    const DatasetManifest mf = load_manifest(p);
    py::dict d;
    d["dataset_name"] = mf.dataset_name;
    d["class_count"] = mf.class_count;
    d["images"] = mf.images.size();
    d["warnings"] = mf.warnings;
    return d;
  });

  m.def("synthesize",
        [](const std::filesystem::path& out_dir, std::size_t images, std::uint64_t seed, std::size_t classes,
           std::size_t size, double ood_shift) {
          WorldConfig w;
          w.seed = seed;
          w.classes = classes;
          w.rows = w.cols = size;
          w.ood_shift = ood_shift;
          DatasetConfig d;
          d.images = images;
          return write_dataset(sample_dataset(generate_world(w), d), out_dir);
        },
        py::arg("out_dir"), py::arg("images") = 40, py::arg("seed") = 0, py::arg("classes") = 2,
        py::arg("size") = 16, py::arg("ood_shift") = 1.0);

  m.def("run_pipeline",
        [](const std::filesystem::path& manifest, const std::string& config_json) {
          const RunConfig cfg = parse_run_config(config_json.empty() ? "{}" : config_json);
          ResultBundle b;
          {
            py::gil_scoped_release release;
            b = run_pipeline(load_manifest(manifest), cfg);
          }
          return bundle_to_json(b);
        },
        py::arg("manifest"), py::arg("config_json") = "",
        "Runs the pipeline and returns the result bundle as JSON text");
  m.def("emit_reports", [](const std::vector<std::string>& bundles_json, const std::filesystem::path& out_dir) {
    std::vector<ResultBundle> bundles;
    for (const auto& j : bundles_json) bundles.push_back(bundle_from_json(j));
    return emit_reports(bundles, out_dir);
  });
}
