#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "uqeval/decompose.hpp"
#include "uqeval/manifest.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/reduce.hpp"
#include "uqeval/synthetic.hpp"

using namespace uqeval;

namespace {

double map_mean(const Map& m) { return pairwise_mean(m.values()); }

WorldConfig small_world(std::uint64_t seed = 3) {
  WorldConfig w;
  w.seed = seed;
  w.rows = w.cols = 12;
  return w;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("fields are deterministic and on the simplex") {
    const auto a = generate_world(small_world());
    const auto b = generate_world(small_world());
    CHECK(a.annotator_dist.values().size() == 2 * 12 * 12);
    for (std::size_t i = 0; i < a.annotator_dist.values().size(); ++i) {
      REQUIRE(a.annotator_dist.values()[i] == b.annotator_dist.values()[i]);
    }
    const auto f = image_fields(a, 5, true);
    for (std::size_t r = 0; r < 12; ++r) {
      for (std::size_t w = 0; w < 12; ++w) {
        REQUIRE(f.model_family[3](0, r, w) + f.model_family[3](1, r, w) == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
    const auto other = generate_world(small_world(4));
    CHECK(other.annotator_dist(0, 0, 0) != a.annotator_dist(0, 0, 0));
  }

  TEST_CASE("zero perturbation gives identical instances and no EU") {
    WorldConfig cfg = small_world();
    cfg.perturbation_scale = 0.0;
    const auto world = generate_world(cfg);
    for (std::size_t k = 1; k < cfg.instances; ++k) {
      CHECK(world.model_family[k].values()[7] == world.model_family[0].values()[7]);
    }
    const auto maps = oracle_decompose(world, 2, false);
    for (double v : maps.eu.values()) REQUIRE(v == 0.0);
  }

  TEST_CASE("EU grows with the perturbation scale") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      double last = -1.0;
      for (double scale : {0.25, 0.5, 1.0}) {
        WorldConfig cfg = small_world(seed);
        cfg.perturbation_scale = scale;
        const auto world = generate_world(cfg);
        double eu = 0.0;
        for (std::size_t i = 0; i < 10; ++i) eu += map_mean(oracle_decompose(world, i, false).eu);
        CHECK(eu > last);
        last = eu;
      }
    }
  }

  TEST_CASE("OOD raises EU, and zero shift makes OOD indistinguishable") {
    WorldConfig cfg = small_world(11);
    const auto world = generate_world(cfg);
    std::vector<double> id, ood;
    for (std::size_t i = 0; i < 60; ++i) {
      id.push_back(map_mean(oracle_decompose(world, i, false).eu));
      ood.push_back(map_mean(oracle_decompose(world, i + 60, true).eu));
    }
    CHECK(auroc(id, ood) > 0.9);

    cfg.ood_shift = 0.0;
    const auto flat = generate_world(cfg);
    for (Measure m : kMeasures) {
      id.clear();
      ood.clear();
      for (std::size_t i = 0; i < 200; ++i) {
        id.push_back(map_mean(oracle_decompose(flat, i, false).get(m)));
        ood.push_back(map_mean(oracle_decompose(flat, i + 200, true).get(m)));
      }
      CHECK(std::abs(auroc(id, ood) - 0.5) <= 0.05);
    }
  }

  TEST_CASE("many annotators recover the ambiguity structure") {
    const auto world = generate_world(small_world(5));
    DatasetConfig d;
    d.images = 4;
    d.annotators = 64;
    d.val_fraction = 0.0;
    d.ood_fraction = 0.0;
    const auto ds = sample_dataset(world, d);
    for (const auto& img : ds.images) {
      const Map var = annotator_variance_map(img.annotations, 2);
      const auto maps = oracle_decompose(world, img.index, false);
      CHECK(ncc(var, maps.au) > 0.7);
      CHECK(ncc(var, maps.au) > ncc(var, maps.eu));
    }
  }

  TEST_CASE("dataset layout") {
    const auto world = generate_world(small_world());
    DatasetConfig d;
    d.images = 20;
    d.annotators = 3;
    d.au_samples = 4;
    const auto ds = sample_dataset(world, d);
    REQUIRE(ds.images.size() == 20);
    std::size_t val = 0, ood = 0;
    for (const auto& img : ds.images) {
      val += img.role == "val";
      ood += img.ood;
      if (img.role == "val") CHECK(img.split == "id");
      if (img.ood) CHECK(img.split == "ood:shift");
      CHECK(img.grid.shape() == GridShape{10, 4, 2, 12, 12});
      CHECK(img.annotations.raters() == 3);
    }
    CHECK(val == 4);
    CHECK(ood == 8);
    CHECK(ds.images.front().image_id == "img_00000");
    CHECK(ds.images.back().ood);
  }

  TEST_CASE("sample modes") {
    const auto world = generate_world(small_world());
    const auto fields = image_fields(world, 0, false);
    const auto soft = sample_grid(world, fields, 0, 3, SampleMode::Soft);
    const auto hot = sample_grid(world, fields, 0, 3, SampleMode::OneHot);
    const auto sm = sample_grid(world, fields, 0, 3, SampleMode::Softmax);
    CHECK(sm.shape().samples == 1);
    CHECK(sm(2, 0, 1, 4, 5) == fields.model_family[2](1, 4, 5));
    const double h = hot(1, 2, 0, 3, 3);
    CHECK((h == 0.0 || h == 1.0));
    const double p = fields.model_family[1](0, 3, 3);
    const double s = soft(1, 2, 0, 3, 3);
    CHECK((s == doctest::Approx(0.5 * p) || s == doctest::Approx(0.5 * p + 0.5)));
    CHECK(sample_mode_from_string("soft") == SampleMode::Soft);
    CHECK_THROWS_AS(sample_mode_from_string("hard"), Error);
  }

  TEST_CASE("sampled decomposition converges to the exact maps") {
    WorldConfig cfg = small_world(8);
    cfg.instances = 32;
    const auto world = generate_world(cfg);
    const std::size_t counts[] = {4, 32, 256};
    const auto curve = oracle_convergence_check(world, counts);
    REQUIRE(curve.size() == 3);
    CHECK(curve[2].mad() < curve[1].mad());
    CHECK(curve[1].mad() < curve[0].mad());
    // The plug-in entropy of N one-hot draws is biased low by about (C - 1) / (2N).
    CHECK(curve[1].bias_au < 0.0);
    CHECK(std::abs(curve[1].bias_au + 1.0 / 64.0) < 0.005);
    CHECK(std::abs(curve[1].bias_tu) < 0.005);
    CHECK(std::abs(curve[2].bias_au) < 0.004);
    const auto soft = oracle_convergence_check(world, counts, SampleMode::Softmax);
    CHECK(soft[0].mad() < 1e-12);
  }

  TEST_CASE("written datasets pass manifest validation") {
    const auto dir = std::filesystem::temp_directory_path() / "uqeval_test_synth";
    std::filesystem::remove_all(dir);
    const auto world = generate_world(small_world());
    DatasetConfig d;
    d.images = 6;
    d.au_samples = 2;
    const auto path = write_dataset(sample_dataset(world, d), dir);
    const auto mf = load_manifest(path);
    CHECK(mf.images.size() == 6);
    CHECK(mf.class_count == 2);
    CHECK(mf.seed_tag == "seed=3");
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("config validation") {
    WorldConfig w;
    w.classes = 1;
    CHECK_THROWS_AS(w.validate(), Error);
    DatasetConfig d;
    d.val_fraction = 1.5;
    CHECK_THROWS_AS(d.validate(), Error);
  }
}
