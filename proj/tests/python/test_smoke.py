import json
import math

import numpy as np
import pytest

import uqeval


def test_decompose_worked_example():
    grid = np.array([0.9, 0.1, 0.5, 0.5]).reshape(2, 1, 2, 1, 1)
    maps = uqeval.decompose(grid)
    assert maps["au"].shape == (1, 1)
    assert maps["au"][0, 0] == pytest.approx(0.5091, abs=1e-4)
    assert maps["tu"][0, 0] == pytest.approx(0.6109, abs=1e-4)
    assert maps["eu"][0, 0] == pytest.approx(0.1018, abs=1e-4)
    assert uqeval.shannon_entropy(np.array([0.5, 0.5])) == pytest.approx(math.log(2))


def test_errors_carry_a_kind():
    with pytest.raises(uqeval.UqevalError) as info:
        uqeval.decompose(np.full((1, 1, 2, 1, 1), 0.7))
    assert info.value.kind == "NonNormalized"
    with pytest.raises(uqeval.UqevalError) as info:
        uqeval.decompose_no_eu(np.full((1, 1, 2, 1, 1), 0.5))
    assert info.value.kind == "ShapeError"


def test_metrics():
    assert uqeval.auroc(np.array([0.1, 0.5]), np.array([0.3, 0.7])) == 0.75
    assert uqeval.delta(0.5, 1.0) == pytest.approx(-0.40966, abs=1e-5)
    assert uqeval.assign_measures("CAL") == ("TU", "AU", -1)
    center = np.zeros((3, 3), dtype=np.int32)
    center[1, 1] = 1
    assert uqeval.border_length(center) == 4
    u = np.zeros((3, 3))
    u[0, 0] = 2.0
    assert uqeval.aggregate(u, "border", labels=center) == 0.5
    a = np.random.default_rng(0).normal(size=(6, 6))
    assert uqeval.ncc(a, a) == 1.0
    assert uqeval.ncc(a, 3 * a + 2) == pytest.approx(1.0, abs=1e-12)
    votes = np.array([[[0, 0]], [[0, 0]], [[1, 0]], [[1, 1]]], dtype=np.int64)
    np.testing.assert_allclose(uqeval.annotator_variance_map(votes, 2), [[0.5, 0.375]])
    conf = np.full(40, 0.775)
    right = np.zeros(40, dtype=np.uint8)
    right[:31] = 1
    assert uqeval.ace(conf, right) < 1e-12
    a = np.array([[[1, 1], [0, 0]]] * 3, dtype=np.int32)
    b = np.array([[[0, 0], [1, 1]]] * 2, dtype=np.int32)
    assert uqeval.ged(a, b, 2) == pytest.approx(math.sqrt(2))
    p = uqeval.fit_platt(np.full(100, 0.3), (np.arange(100) < 80).astype(np.uint8), "AU")
    assert p.confidence(0.3) == pytest.approx(0.8, abs=1e-6)


def _write_exporter_dataset(root, rng):
    """Writes the files an exporter produces: float32 grids, int64 labels, manifest."""
    (root / "grids").mkdir()
    (root / "labels").mkdir()
    images = []
    for i in range(12):
        image_id = f"case_{i:02d}"
        ood = i >= 8
        logits = rng.normal(size=(3, 4, 2, 8, 8)).astype(np.float64)
        if ood:
            logits += rng.normal(scale=2.0, size=(3, 1, 2, 1, 1))
        probs = np.exp(logits) / np.exp(logits).sum(axis=2, keepdims=True)
        np.save(root / "grids" / f"{image_id}.npy", probs.astype(np.float32))
        paths = []
        for r in range(3):
            labels = (rng.random((8, 8)) < probs[0, 0, 1]).astype(np.int64)
            name = f"labels/{image_id}_{r}.npy"
            np.save(root / name, labels)
            paths.append(name)
        images.append(
            {
                "image_id": image_id,
                "split": "ood:noise" if ood else "id",
                "role": "val" if i < 3 else "test",
                "grid_path": f"grids/{image_id}.npy",
                "annotation_paths": paths,
            }
        )
    manifest = {
        "schema_version": 1,
        "dataset_name": "exporter-fixture",
        "class_count": 2,
        "background_class": 0,
        "seed_tag": "numpy",
        "images": images,
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


def test_exporter_contract_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    manifest = _write_exporter_dataset(tmp_path, rng)
    info = uqeval.validate_manifest(str(manifest))
    assert info["images"] == 12
    assert info["class_count"] == 2

    grid = uqeval.read_grid(str(tmp_path / "grids" / "case_00.npy"))
    assert grid.shape == (3, 4, 2, 8, 8)
    np.testing.assert_array_equal(grid, np.load(tmp_path / "grids" / "case_00.npy").astype(np.float64))
    labels = uqeval.read_label_map(str(tmp_path / "labels" / "case_00_0.npy"))
    np.testing.assert_array_equal(labels, np.load(tmp_path / "labels" / "case_00_0.npy"))

    bundle = uqeval.run_pipeline(manifest, {"model_id": "np", "aggregation": {"strategy": "mean"}})
    assert bundle["model_id"] == "np"
    tasks = {(r["task"], r["split"]) for r in bundle["rows"]}
    assert ("oodd", "ood:noise") in tasks
    assert ("amb", "id") in tasks
    assert ("cal", "id") in tasks
    for row in bundle["rows"]:
        assert -1.0 <= row["delta"] <= 1.0

    out = tmp_path / "reports"
    written = uqeval.emit_reports([json.dumps(bundle)], str(out))
    assert {p.rsplit("/", 1)[-1] for p in map(str, written)} >= {"oodd.csv", "ranks.csv", "run_metadata.json"}
    assert (out / "oodd.csv").read_text().startswith("model_id,split,u_au,u_eu,u_tu,delta")


def test_write_grid_matches_numpy(tmp_path):
    grid = np.full((1, 2, 2, 3, 3), 0.5)
    uqeval.write_grid(grid, str(tmp_path / "g.npy"))
    loaded = np.load(tmp_path / "g.npy")
    assert loaded.dtype == np.float32
    np.testing.assert_array_equal(loaded, grid)
    labels = np.arange(6, dtype=np.int32).reshape(2, 3) % 2
    uqeval.write_label_map(labels, str(tmp_path / "l.npy"))
    np.testing.assert_array_equal(np.load(tmp_path / "l.npy"), labels)


def test_manifest_errors_surface(tmp_path):
    rng = np.random.default_rng(3)
    manifest = _write_exporter_dataset(tmp_path, rng)
    data = json.loads(manifest.read_text())
    data["class_count"] = 3
    manifest.write_text(json.dumps(data))
    with pytest.raises(uqeval.UqevalError) as info:
        uqeval.validate_manifest(str(manifest))
    assert "case_00.npy" in str(info.value)


def test_synthesize_and_run(tmp_path):
    path = uqeval.synthesize(str(tmp_path), images=20, seed=4, size=10)
    bundle = uqeval.run_pipeline(path, json.dumps({"threads": 2}))
    assert bundle["route"] == "kendall_gal"
    assert any(r["task"] == "oodd" for r in bundle["rows"])
