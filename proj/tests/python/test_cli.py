import csv
import json
import subprocess


def run(cli, *args):
    return subprocess.run([cli, *map(str, args)], check=False, capture_output=True, text=True)


def test_synth_eval_report(cli, tmp_path):
    data = tmp_path / "data"
    assert run(cli, "synth", "--out", data, "--images", 24, "--rows", 10, "--cols", 10).returncode == 0
    bundles = []
    for seed in (0, 1):
        out = tmp_path / f"b{seed}.json"
        res = run(cli, "eval", "--manifest", data / "manifest.json", "--out", out, "--seed", seed,
                  "--model-id", f"m{seed}", "--patch-side", 4)
        assert res.returncode == 0, res.stderr
        bundles.append(out)
    res = run(cli, "report", *bundles, "--out", tmp_path / "rep")
    assert res.returncode == 0, res.stderr
    with open(tmp_path / "rep" / "ranks.csv") as f:
        rows = list(csv.DictReader(f))
    assert {r["model_id"] for r in rows} == {"m0", "m1"}
    meta = json.loads((tmp_path / "rep" / "run_metadata.json").read_text())
    assert meta["tool"] == "uqeval"


def test_inspect(cli, tmp_path):
    data = tmp_path / "data"
    run(cli, "synth", "--out", data, "--images", 6, "--rows", 5, "--cols", 5)
    res = run(cli, "inspect", "--manifest", data / "manifest.json", "--image", "img_00002", "--measure", "EU")
    assert res.returncode == 0, res.stderr
    lines = res.stdout.strip().splitlines()
    assert lines[0].startswith("# EU")
    assert len(lines) == 6


def test_errors_exit_with_status_two(cli, tmp_path):
    (tmp_path / "m.json").write_text("{ broken")
    res = run(cli, "eval", "--manifest", tmp_path / "m.json", "--out", tmp_path / "b.json")
    assert res.returncode == 2
    assert "ParseError" in res.stderr
