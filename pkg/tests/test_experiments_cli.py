import json
import subprocess
import sys
from pathlib import Path

import pytest

from voronet import cli, experiments as ex


def test_schema_validation_errors():
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "nope"})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "cell-moments", "bogus": 1})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "cell-moments", "replicates": -5})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "cell-moments", "replicates": 1.5})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "gain-sweep", "alphas": [1.5]})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "meta-distribution", "x_grid": [1.5]})
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"experiment": "meta-distribution", "theta_db": []})
    cfg = ex.ExperimentConfig.from_dict({"experiment": "cell-moments"})
    assert cfg.params["replicates"] == 100_000
    assert cfg.params["seed"] == 0


def test_catalog_stable_and_complete():
    cat = catalog = ex.catalog()
    assert len(cat) == 9
    names = [c["experiment"] for c in cat]
    assert names == sorted(names)
    parsed = json.loads(ex.list_experiments())
    assert parsed == catalog
    for entry in parsed:
        assert entry["description"]
        assert entry["reproduces"]


def test_run_writes_artifacts_and_determinism(tmp_path):
    conf = {"experiment": "oned-appendix", "seed": 12, "replicates": 20_000, "grid_points": 15}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(conf))
    s1 = ex.run(p, {"output_dir": str(tmp_path / "a")})
    s2 = ex.run(p, {"output_dir": str(tmp_path / "b")})
    f1 = Path(s1["csv_files"][0]).read_bytes()
    f2 = Path(s2["csv_files"][0]).read_bytes()
    assert f1 == f2
    assert (tmp_path / "a" / "oned-appendix-summary.json").exists()
    summary = json.loads((tmp_path / "a" / "oned-appendix-summary.json").read_text())
    assert summary["seed"] == 12
    assert "runtime_seconds" in summary
    # CSV row count equals the declared grid size (+ comment + header)
    lines = f1.decode().strip().split("\n")
    assert lines[0].startswith("#") and "seed=12" in lines[0]
    assert len(lines) == 2 + 15


def test_seed_override(tmp_path):
    conf = {"experiment": "oned-appendix", "seed": 1, "replicates": 5_000}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(conf))
    s1 = ex.run(p, {"output_dir": str(tmp_path / "a"), "seed": 99})
    assert s1["seed"] == 99


def test_malformed_config_no_partial_output(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"experiment": "cell-moments", "bogus": 1}')
    out = tmp_path / "out"
    rc = cli.main(["run", str(p), "--out", str(out)])
    assert rc == cli.EXIT_CONFIG
    assert not out.exists() or not list(out.iterdir())


def test_cli_list_and_exit_codes(tmp_path):
    assert cli.main(["list"]) == 0
    missing = tmp_path / "none.json"
    assert cli.main(["run", str(missing)]) == cli.EXIT_CONFIG
    notjson = tmp_path / "nj.json"
    notjson.write_text("{{{{")
    assert cli.main(["run", str(notjson)]) == cli.EXIT_CONFIG


def test_cli_run_subprocess(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"experiment": "oned-appendix", "seed": 4, "replicates": 10_000}))
    proc = subprocess.run(
        [sys.executable, "-m", "voronet.cli", "run", str(conf), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "oned-appendix" in proc.stdout
