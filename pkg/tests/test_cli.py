import json
import subprocess
import sys

import pytest

from qaffine.cli import main


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "qaffine.cli", *args], capture_output=True, text=True,
                          env=env)


def test_unknown_suite_is_config_error():
    r = run("verify", "--suite", "nope")
    assert r.returncode == 2 and "unknown suite" in r.stderr


def test_bad_selector_is_config_error():
    assert run("verify", "--suite", "normal-ordering", "--space", "0").returncode == 2
    assert run("verify", "--suite", "highest-weight", "--space", "5").returncode == 2
    assert run("verify", "--suite", "dhat", "--lambda", "3L2").returncode == 2
    assert run("verify", "--suite", "dhat", "--depth", "x").returncode == 2


def test_passing_suite_exit_zero(tmp_path):
    out = tmp_path / "r.json"
    rc = main(["verify", "--suite", "highest-weight", "--space", "1", "--depth", "4", "-o", str(out)])
    rep = json.loads(out.read_text())
    assert rc == 0 and rep["pass"]
    assert rep["config"]["seed"] == 0
    assert {e["id"] for e in rep["relations"]} == {
        "e0 kills highest vector [V(1)]", "e1 kills highest vector [V(1)]",
        "e2 kills highest vector [V(1)]", "weight of highest vector [V(1)]",
        "highest vector has degree 0 [V(1)]"}


def test_failing_suite_exit_one(tmp_path):
    out = tmp_path / "r.tsv"
    rc = main(["verify", "--suite", "normal-ordering", "--format", "tsv", "-o", str(out)])
    lines = out.read_text().splitlines()
    assert rc == 1
    assert len(lines) == 23
    assert any(l.startswith("X Y Y prefactor\tFAIL") for l in lines)


def test_reports_are_byte_identical(tmp_path):
    args = ["verify", "--suite", "dhat", "--depth", "3", "--sample", "4", "--seed", "3"]
    a = run(*args)
    b = run(*args, "--jobs", "2")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_seed_changes_the_sample():
    base = ["verify", "--suite", "sl2-drinfeld", "--lambda", "2L0", "--depth", "4", "--window", "1",
            "--sample", "3"]
    a = json.loads(run(*base, "--seed", "1").stdout)
    b = json.loads(run(*base, "--seed", "2").stdout)
    assert a["config"]["seed"] == 1 and b["config"]["seed"] == 2
    assert a["pass"] and b["pass"]


def test_timing_is_opt_in():
    r = run("verify", "--suite", "linking", "--depth", "2", "--window", "0", "--timing")
    assert "wall_time_s" in r.stdout
    r = run("verify", "--suite", "linking", "--depth", "2", "--window", "0")
    assert "wall_time_s" not in r.stdout


def test_cache_dir_from_environment(tmp_path):
    import os
    env = dict(os.environ, QAFFINE_CACHE_DIR=str(tmp_path))
    r = run("verify", "--suite", "s-reflection", "--lambda", "2L0", "--depth", "5", env=env)
    assert r.returncode == 0
    assert any(p.name.startswith("sl2_2_0") for p in tmp_path.iterdir())
    # a corrupt cache file is a configuration error
    for p in tmp_path.iterdir():
        p.write_text('{"format": "other"}')
    r = run("verify", "--suite", "s-reflection", "--lambda", "2L0", "--depth", "5", env=env)
    assert r.returncode == 2


def test_chars_space0_has_empty_diff():
    r = run("chars", "--space", "0", "--depth", "3")
    assert r.returncode == 0
    diff = r.stdout.split("# diff\n")[1].split("# branching")[0]
    assert diff == ""


def test_chars_depth_zero_space1():
    r = run("chars", "--space", "1", "--depth", "0", "--format", "json")
    data = json.loads(r.stdout)
    assert data["equal"]
    assert {w["mult"] for w in data["constructed"]["weights"]} == {1}


def test_oracle_only():
    r = run("chars", "--oracle-only", "c2", "--level", "1", "--depth", "2")
    assert r.returncode == 0
    assert r.stdout.count("# oracle") == 3
    assert "constructed" not in r.stdout
