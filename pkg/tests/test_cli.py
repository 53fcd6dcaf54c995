"""End-to-end command-line checks, every invocation in a subprocess."""

import csv
import filecmp
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parent.parent / "src"


def run_cli(*argv, cwd=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = str(SRC) + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run(
        [sys.executable, "-m", "fracspec", *argv],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=env,
    )


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# ----------------------------------------------------------------------------
# top level
# ----------------------------------------------------------------------------


def test_no_arguments_is_a_usage_error():
    proc = run_cli()
    assert proc.returncode == 1


def test_version_flag():
    proc = run_cli("--version")
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("fracspec ")


def test_missing_required_argument_exits_one(tmp_path):
    proc = run_cli("nodes", "--scale", "2.0", "--out-dir", str(tmp_path))
    assert proc.returncode == 1


# ----------------------------------------------------------------------------
# nodes
# ----------------------------------------------------------------------------


def test_nodes_writes_full_precision_csv(tmp_path):
    proc = run_cli("nodes", "--n", "5", "--scale", "2.0", "--out-dir", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    with open(tmp_path / "nodes.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "xi", "x"]
    assert len(rows) == 6
    # 17 significant digits round-trip the doubles exactly
    assert float(rows[1][2]) == 2.0 / math.tan(math.pi / 10.0)
    assert float(rows[3][2]) == 0.0
    manifest = read_json(tmp_path / "nodes_manifest.json")
    assert manifest["subcommand"] == "nodes"
    assert manifest["outputs"] == ["nodes.csv"]
    assert "total" in manifest["timings"]


# ----------------------------------------------------------------------------
# factor
# ----------------------------------------------------------------------------


def test_factor_report_fields_and_scale_division(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    assert run_cli("factor", "--n", "24", "--scale", "1.0", "--out-dir", str(a_dir)).returncode == 0
    assert run_cli("factor", "--n", "24", "--scale", "2.0", "--out-dir", str(b_dir)).returncode == 0
    a = read_json(a_dir / "factor_report.json")
    b = read_json(b_dir / "factor_report.json")
    for key in ("N", "min_lambda", "raw_zero_lambda", "condition_number", "reconstruction_residual"):
        assert key in a
    assert a["N"] == 24
    assert a["min_lambda"] < 0
    assert a["min_lambda"] == 4.0 * b["min_lambda"]
    assert a["condition_number"] == b["condition_number"]
    assert a["reconstruction_residual"] <= 1e-7


# ----------------------------------------------------------------------------
# fraclap
# ----------------------------------------------------------------------------


def test_fraclap_against_exact_reference(tmp_path):
    proc = run_cli(
        "fraclap", "--dims", "17,18", "--scales", "3.0,3.1", "--s", "0.37",
        "--compare-exact", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    for name in ("fraclap_field.csv", "fraclap_field.json", "fraclap_report.json",
                 "fraclap_manifest.json"):
        assert (tmp_path / name).exists()
    report = read_json(tmp_path / "fraclap_report.json")
    assert report["max_error"] <= 1e-3
    assert report["wall_time_core"] >= 0.0
    manifest = read_json(tmp_path / "fraclap_manifest.json")
    assert sorted(manifest["outputs"]) == [
        "fraclap_field.csv", "fraclap_field.json", "fraclap_report.json",
    ]


def test_fraclap_accepts_csv_field(tmp_path):
    from fracspec import gaussian_field, make_grid, write_field_csv

    grids = [make_grid(8, 2.0), make_grid(9, 2.5)]
    write_field_csv(tmp_path / "in.csv", gaussian_field(grids))
    proc = run_cli(
        "fraclap", "--dims", "8,9", "--scales", "2.0,2.5", "--s", "0.5",
        "--field", f"csv:{tmp_path / 'in.csv'}", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr


def test_fraclap_rejects_mismatched_csv_shape(tmp_path):
    from fracspec import gaussian_field, make_grid, write_field_csv

    grids = [make_grid(8, 2.0)]
    write_field_csv(tmp_path / "in.csv", gaussian_field(grids))
    proc = run_cli(
        "fraclap", "--dims", "9", "--scales", "2.0", "--s", "0.5",
        "--field", f"csv:{tmp_path / 'in.csv'}", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 1
    assert "parameter error" in proc.stderr


def test_fraclap_rejects_unknown_field(tmp_path):
    proc = run_cli(
        "fraclap", "--dims", "8", "--scales", "2.0", "--s", "0.5",
        "--field", "sombrero", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 1


def test_fraclap_rejects_dims_scales_mismatch(tmp_path):
    proc = run_cli(
        "fraclap", "--dims", "8,9", "--scales", "2.0", "--s", "0.5",
        "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 1


# ----------------------------------------------------------------------------
# fracplap
# ----------------------------------------------------------------------------


def test_fracplap_cross_checks_modes_and_reference(tmp_path):
    proc = run_cli(
        "fracplap", "--dims", "12", "--scales", "2.0", "--s", "0.4", "--p", "2.0",
        "--mode", "batch", "--check-other-mode", "--compare-exact",
        "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    report = read_json(tmp_path / "fracplap_report.json")
    assert report["mode"] == "batch"
    assert report["discrepancy_vs_other_mode"] <= 1e-13
    assert "max_error" in report


def test_fracplap_pole_is_a_contract_violation(tmp_path):
    proc = run_cli(
        "fracplap", "--dims", "12", "--scales", "2.0", "--s", "0.8", "--p", "2.5",
        "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 2
    assert "PoleError" in proc.stderr
    assert "positive integer" in proc.stderr


def test_fracplap_compare_exact_requires_quadratic(tmp_path):
    proc = run_cli(
        "fracplap", "--dims", "12", "--scales", "2.0", "--s", "0.4", "--p", "1.5",
        "--compare-exact", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 1
    assert "p = 2" in proc.stderr


def test_fracplap_warns_outside_representation_range(tmp_path):
    proc = run_cli(
        "fracplap", "--dims", "10", "--scales", "2.0", "--s", "0.7", "--p", "3.0",
        "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    assert "formula-defined" in proc.stderr


def test_fracplap_single_thread_runs_are_byte_identical(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    argv = ("fracplap", "--dims", "11", "--scales", "2.0", "--s", "0.6",
            "--p", "1.7", "--threads", "1")
    assert run_cli(*argv, "--out-dir", str(a_dir)).returncode == 0
    assert run_cli(*argv, "--out-dir", str(b_dir)).returncode == 0
    assert filecmp.cmp(a_dir / "fracplap_field.csv", b_dir / "fracplap_field.csv", shallow=False)


# ----------------------------------------------------------------------------
# evolve
# ----------------------------------------------------------------------------


TINY_CFG = """\
n = 1
s = 0.5
p = 2.0
N = 24
L = 5.0
dt = 0.01
t_end = 0.03
snapshot_times = 0.01,0.03
"""


def test_evolve_writes_snapshots_and_report(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(TINY_CFG)
    proc = run_cli("evolve", "--config", str(cfg), "--out-dir", str(tmp_path))
    assert proc.returncode == 0, proc.stderr
    for name in ("snap_t0.01.csv", "snap_t0.03.csv"):
        with open(tmp_path / name) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "u", "r", "v"]
        assert len(rows) == 25
    report = read_json(tmp_path / "evolve_report.json")
    assert report["drift"] <= 1e-6
    assert len(report["masses"]) == 2
    assert report["initial_mass"] == pytest.approx(math.sqrt(math.pi), rel=1e-3)
    manifest = read_json(tmp_path / "evolve_manifest.json")
    assert manifest["parameters"]["N"] == 24


def test_evolve_missing_config_exits_one(tmp_path):
    proc = run_cli("evolve", "--config", str(tmp_path / "nope.cfg"),
                   "--out-dir", str(tmp_path))
    assert proc.returncode == 1
    assert "parameter error" in proc.stderr


# ----------------------------------------------------------------------------
# validate
# ----------------------------------------------------------------------------


@pytest.mark.parametrize("suite", ["lemmas", "hyp", "gamma"])
def test_validate_suites_pass(tmp_path, suite):
    proc = run_cli("validate", "--suite", suite, "--out-dir", str(tmp_path))
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = read_json(tmp_path / "validate_report.json")
    assert report["suite"] == suite
    assert report["all_pass"] is True
    for check in report["checks"]:
        assert check["pass"] is True, check
        assert check["max_deviation"] <= check["tolerance"]


def test_validate_unknown_suite_exits_one(tmp_path):
    proc = run_cli("validate", "--suite", "everything", "--out-dir", str(tmp_path))
    assert proc.returncode == 1


# ----------------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------------


def test_bench_compares_routes(tmp_path):
    proc = run_cli(
        "bench", "--dims", "10", "--scales", "2.0", "--s", "0.45", "--p", "2.0",
        "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    report = read_json(tmp_path / "bench_report.json")
    assert report["wall_time_loop"] >= 0.0
    assert report["wall_time_batch"] >= 0.0
    assert report["discrepancy"] <= 1e-13
    assert report["max_error"] <= 1e-2


def test_bench_respects_memory_guard(tmp_path):
    # 8 * 10**2 = 800 bytes; a 700-byte budget forces the loop-only path
    proc = run_cli(
        "bench", "--dims", "10", "--scales", "2.0", "--s", "0.45", "--p", "1.5",
        "--mem-budget", "700", "--out-dir", str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    report = read_json(tmp_path / "bench_report.json")
    assert report["wall_time_batch"] is None
    assert "memory guard" in report["batch_note"]
    assert "discrepancy" not in report
