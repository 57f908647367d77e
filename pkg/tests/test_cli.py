"""Command-line front door: exit codes, report fragments, artifact
determinism, logging control, and flag validation."""

import filecmp
import json
import os

import pytest

from thermoflow.cli import main

from conftest import data_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- exit codes ---------------------------------------------------------------

def test_spec_tau_golden(capsys):
    code, out, _ = run_cli(capsys, "spec-tau", "--sft",
                           data_path("golden.json"))
    assert code == 0
    assert "tau = 1" in out
    assert "witness table" in out


def test_circle_rejected_exit_2(capsys):
    code, _, err = run_cli(capsys, "pressure", "--graph",
                           data_path("circle.json"))
    assert code == 2
    assert "fundamental group is Z: excluded case" in err


def test_unknown_subcommand_exit_64(capsys):
    code, _, err = run_cli(capsys, "frobnicate")
    assert code == 64
    assert "unknown subcommand" in err


def test_no_model_exit_64(capsys):
    code, _, err = run_cli(capsys, "spec-tau")
    assert code == 64
    assert "--sft/--graph" in err


def test_missing_file_exit_2(capsys):
    code, _, err = run_cli(capsys, "spec-tau", "--sft", "/nonexistent.json")
    assert code == 2
    assert "model rejected" in err


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "spec-tau", "--sft", str(bad))
    assert code == 2


def test_help_exit_0(capsys):
    code, out, _ = run_cli(capsys, "--help")
    assert code == 0
    assert "subcommands:" in out


# --- golden reports -----------------------------------------------------------

def test_pressure_rose2_spectral(capsys):
    code, out, _ = run_cli(capsys, "pressure", "--graph",
                           data_path("rose2.json"), "--potential",
                           data_path("zero4.json"))
    assert code == 0
    assert "P = 1.098612" in out  # log 3


def test_pressure_all_methods_spread(capsys):
    code, out, _ = run_cli(capsys, "pressure", "--sft",
                           data_path("full2.json"), "--potential",
                           data_path("zero.json"), "--method", "all")
    assert code == 0
    assert "P = 0.693147" in out  # log 2, spectral
    assert "method agreement: spread =" in out


def test_equilibrium_report(capsys):
    code, out, _ = run_cli(capsys, "equilibrium", "--sft",
                           data_path("golden.json"), "--potential",
                           data_path("zero.json"))
    assert code == 0
    assert "h(mu)        = 0.481211825" in out  # log golden ratio
    assert "variational identity" in out


def test_glue_verifies_shadowing(capsys):
    code, out, _ = run_cli(capsys, "glue", "--sft",
                           data_path("golden.json"), "--delta", "0.3",
                           "--seed", "7")
    assert code == 0
    assert "shadowing verified: True" in out
    assert "all transition times within bound: True" in out


# --- flag validation ----------------------------------------------------------

def test_seed_mandatory_for_sampling(capsys):
    code, _, err = run_cli(capsys, "glue", "--sft",
                           data_path("golden.json"), "--delta", "0.3")
    assert code == 64
    assert "--seed is mandatory" in err


def test_threads_rejected_for_serial_subcommands(capsys):
    code, _, err = run_cli(capsys, "pressure", "--sft",
                           data_path("full2.json"), "--potential",
                           data_path("zero.json"), "--threads", "4")
    assert code == 64
    assert "--threads > 1 is only allowed" in err


def test_threads_allowed_for_parallel_subcommands(capsys):
    code, out, _ = run_cli(capsys, "equidistribute", "--graph",
                           data_path("rose2.json"), "--t-grid", "2,4",
                           "--threads", "2")
    assert code == 0
    assert "threads=2" in out


def test_ldp_requires_psi(capsys):
    code, _, err = run_cli(capsys, "ldp", "--sft", data_path("full2.json"),
                           "--seed", "1")
    assert code == 64
    assert "--psi is required" in err


def test_entropy_dense_requires_eta(capsys):
    code, _, err = run_cli(capsys, "entropy-dense", "--sft",
                           data_path("full2.json"), "--seed", "0")
    assert code == 64
    assert "--eta is required" in err


# --- artifacts ----------------------------------------------------------------

def test_artifacts_bitwise_deterministic(capsys, tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code, _, _ = run_cli(capsys, "gibbs", "--sft",
                             data_path("full2.json"), "--potential",
                             data_path("phi_small.json"), "--t-grid",
                             "5,10", "--samples", "50", "--seed", "11",
                             "--out", str(d))
        assert code == 0
    assert filecmp.cmp(dirs[0] / "gibbs.csv", dirs[1] / "gibbs.csv",
                       shallow=False)


def test_artifact_embeds_config_hash_and_version(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "spec-tau", "--sft",
                           data_path("golden.json"), "--out",
                           str(tmp_path))
    assert code == 0
    with open(tmp_path / "spec_tau.json") as f:
        payload = json.load(f)
    assert payload["tau"] == 1
    assert len(payload["config_hash"]) == 16
    assert payload["config_hash"] in out  # header shows the same hash
    assert payload["version"]


def test_config_hash_ignores_out_dir(capsys, tmp_path):
    hashes = []
    for sub in ("x", "y"):
        d = tmp_path / sub
        run_cli(capsys, "spec-tau", "--sft", data_path("golden.json"),
                "--out", str(d))
        with open(d / "spec_tau.json") as f:
            hashes.append(json.load(f)["config_hash"])
    assert hashes[0] == hashes[1]


# --- logging ------------------------------------------------------------------

def test_log_level_env(capsys, monkeypatch):
    import logging
    monkeypatch.setenv("THERMOFLOW_LOG", "info")
    # basicConfig only applies to an unconfigured root logger
    root = logging.getLogger()
    old_handlers, old_level = root.handlers[:], root.level
    root.handlers.clear()
    try:
        code, out, _ = run_cli(capsys, "spec-tau", "--sft",
                               data_path("golden.json"))
        assert code == 0
        assert root.getEffectiveLevel() <= logging.INFO
    finally:
        root.handlers[:] = old_handlers
        root.setLevel(old_level)


def test_log_level_invalid_falls_back(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("THERMOFLOW_LOG", "verbose")
    code, _, _ = run_cli(capsys, "spec-tau", "--sft",
                         data_path("golden.json"))
    assert code == 0  # invalid level only warns, never fails
