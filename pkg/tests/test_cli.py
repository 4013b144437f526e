"""Command-line harness: exit codes, config precedence and report determinism."""

import json

import pytest

from ckverify.cli import ConfigError, RunConfig, main


def _strip_times(doc):
    for r in doc["checks"]:
        r.pop("ms", None)
    doc["config"].pop("report", None)
    return doc


def test_verify_identities_flat(capsys):
    assert main(["verify-identities", "--chart", "flat", "--m", "3", "--points", "2"]) == 0
    out = capsys.readouterr().out
    assert "exterior oracle: wedge" in out and "all checks passed" in out


def test_verify_identities_fs_cp2(capsys):
    assert main(["verify-identities", "--chart", "fs", "--m", "2", "--k", "1", "--points", "2"]) == 0


def test_bad_interval_exits_2(capsys):
    assert main(["verify-identities", "--zmin", "2", "--zmax", "1"]) == 2
    assert "z-interval" in capsys.readouterr().err


def test_degenerate_profile_exits_2(capsys):
    assert main(["profile", "--C1", "0", "--k", "0"]) == 2


def test_unknown_flag_exits_2(capsys):
    assert main(["profile", "--bogus"]) == 2


def test_base_k_mismatch_exits_2(capsys):
    assert main(["verify-solution", "--family", "calabi", "--base", "flat", "--k", "1"]) == 2


def test_failed_check_exits_1(capsys):
    # an absurd tolerance turns the round-off residuals into failures
    assert main(["verify-solution", "--family", "toric", "--points", "2", "--tol", "1e-30"]) == 1


def test_profile_case_tags(capsys):
    assert main(["profile", "--C1", "-1", "--k", "1", "--lambda", "1"]) == 0
    err = capsys.readouterr().err
    assert "punctured" in err
    assert main(["profile", "--C1", "1", "--k", "-1", "--lambda", "1"]) == 0
    cap = capsys.readouterr()
    assert "r>a, a=1.0" in cap.err
    assert cap.out.startswith("z,X,X_prime,lambda1,lambda2,scal,tau_norm2_pred,phi_norm2_pred")


def test_json_report_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify-solution", "--family", "cone", "--m", "3", "--points", "2", "--seed", "7"]
    assert main(args + ["--report", str(a)]) == 0
    assert main(args + ["--report", str(b)]) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert _strip_times(da) == _strip_times(db)
    assert da["config"]["seed"] == 7 and da["subcommand"] == "verify-solution"


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"C1": 1.0, "k": -1.0, "lam": 4.0}))
    rep = tmp_path / "r.json"
    assert main(["profile", "--config", str(cfg), "--lambda", "1", "--report", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["config"]["lam"] == 1.0 and doc["config"]["k"] == -1.0
    assert doc["domain"]["a"] == 1.0


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["profile", "--config", str(cfg)]) == 2


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(jet_order=9).validate()
    with pytest.raises(ConfigError):
        RunConfig(subcommand="verify-solution", family="cone", m=2).validate()
    RunConfig(subcommand="verify-identities", chart="fs", m=2).validate()
