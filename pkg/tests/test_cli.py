"""Exit codes and artifacts of the command line interface."""

import json
import os

import pytest

from conftest import data_path
from proxy_audit.cli import (EXIT_INPUT, EXIT_OK, EXIT_SUSPENDED,
                             EXIT_VIOLATIONS, main)


def _detect_args(model, out, **extra):
    args = ["detect",
            "--model", data_path(model),
            "--dataset", data_path("retailer.csv"),
            "--protected", "pregnant",
            "--out", out]
    for k, v in extra.items():
        args += [f"--{k.replace('_', '-')}", str(v)]
    return args


def test_detect_masked_model_flags_violation(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(_detect_args("masked_model.json", out)) == EXIT_VIOLATIONS
    stdout = capsys.readouterr().out
    assert "witness" in stdout
    with open(os.path.join(out, "witnesses.json")) as fh:
        witnesses = json.load(fh)
    assert witnesses[0]["association"] == 1.0
    assert witnesses[0]["influence"] == 0.5
    for name in ("stats.json", "subexpressions.json", "subexpressions.csv"):
        assert os.path.isfile(os.path.join(out, name))


def test_detect_clean_model_exits_zero(tmp_path):
    out = str(tmp_path / "out")
    code = main(_detect_args("nouse_model.json", out, epsilon=0.1, delta=0.0))
    assert code == EXIT_OK
    with open(os.path.join(out, "witnesses.json")) as fh:
        assert json.load(fh) == []


def test_detect_missing_file_exits_one(tmp_path, capsys):
    args = _detect_args("masked_model.json", str(tmp_path))
    args[args.index("--dataset") + 1] = str(tmp_path / "missing.csv")
    assert main(args) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_detect_bad_protected_column_exits_one(tmp_path, capsys):
    args = _detect_args("masked_model.json", str(tmp_path))
    args[args.index("--protected") + 1] = "zz"
    assert main(args) == EXIT_INPUT


def _repair_args(out, **extra):
    args = ["repair",
            "--model", data_path("masked_model.json"),
            "--dataset", data_path("retailer.csv"),
            "--protected", "pregnant",
            "--out", out]
    for k, v in extra.items():
        key = f"--{k.replace('_', '-')}"
        args += [key] if v is True else [key, str(v)]
    return args


def test_repair_with_deny_policy(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = main(_repair_args(out,
                             policy=data_path("deny_purchase_policy.json")))
    assert code == EXIT_OK
    with open(os.path.join(out, "edits.json")) as fh:
        edits = json.load(fh)
    assert edits and edits[0]["constant"] in ("0.0", "1.0", "true", "false")
    with open(os.path.join(out, "repaired.txt")) as fh:
        repaired = fh.read()
    assert "applied" in capsys.readouterr().out
    assert repaired.strip().startswith("lambda")
    # repaired model re-detects clean at the same thresholds
    with open(os.path.join(out, "witnesses.json")) as fh:
        assert json.load(fh) == []
    # the emitted model document round-trips through the loader
    args = _detect_args("masked_model.json", out)
    args[args.index("--model") + 1] = os.path.join(out,
                                                   "repaired_model.json")
    assert main(args) == EXIT_OK


def test_repair_undecided_suspends(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert main(_repair_args(out)) == EXIT_SUSPENDED
    assert "suspended" in capsys.readouterr().err


def test_repair_undecided_fallbacks(tmp_path):
    out = str(tmp_path / "a")
    assert main(_repair_args(out, undecided="approve")) == EXIT_OK
    with open(os.path.join(out, "edits.json")) as fh:
        assert json.load(fh) == []
    out = str(tmp_path / "b")
    assert main(_repair_args(out, undecided="deny")) == EXIT_OK
    with open(os.path.join(out, "edits.json")) as fh:
        assert json.load(fh) != []


def test_repair_interactive(tmp_path, capsys, monkeypatch):
    answers = iter(["x", "d"])
    monkeypatch.setattr("builtins.input", lambda prompt: next(answers))
    out = str(tmp_path / "out")
    assert main(_repair_args(out, interactive=True)) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "association=1.000000" in stdout


def test_report_command(tmp_path):
    from proxy_audit.session import Session, SessionConfig
    root = str(tmp_path / "sessions")
    s = Session.create(root, SessionConfig(
        model_path=data_path("masked_model.json"),
        dataset_path=data_path("retailer.csv"), protected="pregnant"))
    out = str(tmp_path / "out")
    assert main(["report", "--session-root", root, "--session", s.id,
                 "--out", out]) == EXIT_OK
    with open(os.path.join(out, "subexpressions.json")) as fh:
        doc = json.load(fh)
    assert doc["epsilon"] == 0.9
    assert doc["rows"]
    assert main(["report", "--session-root", root, "--session", "nope",
                 "--out", out]) == EXIT_INPUT


def test_translate_command(tmp_path, capsys):
    assert main(["translate", "--model",
                 data_path("masked_model.json")]) == EXIT_OK
    text = capsys.readouterr().out.strip()
    assert text.startswith("lambda purchase, engagement.")
    out = str(tmp_path / "p.txt")
    assert main(["translate", "--model", data_path("masked_model.json"),
                 "--out", out]) == EXIT_OK
    assert open(out).read().strip() == text


def test_sampled_estimator_flag(tmp_path):
    out = str(tmp_path / "out")
    code = main(_detect_args("masked_model.json", out, estimator="sampled",
                             seed=3))
    assert code == EXIT_VIOLATIONS
