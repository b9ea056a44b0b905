"""Session directories, write-ahead judgments, and edit replay."""

import json
import os

import pytest

from conftest import data_path
from proxy_audit.errors import UnknownFingerprint, UnknownSession
from proxy_audit.lang.program import print_program
from proxy_audit.oracle import DENY_ALL, Judgment
from proxy_audit.repair import APPROPRIATE, INAPPROPRIATE
from proxy_audit.session import (Session, SessionConfig, load_model,
                                 replay_edits, subexpression_rows)


@pytest.fixture()
def session(tmp_path):
    cfg = SessionConfig(
        model_path=data_path("masked_model.json"),
        dataset_path=data_path("retailer.csv"),
        protected="pregnant", epsilon=0.9, delta=0.4)
    return Session.create(str(tmp_path), cfg)


def test_create_writes_full_layout(session):
    for name in ("manifest.json", "original.txt", "current.txt",
                 "witnesses.json", "subexpr.json", "stats.json",
                 "judgments.ndjson", "edits.json"):
        assert os.path.isfile(os.path.join(session.dir, name)), name
    assert session.edits() == []
    assert session.witnesses()
    assert session.stats()["decomposition_count"] > 0
    assert session.config.protected == "pregnant"


def test_load_unknown_session_raises(tmp_path):
    with pytest.raises(UnknownSession):
        Session.load(str(tmp_path), "nosuchsession")


def test_judgments_survive_process_restart(session):
    fp = session.witnesses()[0]["fingerprint"]
    session.record_judgment(Judgment(fp, APPROPRIATE, note="fine"))
    # a fresh object simulates a new process reading the same directory
    again = Session.load(session.root, session.id)
    assert again.verdict(fp) == APPROPRIATE
    log = open(os.path.join(session.dir, "judgments.ndjson")).read()
    assert json.loads(log.strip())["note"] == "fine"


def test_judgment_rejects_unknown_fingerprint(session):
    with pytest.raises(UnknownFingerprint):
        session.record_judgment(Judgment("f" * 64, APPROPRIATE))


def test_latest_judgment_wins_after_reload(session):
    fp = session.witnesses()[0]["fingerprint"]
    session.record_judgment(Judgment(fp, APPROPRIATE))
    session.record_judgment(Judgment(fp, INAPPROPRIATE))
    again = Session.load(session.root, session.id)
    assert again.verdict(fp) == INAPPROPRIATE
    assert len(again.judgment_store().history) == 2


def test_run_repair_updates_and_replays(session):
    for w in session.witnesses():
        session.record_judgment(Judgment(w["fingerprint"], INAPPROPRIATE))
    result = session.run_repair()
    assert result["edits"]
    assert result["residual_witnesses"] == []
    assert session.witnesses() == []
    # replaying the persisted edit log reproduces current.txt exactly
    replayed = replay_edits(session.original_program(), session.edits())
    assert print_program(replayed) == print_program(session.program())
    assert print_program(session.program()) != \
        print_program(session.original_program())


def test_run_repair_with_policy(session):
    result = session.run_repair(policy=DENY_ALL)
    assert result["iterations"] >= 1
    assert session.witnesses() == []


def test_load_model_accepts_program_text(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("lambda a. a + 1.0\n")
    p = load_model(str(path))
    assert print_program(p) == "lambda a. a + 1.0"


def test_load_model_accepts_program_document(tmp_path, masked_model):
    from proxy_audit.translate import program_to_json
    path = tmp_path / "m.json"
    path.write_text(json.dumps(program_to_json(masked_model)))
    assert print_program(load_model(str(path))) == \
        print_program(masked_model)


def test_subexpression_rows_parent_links(retailer, masked_model):
    from proxy_audit.detection import DetectionConfig, measure_all
    everything = measure_all(masked_model, retailer,
                             DetectionConfig(0.0, 0.0))
    rows = subexpression_rows(everything)
    assert len(rows) == len(everything)
    by_pos = {r["position"]: r for r in rows}
    # a nested guard's parent is its enclosing branch subterm
    assert by_pos["2.1"]["parent"] == "2"
    assert by_pos["2.1.1"]["parent"] == "2.1"
    assert by_pos["1"]["parent"] == "e"
    assert by_pos["e"]["parent"] == ""
    for r in rows:
        assert set(r) >= {"position", "parent", "association", "influence",
                          "subterm_size", "reach_prob", "p1"}
