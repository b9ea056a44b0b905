"""Audit sessions: a directory per session holding plain documents.

Layout under <root>/<id>/:
    manifest.json      inputs, thresholds, seed
    original.txt       program as first translated/parsed
    current.txt        program after applied edits
    witnesses.json     latest detection snapshot
    subexpr.json       measures for every enumerated decomposition
    stats.json         detection statistics
    judgments.ndjson   append-only judgment log (write-ahead)
    edits.json         applied repair edits

Replaying edits.json on original.txt reproduces current.txt.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass
from typing import Optional

from .dataset import Population, load_csv
from .detection import (DetectionConfig, DetectionStats, Witness, measure_all,
                        proxy_detect)
from .errors import (IoError, OracleSuspended, UnknownFingerprint,
                     UnknownSession)
from .lang.decompose import EnumerationLimits
from .lang.parser import parse_program
from .lang.program import Program, print_program
from .measures import EstimatorConfig
from .oracle import Judgment, JudgmentStore, Policy, judge
from .repair import UNDECIDED, RepairEdit, UtilityMeasure, repair_loop
from .translate import load_model_doc, translate


def load_model(path: str) -> Program:
    """A model document (.json) or a textual program (anything else)."""
    if path.endswith(".json"):
        doc = load_model_doc(path)
        if doc.get("kind") == "program":
            from .translate import json_to_program
            return json_to_program(doc)
        return translate(doc)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_program(fh.read().strip())
    except OSError as exc:
        raise IoError(f"cannot read model: {exc}") from exc


def subexpression_rows(witnesses: list[Witness]) -> list[dict]:
    """One report row per enumerated decomposition with a parent link
    (longest proper prefix among the other rows' positions)."""
    rows = []
    firsts = [w.positions[0] for w in witnesses]
    for w in witnesses:
        mine = w.positions[0]
        parent = ""
        depth = -1
        for other in firsts:
            if other == mine:
                continue
            if _is_prefix(other, mine) and _depth(other) > depth:
                parent = other
                depth = _depth(other)
        row = w.to_dict()
        row["position"] = mine
        row["parent"] = parent
        rows.append(row)
    return rows


def _depth(a: str) -> int:
    return 0 if a == "e" else a.count(".") + 1


def _is_prefix(a: str, b: str) -> bool:
    if a == "e":
        return b != "e"
    return b.startswith(a + ".") or b.startswith(a + ".{")


def replay_edits(program: Program, edits: list[dict]) -> Program:
    """Apply a persisted edit log; used to check session integrity."""
    from .lang.decompose import replace_many
    from .lang.parser import parse_expr
    from .lang.positions import parse_position
    current = program
    for e in edits:
        positions = [parse_position(t) for t in e["positions"]]
        const = parse_expr(e["constant"])
        body = replace_many(current.body, positions, const)
        current = Program(current.params, body, dict(current.var_types))
    return current


@dataclass
class SessionConfig:
    model_path: str
    dataset_path: str
    protected: str
    label: Optional[str] = None
    epsilon: float = 0.9
    delta: float = 0.4
    seed: int = 0
    bins: int = 10
    estimator: str = "exact"
    alpha: float = 0.05
    beta: float = 0.05
    max_subset_size: int = 3
    max_decompositions: int = 100_000

    def detection_config(self) -> DetectionConfig:
        est = ("exact" if self.estimator == "exact"
               else EstimatorConfig(self.alpha, self.beta, self.seed))
        return DetectionConfig(
            epsilon=self.epsilon, delta=self.delta,
            limits=EnumerationLimits(self.max_subset_size,
                                     self.max_decompositions),
            estimator=est, bins=self.bins)


class Session:
    def __init__(self, root: str, sid: str):
        self.root = root
        self.id = sid
        self.dir = os.path.join(root, sid)
        self._store: Optional[JudgmentStore] = None

    # -- creation / loading -------------------------------------------------

    @classmethod
    def create(cls, root: str, cfg: SessionConfig) -> "Session":
        sid = uuid.uuid4().hex[:12]
        s = cls(root, sid)
        os.makedirs(s.dir)
        program = load_model(cfg.model_path)
        manifest = {"id": sid, "created": time.time(), **cfg.__dict__}
        s._write_json("manifest.json", manifest)
        s._write_text("original.txt", print_program(program))
        s._write_text("current.txt", print_program(program))
        s._write_json("edits.json", [])
        open(os.path.join(s.dir, "judgments.ndjson"), "a").close()
        s.refresh_detection()
        return s

    @classmethod
    def load(cls, root: str, sid: str) -> "Session":
        s = cls(root, sid)
        if not os.path.isfile(os.path.join(s.dir, "manifest.json")):
            raise UnknownSession(f"no session {sid!r} under {root}")
        return s

    # -- persistence helpers -------------------------------------------------

    def _write_json(self, name: str, obj) -> None:
        path = os.path.join(self.dir, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def _write_text(self, name: str, text: str) -> None:
        with open(os.path.join(self.dir, name), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")

    def _read_json(self, name: str):
        with open(os.path.join(self.dir, name), "r", encoding="utf-8") as fh:
            return json.load(fh)

    def _read_text(self, name: str) -> str:
        with open(os.path.join(self.dir, name), "r", encoding="utf-8") as fh:
            return fh.read().strip()

    # -- state ----------------------------------------------------------------

    @property
    def config(self) -> SessionConfig:
        m = self._read_json("manifest.json")
        fields = {k: m[k] for k in SessionConfig.__dataclass_fields__
                  if k in m}
        return SessionConfig(**fields)

    def population(self) -> Population:
        cfg = self.config
        return load_csv(cfg.dataset_path, cfg.protected, cfg.label)

    def program(self) -> Program:
        return parse_program(self._read_text("current.txt"))

    def original_program(self) -> Program:
        return parse_program(self._read_text("original.txt"))

    def witnesses(self) -> list[dict]:
        return self._read_json("witnesses.json")

    def subexpressions(self) -> list[dict]:
        return self._read_json("subexpr.json")

    def stats(self) -> dict:
        return self._read_json("stats.json")

    def edits(self) -> list[dict]:
        return self._read_json("edits.json")

    # -- judgments -----------------------------------------------------------

    def judgment_store(self) -> JudgmentStore:
        if self._store is None:
            store = JudgmentStore()
            path = os.path.join(self.dir, "judgments.ndjson")
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        d = json.loads(line)
                        store.extend_known([d["fingerprint"]])
                        store.record(Judgment(**d))
            store.extend_known(w["fingerprint"] for w in self.witnesses())
            self._store = store
        return self._store

    def record_judgment(self, j: Judgment) -> None:
        store = self.judgment_store()
        known = {w["fingerprint"] for w in self.witnesses()}
        known |= {x.fingerprint for x in store.history}
        if j.fingerprint not in known:
            raise UnknownFingerprint(f"unknown fingerprint {j.fingerprint}")
        # write-ahead: persist before acknowledging in memory
        path = os.path.join(self.dir, "judgments.ndjson")
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(j.to_dict()) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        store.extend_known([j.fingerprint])
        store.record(j)

    def verdict(self, fingerprint: str) -> str:
        active = self.judgment_store().active(fingerprint)
        return active.verdict if active else UNDECIDED

    # -- detection / repair ----------------------------------------------------

    def refresh_detection(self) -> tuple[list[Witness], DetectionStats]:
        cfg = self.config
        pop = self.population()
        program = self.program()
        det = cfg.detection_config()
        found, stats = proxy_detect(program, pop, det)
        everything = measure_all(program, pop, det)
        self._write_json("witnesses.json", [w.to_dict() for w in found])
        self._write_json("subexpr.json", subexpression_rows(everything))
        self._write_json("stats.json", stats.to_dict())
        if self._store is not None:
            self._store.extend_known(w.fingerprint for w in found)
        return found, stats

    def run_repair(self, policy: Optional[Policy] = None) -> dict:
        cfg = self.config
        pop = self.population()
        det = cfg.detection_config()
        store = self.judgment_store()
        utility = (UtilityMeasure("accuracy_01", cfg.label) if cfg.label
                   else UtilityMeasure())
        outcome = repair_loop(self.program(), pop, det,
                              lambda w: judge(w, store, policy), utility)
        prior = self.edits()
        new_edits = [e.to_dict() for e in outcome.applied_edits]
        self._write_text("current.txt", print_program(outcome.repaired))
        self._write_json("edits.json", prior + new_edits)
        self.refresh_detection()
        return {
            "edits": new_edits,
            "residual_witnesses": [w.to_dict()
                                   for w in outcome.residual_witnesses],
            "iterations": outcome.iterations,
        }
