"""The normative judgment oracle: who decides whether a proxy use is
appropriate.

Precedence: an explicitly recorded judgment wins over any policy rule,
which wins over the default (undecided). Judgments are keyed by witness
fingerprint so they survive re-detection, folds, and repair iterations.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import IoError, UnknownFingerprint
from .detection import Witness
from .lang.parser import parse_program
from .repair import APPROPRIATE, INAPPROPRIATE, UNDECIDED

VERDICTS = (APPROPRIATE, INAPPROPRIATE, UNDECIDED)


@dataclass(frozen=True)
class Judgment:
    fingerprint: str
    verdict: str
    note: str = ""
    timestamp: float = 0.0
    author: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.timestamp == 0.0:
            object.__setattr__(self, "timestamp", time.time())

    def to_dict(self) -> dict:
        return {"fingerprint": self.fingerprint, "verdict": self.verdict,
                "note": self.note, "timestamp": self.timestamp,
                "author": self.author}


@dataclass(frozen=True)
class PolicyRule:
    mentions: frozenset
    min_association: float
    min_influence: float
    verdict: str

    def matches(self, w: Witness) -> bool:
        if w.association < self.min_association:
            return False
        if w.influence < self.min_influence:
            return False
        if not self.mentions:
            return True
        p1 = parse_program(w.p1_text)
        return bool(p1.body.free_vars() & self.mentions)


@dataclass(frozen=True)
class Policy:
    rules: tuple[PolicyRule, ...] = ()
    default: str = UNDECIDED

    def verdict_for(self, w: Witness) -> str:
        for rule in self.rules:
            if rule.matches(w):
                return rule.verdict
        return self.default

    @staticmethod
    def from_dict(doc: dict) -> "Policy":
        default = doc.get("default", UNDECIDED)
        if default not in VERDICTS:
            raise IoError(f"bad default verdict {default!r}")
        rules = []
        for r in doc.get("rules", []):
            verdict = r.get("verdict")
            if verdict not in VERDICTS:
                raise IoError(f"bad rule verdict {verdict!r}")
            rules.append(PolicyRule(
                mentions=frozenset(r.get("mentions", [])),
                min_association=float(r.get("min_association", 0.0)),
                min_influence=float(r.get("min_influence", 0.0)),
                verdict=verdict,
            ))
        return Policy(tuple(rules), default)

    @staticmethod
    def load(path: str) -> "Policy":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return Policy.from_dict(json.load(fh))
        except OSError as exc:
            raise IoError(f"cannot read policy file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoError(f"bad JSON in policy file: {exc}") from exc


APPROVE_ALL = Policy(default=APPROPRIATE)
DENY_ALL = Policy(default=INAPPROPRIATE)


class JudgmentStore:
    """Append-only judgment history; the latest record per fingerprint
    is the active one."""

    def __init__(self, known: Optional[Iterable[str]] = None):
        self._history: list[Judgment] = []
        self._known: Optional[set] = set(known) if known is not None else None

    def extend_known(self, fingerprints: Iterable[str]) -> None:
        if self._known is None:
            self._known = set()
        self._known.update(fingerprints)

    def record(self, j: Judgment) -> None:
        if self._known is not None and j.fingerprint not in self._known:
            raise UnknownFingerprint(f"unknown fingerprint {j.fingerprint}")
        self._history.append(j)

    def active(self, fingerprint: str) -> Optional[Judgment]:
        for j in reversed(self._history):
            if j.fingerprint == fingerprint:
                return j
        return None

    @property
    def history(self) -> tuple[Judgment, ...]:
        return tuple(self._history)


def judge(w: Witness, store: Optional[JudgmentStore] = None,
          policy: Optional[Policy] = None) -> str:
    """Recorded judgment if any, else policy verdict, else undecided."""
    if store is not None:
        recorded = store.active(w.fingerprint)
        if recorded is not None:
            return recorded.verdict
    if policy is not None:
        return policy.verdict_for(w)
    return UNDECIDED
