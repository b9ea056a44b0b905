"""Proxy-use detection: enumerate, measure, threshold, emit witnesses.

proxy_detect is the optimized path (bytecode kernel, per-decomposition
caches, association-first short-circuit). reference_detect recomputes
everything naively with the tree-walking evaluator and no caches; the
two must agree, which the test suite checks on random programs.
"""

from __future__ import annotations

import hashlib
import time
from collections import Counter
from dataclasses import dataclass, field
from math import log2
from typing import Optional, Union

import numpy as np

from .dataset import Population, discretize
from .errors import UnboundVariable
from .lang import expr as E
from .lang.decompose import (Decomposition, EnumerationLimits,
                             enumerate_decompositions)
from .lang.program import (Program, evaluate, fingerprint_text,
                           print_program)
from .measures import (EstimatorConfig, build_cache, cache_association,
                       influence_exact, influence_sampled)


@dataclass(frozen=True)
class DetectionConfig:
    epsilon: float
    delta: float
    limits: EnumerationLimits = EnumerationLimits()
    estimator: Union[str, EstimatorConfig] = "exact"
    bins: int = 10

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0 or not 0.0 <= self.delta <= 1.0:
            raise ValueError("thresholds must lie in [0, 1]")
        if isinstance(self.estimator, str) and self.estimator != "exact":
            raise ValueError(f"unknown estimator {self.estimator!r}")


@dataclass(frozen=True)
class Witness:
    fingerprint: str
    p1_text: str
    p2_text: str
    positions: tuple[str, ...]
    association: float
    influence: float
    reach_prob: float
    subterm_size: int
    decomposition: Decomposition = field(compare=False, repr=False)

    def to_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "p1": self.p1_text,
            "p2": self.p2_text,
            "positions": list(self.positions),
            "association": round(self.association, 6),
            "influence": round(self.influence, 6),
            "reach_prob": round(self.reach_prob, 6),
            "subterm_size": self.subterm_size,
        }


@dataclass
class DetectionStats:
    decomposition_count: int
    max_range: int
    dataset_size: int
    program_size: int
    wall_time: float
    incomplete: bool
    min_branching: int

    def to_dict(self) -> dict:
        return {
            "decomposition_count": self.decomposition_count,
            "max_range": self.max_range,
            "dataset_size": self.dataset_size,
            "program_size": self.program_size,
            "wall_time": self.wall_time,
            "incomplete": self.incomplete,
            "min_branching": self.min_branching,
        }


def fingerprint_of(p1: Program) -> str:
    return hashlib.sha256(fingerprint_text(p1).encode("utf-8")).hexdigest()


def _witness_sort_key(w: Witness):
    return (-w.association, -w.influence, w.fingerprint, w.positions)


def _min_branching(p: Program) -> int:
    widths = [len(n.children()) for n in p.body.walk() if n.children()]
    return min(widths) if widths else 0


def _check_params(p: Program, pop: Population) -> None:
    missing = set(p.params) - set(pop.names)
    if missing:
        raise UnboundVariable(
            f"program parameters not in population: {sorted(missing)}")


def proxy_detect(p: Program, pop: Population,
                 cfg: DetectionConfig) -> tuple[list[Witness], DetectionStats]:
    """Alg.-style detection: witnesses with association >= epsilon and
    influence >= delta; influence is skipped when association falls short."""
    _check_params(p, pop)
    t0 = time.perf_counter()
    enum = enumerate_decompositions(p, cfg.limits)
    witnesses: list[Witness] = []
    max_range = 0
    for dec in enum:
        cache = build_cache(dec, pop, bins=cfg.bins)
        max_range = max(max_range, cache.range_size)
        assoc = cache_association(cache)
        if assoc < cfg.epsilon:
            continue
        if cfg.estimator == "exact":
            infl = influence_exact(dec, pop, cache)
        else:
            infl = influence_sampled(dec, pop, cfg.estimator, cache)
        if infl < cfg.delta:
            continue
        witnesses.append(_make_witness(dec, assoc, infl, cache.reach_prob))
    witnesses.sort(key=_witness_sort_key)
    stats = DetectionStats(
        decomposition_count=len(enum),
        max_range=max_range,
        dataset_size=pop.size,
        program_size=p.node_count(),
        wall_time=time.perf_counter() - t0,
        incomplete=enum.incomplete,
        min_branching=_min_branching(p),
    )
    return witnesses, stats


def _make_witness(dec: Decomposition, assoc: float, infl: float,
                  reach_prob: float) -> Witness:
    return Witness(
        fingerprint=fingerprint_of(dec.p1),
        p1_text=print_program(dec.p1),
        p2_text=print_program(dec.p2),
        positions=tuple(str(q) for q in dec.positions),
        association=assoc,
        influence=infl,
        reach_prob=reach_prob,
        subterm_size=dec.subterm.node_count(),
        decomposition=dec,
    )


def measure_all(p: Program, pop: Population,
                cfg: DetectionConfig) -> list[Witness]:
    """Every enumerated decomposition with its measures, no thresholding.

    Feeds reports and the review UI's scatter; influence is always
    computed here (no short-circuit)."""
    _check_params(p, pop)
    enum = enumerate_decompositions(p, cfg.limits)
    out = []
    for dec in enum:
        cache = build_cache(dec, pop, bins=cfg.bins)
        assoc = cache_association(cache)
        if cfg.estimator == "exact":
            infl = influence_exact(dec, pop, cache)
        else:
            infl = influence_sampled(dec, pop, cfg.estimator, cache)
        out.append(_make_witness(dec, assoc, infl, cache.reach_prob))
    out.sort(key=_witness_sort_key)
    return out


def count_decompositions(p: Program,
                         limits: EnumerationLimits = EnumerationLimits()) -> int:
    return len(enumerate_decompositions(p, limits))


# ---------------------------------------------------------------------------
# Naive reference path

def _entropy_of(counter: Counter, total: int) -> float:
    h = 0.0
    for c in counter.values():
        if c:
            q = c / total
            h -= q * log2(q)
    return h


def reference_association(xs, zs) -> float:
    n = len(xs)
    joint = Counter(zip(xs, zs))
    hx = _entropy_of(Counter(xs), n)
    hz = _entropy_of(Counter(zs), n)
    hxz = _entropy_of(joint, n)
    if hxz == 0.0:
        return 0.0
    return min(1.0, max(0.0, (hx + hz - hxz) / hxz))


def reference_influence(dec: Decomposition, rows: list[dict]) -> float:
    """Direct double-expectation over D x D, grouped by distinct p1 value
    (algebraically identical to the row-pair double loop)."""
    n = len(rows)
    p1_vals = [evaluate(dec.p1, r) for r in rows]
    parent = [evaluate(dec.parent, r) for r in rows]
    y_counts = Counter(p1_vals)
    mismatches = 0.0
    for r, base in zip(rows, parent):
        for y, c in y_counts.items():
            ext = dict(r)
            ext[dec.fresh_var] = y
            if evaluate(dec.p2, ext) != base:
                mismatches += c
    return mismatches / (n * n)


def reference_detect(p: Program, pop: Population,
                     cfg: DetectionConfig) -> list[Witness]:
    """Unoptimized oracle: tree-walk evaluation, no caches, no
    reachability shortcut, full influence for every decomposition."""
    _check_params(p, pop)
    rows = [pop.row_dict(i) for i in range(pop.size)]
    zs = [r[pop.protected] for r in rows]
    out = []
    for dec in enumerate_decompositions(p, cfg.limits):
        xs = [evaluate(dec.p1, r) for r in rows]
        xb = discretize(np.asarray(xs, dtype=np.float64), cfg.bins).tolist()
        assoc = reference_association(xb, zs)
        infl = reference_influence(dec, rows)
        if assoc >= cfg.epsilon and infl >= cfg.delta:
            reach = _reference_reach_prob(dec, rows)
            out.append(_make_witness(dec, assoc, infl, reach))
    out.sort(key=_witness_sort_key)
    return out


def _reference_reach_prob(dec: Decomposition, rows: list[dict]) -> float:
    from .lang.decompose import path_literals
    conds = [path_literals(dec.parent.body, q) for q in dec.positions]
    hits = 0
    for r in rows:
        for lits in conds:
            if all(bool(_eval_guard(g, r)) == want for g, want in lits):
                hits += 1
                break
    return hits / len(rows)


def _eval_guard(g: E.Expr, row: dict):
    from .lang.program import eval_expr
    return eval_expr(g, row)
