"""Witness-driven repair: local search, constant substitution, fixpoint.

One repair step picks, among the witness's local expressions, a constant
substitution that drives the witness below threshold (influence <= delta
OR association <= epsilon) while maximizing utility. The loop repeats
detection and single repairs until every remaining witness is approved
by the oracle.

Termination measure: each edit replaces a non-constant expression with a
constant, so the number of non-constant nodes strictly decreases (total
node count never increases; it stays equal only when a lone variable is
replaced).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dataset import Population
from .detection import DetectionConfig, Witness, proxy_detect
from .errors import MissingLabel, OracleSuspended, StaleWitness
from .kernel import compile_program, evaluate_matrix
from .lang import expr as E
from .lang.decompose import (Decomposition, make_decomposition, replace_many)
from .lang.expr import Bool, Expr, Ite, Real, print_expr
from .lang.positions import Position, all_positions, subterm_at
from .lang.program import Program, canonical_eq, print_program

APPROPRIATE = "appropriate"
INAPPROPRIATE = "inappropriate"
UNDECIDED = "undecided"

OracleFn = Callable[[Witness], str]


@dataclass(frozen=True)
class UtilityMeasure:
    kind: str = "agreement"        # agreement | accuracy_01 | neg_mse
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("agreement", "accuracy_01", "neg_mse"):
            raise ValueError(f"unknown utility kind {self.kind!r}")
        if self.kind != "agreement" and self.label is None:
            raise MissingLabel(f"{self.kind} needs a label column")


@dataclass(frozen=True)
class RepairEdit:
    positions: tuple[str, ...]
    before: str
    constant: str

    def to_dict(self) -> dict:
        return {"positions": list(self.positions), "before": self.before,
                "constant": self.constant}


@dataclass
class RepairOutcome:
    repaired: Program
    applied_edits: list[RepairEdit]
    iterations: int
    residual_witnesses: list[Witness]


def _nonconstant_nodes(p: Program) -> int:
    return sum(1 for n in p.body.walk() if not n.is_constant)


def _check_witness(p: Program, w: Witness) -> Decomposition:
    dec = w.decomposition
    try:
        for q in dec.positions:
            if not canonical_eq(Program(p.params, subterm_at(p.body, q),
                                        dict(p.var_types)),
                                dec.p1):
                raise StaleWitness(f"subterm at {q} no longer matches")
    except Exception as exc:
        if isinstance(exc, StaleWitness):
            raise
        raise StaleWitness(f"witness positions no longer resolve: {exc}") \
            from exc
    return dec


def local_decompositions(p: Program, w: Witness) -> list[Decomposition]:
    """Local expressions of the witness, each as a decomposition of p.

    Locals are the subterms of p1 (p1 itself included), and, when p1
    guards an ite, both branches of that ite with their subterms.
    Constant locals are dropped (nothing to gain replacing a constant).
    """
    dec = _check_witness(p, w)
    groups: dict[tuple, tuple[Position, ...]] = {}

    def add(abs_positions: tuple[Position, ...]):
        key = tuple(q.steps for q in abs_positions)
        groups.setdefault(key, abs_positions)

    # subterms of p1, mapped through every witness occurrence
    for rel in all_positions(dec.p1.body):
        sub = subterm_at(dec.p1.body, rel)
        if sub.is_constant:
            continue
        add(tuple(_absolute(q, rel.steps) for q in dec.positions))

    # enclosing-ite branches when p1 is a guard
    for q in dec.positions:
        steps = q.steps
        if not steps or isinstance(steps[-1], frozenset) or steps[-1] != 1:
            continue
        parent_node = subterm_at(p.body, Position(steps[:-1]))
        if not isinstance(parent_node, Ite):
            continue
        for branch in (2, 3):
            base = steps[:-1] + (branch,)
            branch_node = subterm_at(p.body, Position(base))
            for rel in all_positions(branch_node):
                sub = subterm_at(branch_node, rel)
                if sub.is_constant:
                    continue
                add((Position(base + rel.steps),))

    out = []
    for abs_positions in groups.values():
        out.append(make_decomposition(p, abs_positions))
    # deterministic order; p1 itself is always present (rel = epsilon)
    out.sort(key=lambda d: tuple(q.sort_key() for q in d.positions))
    return out


def _absolute(witness_q: Position, rel: tuple) -> Position:
    steps = witness_q.steps
    if steps and isinstance(steps[-1], frozenset):
        if not rel:
            return witness_q
        picked = sorted(steps[-1])
        first, rest = rel[0], rel[1:]
        return Position(steps[:-1] + (picked[first - 1],) + rest)
    return Position(steps + rel)


def path_condition_rows(p: Program, dec: Decomposition,
                        pop: Population) -> np.ndarray:
    """Boolean row mask: rows whose evaluation reaches the decomposition
    (the rows satisfying the path condition phi)."""
    from .measures import build_cache
    cache = build_cache(dec, pop)
    return cache.reach.astype(bool)


def optimal_constant(p: Program, dec: Decomposition, pop: Population,
                     v: UtilityMeasure,
                     baseline: Optional[np.ndarray] = None) -> float:
    """Closed-form constant for an arithmetic local: the label mode
    (classification; ties to the smallest value) or label mean
    (regression) over the rows satisfying phi, global fallback."""
    targets = _targets(p, pop, v, baseline)
    mask = path_condition_rows(p, dec, pop)
    chosen = targets[mask] if mask.any() else targets
    if v.kind == "neg_mse":
        return float(np.mean(chosen))
    values, counts = np.unique(chosen, return_counts=True)
    return float(values[np.argmax(counts)])  # np.unique sorts: ties -> smallest


def _targets(p: Program, pop: Population, v: UtilityMeasure,
             baseline: Optional[np.ndarray]) -> np.ndarray:
    if v.kind == "agreement":
        if baseline is not None:
            return baseline
        return evaluate_matrix(compile_program(p, pop.columns), pop.matrix)
    if v.label is None or v.label not in pop.names:
        raise MissingLabel(f"no label column {v.label!r}")
    return pop.column(v.label)


def _utility(candidate: Program, pop: Population, v: UtilityMeasure,
             targets: np.ndarray) -> float:
    pred = evaluate_matrix(compile_program(candidate, pop.columns), pop.matrix)
    if v.kind == "neg_mse":
        return -float(np.mean((pred - targets) ** 2))
    return float(np.mean(pred == targets))


def proxy_repair_step(p: Program, w: Witness, pop: Population,
                      epsilon: float, delta: float,
                      v: UtilityMeasure = UtilityMeasure(),
                      bins: int = 10) -> tuple[Program, RepairEdit]:
    """One repair: the utility-maximal qualifying constant substitution."""
    from .measures import build_cache, cache_association, influence_exact

    _check_witness(p, w)
    targets = _targets(p, pop, v, None)
    locals_ = local_decompositions(p, w)
    best = None
    for ldec in locals_:
        env = {name: p.type_of(name) for name in p.params}
        sub_type, _ = E.infer_types(ldec.subterm, env=env)
        if sub_type == E.BOOL:
            candidates: list[Expr] = [Bool(True), Bool(False)]
        elif v.kind == "neg_mse":
            candidates = [Real(optimal_constant(p, ldec, pop, v, targets))]
        else:
            candidates = [Real(float(c)) for c in np.unique(targets)]
        # best constant for this local by utility alone, then the
        # acceptance test on the original witness with it substituted
        scored = []
        for const in candidates:
            body = replace_many(p.body, ldec.positions, const)
            candidate = Program(p.params, body, dict(p.var_types))
            scored.append((_utility(candidate, pop, v, targets),
                           candidate, const))
        util, candidate, const = max(scored, key=lambda t: t[0])
        try:
            wdec = make_decomposition(candidate, w.decomposition.positions)
        except Exception:
            continue
        cache = build_cache(wdec, pop, bins=bins)
        assoc = cache_association(cache)
        infl = influence_exact(wdec, pop, cache)
        if not (infl <= delta or assoc <= epsilon):
            continue
        if best is None or util > best[0] + 1e-12:
            edit = RepairEdit(
                positions=tuple(str(q) for q in ldec.positions),
                before=print_expr(ldec.subterm),
                constant=print_expr(const),
            )
            best = (util, candidate, edit)
    if best is None:  # pragma: no cover - p1 itself always qualifies
        raise StaleWitness("no qualifying repair candidate")
    _, candidate, edit = best
    assert _nonconstant_nodes(candidate) < _nonconstant_nodes(p)
    assert candidate.node_count() <= p.node_count()
    return candidate, edit


def proxy_repair(p: Program, w: Witness, pop: Population,
                 epsilon: float, delta: float,
                 v: UtilityMeasure = UtilityMeasure()) -> Program:
    return proxy_repair_step(p, w, pop, epsilon, delta, v)[0]


def repair_loop(p: Program, pop: Population, cfg: DetectionConfig,
                oracle: OracleFn,
                v: UtilityMeasure = UtilityMeasure()) -> RepairOutcome:
    """Detect, consult the oracle, repair one denied witness, repeat."""
    current = p
    edits: list[RepairEdit] = []
    iterations = 0
    budget = p.node_count()
    while True:
        witnesses, _ = proxy_detect(current, pop, cfg)
        verdicts = [(w, oracle(w)) for w in witnesses]
        undecided = [w for w, verdict in verdicts if verdict == UNDECIDED]
        if undecided:
            raise OracleSuspended(undecided)
        denied = [w for w, verdict in verdicts if verdict == INAPPROPRIATE]
        if not denied:
            return RepairOutcome(current, edits, iterations, witnesses)
        # witnesses arrive sorted by descending (association, influence)
        target = denied[0]
        current, edit = proxy_repair_step(current, target, pop,
                                          cfg.epsilon, cfg.delta, v,
                                          bins=cfg.bins)
        edits.append(edit)
        iterations += 1
        assert iterations <= budget, "repair exceeded its termination bound"
