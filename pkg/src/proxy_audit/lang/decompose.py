"""Program decompositions: (p1, u, p2) splits and their enumeration.

A decomposition carves a subterm out of a program at one or more
occurrence positions. p1 computes the subterm; p2 is the original body
with a fresh variable at each chosen position. Substituting p1's body
back for the fresh variable reconstructs the parent.

Enumeration considers every non-constant subterm, every nonempty subset
of its non-overlapping occurrences, and, at associative n-ary nodes,
proper operand subsets (so x1 + x3 is extractable from x1 + x2 + x3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from ..errors import LimitExceeded, UnknownVariable
from . import expr as E
from .expr import Expr, NAry, Var, print_expr
from .positions import Position, Step, all_positions, subterm_at
from .program import Program, canonical_text


@dataclass(frozen=True)
class Decomposition:
    parent: Program
    positions: tuple[Position, ...]
    fresh_var: str
    p1: Program
    p2: Program

    @property
    def subterm(self) -> Expr:
        return self.p1.body

    def __str__(self) -> str:
        where = ", ".join(str(q) for q in self.positions)
        return f"{print_expr(self.subterm)} @ [{where}]"


@dataclass(frozen=True)
class EnumerationLimits:
    max_subset_size: int = 3
    max_decompositions: int = 100_000


@dataclass
class EnumerationResult:
    decompositions: list[Decomposition]
    incomplete: bool = False

    def __iter__(self):
        return iter(self.decompositions)

    def __len__(self):
        return len(self.decompositions)


def substitute_all(p1: Program, x: str, p2: Program) -> Program:
    """[p1/x]p2: replace every occurrence of variable x in p2 by p1's body."""
    if x not in p2.params:
        raise UnknownVariable(f"{x!r} is not a parameter of the context program")
    extra = set(p1.params) - (set(p2.params) - {x})
    if extra:
        raise UnknownVariable(
            f"subprogram parameters {sorted(extra)} missing from context")
    body = _subst(p2.body, x, p1.body)
    params = tuple(v for v in p2.params if v != x)
    types = {v: t for v, t in p2.var_types.items() if v != x}
    return Program(params, body, types)


def _subst(e: Expr, x: str, s: Expr) -> Expr:
    if isinstance(e, Var):
        return s if e.name == x else e
    kids = e.children()
    if not kids:
        return e
    new = tuple(_subst(k, x, s) for k in kids)
    if new == kids:
        return e
    if isinstance(e, NAry):
        return NAry(e.op, new)
    if isinstance(e, E.Bin):
        return E.Bin(e.op, new[0], new[1])
    if isinstance(e, E.Not):
        return E.Not(new[0])
    if isinstance(e, E.Rel):
        return E.Rel(e.op, new[0], new[1])
    return E.Ite(new[0], new[1], new[2])


def fresh_variable(parent: Program) -> str:
    used = set(parent.params) | parent.body.free_vars()
    if "u" not in used:
        return "u"
    i = 1
    while f"u{i}" in used:
        i += 1
    return f"u{i}"


def replace_many(body: Expr, positions: Iterable[Position],
                 replacement: Expr) -> Expr:
    """Replace the subterms at several non-overlapping positions.

    All replacements happen in one pass so operand-subset removals at a
    shared n-ary node cannot invalidate each other's indices.
    """
    items = [q.steps for q in positions]
    return _replace_many(body, items, replacement)


def _replace_many(node: Expr, items: list[tuple[Step, ...]], v: Expr) -> Expr:
    if any(len(s) == 0 for s in items):
        # non-overlap guarantees this is the only item
        return v
    kids = node.children()
    subset_steps = [s[0] for s in items if isinstance(s[0], frozenset)]
    by_child: dict[int, list[tuple[Step, ...]]] = {}
    for s in items:
        if isinstance(s[0], int):
            by_child.setdefault(s[0], []).append(s[1:])
    out: list[Expr] = []
    for i, kid in enumerate(kids, start=1):
        owner = next((ss for ss in subset_steps if i in ss), None)
        if owner is not None:
            if i == min(owner):
                out.append(v)
            continue
        if i in by_child:
            out.append(_replace_many(kid, by_child[i], v))
        else:
            out.append(kid)
    if isinstance(node, NAry):
        return out[0] if len(out) == 1 else NAry(node.op, tuple(out))
    if isinstance(node, E.Bin):
        return E.Bin(node.op, out[0], out[1])
    if isinstance(node, E.Not):
        return E.Not(out[0])
    if isinstance(node, E.Rel):
        return E.Rel(node.op, out[0], out[1])
    if isinstance(node, E.Ite):
        return E.Ite(out[0], out[1], out[2])
    raise LimitExceeded(f"cannot descend into {node}")  # pragma: no cover


def make_decomposition(parent: Program, positions: Iterable[Position],
                       fresh_var: Optional[str] = None) -> Decomposition:
    qs = tuple(sorted(positions, key=Position.sort_key))
    var = fresh_var or fresh_variable(parent)
    sub = subterm_at(parent.body, qs[0])
    env = {p: parent.type_of(p) for p in parent.params}
    sub_type, _ = E.infer_types(sub, env=env)
    p1 = Program(parent.params, sub, dict(parent.var_types))
    body2 = replace_many(parent.body, qs, Var(var))
    types2 = dict(parent.var_types)
    if sub_type == E.BOOL:
        types2[var] = E.BOOL
    p2 = Program(parent.params + (var,), body2, types2)
    return Decomposition(parent, qs, var, p1, p2)


def candidate_positions(body: Expr,
                        max_subset_size: int = 3) -> tuple[list[Position], bool]:
    """All child-index positions plus associative operand-subset positions.

    Subsets larger than `max_subset_size` are skipped; the second return
    value reports whether any were.
    """
    out = list(all_positions(body))
    truncated = False
    for q in list(out):
        node = subterm_at(body, q)
        if not isinstance(node, NAry):
            continue
        arity = len(node.args)
        if arity - 1 > max_subset_size:
            truncated = True
        top = min(arity - 1, max_subset_size)
        for size in range(2, top + 1):
            for combo in combinations(range(1, arity + 1), size):
                out.append(q.subset(combo))
    return out, truncated


def enumerate_decompositions(
        p: Program,
        limits: EnumerationLimits = EnumerationLimits()) -> EnumerationResult:
    """Every decomposition of p, deterministically ordered.

    Groups occurrence positions by the canonical text of the addressed
    subterm, skips constant subterms, then emits one decomposition per
    nonempty pairwise-compatible subset of each group. Order: canonical
    subterm text, then subset size, then position order.
    """
    positions, truncated = candidate_positions(p.body, limits.max_subset_size)
    groups: dict[str, list[Position]] = {}
    for q in positions:
        sub = subterm_at(p.body, q)
        if not sub.free_vars():
            continue
        key = print_expr(E.canonical(sub))
        groups.setdefault(key, []).append(q)

    var = fresh_variable(p)
    result: list[Decomposition] = []
    incomplete = truncated
    for key in sorted(groups):
        occ = sorted(groups[key], key=Position.sort_key)
        for size in range(1, len(occ) + 1):
            for combo in combinations(occ, size):
                if size > 1 and _overlapping(combo):
                    continue
                if len(result) >= limits.max_decompositions:
                    return EnumerationResult(result, incomplete=True)
                result.append(make_decomposition(p, combo, var))
    return EnumerationResult(result, incomplete)


def _overlapping(qs) -> bool:
    for a, b in combinations(qs, 2):
        if a.overlaps(b):
            return True
    return False


def path_literals(body: Expr, q: Position) -> tuple[tuple[Expr, bool], ...]:
    """Guard literals (guard, branch) that route evaluation to position q.

    A row reaches q exactly when every listed guard evaluates to the
    paired branch value. Only ite branching gates reachability; && and
    || evaluate all operands.
    """
    lits: list[tuple[Expr, bool]] = []
    node = body
    for step in q.steps:
        if isinstance(step, frozenset):
            break
        if isinstance(node, E.Ite):
            if step == 2:
                lits.append((node.cond, True))
            elif step == 3:
                lits.append((node.cond, False))
        node = node.children()[step - 1]
    return tuple(lits)
