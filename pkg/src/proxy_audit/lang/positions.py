"""Positional addressing of subterms.

A position is a sequence of child indices (1-based), optionally ending
in an operand subset that picks two or more operands of an associative
n-ary node. The empty position addresses the whole expression and
prints as "e". Examples: "1.1.2", "1.{1,3}".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..errors import PositionError
from .expr import Expr, NAry

Step = Union[int, frozenset]

EPSILON_TEXT = "e"


@dataclass(frozen=True)
class Position:
    steps: tuple[Step, ...] = ()

    def __post_init__(self):
        for i, s in enumerate(self.steps):
            if isinstance(s, int):
                if s < 1:
                    raise PositionError(f"child index must be positive: {s}")
            elif isinstance(s, frozenset):
                if i != len(self.steps) - 1:
                    raise PositionError("operand subset must be the last step")
                if len(s) < 2 or not all(isinstance(j, int) and j >= 1 for j in s):
                    raise PositionError(f"bad operand subset: {sorted(s)}")
            else:
                raise PositionError(f"bad step: {s!r}")

    @property
    def is_subset(self) -> bool:
        return bool(self.steps) and isinstance(self.steps[-1], frozenset)

    def child(self, i: int) -> "Position":
        return Position(self.steps + (i,))

    def subset(self, indices) -> "Position":
        return Position(self.steps + (frozenset(indices),))

    def is_prefix_of(self, other: "Position") -> bool:
        n = len(self.steps)
        if n > len(other.steps):
            return False
        return other.steps[:n] == self.steps

    def overlaps(self, other: "Position") -> bool:
        """Whether the addressed subterms share any node."""
        a, b = self.steps, other.steps
        for x, y in zip(a, b):
            if isinstance(x, frozenset) or isinstance(y, frozenset):
                xs = x if isinstance(x, frozenset) else {x}
                ys = y if isinstance(y, frozenset) else {y}
                return bool(xs & ys)
            if x != y:
                return False
        # one path is a prefix of the other: ancestor and descendant
        return True

    def sort_key(self):
        return tuple(
            (0, s, 0) if isinstance(s, int) else (1, min(s), tuple(sorted(s)))
            for s in self.steps
        )

    def __str__(self) -> str:
        if not self.steps:
            return EPSILON_TEXT
        parts = []
        for s in self.steps:
            if isinstance(s, int):
                parts.append(str(s))
            else:
                parts.append("{" + ",".join(str(i) for i in sorted(s)) + "}")
        return ".".join(parts)


EPSILON = Position()

_SUBSET_RE = re.compile(r"^\{(\d+(,\d+)*)\}$")


def parse_position(text: str) -> Position:
    text = text.strip()
    if text in (EPSILON_TEXT, "", "ε"):
        return EPSILON
    steps: list[Step] = []
    for part in text.split("."):
        m = _SUBSET_RE.match(part)
        if m:
            steps.append(frozenset(int(i) for i in m.group(1).split(",")))
        elif part.isdigit():
            steps.append(int(part))
        else:
            raise PositionError(f"bad position step {part!r}")
    return Position(tuple(steps))


def _resolve(e: Expr, q: Position) -> tuple[Expr, Step]:
    """Walk all but the last step; return (node, last step)."""
    node = e
    for s in q.steps[:-1]:
        kids = node.children()
        if not 1 <= s <= len(kids):
            raise PositionError(f"no child {s} at {node}")
        node = kids[s - 1]
    return node, q.steps[-1]


def subterm_at(e: Expr, q: Position) -> Expr:
    """The subterm of `e` at `q`; subset steps build a new n-ary node."""
    if not q.steps:
        return e
    node, last = _resolve(e, q)
    kids = node.children()
    if isinstance(last, int):
        if not 1 <= last <= len(kids):
            raise PositionError(f"no child {last} at {node}")
        return kids[last - 1]
    if not isinstance(node, NAry):
        raise PositionError("operand subset used at a non-associative node")
    if max(last) > len(kids):
        raise PositionError(f"subset {sorted(last)} out of range at {node}")
    if len(last) >= len(kids):
        raise PositionError("operand subset must be a proper subset")
    return NAry(node.op, tuple(kids[i - 1] for i in sorted(last)))


def replace_at(e: Expr, s: Expr, q: Position) -> Expr:
    """Replace the subterm of `e` at `q` with `s`.

    An operand-subset step removes the selected operands and inserts `s`
    as one operand in the slot of the first removed one.
    """
    if not q.steps:
        return s
    return _replace(e, s, q.steps)


def _replace(node: Expr, s: Expr, steps: tuple[Step, ...]) -> Expr:
    step = steps[0]
    kids = list(node.children())
    if isinstance(step, frozenset):
        if not isinstance(node, NAry):
            raise PositionError("operand subset used at a non-associative node")
        if max(step) > len(kids) or len(step) >= len(kids):
            raise PositionError(f"bad subset {sorted(step)} at {node}")
        picked = sorted(step)
        out = []
        for i, kid in enumerate(kids, start=1):
            if i == picked[0]:
                out.append(s)
            elif i not in step:
                out.append(kid)
        if len(out) == 1:
            return out[0]
        return NAry(node.op, tuple(out))
    if not 1 <= step <= len(kids):
        raise PositionError(f"no child {step} at {node}")
    kids[step - 1] = _replace(kids[step - 1], s, steps[1:]) \
        if len(steps) > 1 else s
    return _rebuild(node, tuple(kids))


def _rebuild(node: Expr, kids: tuple[Expr, ...]) -> Expr:
    from . import expr as E
    if isinstance(node, E.NAry):
        return E.NAry(node.op, kids)
    if isinstance(node, E.Bin):
        return E.Bin(node.op, kids[0], kids[1])
    if isinstance(node, E.Not):
        return E.Not(kids[0])
    if isinstance(node, E.Rel):
        return E.Rel(node.op, kids[0], kids[1])
    if isinstance(node, E.Ite):
        return E.Ite(kids[0], kids[1], kids[2])
    raise PositionError(f"cannot descend into {node}")  # pragma: no cover


def all_positions(e: Expr) -> list[Position]:
    """Every child-index position in `e`, preorder. Excludes subset positions."""
    out: list[Position] = []

    def rec(node: Expr, prefix: tuple[Step, ...]):
        out.append(Position(prefix))
        for i, kid in enumerate(node.children(), start=1):
            rec(kid, prefix + (i,))

    rec(e, ())
    return out
