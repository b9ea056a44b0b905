"""Association (normalized mutual information) and influence (QII).

Association between two empirical random variables:

    d(X, Z) = 1 - (H(X|Z) + H(Z|X)) / H(X, Z)

which equals I(X;Z) / H(X,Z); log base 2; d = 0 when H(X,Z) = 0.

Influence of a decomposition (p1, u, p2) is the chance that resampling
p1's output changes the program's output:

    i = Pr[p1 reached] * E_{X | reached} E_{Y ~ p1(D)} Pr[p(X) != p2(X, Y)]

computed exactly by iterating the (small, finite) range of p1, or
estimated by Hoeffding sampling over row pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Population, discretize
from .kernel import Code, compile_program, evaluate_matrix
from .lang.decompose import Decomposition


def association(x: np.ndarray, z: np.ndarray) -> float:
    """NMI-based proxy association between two aligned value columns."""
    x = np.asarray(x)
    z = np.asarray(z)
    if x.shape != z.shape:
        raise ValueError("association needs aligned columns")
    _, xi = np.unique(x, return_inverse=True)
    _, zi = np.unique(z, return_inverse=True)
    table = np.zeros((xi.max() + 1, zi.max() + 1))
    np.add.at(table, (xi, zi), 1.0)
    return association_of_table(table)


def association_of_table(table: np.ndarray) -> float:
    total = table.sum()
    if total == 0:
        return 0.0
    p = table / total
    h_joint = _entropy(p.ravel())
    if h_joint == 0.0:
        return 0.0
    h_x = _entropy(p.sum(axis=1))
    h_z = _entropy(p.sum(axis=0))
    d = (h_x + h_z - h_joint) / h_joint
    # clamp tiny negative rounding noise
    return min(1.0, max(0.0, d))


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class EstimatorConfig:
    alpha: float = 0.05
    beta: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1 or not 0 < self.beta < 1:
            raise ValueError("alpha and beta must be in (0, 1)")

    @property
    def sample_size(self) -> int:
        return max(1, math.ceil(math.log(2.0 / self.beta)
                                / (2.0 * self.alpha ** 2)))


@dataclass
class MeasureCache:
    """Per-decomposition precomputation: one pass over the rows."""
    fresh_col: int
    code2: Code
    aug: np.ndarray            # population matrix + p1-output column
    p1_values: np.ndarray
    parent_values: np.ndarray  # p2(x, p1(x)) = p(x)
    reach: np.ndarray          # uint8, p1 evaluated on this row
    reach_prob: float
    range_values: np.ndarray   # distinct p1 outputs over the full population
    range_probs: np.ndarray
    table: np.ndarray          # contingency counts, p1 output (binned) vs Z

    @property
    def range_size(self) -> int:
        return int(self.range_values.size)


def build_cache(dec: Decomposition, pop: Population,
                bins: int = 10) -> MeasureCache:
    cols = pop.columns
    p1_values = evaluate_matrix(compile_program(dec.p1, cols), pop.matrix)
    fresh_col = len(pop.names)
    cols2 = dict(cols)
    cols2[dec.fresh_var] = fresh_col
    code2 = compile_program(dec.p2, cols2, mark_var=dec.fresh_var)
    aug = np.ascontiguousarray(np.column_stack([pop.matrix, p1_values]))
    reach = np.zeros(pop.size, dtype=np.uint8)
    parent_values = evaluate_matrix(code2, aug, reach)

    range_values, counts = np.unique(p1_values, return_counts=True)
    range_probs = counts / pop.size

    xb = discretize(p1_values, bins)
    _, xi = np.unique(xb, return_inverse=True)
    _, zi = np.unique(pop.z, return_inverse=True)
    table = np.zeros((xi.max() + 1, zi.max() + 1))
    np.add.at(table, (xi, zi), 1.0)

    return MeasureCache(
        fresh_col=fresh_col, code2=code2, aug=aug, p1_values=p1_values,
        parent_values=parent_values, reach=reach,
        reach_prob=float(reach.mean()),
        range_values=range_values, range_probs=range_probs, table=table,
    )


def cache_association(cache: MeasureCache) -> float:
    return association_of_table(cache.table)


def influence_exact(dec: Decomposition, pop: Population,
                    cache: MeasureCache) -> float:
    """Exact influence over |reached rows| x |range| pairs."""
    reached = cache.reach.astype(bool)
    if not reached.any():
        return 0.0
    sub = cache.aug[reached].copy()
    base = cache.parent_values[reached]
    total = 0.0
    for y, q in zip(cache.range_values, cache.range_probs):
        sub[:, cache.fresh_col] = y
        out = evaluate_matrix(cache.code2, sub)
        total += q * float(np.mean(out != base))
    return cache.reach_prob * total


def influence_sampled(dec: Decomposition, pop: Population,
                      cfg: EstimatorConfig,
                      cache: Optional[MeasureCache] = None) -> float:
    """Hoeffding estimate: n = ceil(ln(2/beta) / (2 alpha^2)) row pairs."""
    if cache is None:
        cache = build_cache(dec, pop)
    n = cfg.sample_size
    rng = np.random.default_rng(cfg.seed)
    i = rng.integers(0, pop.size, size=n)
    j = rng.integers(0, pop.size, size=n)
    rows = cache.aug[i].copy()
    rows[:, cache.fresh_col] = cache.p1_values[j]
    out = evaluate_matrix(cache.code2, np.ascontiguousarray(rows))
    return float(np.mean(out != cache.parent_values[i]))
