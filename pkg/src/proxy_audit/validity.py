"""Statistical guards against spurious witnesses.

Two mechanisms: k-fold cross-validated detection (a witness counts only
when it is detected on an analysis fold and re-passes thresholds on the
paired validation fold, matched by fingerprint), and a permutation test
of the independence null with Bonferroni correction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Population, discretize, partition, program_rv
from .detection import DetectionConfig, Witness, proxy_detect
from .errors import TooFewRows
from .lang.program import Program
from .measures import (build_cache, cache_association, influence_exact,
                       influence_sampled)


@dataclass(frozen=True)
class ValidityConfig:
    folds: int = 5
    accept_threshold: int = 5
    bootstrap_samples: int = 1000
    alpha_sig: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("need at least 2 folds")
        if not 1 <= self.accept_threshold <= self.folds:
            raise ValueError("accept threshold must be in 1..folds")
        if self.bootstrap_samples < 100:
            raise ValueError("need at least 100 bootstrap samples")


@dataclass(frozen=True)
class BootstrapResult:
    raw_p: float
    adjusted_p: float
    hypothesis_count: int
    # the permutation null is exact for perfect proxies (epsilon = 1);
    # below that it still tests independence, which we label explicitly
    null: str = "independence"


def cross_validated_detect(
        p: Program, pop: Population, det_cfg: DetectionConfig,
        val_cfg: ValidityConfig) -> list[tuple[Witness, int]]:
    """Witnesses that replicate in at least `accept_threshold` folds."""
    if pop.size < val_cfg.folds:
        raise TooFewRows(f"{pop.size} rows cannot make {val_cfg.folds} folds")
    counts: dict[str, int] = {}
    first: dict[str, Witness] = {}
    for analysis, validation in partition(pop, val_cfg.folds, val_cfg.seed):
        found, _ = proxy_detect(p, analysis, det_cfg)
        per_fp: dict[str, Witness] = {}
        for w in found:
            per_fp.setdefault(w.fingerprint, w)
        for fp, w in per_fp.items():
            if _revalidate(w, validation, det_cfg):
                counts[fp] = counts.get(fp, 0) + 1
                first.setdefault(fp, w)
    out = [(first[fp], c) for fp, c in counts.items()
           if c >= val_cfg.accept_threshold]
    out.sort(key=lambda wc: (-wc[1], wc[0].fingerprint))
    return out


def _revalidate(w: Witness, validation: Population,
                cfg: DetectionConfig) -> bool:
    cache = build_cache(w.decomposition, validation, bins=cfg.bins)
    if cache_association(cache) < cfg.epsilon:
        return False
    if cfg.estimator == "exact":
        infl = influence_exact(w.decomposition, validation, cache)
    else:
        infl = influence_sampled(w.decomposition, validation,
                                 cfg.estimator, cache)
    return infl >= cfg.delta


def bootstrap_p_value(p1: Program, pop: Population, m: int = 1000,
                      seed: int = 0, bins: int = 10) -> BootstrapResult:
    """One-sided permutation test of d(p1(X), Z) against independence.

    raw_p = (1/m) * #{permutations with d_perm >= d_observed}.
    """
    if m < 100:
        raise ValueError("need at least 100 resamples")
    x = discretize(program_rv(p1, pop), bins)
    z = pop.z
    observed = _assoc(x, z)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(m):
        if _assoc(x, rng.permutation(z)) >= observed:
            hits += 1
    raw = hits / m
    return BootstrapResult(raw_p=raw, adjusted_p=min(1.0, raw),
                           hypothesis_count=1)


def _assoc(x: np.ndarray, z: np.ndarray) -> float:
    from .measures import association
    return association(x, z)


def bonferroni_adjust(results: list[BootstrapResult],
                      hypothesis_count: int) -> list[BootstrapResult]:
    if hypothesis_count < len(results):
        raise ValueError("hypothesis count below number of results")
    return [replace(r, adjusted_p=min(1.0, r.raw_p * hypothesis_count),
                    hypothesis_count=hypothesis_count) for r in results]
