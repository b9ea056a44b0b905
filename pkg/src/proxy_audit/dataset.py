"""Population ingestion and empirical random variables.

A Population is an immutable row matrix with uniform weights. Symbolic
columns are integer-coded by sorted distinct value at load; the coding
is kept so reports can decode. The protected column is measured against
but excluded from model inputs unless the caller opts in.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (IoError, MissingColumn, RaggedRow, TooFewRows,
                     UnboundVariable)
from .kernel import compile_program, evaluate_matrix
from .lang.program import Program


@dataclass(frozen=True)
class Population:
    names: tuple[str, ...]
    matrix: np.ndarray                      # |D| x len(names), float64
    protected: str
    label: Optional[str] = None
    # symbol columns: original string per integer code, sorted
    codings: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.names):
            raise RaggedRow("matrix shape does not match column names")
        if self.size < 1:
            raise TooFewRows("population needs at least one row")
        for col in filter(None, (self.protected, self.label)):
            if col not in self.names:
                raise MissingColumn(f"no column named {col!r}")
        self.matrix.setflags(write=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise MissingColumn(f"no column named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.matrix[:, self.column_index(name)]

    @property
    def z(self) -> np.ndarray:
        return self.column(self.protected)

    @property
    def columns(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def feature_names(self, include_protected: bool = False) -> tuple[str, ...]:
        out = [n for n in self.names
               if n != self.label and (include_protected or n != self.protected)]
        return tuple(out)

    def domain(self, name: str) -> np.ndarray:
        return np.unique(self.column(name))

    def take(self, indices: Sequence[int]) -> "Population":
        sub = np.ascontiguousarray(self.matrix[np.asarray(indices, dtype=int)])
        return Population(self.names, sub, self.protected, self.label,
                          dict(self.codings))

    def row_dict(self, i: int) -> dict[str, float]:
        return dict(zip(self.names, self.matrix[i]))

    def decode(self, name: str, value: float) -> str:
        if name in self.codings:
            return self.codings[name][int(value)]
        return repr(float(value))


def load_csv(path: str, protected: str,
             label: Optional[str] = None) -> Population:
    """Read an RFC 4180 CSV with a header row into a Population.

    Columns whose every value parses as a real number become numeric;
    all others are coded as symbols (sorted distinct strings -> 0..k-1).
    Empty cells are rejected.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise IoError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise TooFewRows(f"{path} has a header but no rows")
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise RaggedRow(f"row {i + 2} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise RaggedRow(f"row {i + 2} has a missing value "
                                f"in column {header[j]!r}")
    if protected not in header:
        raise MissingColumn(f"protected column {protected!r} not in header")
    if label is not None and label not in header:
        raise MissingColumn(f"label column {label!r} not in header")

    n = len(body)
    matrix = np.empty((n, width), dtype=np.float64)
    codings: dict[str, tuple[str, ...]] = {}
    for j, name in enumerate(header):
        cells = [row[j].strip() for row in body]
        try:
            matrix[:, j] = [float(c) for c in cells]
        except ValueError:
            symbols = tuple(sorted(set(cells)))
            code = {s: k for k, s in enumerate(symbols)}
            matrix[:, j] = [code[c] for c in cells]
            codings[name] = symbols
    return Population(tuple(header), matrix, protected, label, codings)


def program_rv(p: Program, pop: Population) -> np.ndarray:
    """The empirical random variable of p over the population's rows."""
    missing = set(p.params) - set(pop.names)
    if missing:
        raise UnboundVariable(f"program parameters not in population: "
                              f"{sorted(missing)}")
    code = compile_program(p, pop.columns)
    return evaluate_matrix(code, pop.matrix)


def partition(pop: Population, folds: int,
              seed: int) -> list[tuple[Population, Population]]:
    """k-fold split: pairs of (analysis, validation), deterministic by seed."""
    if folds < 2:
        raise TooFewRows("need at least 2 folds")
    if pop.size < folds:
        raise TooFewRows(f"cannot split {pop.size} rows into {folds} folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(pop.size)
    pieces = np.array_split(order, folds)
    out = []
    for i in range(folds):
        val = np.sort(pieces[i])
        ana = np.sort(np.concatenate([pieces[j] for j in range(folds)
                                      if j != i]))
        out.append((pop.take(ana), pop.take(val)))
    return out


def subsample(pop: Population, n: int, seed: int) -> Population:
    """n rows drawn uniformly with replacement, deterministic by seed."""
    if n < 1:
        raise TooFewRows("subsample size must be at least 1")
    rng = np.random.default_rng(seed)
    return pop.take(rng.integers(0, pop.size, size=n))


def discretize(values: np.ndarray, bins: int = 10) -> np.ndarray:
    """Quantile-bin a value column for use as an association target.

    Columns that are already coarse (distinct values <= bins) pass
    through unchanged; NMI only sees the induced partition.
    """
    values = np.asarray(values, dtype=np.float64)
    distinct = np.unique(values)
    if distinct.size <= bins:
        return values
    edges = np.quantile(values, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    return np.searchsorted(edges, values, side="left").astype(np.float64)
