"""Stage-weighted edit-distance metric and pairwise distance matrices.

The distance between two journeys is the weighted sum, over the three stages,
of the per-stage edit distance between their stage projections.  Weights are
kept as exact rationals so metric-axiom tests never hit float ties; matrices
store double-precision values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateConfig
from .model import Dataset, Journey, ST1, ST2, ST3, STAGES

LEVENSHTEIN = "levenshtein"
DAMERAU_LEVENSHTEIN = "damerau_levenshtein"
KERNELS = (LEVENSHTEIN, DAMERAU_LEVENSHTEIN)


@dataclass(frozen=True)
class StageWeights:
    """Non-negative per-stage weights; at least one must be positive."""

    w1: Fraction
    w2: Fraction
    w3: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "w1", Fraction(self.w1))
        object.__setattr__(self, "w2", Fraction(self.w2))
        object.__setattr__(self, "w3", Fraction(self.w3))
        if self.w1 < 0 or self.w2 < 0 or self.w3 < 0:
            raise ValueError("stage weights must be non-negative")
        if self.w1 == self.w2 == self.w3 == 0:
            raise ValueError("at least one stage weight must be positive")

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.w1, self.w2, self.w3)

    def of(self, stage: str) -> Fraction:
        return {ST1: self.w1, ST2: self.w2, ST3: self.w3}[stage]


@dataclass(frozen=True)
class DistanceConfig:
    """Weights plus the edit-distance kernel used for a whole matrix."""

    weights: StageWeights
    kernel: str = LEVENSHTEIN

    def __post_init__(self) -> None:
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel: {self.kernel!r}")

    def effective_weights(self, stage_mask: Optional[Iterable[str]] = None) -> tuple[Fraction, ...]:
        """Per-stage weights with masked-out stages zeroed."""
        mask = set(STAGES if stage_mask is None else stage_mask)
        return tuple(
            self.weights.of(stage) if stage in mask else Fraction(0)
            for stage in STAGES
        )

    def label(self) -> str:
        w = self.weights
        return f"{self.kernel}:w=({w.w1},{w.w2},{w.w3})"

    def to_jsonable(self) -> dict:
        w = self.weights
        return {
            "w1": str(w.w1),
            "w2": str(w.w2),
            "w3": str(w.w3),
            "kernel": self.kernel,
        }


def edit_distance(x: Sequence[str], y: Sequence[str], kernel: str = LEVENSHTEIN) -> int:
    """Unit-cost edit distance between two symbol sequences.

    The damerau variant additionally allows adjacent transposition at cost 1
    (optimal string alignment form).
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel: {kernel!r}")
    n, m = len(x), len(y)
    if n == 0:
        return m
    if m == 0:
        return n
    prev2: Optional[list[int]] = None
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            cost = 0 if x[i - 1] == y[j - 1] else 1
            best = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if (
                kernel == DAMERAU_LEVENSHTEIN
                and i > 1
                and j > 1
                and x[i - 1] == y[j - 2]
                and x[i - 2] == y[j - 1]
            ):
                best = min(best, prev2[j - 2] + 1)
            cur[j] = best
        prev2, prev = prev, cur
    return prev[m]


def staged_distance(
    a: Journey,
    b: Journey,
    config: DistanceConfig,
    stage_mask: Optional[Iterable[str]] = None,
) -> Fraction:
    """Weighted sum of per-stage edit distances; exact rational result."""
    weights = config.effective_weights(stage_mask)
    total = Fraction(0)
    for stage, w in zip(STAGES, weights):
        if w == 0:
            continue
        total += w * edit_distance(a.project(stage).items, b.project(stage).items, config.kernel)
    return total


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with the config that produced them."""

    ids: tuple[str, ...]
    values: np.ndarray = field(repr=False)
    config: DistanceConfig

    @property
    def n(self) -> int:
        return len(self.ids)

    def to_jsonable(self) -> dict:
        return {
            "ids": list(self.ids),
            "config": self.config.to_jsonable(),
            "values": [float(v) for v in self.values.reshape(-1)],
        }


def check_distance_matrix(values: np.ndarray) -> np.ndarray:
    """Validate a precomputed distance matrix (square, symmetric, zero diagonal)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("distance matrix must be square")
    if np.any(values < 0):
        raise ValueError("distance matrix must be non-negative")
    if not np.allclose(values, values.T):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.diagonal(values) != 0):
        raise ValueError("distance matrix must have a zero diagonal")
    return values


def distance_matrix(
    dataset: Dataset,
    config: DistanceConfig,
    stage_mask: Optional[Iterable[str]] = None,
) -> DistanceMatrix:
    """Full pairwise matrix of the stage-weighted metric over a dataset.

    Per-stage distances are computed once per unique stage projection, then
    combined with the (possibly masked) weights; identical to the naive
    journey-pair loop but much cheaper on survey-scale data.
    """
    weights = config.effective_weights(stage_mask)
    if all(w == 0 for w in weights):
        raise DegenerateConfig("all effective stage weights are zero")
    n = len(dataset)
    total = np.zeros((n, n), dtype=float)
    for stage, w in zip(STAGES, weights):
        if w == 0:
            continue
        seqs = [j.project(stage).items for j in dataset.journeys]
        uniq: dict[tuple[str, ...], int] = {}
        idx = np.empty(n, dtype=int)
        for row, s in enumerate(seqs):
            idx[row] = uniq.setdefault(s, len(uniq))
        keys = list(uniq)
        u = len(keys)
        ud = np.zeros((u, u), dtype=float)
        for i in range(u):
            for j in range(i + 1, u):
                ud[i, j] = ud[j, i] = edit_distance(keys[i], keys[j], config.kernel)
        total += float(w) * ud[np.ix_(idx, idx)]
    return DistanceMatrix(ids=dataset.ids, values=total, config=config)
