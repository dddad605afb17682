"""Purchase prediction with k-NN over the pre-purchase stage distance.

The model's metric masks the outcome stage entirely (its weight is forced to
zero), so the label can never leak through the distance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .distance import (
    DistanceConfig,
    LEVENSHTEIN,
    StageWeights,
    staged_distance,
)
from .errors import EmptyModel, InvalidK, SingleClassDataset
from .model import Dataset, Journey, ST1, ST2

PREDICTION_STAGES = (ST1, ST2)


def masked_config(config: DistanceConfig) -> DistanceConfig:
    """Force the outcome-stage weight to zero; st1/st2 weights unchanged."""
    w = config.weights
    return DistanceConfig(
        weights=StageWeights(w1=w.w1, w2=w.w2, w3=Fraction(0)),
        kernel=config.kernel,
    )


class KnnModel(BaseEstimator, ClassifierMixin):
    """k-NN regression on journey distances, thresholded for classification.

    Parameters
    ----------
    k_prime : neighbor count (k' in the evaluation protocol).
    config : distance config; its st3 weight is masked to zero at fit time.
    threshold : classification cut on the predicted value; ties at the
        threshold classify as purchase.
    """

    def __init__(
        self,
        k_prime: int = 5,
        config: Optional[DistanceConfig] = None,
        threshold: float = 0.5,
    ):
        self.k_prime = k_prime
        self.config = config
        self.threshold = threshold

    def fit(self, journeys: Sequence[Journey], y: Optional[Sequence[int]] = None):
        journeys = tuple(journeys)
        if not journeys:
            raise EmptyModel("cannot fit on zero journeys")
        if not 1 <= self.k_prime <= len(journeys):
            raise InvalidK(f"k'={self.k_prime} outside [1, {len(journeys)}]")
        base = self.config or DistanceConfig(
            weights=StageWeights(Fraction(2), Fraction(1), Fraction(0)), kernel=LEVENSHTEIN
        )
        self.config_ = masked_config(base)
        self.journeys_ = journeys
        if y is None:
            y = [j.outcome_label() for j in journeys]
        self.labels_ = tuple(int(v) for v in y)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "journeys_"):
            raise EmptyModel("model is not fitted")

    def neighbors(self, query: Journey) -> list[tuple[int, float, int]]:
        """k' nearest training journeys as (index, distance, label) triples."""
        self._check_fitted()
        dists = [
            (staged_distance(query, t, self.config_, stage_mask=PREDICTION_STAGES), i)
            for i, t in enumerate(self.journeys_)
        ]
        dists.sort(key=lambda pair: (pair[0], pair[1]))
        return [(i, float(d), self.labels_[i]) for d, i in dists[: self.k_prime]]

    def predict_value(self, query: Journey) -> float:
        """Mean label of the k' nearest training journeys."""
        selected = self.neighbors(query)
        return sum(label for _, _, label in selected) / self.k_prime

    def classify(self, query: Journey) -> int:
        return 1 if self.predict_value(query) >= self.threshold else 0

    def predict(self, queries: Sequence[Journey]) -> np.ndarray:
        return np.array([self.classify(q) for q in queries], dtype=int)


@dataclass(frozen=True)
class EvalReport:
    """Repeated-split evaluation results in the protocol's table shape."""

    k_values: tuple[int, ...]
    accuracy: dict[int, tuple[float, ...]]  # per k': per-repetition values
    f1: dict[int, tuple[float, ...]]
    train_fraction: float
    repetitions: int
    base_seed: int

    def summary(self) -> list[dict]:
        rows = []
        for k in self.k_values:
            acc = np.array(self.accuracy[k])
            f1 = np.array(self.f1[k])
            rows.append(
                {
                    "k_prime": k,
                    "accuracy_mean": float(acc.mean()),
                    "accuracy_var": float(acc.var()),
                    "f1_mean": float(f1.mean()),
                    "f1_var": float(f1.var()),
                }
            )
        return rows

    def to_jsonable(self) -> dict:
        return {
            "protocol": {
                "train_fraction": self.train_fraction,
                "repetitions": self.repetitions,
                "base_seed": self.base_seed,
            },
            "summary": self.summary(),
            "per_repetition": {
                str(k): {"accuracy": list(self.accuracy[k]), "f1": list(self.f1[k])}
                for k in self.k_values
            },
        }

    def render_text(self) -> str:
        head = "k'"
        lines = [f"{head:<5}{'acc mean':<12}{'acc var':<12}{'f1 mean':<12}{'f1 var':<12}"]
        for row in self.summary():
            lines.append(
                f"{row['k_prime']:<5}{row['accuracy_mean']:<12.4f}{row['accuracy_var']:<12.4f}"
                f"{row['f1_mean']:<12.4f}{row['f1_var']:<12.4f}"
            )
        return "\n".join(lines)


def _f1_score(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def _stratified_split(labels: Sequence[int], train_fraction: float, rng: random.Random):
    """Per-class shuffle and split; every class keeps at least one test member."""
    train: list[int] = []
    test: list[int] = []
    for cls in sorted(set(labels)):
        members = [i for i, lab in enumerate(labels) if lab == cls]
        rng.shuffle(members)
        n_train = int(round(train_fraction * len(members)))
        n_train = min(max(n_train, 1), len(members) - 1)
        train.extend(members[:n_train])
        test.extend(members[n_train:])
    return sorted(train), sorted(test)


def evaluate(
    dataset: Dataset,
    k_values: Sequence[int] = (1, 2, 3, 4, 5),
    repetitions: int = 100,
    base_seed: int = 0,
    config: Optional[DistanceConfig] = None,
    train_fraction: float = 0.8,
) -> EvalReport:
    """Stratified 80/20 splits, repeated; accuracy and F1 per neighbor count.

    The full masked distance matrix is computed once; each repetition only
    re-indexes it, so identical seeds give bit-identical reports.
    """
    labels = list(dataset.labels)
    if len(set(labels)) < 2:
        raise SingleClassDataset("evaluation needs both outcome classes")
    base = config or DistanceConfig(
        weights=StageWeights(Fraction(2), Fraction(1), Fraction(0)), kernel=LEVENSHTEIN
    )
    cfg = masked_config(base)
    journeys = dataset.journeys
    n = len(journeys)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = float(staged_distance(journeys[i], journeys[j], cfg, stage_mask=PREDICTION_STAGES))
            dist[i, j] = dist[j, i] = d
    accuracy = {k: [] for k in k_values}
    f1 = {k: [] for k in k_values}
    for rep in range(repetitions):
        rng = random.Random(base_seed + rep)
        train, test = _stratified_split(labels, train_fraction, rng)
        train_labels = [labels[i] for i in train]
        for k in k_values:
            if k > len(train):
                raise InvalidK(f"k'={k} exceeds training size {len(train)}")
            preds = []
            for t in test:
                order = sorted(range(len(train)), key=lambda a: (dist[t, train[a]], a))
                value = sum(train_labels[a] for a in order[:k]) / k
                preds.append(1 if value >= 0.5 else 0)
            truth = [labels[t] for t in test]
            accuracy[k].append(sum(1 for t, p in zip(truth, preds) if t == p) / len(test))
            f1[k].append(_f1_score(truth, preds))
    return EvalReport(
        k_values=tuple(k_values),
        accuracy={k: tuple(v) for k, v in accuracy.items()},
        f1={k: tuple(v) for k, v in f1.items()},
        train_fraction=train_fraction,
        repetitions=repetitions,
        base_seed=base_seed,
    )
