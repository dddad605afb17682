"""Counterfactual journey selection and per-stage edit scripts.

A counterfactual is always an observed journey: the candidate minimizing
0-1 loss against the desired outcome plus a distance penalty.  The winning
candidate is explained by a minimal per-stage edit script aligned against
the base journey's stage projections.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .distance import DistanceConfig, edit_distance, staged_distance
from .errors import NoCandidates
from .model import Dataset, Journey, ST1, ST2, STAGES
from .prediction import KnnModel, PREDICTION_STAGES


@dataclass(frozen=True)
class CfQuery:
    base: Journey
    y_obj: int
    lam: float
    stage_mask: tuple[str, ...] = PREDICTION_STAGES

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if not self.stage_mask:
            raise ValueError("stage mask must be non-empty")


@dataclass(frozen=True)
class EditOp:
    stage: str
    op: str  # "substitute" | "insert" | "delete"
    position: int  # 1-based position in the base stage projection
    from_item: Optional[str]
    to_item: Optional[str]

    def narrative(self) -> str:
        if self.op == "substitute":
            return f"replace {self.stage} item {self.position}: {self.from_item} -> {self.to_item}"
        if self.op == "delete":
            return f"delete {self.stage} item {self.position}: {self.from_item}"
        return f"insert {self.to_item} at {self.stage} position {self.position}"

    def to_jsonable(self) -> dict:
        return {
            "stage": self.stage,
            "op": self.op,
            "position": self.position,
            "from": self.from_item,
            "to": self.to_item,
            "narrative": self.narrative(),
        }


@dataclass(frozen=True)
class CfResult:
    counterfactual: Journey
    objective: float
    distance: float
    loss: float
    model_check: float
    edits: tuple[EditOp, ...]

    def to_jsonable(self) -> dict:
        return {
            "counterfactual_id": self.counterfactual.id,
            "counterfactual_items": list(self.counterfactual.canonical_items),
            "objective": self.objective,
            "distance": self.distance,
            "loss": self.loss,
            "model_check": self.model_check,
            "edits": [op.to_jsonable() for op in self.edits],
        }


def _align(base: Sequence[str], target: Sequence[str], stage: str) -> list[EditOp]:
    """Backtrack one minimal unit-cost alignment; prefers substitute > delete > insert."""
    n, m = len(base), len(target)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][0] = i
    for j in range(m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if base[i - 1] == target[j - 1] else 1
            dp[i][j] = min(dp[i - 1][j - 1] + cost, dp[i - 1][j] + 1, dp[i][j - 1] + 1)
    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (0 if base[i - 1] == target[j - 1] else 1):
            if base[i - 1] != target[j - 1]:
                ops.append(EditOp(stage, "substitute", i, base[i - 1], target[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            ops.append(EditOp(stage, "delete", i, base[i - 1], None))
            i -= 1
        else:
            ops.append(EditOp(stage, "insert", i + 1, None, target[j - 1]))
            j -= 1
    ops.reverse()
    return ops


def edit_script(base: Journey, cf: Journey, stage_mask: Iterable[str] = STAGES) -> tuple[EditOp, ...]:
    """Minimal-cost per-stage edit operations transforming base into cf."""
    ops: list[EditOp] = []
    for stage in STAGES:
        if stage not in set(stage_mask):
            continue
        ops.extend(_align(base.project(stage).items, cf.project(stage).items, stage))
    return tuple(ops)


def apply_edit_script(base: Journey, ops: Sequence[EditOp], stage: str) -> tuple[str, ...]:
    """Replay one stage's ops over the base projection (round-trip check)."""
    items = list(base.project(stage).items)
    offset = 0
    for op in ops:
        if op.stage != stage:
            continue
        pos = op.position - 1 + offset
        if op.op == "substitute":
            items[pos] = op.to_item
        elif op.op == "delete":
            del items[pos]
            offset -= 1
        else:
            items.insert(pos, op.to_item)
            offset += 1
    return tuple(items)


def find_counterfactual(dataset: Dataset, model: KnnModel, query: CfQuery) -> CfResult:
    """Brute-force argmin of 0-1 loss + lambda * masked distance over all candidates.

    Ties break by smaller distance, then lowest dataset index.  model_check
    carries the fitted model's prediction for the winner so callers can
    confirm the counterfactual actually predicts the desired outcome.
    """
    base = query.base
    config = model.config_
    best: Optional[tuple] = None
    for index, candidate in enumerate(dataset.journeys):
        if candidate.id == base.id and candidate.items == base.items:
            continue
        dist = staged_distance(base, candidate, config, stage_mask=query.stage_mask)
        loss = 0 if candidate.outcome_label() == query.y_obj else 1
        objective = loss + Fraction(query.lam).limit_denominator(10**9) * dist
        key = (objective, dist, index)
        if best is None or key < best[0]:
            best = ((objective, dist, index), candidate, loss)
    if best is None:
        raise NoCandidates("no candidate journey besides the base")
    (objective, dist, _), winner, loss = best
    return CfResult(
        counterfactual=winner,
        objective=float(objective),
        distance=float(dist),
        loss=float(loss),
        model_check=model.predict_value(winner),
        edits=edit_script(base, winner, query.stage_mask),
    )


def explain_batch(
    dataset: Dataset,
    model: KnnModel,
    y_obj: int,
    lam: float,
    stage_mask: tuple[str, ...] = PREDICTION_STAGES,
) -> list[tuple[Journey, CfResult]]:
    """Counterfactuals for every journey whose observed label differs from y_obj."""
    results = []
    for journey in dataset.journeys:
        if journey.outcome_label() == y_obj:
            continue
        query = CfQuery(base=journey, y_obj=y_obj, lam=lam, stage_mask=stage_mask)
        results.append((journey, find_counterfactual(dataset, model, query)))
    results.sort(key=lambda pair: (pair[1].objective, pair[0].id))
    return results
