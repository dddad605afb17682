"""Loading, cleansing, and descriptive statistics for raw survey records.

Cleansing applies the rules that define a valid journey: known symbols only,
no post-purchase items, at most ten pre-outcome events, exactly one outcome
event in final position, and stage transitions drawn from the legal set
(st1->st1, st1->st2, st2->st2, st2->st1, st1->st3, st2->st3, with the first
event required to be st1).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Union

from .errors import EmptyDataset, MalformedRow
from .model import (
    Dataset,
    EXCLUDED_ITEMS,
    ITEM_CODES,
    Journey,
    ST1,
    ST2,
    ST3,
    canonical_symbol,
    stage_of,
)

MAX_EVENTS = 11  # up to 10 pre-outcome events plus the outcome

# Rejection reason codes, stable across serialization.
UNKNOWN_SYMBOL = "UnknownSymbol"
NO_OUTCOME = "NoOutcome"
EVENT_AFTER_OUTCOME = "EventAfterOutcome"
ILLEGAL_TRANSITION = "IllegalTransition"
POST_PURCHASE_ITEM = "PostPurchaseItem"
TOO_LONG = "TooLong"
REASON_CODES = (
    UNKNOWN_SYMBOL,
    NO_OUTCOME,
    EVENT_AFTER_OUTCOME,
    ILLEGAL_TRANSITION,
    POST_PURCHASE_ITEM,
    TOO_LONG,
)

LEGAL_TRANSITIONS = {
    (ST1, ST1),
    (ST1, ST2),
    (ST2, ST2),
    (ST2, ST1),
    (ST1, ST3),
    (ST2, ST3),
}

# Canonical symbol order for co-occurrence rows/columns.
COOC_SYMBOLS = ("a", "b", "c", "d", "e", "f", "g", "h", "1", "0")


@dataclass(frozen=True)
class RawRecord:
    """Pre-validation record: an id and its raw symbol list."""

    id: str
    items: tuple[str, ...]


@dataclass(frozen=True)
class CleansingReport:
    accepted: int
    rejected: tuple[tuple[str, str], ...]  # (record id, reason code)

    def histogram(self) -> dict[str, int]:
        counts = {code: 0 for code in REASON_CODES}
        for _, reason in self.rejected:
            counts[reason] += 1
        return counts

    def to_jsonable(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"id": rid, "reason": reason} for rid, reason in self.rejected],
            "histogram": self.histogram(),
        }


@dataclass(frozen=True)
class StageStats:
    """Per-stage item frequencies plus the st2 length distribution."""

    frequencies: dict[str, dict[str, int]]
    st2_min: int
    st2_max: int
    st2_mean: float

    def to_jsonable(self) -> dict:
        return {
            "frequencies": self.frequencies,
            "st2_length": {"min": self.st2_min, "max": self.st2_max, "mean": self.st2_mean},
        }


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Ordered adjacent-pair counts over canonical symbols."""

    symbols: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # rows = from-item, columns = to-item

    def count(self, from_symbol: str, to_symbol: str) -> int:
        return self.counts[self.symbols.index(from_symbol)][self.symbols.index(to_symbol)]

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def to_jsonable(self) -> dict:
        return {"symbols": list(self.symbols), "counts": [list(row) for row in self.counts]}


def load(source: Union[bytes, str, io.IOBase], format: str = "csv") -> list[RawRecord]:
    """Parse CSV or JSONL into raw records, failing fast on structural errors."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    if format == "csv":
        return _load_csv(text)
    if format == "jsonl":
        return _load_jsonl(text)
    raise ValueError(f"unknown format: {format!r}")


def _load_csv(text: str) -> list[RawRecord]:
    records = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row:
            continue
        if len(row) < 2:
            raise MalformedRow(lineno, "expected an id followed by at least one item")
        rid = row[0].strip()
        if not rid:
            raise MalformedRow(lineno, "empty id")
        records.append(RawRecord(id=rid, items=tuple(cell.strip() for cell in row[1:])))
    return records


def _load_jsonl(text: str) -> list[RawRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRow(lineno, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "items" not in obj:
            raise MalformedRow(lineno, "object must have 'id' and 'items'")
        items = obj["items"]
        if not isinstance(items, list) or not items:
            raise MalformedRow(lineno, "'items' must be a non-empty list")
        records.append(RawRecord(id=str(obj["id"]), items=tuple(str(x) for x in items)))
    return records


def validate(record: RawRecord) -> Union[Journey, str]:
    """Return a validated Journey, or the first violated reason code.

    Violations are checked in a fixed order: unknown symbols, post-purchase
    items, length, missing outcome, events after the outcome, then stage
    transitions (including the st1-first rule).
    """
    items = record.items
    if any(item not in ITEM_CODES for item in items):
        return UNKNOWN_SYMBOL
    if any(item in EXCLUDED_ITEMS for item in items):
        return POST_PURCHASE_ITEM
    if len(items) > MAX_EVENTS:
        return TOO_LONG
    stages = [stage_of(item) for item in items]
    if ST3 not in stages:
        return NO_OUTCOME
    if stages.index(ST3) != len(items) - 1:
        return EVENT_AFTER_OUTCOME
    if stages[0] != ST1:
        return ILLEGAL_TRANSITION
    for prev, cur in zip(stages, stages[1:]):
        if (prev, cur) not in LEGAL_TRANSITIONS:
            return ILLEGAL_TRANSITION
    return Journey.from_items(record.id, list(items))


def validate_query(record: RawRecord) -> Union[Journey, str]:
    """Like validate, but the outcome event is optional (in-progress drafts)."""
    items = record.items
    if not items:
        return NO_OUTCOME
    if any(item not in ITEM_CODES for item in items):
        return UNKNOWN_SYMBOL
    if any(item in EXCLUDED_ITEMS for item in items):
        return POST_PURCHASE_ITEM
    if len(items) > MAX_EVENTS:
        return TOO_LONG
    stages = [stage_of(item) for item in items]
    if ST3 in stages and stages.index(ST3) != len(items) - 1:
        return EVENT_AFTER_OUTCOME
    if stages[0] != ST1:
        return ILLEGAL_TRANSITION
    for prev, cur in zip(stages, stages[1:]):
        if (prev, cur) not in LEGAL_TRANSITIONS:
            return ILLEGAL_TRANSITION
    return Journey.from_items(record.id, list(items))


def cleanse(records: list[RawRecord], provenance: str = "") -> tuple[Dataset, CleansingReport]:
    """Validate every record; returns the accepted dataset plus a full report."""
    journeys: list[Journey] = []
    rejected: list[tuple[str, str]] = []
    for record in records:
        result = validate(record)
        if isinstance(result, Journey):
            journeys.append(result)
        else:
            rejected.append((record.id, result))
    report = CleansingReport(accepted=len(journeys), rejected=tuple(rejected))
    if not journeys:
        raise EmptyDataset("no records passed validation")
    return Dataset(journeys=tuple(journeys), provenance=provenance), report


def describe(dataset: Dataset) -> StageStats:
    """Per-stage item frequencies (original codes) and st2 length stats."""
    freq: dict[str, dict[str, int]] = {ST1: {}, ST2: {}, ST3: {}}
    st2_lengths = []
    for journey in dataset.journeys:
        n_st2 = 0
        for event in journey.events:
            table = freq[event.stage]
            table[event.item] = table.get(event.item, 0) + 1
            if event.stage == ST2:
                n_st2 += 1
        st2_lengths.append(n_st2)
    mean = sum(st2_lengths) / len(st2_lengths)
    return StageStats(
        frequencies={stage: dict(sorted(t.items())) for stage, t in freq.items()},
        st2_min=min(st2_lengths),
        st2_max=max(st2_lengths),
        st2_mean=round(mean, 4),
    )


def cooccurrence(dataset: Dataset) -> CooccurrenceMatrix:
    """Ordered adjacent-pair counts over canonical symbols (st3 as "1"/"0")."""
    index = {symbol: i for i, symbol in enumerate(COOC_SYMBOLS)}
    counts = [[0] * len(COOC_SYMBOLS) for _ in COOC_SYMBOLS]
    for journey in dataset.journeys:
        symbols = journey.canonical_items
        for a, b in zip(symbols, symbols[1:]):
            counts[index[a]][index[b]] += 1
    return CooccurrenceMatrix(
        symbols=COOC_SYMBOLS,
        counts=tuple(tuple(row) for row in counts),
    )
