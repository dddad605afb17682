"""Staged-sequence data model shared by every analytics module.

A journey is an ordered list of single-symbol events.  Each symbol maps to
exactly one consumption stage; the stage is always derived from the symbol,
never stored, so the two can never disagree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import MissingOutcome

# Closed alphabet of (touchpoint, action) item codes.
ITEM_CODES = frozenset("abcdefghijklm")

STAGE1_ITEMS = frozenset("abcd")   # first recognition
STAGE2_ITEMS = frozenset("efgh")   # information gathering
STAGE3_ITEMS = frozenset("ijk")    # purchase / non-purchase outcome
EXCLUDED_ITEMS = frozenset("lm")   # post-purchase, parsed but never validated
PURCHASE_ITEMS = frozenset("ij")

ST1 = "st1"
ST2 = "st2"
ST3 = "st3"
STAGES = (ST1, ST2, ST3)
EXCLUDED = "excluded"

# Human-readable captions for the item codes (used by the CLI/UI layers).
ITEM_CAPTIONS = {
    "a": "TV commercial [awareness]",
    "b": "direct word-of-mouth [awareness]",
    "c": "word-of-mouth on social media [awareness]",
    "d": "other channel [awareness]",
    "e": "web search comparison [information gathering]",
    "f": "e-commerce site comparison [information gathering]",
    "g": "in-store comparison [information gathering]",
    "h": "social media comparison [information gathering]",
    "i": "purchase on e-commerce site [purchase]",
    "j": "purchase in store [purchase]",
    "k": "no purchase [non-purchase]",
    "l": "product review on social media [post-purchase]",
    "m": "other [post-purchase]",
}


def stage_of(item: str) -> str:
    """Map an item code to its stage, or ``"excluded"`` for post-purchase items."""
    if item in STAGE1_ITEMS:
        return ST1
    if item in STAGE2_ITEMS:
        return ST2
    if item in STAGE3_ITEMS:
        return ST3
    if item in EXCLUDED_ITEMS:
        return EXCLUDED
    raise ValueError(f"unknown item code: {item!r}")


def canonical_symbol(item: str) -> str:
    """Collapse the outcome channel: i/j -> "1", k -> "0"; other items unchanged."""
    if item in PURCHASE_ITEMS:
        return "1"
    if item == "k":
        return "0"
    return item


@dataclass(frozen=True)
class Event:
    """One (touchpoint, action) observation; stage derives from the item code."""

    item: str

    @property
    def stage(self) -> str:
        return stage_of(self.item)

    @property
    def canonical(self) -> str:
        return canonical_symbol(self.item)


@dataclass(frozen=True)
class StageProjection:
    """Order-preserving subsequence of one journey restricted to one stage."""

    stage: str
    items: tuple[str, ...]  # canonical symbols


@dataclass(frozen=True)
class Journey:
    """A validated respondent journey: pre-outcome events plus one terminal outcome."""

    id: str
    events: tuple[Event, ...]
    label: Optional[int] = None

    @classmethod
    def from_items(cls, journey_id: str, items: list[str] | tuple[str, ...]) -> "Journey":
        """Build a journey from already-validated item codes, deriving the label."""
        events = tuple(Event(item) for item in items)
        label = None
        for event in events:
            if event.stage == ST3:
                label = 1 if event.item in PURCHASE_ITEMS else 0
        return cls(id=journey_id, events=events, label=label)

    @property
    def items(self) -> tuple[str, ...]:
        return tuple(e.item for e in self.events)

    @property
    def canonical_items(self) -> tuple[str, ...]:
        return tuple(e.canonical for e in self.events)

    def project(self, stage: str) -> StageProjection:
        """All canonical symbols of ``stage`` in original order (may be empty)."""
        items = tuple(e.canonical for e in self.events if e.stage == stage)
        return StageProjection(stage=stage, items=items)

    def outcome_label(self) -> int:
        """1 for a purchase outcome (item i or j), 0 for non-purchase (item k)."""
        for event in self.events:
            if event.stage == ST3:
                return 1 if event.item in PURCHASE_ITEMS else 0
        raise MissingOutcome(f"journey {self.id!r} has no outcome event")

    def pretty(self) -> str:
        return "[" + ", ".join(self.canonical_items) + "]"


@dataclass(frozen=True)
class Dataset:
    """Validated journey collection with unique ids."""

    journeys: tuple[Journey, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        ids = [j.id for j in self.journeys]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate journey ids in dataset")

    def __len__(self) -> int:
        return len(self.journeys)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.journeys)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(j.outcome_label() for j in self.journeys)

    def by_id(self, journey_id: str) -> Journey:
        for journey in self.journeys:
            if journey.id == journey_id:
                return journey
        raise KeyError(journey_id)
