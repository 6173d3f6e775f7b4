"""Aggregation of per-slot outcomes into CDF, timeline and reassignment series."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .assign import SolveOutcome, count_reassignments
from .orbit import SlotIndex


class Approach(str, enum.Enum):
    SSCA = "ssca"
    DSCA = "dsca"
    OPT_DSCA = "opt-dsca"


class SlotRecord(NamedTuple):
    slot: SlotIndex
    outcome: SolveOutcome
    reassignments: int


@dataclass
class ScenarioResult:
    approach: Approach
    per_slot: list[SlotRecord]
    config_digest: str = ""
    k: Optional[int] = None

    @classmethod
    def from_outcomes(cls, approach, slots, outcomes, config_digest="", k=None) -> "ScenarioResult":
        """Pair slots with outcomes and fold reassignment counts in slot order."""
        records = []
        prev = None
        for slot, out in zip(slots, outcomes):
            count = 0 if prev is None else count_reassignments(prev.assignment, out.assignment)
            records.append(SlotRecord(slot, out, count))
            prev = out
        return cls(Approach(approach), records, config_digest, k)

    def pooled_delays(self) -> np.ndarray:
        if not self.per_slot:
            return np.empty(0)
        return np.concatenate([r.outcome.assigned_delays for r in self.per_slot])


@dataclass(frozen=True)
class CdfSeries:
    values: np.ndarray  # distinct sample values, ascending (ms)
    fractions: np.ndarray  # P(X <= value), strictly increasing to 1.0

    def __call__(self, x: float) -> float:
        idx = np.searchsorted(self.values, x, side="right")
        return 0.0 if idx == 0 else float(self.fractions[idx - 1])

    def quantile(self, p: float) -> float:
        idx = int(np.searchsorted(self.fractions, p, side="left"))
        return float(self.values[min(idx, len(self.values) - 1)])


def build_cdf(samples) -> CdfSeries:
    """Empirical CDF of the finite samples."""
    data = np.asarray(samples, dtype=float).ravel()
    data = np.sort(data[np.isfinite(data)])
    if data.size == 0:
        raise ValueError("cannot build a CDF from an empty sample set")
    values, counts = np.unique(data, return_counts=True)
    cum = np.cumsum(counts)
    fractions = cum / data.size
    fractions[-1] = 1.0
    return CdfSeries(values, fractions)


def dominates(left: CdfSeries, right: CdfSeries) -> bool:
    """True when ``left`` lies on or left of ``right`` at every sample point."""
    points = np.union1d(left.values, right.values)
    return all(left(x) >= right(x) for x in points)


def per_slot_cdfs(result: ScenarioResult) -> list[tuple[int, CdfSeries]]:
    return [(r.slot.l, build_cdf(r.outcome.assigned_delays)) for r in result.per_slot]


class TimelineRow(NamedTuple):
    slot: int
    mean_delay_ms: float
    active_count: int
    active_set: tuple[int, ...]
    update: bool


def timeline(result: ScenarioResult) -> list[TimelineRow]:
    """Mean assigned delay and activation snapshot per slot.

    ``update`` marks slots whose active set differs from the previous slot's;
    slot 0 is never an update.
    """
    rows = []
    prev = None
    for rec in result.per_slot:
        active = rec.outcome.activation.active_set
        rows.append(
            TimelineRow(
                rec.slot.l,
                rec.outcome.objective.raw_mean_delay_ms,
                len(active),
                active,
                prev is not None and active != prev,
            )
        )
        prev = active
    return rows


class ReassignmentRow(NamedTuple):
    slot: int
    count: int
    active_set_changed_to: Optional[tuple[int, ...]]


def reassignment_series(result: ScenarioResult) -> list[ReassignmentRow]:
    # Slot 0 carries the initial active set as its annotation.
    rows = []
    prev = None
    for rec in result.per_slot:
        active = rec.outcome.activation.active_set
        rows.append(ReassignmentRow(rec.slot.l, rec.reassignments, active if active != prev else None))
        prev = active
    return rows


def update_events(rows: Sequence[TimelineRow]) -> list[TimelineRow]:
    return [r for r in rows if r.update]
