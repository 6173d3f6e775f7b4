"""Static, dynamic and activation-optimizing controller assignment.

All three strategies are exact. Once the active set is fixed the delay
objective separates by satellite, so the optimal assignment is a row-wise
argmin over the active columns; Opt-DSCA additionally enumerates every
non-empty active subset.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .delay import DelayMatrix, NormalizationBounds, normalize
from .orbit import SlotIndex

MAX_ENUMERATED_CONTROLLERS = 20
# Totals closer than this are treated as tied and resolved by the tie-break order.
TIE_TOLERANCE = 1e-12


class EnumerationLimitError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectiveWeights:
    w_delay: float = 0.75
    max_propagation_delay_ms: float = 150.0

    def __post_init__(self):
        if not 0.0 <= self.w_delay <= 1.0:
            raise ValueError(f"w_delay must lie in [0, 1], got {self.w_delay}")
        if not self.max_propagation_delay_ms > 0:
            raise ValueError("max_propagation_delay_ms must be positive")


@dataclass
class AssignmentMatrix:
    x: np.ndarray  # n x m, 0/1
    slot: Optional[SlotIndex] = None

    @classmethod
    def from_choice(cls, choice, m: int, slot: Optional[SlotIndex] = None) -> "AssignmentMatrix":
        choice = np.asarray(choice, dtype=int)
        x = np.zeros((choice.size, m), dtype=np.int8)
        x[np.arange(choice.size), choice] = 1
        return cls(x, slot)

    @property
    def controller_of(self) -> np.ndarray:
        return np.argmax(self.x, axis=1)

    def row_sums_ok(self) -> bool:
        return bool(np.all(self.x.sum(axis=1) == 1))


@dataclass
class ActivationVector:
    y: np.ndarray  # length m, 0/1
    slot: Optional[SlotIndex] = None

    @classmethod
    def from_set(cls, active: Iterable[int], m: int, slot: Optional[SlotIndex] = None) -> "ActivationVector":
        y = np.zeros(m, dtype=np.int8)
        y[list(active)] = 1
        return cls(y, slot)

    @property
    def k(self) -> int:
        return int(self.y.sum())

    @property
    def active_set(self) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.y))


@dataclass(frozen=True)
class ObjectiveValue:
    f1: float
    f2: float
    total: float
    raw_mean_delay_ms: float


@dataclass
class SolveOutcome:
    assignment: AssignmentMatrix
    activation: ActivationVector
    objective: ObjectiveValue
    violations: list[tuple[int, str]] = field(default_factory=list)
    # Raw delay (ms) of each satellite's assigned controller.
    assigned_delays: Optional[np.ndarray] = None


def feasible(d_ij: float, weights: ObjectiveWeights) -> bool:
    return math.isfinite(d_ij) and d_ij <= weights.max_propagation_delay_ms


def _normalized_assigned(delays: np.ndarray, bounds: NormalizationBounds) -> np.ndarray:
    # An unreachable fallback assignment scores as the worst observed delay.
    out = np.ones(delays.shape, dtype=float)
    finite = np.isfinite(delays)
    out[finite] = normalize(delays[finite], bounds)
    return out


def evaluate_objective(
    assignment: AssignmentMatrix,
    activation: ActivationVector,
    matrix: DelayMatrix,
    bounds: NormalizationBounds,
    weights: ObjectiveWeights,
) -> ObjectiveValue:
    x, y = assignment.x, activation.y
    n, m = matrix.shape
    if x.shape != (n, m) or y.shape != (m,):
        raise ValueError("assignment/activation shape does not match the delay matrix")
    if not assignment.row_sums_ok():
        raise ValueError("every satellite must be assigned to exactly one controller")
    if np.any(x > y[np.newaxis, :]):
        raise ValueError("satellite assigned to an inactive controller")
    delays = matrix.values[np.arange(n), assignment.controller_of]
    norm = _normalized_assigned(delays, bounds)
    w = weights.w_delay
    f1 = w * math.fsum(norm) / n
    f2 = (1.0 - w) * int(y.sum()) / m
    finite = delays[np.isfinite(delays)]
    raw_mean = math.fsum(finite) / finite.size if finite.size else math.inf
    return ObjectiveValue(f1=f1, f2=f2, total=f1 + f2, raw_mean_delay_ms=raw_mean)


def _argmin_rows(values: np.ndarray, active: tuple[int, ...], weights: ObjectiveWeights):
    """Per-row minimum-delay active controller; lowest index wins ties."""
    cols = np.asarray(active, dtype=int)
    sub = values[:, cols]
    choice = cols[np.argmin(sub, axis=1)]
    delays = values[np.arange(values.shape[0]), choice]
    violations = []
    for i in np.flatnonzero(~(np.isfinite(delays) & (delays <= weights.max_propagation_delay_ms))):
        violations.append((int(i), _reason(float(delays[i]), weights)))
    return choice, delays, violations


def _reason(d: float, weights: ObjectiveWeights) -> str:
    if not math.isfinite(d):
        return "no active controller reachable"
    return f"no active controller within {weights.max_propagation_delay_ms:g} ms (best {d:.3f} ms)"


def _frozen_reason(d: float, weights: ObjectiveWeights) -> str:
    if not math.isfinite(d):
        return "frozen controller unreachable"
    return f"frozen controller beyond {weights.max_propagation_delay_ms:g} ms ({d:.3f} ms)"


def _normalize_active(active_set: Iterable[int], m: int) -> tuple[int, ...]:
    active = tuple(sorted(set(int(j) for j in active_set)))
    if not active:
        raise ValueError("active set must be non-empty")
    if active[0] < 0 or active[-1] >= m:
        raise ValueError(f"active controller index out of range 0..{m - 1}")
    return active


def _outcome(choice, delays, violations, active, matrix, bounds, weights) -> SolveOutcome:
    m = matrix.shape[1]
    assignment = AssignmentMatrix.from_choice(choice, m, matrix.slot)
    activation = ActivationVector.from_set(active, m, matrix.slot)
    objective = evaluate_objective(assignment, activation, matrix, bounds, weights)
    return SolveOutcome(assignment, activation, objective, violations, delays)


def solve_dsca(
    matrix: DelayMatrix,
    bounds: NormalizationBounds,
    active_set: Iterable[int],
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> SolveOutcome:
    """Minimum-delay assignment over a fixed set of K active controllers."""
    active = _normalize_active(active_set, matrix.shape[1])
    choice, delays, violations = _argmin_rows(matrix.values, active, weights)
    return _outcome(choice, delays, violations, active, matrix, bounds, weights)


def solve_ssca(
    first_slot: DelayMatrix,
    bounds: NormalizationBounds,
    active_set: Iterable[int],
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> SolveOutcome:
    """Slot-0 pre-assignment; identical to DSCA at the first slot.

    Later slots replay ``outcome.assignment`` through :func:`replay_assignment`.
    """
    return solve_dsca(first_slot, bounds, active_set, weights)


def replay_assignment(
    frozen: AssignmentMatrix,
    active_set: Iterable[int],
    matrix: DelayMatrix,
    bounds: NormalizationBounds,
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> SolveOutcome:
    """Evaluate a frozen assignment against a later slot's delays."""
    n, m = matrix.shape
    active = _normalize_active(active_set, m)
    choice = frozen.controller_of
    delays = matrix.values[np.arange(n), choice]
    violations = [
        (int(i), _frozen_reason(float(delays[i]), weights))
        for i in range(n)
        if not feasible(float(delays[i]), weights)
    ]
    return _outcome(choice, delays, violations, active, matrix, bounds, weights)


def solve_opt_dsca(
    matrix: DelayMatrix,
    bounds: NormalizationBounds,
    weights: ObjectiveWeights = ObjectiveWeights(),
    m: Optional[int] = None,
) -> SolveOutcome:
    """Jointly choose the active subset and assignment by exhaustive search.

    Subsets are ranked by violation count, then total objective, then
    cardinality, then lexicographic order of controller indices.
    """
    if m is None:
        m = matrix.shape[1]
    if m != matrix.shape[1]:
        raise ValueError(f"m={m} does not match delay matrix width {matrix.shape[1]}")
    if m > MAX_ENUMERATED_CONTROLLERS:
        raise EnumerationLimitError(
            f"exact subset enumeration supports at most {MAX_ENUMERATED_CONTROLLERS} "
            f"controllers (got {m}); a heuristic solver is required for larger instances"
        )
    values = matrix.values
    n = values.shape[0]
    norm_all = np.ones_like(values)
    finite = np.isfinite(values)
    norm_all[finite] = normalize(values[finite], bounds)
    w = weights.w_delay

    best = None
    best_key = None
    # combinations() yields subsets in (cardinality, lexicographic) order, so
    # the first candidate reaching a tied score is the tie-break winner.
    for k in range(1, m + 1):
        f2 = (1.0 - w) * k / m
        for active in itertools.combinations(range(m), k):
            choice, delays, violations = _argmin_rows(values, active, weights)
            total = w * math.fsum(norm_all[np.arange(n), choice]) / n + f2
            key = (len(violations), total)
            if best_key is None or key[0] < best_key[0] or (
                key[0] == best_key[0] and total < best_key[1] - TIE_TOLERANCE
            ):
                best_key = key
                best = (choice, delays, violations, active)
    choice, delays, violations, active = best
    return _outcome(choice, delays, violations, active, matrix, bounds, weights)


def count_reassignments(prev: AssignmentMatrix, cur: AssignmentMatrix) -> int:
    if prev.x.shape != cur.x.shape:
        raise ValueError(f"assignment shapes differ: {prev.x.shape} vs {cur.x.shape}")
    return int(np.count_nonzero(prev.controller_of != cur.controller_of))
