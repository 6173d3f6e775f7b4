"""Satellite-to-controller propagation delays and horizon-wide normalization."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable, Optional, Sequence

import numpy as np

from .orbit import GroundStation, SlotIndex
from .topology import NetworkGraph

INF = math.inf


class DegenerateScenarioError(ValueError):
    """No finite delay exists anywhere in the horizon."""


def dijkstra(
    adjacency: Sequence[Sequence[tuple[int, float]]],
    source: int,
    terminals: Collection[int] = (),
) -> list[float]:
    """Single-source shortest distances over a non-negatively weighted graph.

    Nodes in ``terminals`` may be reached but are never relaxed out of, so
    no path transits them. Unreachable nodes get ``math.inf``.
    """
    dist = [INF] * len(adjacency)
    dist[source] = 0.0
    done = [False] * len(adjacency)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u != source and u in terminals:
            continue
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


@dataclass
class DelayMatrix:
    """``values[i, j]``: shortest delay (ms) from satellite i to controller j."""

    values: np.ndarray
    slot: Optional[SlotIndex] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def finite_values(self) -> np.ndarray:
        return self.values[np.isfinite(self.values)]


@dataclass(frozen=True)
class NormalizationBounds:
    d_min: float
    d_max: float

    def __post_init__(self):
        if not (math.isfinite(self.d_min) and math.isfinite(self.d_max)):
            raise ValueError("normalization bounds must be finite")
        if self.d_min > self.d_max:
            raise ValueError(f"d_min {self.d_min} exceeds d_max {self.d_max}")


def delay_matrix(graph: NetworkGraph, stations: Sequence[GroundStation], n: int) -> DelayMatrix:
    """Shortest delay from every satellite to every station's controller.

    Paths include the final space-ground leg. Other ground stations are
    endpoints only and never relay traffic.
    """
    if graph.n_sats != n or graph.n_stations != len(stations):
        raise ValueError("graph does not match satellite/station counts")
    adj = graph.adjacency()
    station_nodes = frozenset(range(n, n + len(stations)))
    values = np.full((n, len(stations)), INF)
    for j in range(len(stations)):
        dist = dijkstra(adj, graph.station_node(j), station_nodes)
        values[:, j] = dist[:n]
    return DelayMatrix(values=values, slot=graph.slot)


def normalization_bounds(matrices: Iterable[DelayMatrix]) -> NormalizationBounds:
    lo, hi = INF, -INF
    for m in matrices:
        finite = m.finite_values()
        if finite.size:
            lo = min(lo, float(finite.min()))
            hi = max(hi, float(finite.max()))
    if not math.isfinite(lo):
        raise DegenerateScenarioError("no finite satellite-controller delay in any slot")
    return NormalizationBounds(lo, hi)


def normalize(d, bounds: NormalizationBounds):
    """Map delays onto [0, 1] using the horizon bounds; scalar or array."""
    span = bounds.d_max - bounds.d_min
    if span == 0.0:
        return np.zeros_like(d, dtype=float) if isinstance(d, np.ndarray) else 0.0
    return (d - bounds.d_min) / span


def write_matrix_csv(matrix: DelayMatrix, path: Path) -> None:
    n, m = matrix.shape
    lines = ["sat_id," + ",".join(f"c{j}" for j in range(m))]
    for i in range(n):
        cells = ("inf" if not math.isfinite(v) else repr(float(v)) for v in matrix.values[i])
        lines.append(f"{i}," + ",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")
