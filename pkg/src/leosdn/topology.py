"""Per-slot network graph: +grid ISLs plus ground visibility edges."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .orbit import GroundStation, SatelliteState, SlotIndex

SPEED_OF_LIGHT_KM_S = 299792.458


def propagation_delay_ms(distance_km: float) -> float:
    return distance_km / SPEED_OF_LIGHT_KM_S * 1000.0


@dataclass(frozen=True)
class IslPolicy:
    inter_plane_enabled: bool = True
    polar_cutoff_deg: Optional[float] = None
    min_elevation_deg: float = 10.0
    wrap_planes: bool = True

    def __post_init__(self):
        if not 0.0 <= self.min_elevation_deg < 90.0:
            raise ValueError(f"min_elevation_deg must lie in [0, 90), got {self.min_elevation_deg}")
        if self.polar_cutoff_deg is not None and not 0.0 <= self.polar_cutoff_deg <= 90.0:
            raise ValueError(f"polar_cutoff_deg must lie in [0, 90], got {self.polar_cutoff_deg}")


@dataclass
class NetworkGraph:
    """Undirected delay-weighted graph.

    Satellites occupy node ids ``0..n_sats-1`` and ground station ``j`` is
    node ``n_sats + j``. Each edge is stored once as ``(u, v, delay_ms)``
    with ``u < v``.
    """

    n_sats: int
    n_stations: int
    edges: list[tuple[int, int, float]] = field(default_factory=list)
    slot: Optional[SlotIndex] = None

    @property
    def num_nodes(self) -> int:
        return self.n_sats + self.n_stations

    def station_node(self, j: int) -> int:
        return self.n_sats + j

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.num_nodes)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def without_station_edges(self) -> "NetworkGraph":
        keep = [e for e in self.edges if e[0] < self.n_sats and e[1] < self.n_sats]
        return NetworkGraph(self.n_sats, self.n_stations, keep, self.slot)


def elevation_deg(station_pos: np.ndarray, sat_pos: np.ndarray) -> float:
    """Elevation of ``sat_pos`` above the local horizon at ``station_pos``.

    Negative when the satellite is below the horizon.
    """
    station_pos = np.asarray(station_pos, dtype=float)
    los = np.asarray(sat_pos, dtype=float) - station_pos
    rng = np.linalg.norm(los)
    if rng == 0.0:
        return 90.0
    up = station_pos / np.linalg.norm(station_pos)
    s = float(np.dot(los, up) / rng)
    return math.degrees(math.asin(max(-1.0, min(1.0, s))))


def _edge(u: int, v: int, pos_u: np.ndarray, pos_v: np.ndarray) -> tuple[int, int, float]:
    if u > v:
        u, v = v, u
    return (u, v, propagation_delay_ms(float(np.linalg.norm(pos_u - pos_v))))


def build_graph(
    states: Sequence[SatelliteState],
    stations: Sequence[GroundStation],
    policy: IslPolicy = IslPolicy(),
    slot: Optional[SlotIndex] = None,
) -> NetworkGraph:
    n = len(states)
    by_grid = {(s.plane, s.slot_in_plane): s for s in states}
    if len(by_grid) != n:
        raise ValueError("duplicate (plane, slot_in_plane) among satellite states")
    planes = sorted({s.plane for s in states})
    per_plane = {p: sorted(s.slot_in_plane for s in states if s.plane == p) for p in planes}

    pairs: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []

    def add(a: SatelliteState, b: SatelliteState) -> None:
        key = (min(a.sat_id, b.sat_id), max(a.sat_id, b.sat_id))
        if a.sat_id == b.sat_id or key in pairs:
            return
        pairs.add(key)
        edges.append(_edge(a.sat_id, b.sat_id, a.position, b.position))

    # Intra-plane rings.
    for p in planes:
        ks = per_plane[p]
        for idx, k in enumerate(ks):
            add(by_grid[(p, k)], by_grid[(p, ks[(idx + 1) % len(ks)])])

    if policy.inter_plane_enabled and len(planes) >= 2:
        neighbours = [(planes[i], planes[i + 1]) for i in range(len(planes) - 1)]
        if policy.wrap_planes:
            neighbours.append((planes[-1], planes[0]))
        cutoff = policy.polar_cutoff_deg
        for p, q in neighbours:
            for k in per_plane[p]:
                b = by_grid.get((q, k))
                if b is None:
                    continue
                a = by_grid[(p, k)]
                if cutoff is not None and (
                    abs(a.latitude_deg) > cutoff or abs(b.latitude_deg) > cutoff
                ):
                    continue
                add(a, b)

    for j, gs in enumerate(stations):
        gpos = gs.position
        node = n + j
        for s in states:
            if elevation_deg(gpos, s.position) >= policy.min_elevation_deg:
                edges.append(_edge(s.sat_id, node, s.position, gpos))

    edges.sort()
    return NetworkGraph(n_sats=n, n_stations=len(stations), edges=edges, slot=slot)
