from collections import deque

import numpy as np
import pytest

from leosdn.orbit import ConstellationConfig, GroundStation, SatelliteState, SlotIndex, propagate
from leosdn.topology import IslPolicy, build_graph, elevation_deg, propagation_delay_ms


def _sat(i, pos, plane=0, k=None):
    return SatelliteState(i, plane, i if k is None else k, np.asarray(pos, dtype=float))


def _satellite_edges(graph):
    return [(u, v) for u, v, _ in graph.edges if v < graph.n_sats]


def test_single_plane_ring():
    cfg = ConstellationConfig(num_planes=1, sats_per_plane=4)
    g = build_graph(propagate(cfg, SlotIndex(0)), [])
    assert sorted(_satellite_edges(g)) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_two_by_two_grid_dedups():
    # Hand enumeration: each 2-satellite ring collapses to one edge, and the
    # wrap-around between two planes repeats the forward links.
    cfg = ConstellationConfig(num_planes=2, sats_per_plane=2)
    g = build_graph(propagate(cfg, SlotIndex(0)), [], IslPolicy(inter_plane_enabled=True))
    assert sorted(_satellite_edges(g)) == [(0, 1), (0, 2), (1, 3), (2, 3)]


def test_default_grid_edge_count():
    g = build_graph(propagate(ConstellationConfig(), SlotIndex(0)), [])
    # 66 ring links + 6 plane pairs x 11 links with wrap.
    assert len(g.edges) == 66 + 66
    g = build_graph(propagate(ConstellationConfig(), SlotIndex(0)), [], IslPolicy(wrap_planes=False))
    assert len(g.edges) == 66 + 55
    g = build_graph(propagate(ConstellationConfig(), SlotIndex(0)), [], IslPolicy(inter_plane_enabled=False))
    assert len(g.edges) == 66


def test_polar_cutoff_removes_high_latitude_links():
    states = propagate(ConstellationConfig(), SlotIndex(0))
    full = build_graph(states, [])
    cut = build_graph(states, [], IslPolicy(polar_cutoff_deg=60.0))
    assert len(cut.edges) < len(full.edges)
    lat = {s.sat_id: s.latitude_deg for s in states}
    plane = {s.sat_id: s.plane for s in states}
    for u, v, _ in cut.edges:
        if plane[u] != plane[v]:
            assert abs(lat[u]) <= 60.0 and abs(lat[v]) <= 60.0


def test_graph_invariants():
    stations = [GroundStation(0, "a", 45.0, -75.0), GroundStation(1, "b", 50.0, -110.0)]
    g = build_graph(propagate(ConstellationConfig(), SlotIndex(42)), stations)
    pairs = [(u, v) for u, v, _ in g.edges]
    assert len(pairs) == len(set(pairs))
    assert all(u < v for u, v in pairs)
    assert all(w > 0 for *_, w in g.edges)
    adj = g.adjacency()
    for u, nbrs in enumerate(adj):
        for v, w in nbrs:
            assert (u, w) in adj[v]


def test_edge_weight_is_distance_over_c():
    states = propagate(ConstellationConfig(), SlotIndex(5))
    pos = {s.sat_id: s.position for s in states}
    g = build_graph(states, [])
    for u, v, w in g.edges:
        assert w == pytest.approx(np.linalg.norm(pos[u] - pos[v]) / 299792.458 * 1000.0, rel=1e-12)


def test_satellite_grid_connected():
    g = build_graph(propagate(ConstellationConfig(), SlotIndex(100)), []).without_station_edges()
    adj = g.adjacency()
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    assert len(seen) == 66


def test_overhead_visibility_edge():
    station = GroundStation(0, "eq", 0.0, 0.0)
    sat = _sat(0, [6371.0 + 1325.0, 0.0, 0.0])
    g = build_graph([sat], [station], IslPolicy(min_elevation_deg=10.0))
    assert g.edges == [(0, 1, pytest.approx(4.4197242613755146, rel=1e-12))]
    assert propagation_delay_ms(1325.0) == pytest.approx(4.42, abs=5e-3)


def test_elevation_examples():
    station = np.array([6371.0, 0.0, 0.0])
    assert elevation_deg(station, [7696.0, 0.0, 0.0]) == pytest.approx(90.0)
    assert elevation_deg(station, [-7696.0, 0.0, 0.0]) < 0
    assert elevation_deg(station, [6371.0, 1000.0, 0.0]) == 0.0


def test_visibility_boundary_inclusive():
    station = GroundStation(0, "eq", 0.0, 0.0)
    on_horizon = _sat(0, [6371.0, 1000.0, 0.0])
    g = build_graph([on_horizon], [station], IslPolicy(min_elevation_deg=0.0))
    assert len(g.edges) == 1
    below = _sat(0, [6370.0, 1000.0, 0.0])
    assert build_graph([below], [station], IslPolicy(min_elevation_deg=0.0)).edges == []


def test_policy_validation():
    with pytest.raises(ValueError):
        IslPolicy(min_elevation_deg=90.0)
    with pytest.raises(ValueError):
        IslPolicy(min_elevation_deg=-1.0)
