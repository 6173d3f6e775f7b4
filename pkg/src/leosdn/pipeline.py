"""Two-pass scenario pipeline and deterministic output writers.

Pass 1 computes a delay matrix for every slot. Pass 2 derives the
horizon-wide normalization bounds (which need every slot) and then runs the
solvers. Matrices are shared by all approaches and K values of a scenario.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .assign import (
    ObjectiveWeights,
    replay_assignment,
    solve_dsca,
    solve_opt_dsca,
    solve_ssca,
)
from .config import ScenarioConfig
from .delay import DelayMatrix, NormalizationBounds, delay_matrix, normalization_bounds, write_matrix_csv
from .metrics import (
    Approach,
    ScenarioResult,
    build_cdf,
    per_slot_cdfs,
    reassignment_series,
    timeline,
)
from .orbit import SlotIndex, propagate
from .topology import build_graph

log = logging.getLogger(__name__)


@dataclass
class DelayTable:
    """Pass-1 product: per-slot matrices plus their global bounds."""

    slots: list[SlotIndex]
    matrices: list[DelayMatrix]
    bounds: NormalizationBounds
    geometry_digest: str


def slots_for(config: ScenarioConfig) -> list[SlotIndex]:
    return [
        SlotIndex(l, config.slot_duration_s, config.constellation.epoch)
        for l in range(config.horizon_slots)
    ]


def compute_delays(config: ScenarioConfig) -> DelayTable:
    stations = config.ground_stations
    n = config.constellation.num_satellites
    slots = slots_for(config)
    matrices = []
    for slot in slots:
        states = propagate(config.constellation, slot)
        graph = build_graph(states, stations, config.isl_policy, slot)
        matrices.append(delay_matrix(graph, stations, n))
    bounds = normalization_bounds(matrices)
    log.info("computed %d delay matrices, bounds %.3f..%.3f ms", len(matrices), bounds.d_min, bounds.d_max)
    return DelayTable(slots, matrices, bounds, config.geometry_digest())


def solve(
    table: DelayTable,
    approach: Approach,
    weights: ObjectiveWeights,
    k: Optional[int] = None,
    config_digest: str = "",
) -> ScenarioResult:
    approach = Approach(approach)
    m = table.matrices[0].shape[1]
    if approach is Approach.OPT_DSCA:
        outcomes = [solve_opt_dsca(mat, table.bounds, weights, m) for mat in table.matrices]
        k = None
    else:
        if k is None:
            k = m
        if not 1 <= k <= m:
            raise ValueError(f"k={k} outside 1..{m}")
        active = range(k)
        if approach is Approach.DSCA:
            outcomes = [solve_dsca(mat, table.bounds, active, weights) for mat in table.matrices]
        else:
            first = solve_ssca(table.matrices[0], table.bounds, active, weights)
            outcomes = [first] + [
                replay_assignment(first.assignment, active, mat, table.bounds, weights)
                for mat in table.matrices[1:]
            ]
    return ScenarioResult.from_outcomes(approach, table.slots, outcomes, config_digest, k)


def k_label(result: ScenarioResult) -> str:
    return "Kopt" if result.k is None else f"K{result.k}"


def _fmt(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else "inf"


def _fmt_set(active: Sequence[int]) -> str:
    return ";".join(str(j) for j in active)


def _json_float(v: float):
    return float(v) if math.isfinite(v) else None


def _write_lines(path: Path, header: str, rows) -> None:
    path.write_text("\n".join([header, *rows]) + "\n")


def write_cdf(result: ScenarioResult, path: Path) -> None:
    cdf = build_cdf(result.pooled_delays())
    _write_lines(path, "delay_ms,cum_fraction",
                 (f"{_fmt(v)},{_fmt(f)}" for v, f in zip(cdf.values, cdf.fractions)))


def write_per_slot_cdf(result: ScenarioResult, path: Path) -> None:
    rows = []
    for l, cdf in per_slot_cdfs(result):
        rows.extend(f"{l},{_fmt(v)},{_fmt(f)}" for v, f in zip(cdf.values, cdf.fractions))
    _write_lines(path, "slot,delay_ms,cum_fraction", rows)


def write_timeline(result: ScenarioResult, path: Path) -> None:
    _write_lines(path, "slot,mean_delay_ms,active_count,active_set",
                 (f"{r.slot},{_fmt(r.mean_delay_ms)},{r.active_count},{_fmt_set(r.active_set)}"
                  for r in timeline(result)))


def write_reassignments(result: ScenarioResult, path: Path) -> None:
    _write_lines(path, "slot,count,active_set_changed_to",
                 (f"{r.slot},{r.count},{'' if r.active_set_changed_to is None else _fmt_set(r.active_set_changed_to)}"
                  for r in reassignment_series(result)))


def summary_dict(result: ScenarioResult, table: DelayTable, config: ScenarioConfig,
                 weights: ObjectiveWeights) -> dict:
    slots = []
    for rec in result.per_slot:
        obj = rec.outcome.objective
        slots.append({
            "slot": rec.slot.l,
            "f1": obj.f1,
            "f2": obj.f2,
            "total": obj.total,
            "raw_mean_delay_ms": _json_float(obj.raw_mean_delay_ms),
            "active_set": list(rec.outcome.activation.active_set),
            "reassignments": rec.reassignments,
            "violations": [{"sat_id": i, "reason": why} for i, why in rec.outcome.violations],
        })
    return {
        "approach": result.approach.value,
        "k": result.k,
        "config_digest": result.config_digest,
        "geometry_digest": table.geometry_digest,
        "w_delay": weights.w_delay,
        "max_propagation_delay_ms": weights.max_propagation_delay_ms,
        "horizon_slots": len(table.slots),
        "slot_duration_s": config.slot_duration_s,
        "num_satellites": config.constellation.num_satellites,
        "ground_stations": [g.name for g in config.ground_stations],
        "bounds": {"d_min_ms": table.bounds.d_min, "d_max_ms": table.bounds.d_max},
        "total_violations": sum(len(r.outcome.violations) for r in result.per_slot),
        "total_reassignments": sum(r.reassignments for r in result.per_slot),
        "slots": slots,
    }


def write_outputs(result: ScenarioResult, table: DelayTable, config: ScenarioConfig,
                  weights: ObjectiveWeights, out_dir: Path, cdf_dir: Optional[Path] = None,
                  per_slot_cdf: bool = False) -> None:
    """Write summary.json, timeline, reassignments and the pooled CDF."""
    out_dir.mkdir(parents=True, exist_ok=True)
    cdf_dir = cdf_dir or out_dir
    cdf_dir.mkdir(parents=True, exist_ok=True)
    name = result.approach.value
    label = k_label(result)
    summary = summary_dict(result, table, config, weights)
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    write_cdf(result, cdf_dir / f"cdf_{name}_{label}.csv")
    write_timeline(result, out_dir / f"timeline_{name}.csv")
    write_reassignments(result, out_dir / f"reassignments_{name}.csv")
    if per_slot_cdf:
        write_per_slot_cdf(result, out_dir / f"cdf_per_slot_{name}_{label}.csv")


def dump_delays(table: DelayTable, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for slot, mat in zip(table.slots, table.matrices):
        write_matrix_csv(mat, out_dir / f"slot_{slot.l:05d}.csv")
