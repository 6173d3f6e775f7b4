import csv
import json
from pathlib import Path

import pytest

from leosdn import cli, pipeline
from leosdn.metrics import build_cdf, dominates

SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "paper-canada.cfg"


def _read_cdf(path):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    return [float(r["delay_ms"]) for r in rows], [float(r["cum_fraction"]) for r in rows]


def _tree(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_run_opt_dsca(tmp_path):
    rc = cli.main(["run", "--scenario", str(SCENARIO), "--approach", "opt-dsca", "--slots", "30",
                   "--w-delay", "0.75", "--out", str(tmp_path)])
    assert rc == cli.EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "cdf_opt-dsca_Kopt.csv", "reassignments_opt-dsca.csv", "summary.json", "timeline_opt-dsca.csv",
    ]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["approach"] == "opt-dsca" and summary["k"] is None
    assert len(summary["slots"]) == 30
    for rec in summary["slots"]:
        assert set(rec) >= {"slot", "f1", "f2", "total", "raw_mean_delay_ms", "active_set", "violations"}
        assert 1 <= len(rec["active_set"]) <= 7
        assert rec["total"] == pytest.approx(rec["f1"] + rec["f2"])
    assert (tmp_path / "timeline_opt-dsca.csv").read_text().splitlines()[0] == "slot,mean_delay_ms,active_count,active_set"
    assert (tmp_path / "reassignments_opt-dsca.csv").read_text().splitlines()[0] == "slot,count,active_set_changed_to"
    assert (tmp_path / "cdf_opt-dsca_Kopt.csv").read_text().splitlines()[0] == "delay_ms,cum_fraction"


def test_run_ssca_is_deterministic(tmp_path):
    args = ["run", "--scenario", str(SCENARIO), "--approach", "ssca", "--k", "3", "--slots", "20"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")
    assert (tmp_path / "a" / "cdf_ssca_K3.csv").exists()


def test_run_optional_dumps(tmp_path):
    rc = cli.main(["run", "--scenario", str(SCENARIO), "--approach", "dsca", "--k", "2", "--slots", "3",
                   "--slot-duration", "30", "--dump-delays", "--per-slot-cdf", "--out", str(tmp_path)])
    assert rc == 0
    dumps = sorted(p.name for p in (tmp_path / "delays").iterdir())
    assert dumps == ["slot_00000.csv", "slot_00001.csv", "slot_00002.csv"]
    lines = (tmp_path / "delays" / "slot_00000.csv").read_text().splitlines()
    assert lines[0] == "sat_id,c0,c1,c2,c3,c4,c5,c6" and len(lines) == 67
    per_slot = (tmp_path / "cdf_per_slot_dsca_K2.csv").read_text().splitlines()
    assert per_slot[0] == "slot,delay_ms,cum_fraction"
    assert json.loads((tmp_path / "summary.json").read_text())["slot_duration_s"] == 30.0


def test_k_larger_than_station_count_is_usage_error(tmp_path, capsys):
    rc = cli.main(["run", "--scenario", str(SCENARIO), "--approach", "dsca", "--k", "8", "--out", str(tmp_path)])
    assert rc == cli.EXIT_USAGE
    assert "K=8" in capsys.readouterr().err
    assert not (tmp_path / "summary.json").exists()


def test_bad_flags_are_usage_errors(tmp_path):
    assert cli.main(["run", "--scenario", str(SCENARIO), "--approach", "greedy", "--out", str(tmp_path)]) == cli.EXIT_USAGE
    assert cli.main(["sweep", "--scenario", str(SCENARIO), "--k-range", "5..2", "--out", str(tmp_path)]) == cli.EXIT_USAGE
    assert cli.main(["run", "--scenario", str(SCENARIO), "--approach", "dsca", "--w-delay", "1.5",
                     "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("horizon_slots: 3\nground_stations:\n  - {name: A, lat: 10, lon: 20}\nweights:\n  w_delay: high\n")
    rc = cli.main(["run", "--scenario", str(bad), "--approach", "dsca", "--out", str(tmp_path / "o")])
    assert rc == cli.EXIT_CONFIG
    assert f"{bad}:5:" in capsys.readouterr().err


def test_infeasible_scenario_has_distinct_exit(tmp_path, capsys):
    cfg = tmp_path / "dark.cfg"
    cfg.write_text(
        "horizon_slots: 2\n"
        "constellation: {num_planes: 1, sats_per_plane: 2, altitude_km: 300.0, inclination_deg: 0.0}\n"
        "isl: {min_elevation_deg: 60.0}\n"
        "k_values: [1]\n"
        "ground_stations:\n  - {name: Pole, lat: 90.0, lon: 0.0}\n"
    )
    rc = cli.main(["run", "--scenario", str(cfg), "--approach", "opt-dsca", "--out", str(tmp_path / "o")])
    assert rc == cli.EXIT_INFEASIBLE
    assert rc not in (cli.EXIT_OK, cli.EXIT_USAGE, cli.EXIT_CONFIG, cli.EXIT_RUNTIME)
    assert "infeasible" in capsys.readouterr().err


def test_sweep_outputs_and_dominance(tmp_path):
    rc = cli.main(["sweep", "--scenario", str(SCENARIO), "--approaches", "ssca,dsca,opt-dsca",
                   "--k-range", "2..7", "--slots", "40", "--out", str(tmp_path)])
    assert rc == 0
    cdfs = sorted(p.name for p in tmp_path.glob("cdf_*.csv"))
    expected = [f"cdf_{a}_K{k}.csv" for a in ("dsca", "ssca") for k in range(2, 8)] + ["cdf_opt-dsca_Kopt.csv"]
    assert cdfs == sorted(expected)
    assert (tmp_path / "dsca_K4" / "timeline_dsca.csv").exists()
    assert (tmp_path / "opt-dsca_Kopt" / "summary.json").exists()
    k7 = _read_cdf(tmp_path / "cdf_dsca_K7.csv")
    k2 = _read_cdf(tmp_path / "cdf_dsca_K2.csv")
    assert dominates(build_cdf(_expand(*k7)), build_cdf(_expand(*k2)))


def _expand(values, fractions):
    # Rebuild a sample multiset from CDF steps; sample count is 66 * slots.
    total = 66 * 40
    counts = [round(f * total) for f in fractions]
    out = []
    prev = 0
    for v, c in zip(values, counts):
        out.extend([v] * (c - prev))
        prev = c
    return out


def test_sweep_computes_each_slot_once(tmp_path, monkeypatch):
    calls = []
    real = pipeline.delay_matrix

    def counting(graph, stations, n):
        calls.append(graph.slot.l)
        return real(graph, stations, n)

    monkeypatch.setattr(pipeline, "delay_matrix", counting)
    rc = cli.main(["sweep", "--scenario", str(SCENARIO), "--approaches", "ssca,dsca,opt-dsca",
                   "--k-range", "2..4", "--slots", "5", "--out", str(tmp_path)])
    assert rc == 0
    assert calls == [0, 1, 2, 3, 4]
