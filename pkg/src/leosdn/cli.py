"""Command-line front end: ``leosdn run`` and ``leosdn sweep``.

Exit codes: 0 success, 1 runtime error, 2 usage error (bad flags, K larger
than the station list), 3 malformed scenario file, 4 infeasible scenario
(no finite satellite-controller delay anywhere in the horizon).
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, ScenarioConfig, load_scenario
from .delay import DegenerateScenarioError
from .metrics import Approach
from . import pipeline

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4

log = logging.getLogger("leosdn")


class UsageError(Exception):
    pass


def _parse_k_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = (int(p) for p in text.split("..", 1))
            if a > b:
                raise ValueError
            return list(range(a, b + 1))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid K range {text!r}; expected a..b or a,b,c") from None


def _parse_approaches(text: str) -> list[Approach]:
    try:
        return [Approach(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid approach list {text!r}; choose from {', '.join(a.value for a in Approach)}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leosdn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--w-delay", type=float)
        p.add_argument("--slots", type=int, help="override horizon_slots")
        p.add_argument("--slot-duration", type=float, help="override slot_duration_s (seconds)")
        p.add_argument("--dump-delays", action="store_true", help="write per-slot delay matrices as CSV")
        p.add_argument("--per-slot-cdf", action="store_true", help="also write per-slot CDFs")

    run = sub.add_parser("run", help="solve one approach over the horizon")
    common(run)
    run.add_argument("--approach", required=True, type=Approach, choices=list(Approach),
                     metavar="{ssca,dsca,opt-dsca}")
    run.add_argument("--k", type=int, help="active controllers for ssca/dsca (default: all)")

    sweep = sub.add_parser("sweep", help="solve every (approach, K) combination on shared delays")
    common(sweep)
    sweep.add_argument("--approaches", type=_parse_approaches)
    sweep.add_argument("--k-range", type=_parse_k_range)
    return parser


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.slots is not None:
        if args.slots < 1:
            raise UsageError("--slots must be >= 1")
        changes["horizon_slots"] = args.slots
    if args.slot_duration is not None:
        if not args.slot_duration > 0:
            raise UsageError("--slot-duration must be positive")
        changes["slot_duration_s"] = args.slot_duration
    if args.w_delay is not None:
        try:
            changes["weights"] = dataclasses.replace(config.weights, w_delay=args.w_delay)
        except ValueError as exc:
            raise UsageError(f"--w-delay: {exc}") from None
    return dataclasses.replace(config, **changes) if changes else config


def _check_k(k: int, config: ScenarioConfig) -> None:
    if not 1 <= k <= config.m:
        raise UsageError(f"K={k} must lie in 1..{config.m} (number of ground stations)")


def cmd_run(args, config: ScenarioConfig) -> None:
    approach = args.approach
    k = args.k
    if approach is Approach.OPT_DSCA:
        if k is not None:
            log.warning("--k is ignored for opt-dsca; the solver chooses the active set")
        k = None
    else:
        k = config.m if k is None else k
        _check_k(k, config)
    table = pipeline.compute_delays(config)
    result = pipeline.solve(table, approach, config.weights, k, config.digest())
    pipeline.write_outputs(result, table, config, config.weights, args.out,
                           per_slot_cdf=args.per_slot_cdf)
    if args.dump_delays:
        pipeline.dump_delays(table, args.out / "delays")


def cmd_sweep(args, config: ScenarioConfig) -> None:
    approaches = args.approaches or list(config.approaches)
    k_values = args.k_range or list(config.k_values)
    for k in k_values:
        _check_k(k, config)
    table = pipeline.compute_delays(config)
    digest = config.digest()
    for approach in approaches:
        ks = [None] if approach is Approach.OPT_DSCA else k_values
        for k in ks:
            result = pipeline.solve(table, approach, config.weights, k, digest)
            subdir = args.out / f"{approach.value}_{pipeline.k_label(result)}"
            pipeline.write_outputs(result, table, config, config.weights, subdir,
                                   cdf_dir=args.out, per_slot_cdf=args.per_slot_cdf)
            log.info("wrote %s", subdir)
    if args.dump_delays:
        pipeline.dump_delays(table, args.out / "delays")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _apply_overrides(load_scenario(args.scenario), args)
        if args.command == "run":
            cmd_run(args, config)
        else:
            cmd_sweep(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateScenarioError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
