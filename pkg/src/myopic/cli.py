"""Command-line interface: run a scenario, sweep a parameter, evaluate the bound.

Exit status is 0 for any completed simulation (a collision is a result, not
a tool failure) and 2 for tool errors such as unreadable scenario files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import BoundInputs, theorem1_bound
from .core import RegularityConstants
from .harness import RunResult, ScenarioError, emit, run, sweep
from .scenario_io import bundled_scenario_path, build_scenario, load_scenario


def _resolve_scenario(name: str):
    path = Path(name)
    if path.is_file():
        return load_scenario(path)
    return load_scenario(bundled_scenario_path(name))


def _with_overrides(scenario, mode: str | None, seed: int | None):
    if mode is None and seed is None:
        return scenario
    raw = {k: dict(v) for k, v in scenario.raw.items()}
    if mode is not None:
        raw.setdefault("robust", {})["mode"] = mode
    if seed is not None:
        raw.setdefault("scenario", {})["seed"] = str(seed)
    return build_scenario(raw, name=scenario.name)


def _describe(result: RunResult) -> str:
    o = result.outcome
    parts = [
        f"outcome={o.kind}",
        f"t={o.t:.6g}s",
        f"cycles={result.cycles}",
        f"min_unsafe_distance={result.min_unsafe_distance:.6g}",
    ]
    if o.error is not None:
        parts.insert(2, f"error={o.error:.6g}")
    return "  ".join(parts)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="myopic", description="Robust myopic control simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True, help="scenario file path or bundled name")
    p_run.add_argument("--mode", choices=["nominal", "robust"], help="override selection mode")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.add_argument("--out", help="directory for trajectory/decision/summary files")

    p_sweep = sub.add_parser("sweep", help="run a scenario once per parameter value")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--param", required=True, help="error|delta_ratio|mode|tau|epsilon|seed")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--mode", choices=["nominal", "robust"])
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--out", help="base directory; one subdirectory per value")

    p_bound = sub.add_parser("bound", help="evaluate the suboptimality bound")
    p_bound.add_argument("--m", type=int, required=True)
    p_bound.add_argument("--eps", type=float, required=True)
    p_bound.add_argument("--delta", type=float, required=True, help="probe control size")
    p_bound.add_argument("--Delta", type=float, required=True, help="observation error bound")
    p_bound.add_argument("--L", type=float, required=True)
    p_bound.add_argument("--M0", type=float, required=True)
    p_bound.add_argument("--M1", type=float, required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            scenario = _with_overrides(_resolve_scenario(args.scenario), args.mode, args.seed)
            result = run(scenario)
            print(f"{scenario.name}: {_describe(result)}")
            if args.out:
                for path in emit(result, args.out):
                    print(f"  wrote {path}")
            return 0

        if args.command == "sweep":
            scenario = _with_overrides(_resolve_scenario(args.scenario), args.mode, args.seed)
            if args.param == "mode":
                values = [v.strip() for v in args.values.split(",")]
            else:
                values = [float(v) for v in args.values.split(",")]
            results = sweep(scenario, args.param, values)
            for value, result in zip(values, results):
                print(f"{scenario.name} {args.param}={value}: {_describe(result)}")
                if args.out:
                    emit(result, Path(args.out) / f"{args.param}_{value}")
            return 0

        if args.command == "bound":
            b = BoundInputs(
                RegularityConstants(args.M0, args.M1, args.L),
                args.m,
                args.eps,
                args.delta,
                args.Delta,
            )
            print(f"{theorem1_bound(b):.12g}")
            return 0
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
