"""Command-line front end.

    equitrack simulate SCENARIO.json --out FILE.csv [--plot FILE.gp]
    equitrack verify SUITE [--seed N]
    equitrack --version

Exit status: 0 on success, 1 for invalid input or failed verification
checks, 2 for runtime failures of the simulation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .sim import ScenarioError, SimulationError, gnuplot_script, load_scenario, run_simulation, write_csv
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2
SUITE_NAMES = (*SUITES, "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equitrack", description="Equivariant attitude tracking simulation and checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a closed-loop scenario and write a CSV time series")
    sim.add_argument("scenario", type=Path)
    sim.add_argument("--out", type=Path, required=True, help="CSV output path")
    sim.add_argument("--plot", type=Path, help="also write a gnuplot script for the CSV")

    ver = sub.add_parser("verify", help="run a numerical verification suite")
    ver.add_argument("suite", help="one of: " + ", ".join(SUITE_NAMES))
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _simulate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario file not found: {args.scenario}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        records = run_simulation(scenario)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    write_csv(records, args.out)
    if args.plot is not None:
        args.plot.write_text(gnuplot_script(args.out, args.plot.with_suffix(".png")))
    last = records[-1]
    print(f"wrote {len(records)} records to {args.out} (t_end={last.t:g}, lyapunov={last.lyapunov:.3e})")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    if args.suite not in SUITE_NAMES:
        print(f"usage error: unknown suite {args.suite!r}; choose from {', '.join(SUITE_NAMES)}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"suite {args.suite}, seed {args.seed}")
    checks = run_suite(args.suite, args.seed)
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return _simulate(args)
    return _verify(args)


if __name__ == "__main__":
    sys.exit(main())
