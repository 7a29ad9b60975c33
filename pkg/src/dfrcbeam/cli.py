"""Command-line entry point.

Subcommands: tradeoff, beampattern, convergence, mc-sweep. Exit codes:
0 success, 2 config error, 3 infeasible-only sweep, 4 solver failure.
"""

import argparse
import sys

from .config import ConfigError, ScenarioConfig, load_config
from .errors import NoConvergenceError, NumericalBreakdownError, RankDeficiencyError
from .experiments import (
    InfeasibleSweepError,
    run_beampattern,
    run_convergence,
    run_mc_sweep,
    run_tradeoff,
    write_rows,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4

_RUNNERS = {
    "tradeoff": run_tradeoff,
    "beampattern": run_beampattern,
    "convergence": run_convergence,
    "mc-sweep": run_mc_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="dfrcbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="scenario YAML path")
        cmd.add_argument("--out", default=None, help="output path (default: config's output_path)")
        cmd.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _apply_seed(config: ScenarioConfig, seed):
    if seed is None:
        return config
    data = config.to_dict()
    if "rayleigh" in data["channels"]:
        data["channels"] = dict(data["channels"])
        data["channels"]["rayleigh"] = dict(data["channels"]["rayleigh"], seed=int(seed))
    data["sim"] = dict(data["sim"], seed=int(seed))
    return ScenarioConfig.from_dict(data)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _apply_seed(load_config(args.config), args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out if args.out is not None else (config.output_path or None)
    try:
        rows = _RUNNERS[args.command](config)
    except InfeasibleSweepError as exc:
        print(f"infeasible sweep: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalBreakdownError, NoConvergenceError, RankDeficiencyError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = write_rows(rows, out, args.format)
    if not out:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
