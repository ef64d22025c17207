"""Command line front end for the experiment drivers.

Exit codes: 0 on success, 1 for configuration problems (bad flags,
unreadable YAML, invalid scenario values), 2 for numerical failures
inside the solver.
"""

from __future__ import annotations

import argparse
import sys

from .config import ScenarioConfig, load_scenario
from .exceptions import ConfigError, NumericalError
from .experiments import ExperimentSpec, run_experiment

_KIND_FOR = {
    "convergence": "convergence",
    "sweep-m": "sweep_elements",
    "sweep-power": "sweep_power",
    "deployment": "deployment",
}


class _Parser(argparse.ArgumentParser):
    """argparse parser that raises instead of calling sys.exit."""

    def error(self, message):
        raise ConfigError(message)


def _add_common(sub, default_trials):
    sub.add_argument("--config", default=None,
                     help="YAML scenario file; omit for the built-in default")
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed (default: scenario rng_seed)")
    sub.add_argument("--trials", type=int, default=default_trials,
                     help=f"Monte-Carlo trials per point (default {default_trials})")
    sub.add_argument("--out", default=None, help="raw CSV output path")
    sub.add_argument("--schemes", nargs="+", default=None,
                     help="scheme tags, comma or space separated "
                          "(default: all valid for the command)")
    sub.add_argument("--workers", type=int, default=1,
                     help="trials run on this many worker processes")
    sub.add_argument("--timing", action="store_true",
                     help="record wall-clock times instead of zeros")


def build_parser():
    parser = _Parser(prog="bdris",
                     description="Beyond-diagonal RIS beamforming experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    conv = commands.add_parser("convergence", help="per-iteration sum-rate traces")
    _add_common(conv, default_trials=1)

    sweep_m = commands.add_parser("sweep-m", help="sum rate vs element count")
    _add_common(sweep_m, default_trials=50)
    sweep_m.add_argument("--values", nargs="+", type=float,
                         default=[8, 12, 16, 20, 24], help="element counts")
    sweep_m.add_argument("--draws", type=int, default=100,
                         help="random reflections per trial for random_bdris")

    sweep_p = commands.add_parser("sweep-power", help="sum rate vs transmit power")
    _add_common(sweep_p, default_trials=50)
    sweep_p.add_argument("--values", nargs="+", type=float,
                         default=[10, 15, 20, 25, 30, 35, 40], help="power grid in dBm")
    sweep_p.add_argument("--draws", type=int, default=100,
                         help="random reflections per trial for random_bdris")

    deploy = commands.add_parser("deployment",
                                 help="central surface vs split surfaces")
    _add_common(deploy, default_trials=50)
    deploy.add_argument("--values", nargs="+", type=float, default=[20, 40],
                        help="total element counts")

    return parser


def _split_schemes(tokens):
    if not tokens:
        return ()
    return tuple(tag for token in tokens for tag in token.split(",") if tag)


def _spec_from_args(args):
    config = ScenarioConfig() if args.config is None else load_scenario(args.config)
    return ExperimentSpec(
        kind=_KIND_FOR[args.command],
        config=config,
        sweep_values=tuple(getattr(args, "values", ()) or ()),
        n_trials=args.trials,
        schemes=_split_schemes(args.schemes),
        out=args.out,
        master_seed=args.seed,
        n_draws=getattr(args, "draws", 100),
        include_timing=args.timing,
        n_workers=args.workers,
    )


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = run_experiment(_spec_from_args(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    if result.csv_path is not None:
        print(f"wrote {result.csv_path} and {result.agg_path}")
    else:
        for agg in result.aggregates:
            print(f"{agg.scheme} @ {agg.sweep_value:g}: "
                  f"{agg.mean_rate:.4f} +/- {agg.stderr:.4f} bps/Hz (n={agg.n})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
