"""Command-line entry point.

One subcommand per experiment (kernel, bounds, simulate, scaling, seqspace);
every config-file key is also a flag of the same name, with flags taking
precedence over the file.  Exit status is nonzero on any error, including a
non-finite value surfacing anywhere in an output table.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .experiments import (
    EXPERIMENTS,
    THREADS_ENV_VAR,
    ExperimentConfig,
    parse_config,
    run_experiment,
)

_HELP = {
    "kernel": "emit the one-dimensional kernel section on a grid (deterministic)",
    "bounds": "tabulate deterministic bounds and the randomized error bound over n",
    "simulate": "draw a random input and its randomized approximations (plot data)",
    "scaling": "measure information counts over (d, eps) against both bounds",
    "seqspace": "sequence-space crossover table for m = 2^d",
}


def _int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(v) for v in raw.split(",") if v.strip())


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusapprox",
        description=(
            "Randomized versus deterministic uniform approximation of periodic "
            "Hilbert-space functions on the d-torus."
        ),
    )
    parser.add_argument("--version", action="version", version=f"torusapprox {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", default=None, help="config file (key = value lines)")
        p.add_argument("--seed", type=int, default=None, help="master seed (required for randomized experiments)")
        p.add_argument("--out-dir", dest="out_dir", default=None, help="output directory")
        p.add_argument(
            "--threads", type=int, default=None,
            help=f"worker threads for independent rows (default: ${THREADS_ENV_VAR} or 1)",
        )
        p.add_argument("--r", type=float, default=None, help="korobov smoothness exponent")
        p.add_argument("--beta0", type=float, default=None, help="weight of the constant frequency")
        p.add_argument("--lambda-values", dest="lambda_values", type=_float_list, default=None,
                       help="explicit weight list (overrides the korobov parameterization)")
        p.add_argument("--dims", type=_int_list, default=None, help="comma-separated dimensions")
        p.add_argument("--eps", type=_float_list, default=None, help="comma-separated accuracies")
        p.add_argument("--n", type=_int_list, default=None, help="comma-separated information counts")
        p.add_argument("--mass-tol", dest="mass_tol", type=float, default=None,
                       help="dropped-mass tolerance of the default truncation")
        p.add_argument("--grid-points-per-dim", dest="grid_points_per_dim", type=int, default=None)
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--battery", type=int, default=None, help="test-input battery size (scaling)")
        p.add_argument("--input-coefs", dest="input_coefs", default=None,
                       help="coefficient file for the simulate input (k coef per line)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key not in ("config",) and value is not None
    }
    try:
        if args.config:
            cfg = parse_config(args.config, overrides)
        else:
            cfg = ExperimentConfig(**overrides)
        paths = run_experiment(cfg)
    except Exception as exc:  # surface every failure as a diagnostic + nonzero exit
        print(f"torusapprox: error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
