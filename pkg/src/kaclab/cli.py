"""Command-line harness.

    kaclab <experiment> [--config cfg.json] [--seed N] [--out path.csv]
                        [--threads N] [--no-figure]

Experiments: grazing-levy, grazing-drift, fp-longtime, attract,
dsmc-check.  Each run writes a CSV (and a PNG next to it unless
--no-figure) and prints one PASS/FAIL line per numerical check.

Exit codes: 0 success, 2 precondition-gate failure, 3 numerical-tolerance
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import RUNNERS, ExperimentConfig, GateError, write_csv
from .plots import render_figure

__all__ = ["main"]

_COMMANDS = {
    "grazing-levy": "grazing-levy",
    "grazing-drift": "grazing-drift",
    "fp-longtime": "fp-longtime",
    "attract": "equilibrium-attraction",
    "dsmc-check": "dsmc-crosscheck",
}

_HELP = {
    "grazing-levy": "eps-ladder of Wild runs vs the fractional Fokker-Planck limit",
    "grazing-drift": "finite-energy eps-ladder vs the drift limit (weight xi^2)",
    "fp-longtime": "long-time decay of the Fokker-Planck flow toward equilibrium",
    "attract": "attraction to equilibrium at fixed eps in the d_{q+delta'} metric",
    "dsmc-check": "particle Monte Carlo vs spectral solver and exact energy decay",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kaclab",
        description="Numerical laboratory for the inelastic Kac equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _COMMANDS:
        p = sub.add_parser(command, help=_HELP[command])
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", type=Path, default=None, help="CSV output path")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument(
            "--no-figure", action="store_true", help="skip the PNG report figure"
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    experiment = _COMMANDS[args.command]
    try:
        if args.config is not None:
            cfg = ExperimentConfig.from_json(args.config)
            if cfg.experiment != experiment:
                print(
                    f"config is for {cfg.experiment!r} but the subcommand "
                    f"runs {experiment!r}",
                    file=sys.stderr,
                )
                return 2
        else:
            cfg = ExperimentConfig.default(experiment)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        result = RUNNERS[experiment](cfg, threads=max(args.threads, 1))
    except GateError as exc:
        print(f"gate failure: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else Path(f"kaclab-{args.command}.csv")
    write_csv(result, out)
    print(f"wrote {out}")
    if not args.no_figure:
        fig_path = out.with_suffix(".png")
        render_figure(result, fig_path)
        print(f"wrote {fig_path}")
    for check in result.checks:
        tag = "PASS" if check.passed else "FAIL"
        print(f"[{tag}] {check.name}: {check.detail}")
    return 0 if result.ok else 3


if __name__ == "__main__":
    raise SystemExit(main())
