"""Command-line entry point.

Subcommands map one-to-one onto config kinds:

    vardyn evolve <config>        real-time variational evolution
    vardyn ground-state <config>  imaginary-time ground-state search
    vardyn pt-compare <config>    perturbation orders vs exact energies
    vardyn rabi-sweep <config>    driven two-level frequency sweep
    vardyn h2-curve <config>      ground-energy curve over coefficient rows

Exit codes: 0 on pass, 2 when a comparison exceeds its tolerance, 1 on error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config, with_overrides
from .engine import GroundStateNotConverged, PropagationAborted
from .experiments import run_generic, run_h2_curve, run_pt_compare, run_rabi_sweep

__all__ = ["main"]

_COMMAND_KIND = {
    "evolve": "evolve",
    "ground-state": "ground_state",
    "pt-compare": "pt_compare",
    "rabi-sweep": "rabi_sweep",
    "h2-curve": "h2_curve",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vardyn",
        description="Variational dynamics over Pauli-string Hamiltonians, with oracle comparisons.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, kind in _COMMAND_KIND.items():
        sub = subparsers.add_parser(command, help=f"run a '{kind}' config")
        sub.add_argument("config", type=Path, help="path to the experiment config file")
        sub.add_argument("--output-dir", type=str, default=None, help="override the output directory")
        sub.add_argument(
            "--backend",
            choices=("direct", "circuit"),
            default=None,
            help="override the M/V assembly backend",
        )
        sub.add_argument(
            "--dump-circuits",
            type=Path,
            default=None,
            metavar="DIR",
            help="write one circuit listing per M/V assembly (circuit backend)",
        )
        sub.add_argument("--tolerance", type=float, default=None, help="override the comparison tolerance")
        sub.add_argument("--no-figures", action="store_true", help="skip rendering figures")
    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = _build_parser().parse_args(argv)
    kind = _COMMAND_KIND[args.command]
    figures = not args.no_figures
    try:
        cfg = load_config(args.config)
        if cfg.kind != kind:
            raise ConfigError(f"{args.config}: config kind is {cfg.kind!r}, but the subcommand expects {kind!r}")
        cfg = with_overrides(
            cfg, output_dir=args.output_dir, backend=args.backend, tolerance=args.tolerance
        )
        if args.dump_circuits is not None and cfg.evolution.backend != "circuit":
            print("note: --dump-circuits has no effect with the direct backend", file=sys.stderr)

        if kind == "rabi_sweep":
            report = run_rabi_sweep(cfg, figures=figures)
        elif kind == "h2_curve":
            report = run_h2_curve(cfg, figures=figures)
        elif kind == "pt_compare":
            report = run_pt_compare(cfg, figures=figures)
        else:
            trajectory = run_generic(cfg, figures=figures, dump_dir=args.dump_circuits)
            print(f"{args.command}: {trajectory.rows} rows")
            print(f"  wrote {Path(cfg.output_dir) / 'trajectory.csv'}")
            print(f"  wrote {Path(cfg.output_dir) / 'run_manifest.txt'}")
            if figures:
                print(f"  wrote {Path(cfg.output_dir) / 'trajectory.png'}")
            return 0
    except (ConfigError, PropagationAborted, GroundStateNotConverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(cfg.output_dir)
    stem = kind if kind != "pt_compare" else "pt_compare"
    print(f"{args.command}: {len(report.points)} points")
    print(f"  wrote {out_dir / (stem + '.csv')}")
    if figures:
        print(f"  wrote {out_dir / (stem + '.png')}")
    for line in report.summary_lines():
        print(f"  {line}")
    return 0 if report.passed else 2


if __name__ == "__main__":
    raise SystemExit(main())
