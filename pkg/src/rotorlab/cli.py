"""Command-line front end: preset runs, spectrum export, acceptance checks.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical guard
failure (basis truncation), 3 acceptance-check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .acceptance import run_all
from .experiments import PRESETS, _parse_angle, parse_config, run_preset
from .propagator import BasisTruncationError
from .spectral import build_floquet_matrix, diagonalize, export_spectrum
from .states import SimulationParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GUARD = 2
EXIT_ACCEPTANCE = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rotorlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a named preset or a config file")
    run.add_argument("preset", nargs="?", choices=sorted(PRESETS), metavar="preset")
    run.add_argument("--config", type=Path, help="key=value config file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, default=Path("."))
    run.add_argument("--kicks", type=int, default=None)
    run.add_argument("--basis", type=int, default=None)

    spectrum = sub.add_parser("spectrum", help="diagonalize one kick operator and export it")
    spectrum.add_argument("--tau", required=True, help="kick period (accepts pi expressions)")
    spectrum.add_argument("--k", required=True, type=float, help="kick strength")
    spectrum.add_argument("--dim", required=True, type=int, help="even basis size, <= 512")
    spectrum.add_argument("--out", required=True, type=Path)

    check = sub.add_parser("check", help="run the acceptance criteria")
    check.add_argument("--only", default=None, help="comma-separated criterion indices")
    return parser


def _cmd_run(args: argparse.Namespace, parser: _Parser) -> int:
    if (args.preset is None) == (args.config is None):
        parser.error("provide exactly one of a preset name or --config FILE")
    if args.config is not None:
        if not args.config.is_file():
            print(f"rotorlab: config file not found: {args.config}", file=sys.stderr)
            return EXIT_USAGE
        try:
            preset = parse_config(args.config.read_text(encoding="utf-8"))
        except ValueError as exc:
            print(f"rotorlab: {args.config}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        preset = PRESETS[args.preset]
    try:
        run_preset(preset, seed=args.seed, out_dir=args.out, kicks=args.kicks, basis=args.basis)
    except BasisTruncationError as exc:
        print(f"rotorlab: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"rotorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _cmd_spectrum(args: argparse.Namespace) -> int:
    try:
        tau = _parse_angle(args.tau, "tau")
        params = SimulationParams(tau=tau, k=args.k, n_basis=args.dim, kicks=0)
        spectrum = diagonalize(build_floquet_matrix(params))
        csv_path, bin_path = export_spectrum(spectrum, args.out)
    except BasisTruncationError as exc:
        print(f"rotorlab: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"rotorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {csv_path}")
    print(f"wrote {bin_path}")
    return EXIT_OK


def _cmd_check(args: argparse.Namespace, parser: _Parser) -> int:
    only = None
    if args.only is not None:
        try:
            only = tuple(int(part) for part in args.only.split(",") if part.strip())
        except ValueError:
            parser.error(f"--only expects comma-separated integers, got {args.only!r}")
        if not only:
            parser.error("--only got an empty index list")
    try:
        results = run_all(only=only)
    except ValueError as exc:
        print(f"rotorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BasisTruncationError as exc:
        print(f"rotorlab: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args, parser)
    if args.command == "spectrum":
        return _cmd_spectrum(args)
    return _cmd_check(args, parser)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
