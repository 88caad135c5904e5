"""Command-line interface.

    polarlattice modes     --config cfg.json [--out DIR]
    polarlattice spectrum  --config cfg.json [--out DIR]
    polarlattice sweep     --config cfg.json [--out DIR] [--threads N]
    polarlattice criterion --config cfg.json
    polarlattice material  --config cfg.json
    polarlattice validate

Exit codes: 0 success, 2 configuration error, 3 numerical instability,
4 validation or determinism-check failure.  ``--seed-check`` reruns the
pipeline into a scratch directory and verifies byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import ConfigError, InstabilityError, NumericalError, PolarLatticeError
from .outputs import MANIFEST_NAME, sha256_file
from .pipeline import criterion_report, material_report, run_modes, run_spectrum, run_sweep
from .validate import run_all

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarlattice",
        description="Collective modes and polariton spectra of 2D dipole lattices",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p, needs_out=True):
        p.add_argument("--config", required=True, help="JSON experiment config")
        if needs_out:
            p.add_argument("--out", default=None, help="output directory")
            p.add_argument(
                "--threads",
                type=int,
                default=max(1, os.cpu_count() or 1),
                help="worker threads for sweep points",
            )
            p.add_argument(
                "--seed-check",
                action="store_true",
                help="rerun and verify byte-identical outputs",
            )

    _common(sub.add_parser("modes", help="collective-mode analysis datasets"))
    _common(sub.add_parser("spectrum", help="single-point optical spectrum"))
    _common(sub.add_parser("sweep", help="parameter sweep of spectra"))
    _common(sub.add_parser("criterion", help="interaction-relevance verdict"),
            needs_out=False)
    _common(sub.add_parser("material", help="coupling estimate for a material"),
            needs_out=False)
    sub.add_parser("validate", help="run the built-in oracle suite")
    return parser


def _run_output_command(args) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.out) if args.out else Path(cfg.output_dir)
    runners = {"modes": run_modes, "spectrum": run_spectrum, "sweep": run_sweep}
    runner = runners[args.command]

    def _invoke(target: Path):
        if args.command == "sweep":
            return runner(cfg, target, threads=args.threads)
        return runner(cfg, target)

    manifest = _invoke(outdir)
    print(f"wrote {manifest}")
    if args.seed_check:
        scratch = outdir / "_seedcheck"
        if scratch.exists():
            shutil.rmtree(scratch)
        try:
            _invoke(scratch)
            mismatches = _compare_trees(outdir, scratch)
        finally:
            shutil.rmtree(scratch, ignore_errors=True)
        if mismatches:
            for m in mismatches:
                print(f"seed-check MISMATCH: {m}", file=sys.stderr)
            return EXIT_VALIDATION
        print("seed-check: outputs are byte-identical")
    return EXIT_OK


def _compare_trees(primary: Path, scratch: Path) -> list[str]:
    mismatches = []
    for p in sorted(scratch.rglob("*")):
        if not p.is_file() or p.name == MANIFEST_NAME:
            continue
        rel = p.relative_to(scratch)
        ref = primary / rel
        if not ref.is_file():
            mismatches.append(f"{rel} missing from primary run")
        elif sha256_file(ref) != sha256_file(p):
            mismatches.append(f"{rel} differs between runs")
    return mismatches


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return EXIT_OK if run_all() else EXIT_VALIDATION
        if args.command == "criterion":
            print(criterion_report(load_config(args.config)))
            return EXIT_OK
        if args.command == "material":
            print(material_report(load_config(args.config)))
            return EXIT_OK
        return _run_output_command(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstabilityError, NumericalError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PolarLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
