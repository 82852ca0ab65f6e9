"""Command-line front end.

Subcommands: construct (covariance JSON to model JSON), simulate (model
JSON to trajectory CSV), classify (covariance JSON to label report),
verify (covariance JSON to oracle report), trajectory (destination-aware
ensemble with CSV, summary JSON and optional SVG plot). Exit codes: 0 on
success, 2 on validation problems (bad flags, malformed or inconsistent
input files), 3 when a matrix that must be positive definite is not.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .covariance import Boundary
from .errors import NotPositiveDefinite
from .model import construct_model, simulate
from .oracle import DEFAULT_ORACLE_TOL, cm_oracle, markov_oracle, reciprocal_oracle
from .patterns import DEFAULT_CLASSIFY_TOL, classify
from .trajectory import destination_model, generate_ensemble, render_ensemble_svg

__all__ = ["main"]


def _emit(obj: dict, out: str | None) -> None:
    text = fileio.dump_json(obj)
    if out is None:
        sys.stdout.write(text)
    else:
        fileio.atomic_write_text(out, text)


def _cmd_construct(args: argparse.Namespace) -> int:
    cov = fileio.read_covariance(args.infile)
    model = construct_model(cov, Boundary(args.boundary))
    fileio.write_model(args.out, model)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    model = fileio.read_model(args.infile)
    batch = simulate(model, args.seed, args.count)
    fileio.atomic_write_text(args.out, fileio.trajectories_csv(batch))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    labels = classify(fileio.read_covariance(args.infile), args.tol)
    _emit(fileio.labels_obj(labels), args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    cov = fileio.read_covariance(args.infile)
    if args.property == "cml":
        report = cm_oracle(cov, Boundary.LAST, args.tol)
    elif args.property == "cmf":
        report = cm_oracle(cov, Boundary.FIRST, args.tol)
    elif args.property == "markov":
        report = markov_oracle(cov, args.tol)
    else:
        report = reciprocal_oracle(cov, args.tol)
    _emit(fileio.oracle_obj(report), args.out)
    return 0


def _cmd_trajectory(args: argparse.Namespace) -> int:
    base = fileio.read_covariance(args.base)
    dest_mean = np.array([float(tok) for tok in args.dest_mean.split(",")])
    dest_cov = fileio.read_spd_matrix(args.dest_cov)
    model, offsets = destination_model(base, dest_mean, dest_cov)
    batch, summary = generate_ensemble(model, offsets, args.seed, args.count)
    fileio.atomic_write_text(f"{args.out}_trajectories.csv", fileio.trajectories_csv(batch))
    fileio.atomic_write_text(f"{args.out}_summary.json", fileio.dump_json(fileio.summary_obj(summary)))
    if args.plot:
        fileio.atomic_write_bytes(f"{args.out}_plot.svg", render_ensemble_svg(summary))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmseq",
        description="Construct, simulate, classify and verify conditionally-Markov Gaussian sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="build a recursive model from a covariance file")
    construct.add_argument("--in", dest="infile", required=True, metavar="COV_JSON")
    construct.add_argument("--boundary", choices=["first", "last"], required=True)
    construct.add_argument("--out", required=True, metavar="MODEL_JSON")
    construct.set_defaults(func=_cmd_construct)

    simulate_p = sub.add_parser("simulate", help="draw realizations of a model into a CSV file")
    simulate_p.add_argument("--in", dest="infile", required=True, metavar="MODEL_JSON")
    simulate_p.add_argument("--seed", type=int, required=True)
    simulate_p.add_argument("--count", type=int, required=True)
    simulate_p.add_argument("--out", required=True, metavar="CSV")
    simulate_p.set_defaults(func=_cmd_simulate)

    classify_p = sub.add_parser("classify", help="label a covariance by its precision support")
    classify_p.add_argument("--in", dest="infile", required=True, metavar="COV_JSON")
    classify_p.add_argument("--tol", type=float, default=DEFAULT_CLASSIFY_TOL)
    classify_p.add_argument("--out", metavar="REPORT_JSON", help="default: print to stdout")
    classify_p.set_defaults(func=_cmd_classify)

    verify = sub.add_parser("verify", help="check one property by direct conditioning")
    verify.add_argument("--in", dest="infile", required=True, metavar="COV_JSON")
    verify.add_argument("--property", choices=["cmf", "cml", "markov", "reciprocal"], required=True)
    verify.add_argument("--tol", type=float, default=DEFAULT_ORACLE_TOL)
    verify.add_argument("--out", metavar="REPORT_JSON", help="default: print to stdout")
    verify.set_defaults(func=_cmd_verify)

    trajectory = sub.add_parser("trajectory", help="destination-conditioned ensemble generation")
    trajectory.add_argument("--base", required=True, metavar="COV_JSON")
    trajectory.add_argument("--dest-mean", required=True, metavar="V1,V2,...")
    trajectory.add_argument("--dest-cov", required=True, metavar="MAT_JSON")
    trajectory.add_argument("--count", type=int, required=True)
    trajectory.add_argument("--seed", type=int, required=True)
    trajectory.add_argument("--out", required=True, metavar="PREFIX")
    trajectory.add_argument("--plot", action="store_true", help="also write PREFIX_plot.svg")
    trajectory.set_defaults(func=_cmd_trajectory)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NotPositiveDefinite as exc:
        print(f"cmseq: not positive definite: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, IndexError, OSError) as exc:
        print(f"cmseq: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
