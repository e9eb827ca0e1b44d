"""Command-line front end.

Exit codes: 0 success, 1 usage or input-file error, 2 numeric failure,
3 precondition or branch-cut violation. Diagnostics go to stderr; data goes
to files or stdout.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .decomp import Variant, decompose, rga
from .errors import NumericFailure, PreconditionError
from .linalg import DEFAULT_TOL, ToleranceConfig, compute_svd
from .matrixio import (
    MatrixFileFormat,
    MatrixFormatError,
    dumps_reports,
    read_matrix,
    write_matrix,
    write_report,
)
from .props import EnsembleSpec, generate_ensemble, report_for, verify_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_PRECONDITION = 3

VARIANT_CHOICES = [v.cli_name for v in Variant]
KIND_CHOICES = {
    "gaussian": "gaussian",
    "spectrum": "prescribed_spectrum",
    "orthogonal": "orthogonal",
    "rankdef": "rank_deficient",
    "complex": "complex_gaussian",
}
FORMAT_CHOICES = {"mtx": MatrixFileFormat.matrix_market_array, "csv": MatrixFileFormat.csv}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_tol(p):
    p.add_argument("--tol-rank", type=float, default=DEFAULT_TOL.rank_rel_tol,
                   help="relative rank threshold (default %(default)g)")
    p.add_argument("--tol-residual", type=float, default=DEFAULT_TOL.residual_rel_tol,
                   help="relative residual tolerance (default %(default)g)")


def _add_format(p):
    p.add_argument("--format", choices=sorted(FORMAT_CHOICES),
                   help="matrix file format (default: inferred from extension)")


def build_parser():
    parser = _Parser(prog="transinv",
                     description="Split a matrix as A - A^-T and verify its properties.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("decompose", help="compute A for a chosen variant")
    p.add_argument("--input", required=True)
    p.add_argument("--variant", required=True, choices=VARIANT_CHOICES)
    p.add_argument("--scale", type=float, help="scale c for nt-sum (default sigma_min/2)")
    p.add_argument("--output", required=True)
    p.add_argument("--report")
    p.add_argument("--seed", type=int, default=0)
    _add_format(p)
    _add_tol(p)

    p = sub.add_parser("verify", help="run every property check on a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--variants", default="all",
                   help="'all' or a comma-separated list of variant names")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write JSON here instead of stdout")
    _add_format(p)
    _add_tol(p)

    p = sub.add_parser("rga", help="relative gain array of a square matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_format(p)
    _add_tol(p)

    p = sub.add_parser("generate", help="write a random test ensemble")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--kind", choices=list(KIND_CHOICES), default="gaussian")
    p.add_argument("--cond", type=float)
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--format", choices=sorted(FORMAT_CHOICES), default="mtx")

    p = sub.add_parser("info", help="dimensions, rank and singular value extremes")
    p.add_argument("--input", required=True)
    _add_format(p)
    _add_tol(p)
    return parser


def _tol(args):
    try:
        return ToleranceConfig(rank_rel_tol=args.tol_rank, residual_rel_tol=args.tol_residual)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _fmt_arg(args):
    return FORMAT_CHOICES[args.format] if args.format else None


def _read(args):
    return read_matrix(args.input, _fmt_arg(args))


def _cmd_decompose(args):
    variant = Variant.from_cli(args.variant)
    if args.scale is not None and variant is not Variant.NonTransposeSum:
        raise UsageError("--scale is only valid with --variant nt-sum")
    tol = _tol(args)
    M = _read(args)
    dec = decompose(M, variant, tol, args.scale)
    write_matrix(dec.A, args.output, _fmt_arg(args))
    if variant.is_scaled:
        print(f"c = {dec.scale_c!r}")
    report = report_for(M, dec, tol, args.seed)
    if args.report:
        write_report([report], args.report)
    for check in report.failed:
        print(f"check failed: {check.name} residual={check.residual:.3g} "
              f"tolerance={check.tolerance:.3g}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _parse_variants(spec):
    if spec.strip() == "all":
        return list(Variant)
    try:
        return [Variant.from_cli(name.strip()) for name in spec.split(",") if name.strip()]
    except ValueError as exc:
        raise UsageError(f"{exc}; choose from {', '.join(VARIANT_CHOICES)} or 'all'") from None


def _cmd_verify(args):
    tol = _tol(args)
    variants = _parse_variants(args.variants)
    M = _read(args)
    reports = [verify_matrix(M, v, tol, args.seed)[0] for v in variants]
    for r in reports:
        for c in r.checks:
            status = "skip" if c.skipped else ("pass" if c.passed else "FAIL")
            detail = c.skipped if c.skipped else f"residual={c.residual:.3g} tol={c.tolerance:.3g}"
            print(f"{status} {r.variant.cli_name:13s} {c.name}: {detail}", file=sys.stderr)
    if args.report:
        write_report(reports, args.report)
    else:
        sys.stdout.write(dumps_reports(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC


def _cmd_rga(args):
    P = rga(_read(args), _tol(args))
    write_matrix(P, args.output, _fmt_arg(args))
    return EXIT_OK


def _cmd_generate(args):
    try:
        spec = EnsembleSpec(args.rows, args.cols, KIND_CHOICES[args.kind],
                            condition_number=args.cond, rank=args.rank,
                            seed=args.seed, count=args.count)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    os.makedirs(args.output_dir, exist_ok=True)
    ext = args.format
    for i, M in enumerate(generate_ensemble(spec)):
        path = os.path.join(args.output_dir, f"{args.kind}_{i:03d}.{ext}")
        write_matrix(M, path, FORMAT_CHOICES[ext])
        print(path)
    return EXIT_OK


def _cmd_info(args):
    M = _read(args)
    F = compute_svd(M, _tol(args))
    smax = F.sigma_max
    smin = float(F.singular_values[-1])
    cond = smax / smin if smin > 0 else float("inf")
    print(f"rows: {M.shape[0]}")
    print(f"cols: {M.shape[1]}")
    print(f"dtype: {'complex' if np.iscomplexobj(M) else 'real'}")
    print(f"rank: {F.rank}")
    print(f"sigma_min: {smin!r}")
    print(f"sigma_max: {smax!r}")
    print(f"condition_number: {cond!r}")
    return EXIT_OK


_COMMANDS = {
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "rga": _cmd_rga,
    "generate": _cmd_generate,
    "info": _cmd_info,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(_COMMANDS))
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
