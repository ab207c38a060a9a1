"""``actcheck`` command line: tables, constants, self-checks, selu scan, simulation.

Data goes to stdout (or ``--out``), diagnostics to stderr.  Exit status is 0 on
success, 1 when ``verify`` finds a failing suite and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from typing import Optional, Sequence

from . import constants, core, selu, toynet, verify
from .core import Activation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _activation(args) -> Activation:
    if args.fn is None:
        raise UsageError("--fn is required")
    return Activation(args.fn, args.param)


def table_csv(desc: Activation, lo: float, hi: float, n: int) -> str:
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise UsageError(f"need finite lo < hi, got lo={lo}, hi={hi}")
    if n < 2:
        raise UsageError(f"--n must be >= 2, got {n}")
    buf = io.StringIO()
    buf.write("z,f,f1,f2,f1_defined,f2_defined\n")
    for i in range(n):
        z = hi if i == n - 1 else lo + i * (hi - lo) / (n - 1)
        f = core.evaluate(desc, z)
        d1, d2 = core.first_derivative(desc, z), core.second_derivative(desc, z)
        f1 = _fmt(d1.value) if d1.is_defined else ""
        f2 = _fmt(d2.value) if d2.is_defined else ""
        buf.write(f"{_fmt(z)},{_fmt(f)},{f1},{f2},{int(d1.is_defined)},{int(d2.is_defined)}\n")
    return buf.getvalue()


def cmd_table(args) -> int:
    _emit(table_csv(_activation(args), args.lo, args.hi, args.n), args.out)
    return EXIT_OK


def constants_text() -> str:
    rows = [("name", "value", "quoted", "residual", "status")]
    for rec in constants.constant_table():
        quoted = "" if rec.quoted_value is None else f"{rec.quoted_value:.15g}"
        status = "" if rec.quoted_value is None else ("MISMATCH" if rec.mismatch else "ok")
        rows.append((rec.name, f"{rec.value:.15g}", quoted, f"{rec.residual:.1e}", status))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in rows)


def cmd_constants(args) -> int:
    _emit(constants_text(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify.run_all()
    _emit(report.format(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def read_grid(path: str) -> list[selu.MomentPair]:
    points = []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#") or (lineno == 1 and line[0].isalpha()):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise UsageError(f"{path}:{lineno}: expected 'mu,nu'")
            try:
                points.append(selu.MomentPair(float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from exc
    return points


def selu_scan_csv(grid: Sequence[selu.MomentPair], order: int) -> str:
    if order < selu.MIN_ORDER:
        raise UsageError(f"--order must be >= {selu.MIN_ORDER}")
    report = selu.contraction_scan(grid, selu.default_rule(order))
    buf = io.StringIO()
    buf.write("mu,nu,mu_out,m2_out,ratio\n")
    for row in report.rows:
        p, m = row.point, row.image
        buf.write(f"{_fmt(p.mu)},{_fmt(p.nu)},{_fmt(m.m1)},{_fmt(m.m2)},{_fmt(row.ratio)}\n")
    return buf.getvalue()


def cmd_selu_scan(args) -> int:
    grid = selu.DEFAULT_GRID if args.grid is None else read_grid(args.grid)
    if not grid:
        raise UsageError("grid is empty")
    try:
        text = selu_scan_csv(grid, args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    samples = None
    if args.samples is not None:
        with open(args.samples, encoding="ascii") as fh:
            samples = toynet.read_samples_csv(fh)
    elif args.seed is None:
        raise UsageError("simulate needs --seed or --samples")
    config = toynet.SimulationConfig(args.gamma0, args.theta0, args.step_size, samples, args.seed, args.n)
    trace = toynet.run_dying_relu_sim(config)
    _emit(trace.to_csv(), args.out)
    n = len(trace.rows)
    print(
        f"steps={n} active={trace.n_active} inactive={trace.n_inactive} "
        f"({100.0 * trace.n_inactive / n:.1f}%) revitalized={trace.n_revitalized}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="actcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("table", help="CSV of f, f', f'' on an equispaced grid")
    p.add_argument("--fn", required=True, choices=core.KINDS)
    p.add_argument("--param", type=float, help="shape parameter for leakyrelu, elu, swish")
    p.add_argument("--lo", type=float, default=-5.0)
    p.add_argument("--hi", type=float, default=5.0)
    p.add_argument("--n", type=int, default=101)
    out_flag(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("constants", help="solved constants with residuals")
    out_flag(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", help="run every self-check suite")
    out_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selu-scan", help="selu moment map and contraction ratios on a grid")
    p.add_argument("--order", type=int, default=selu.DEFAULT_ORDER)
    p.add_argument("--grid", help="CSV file of mu,nu rows")
    out_flag(p)
    p.set_defaults(func=cmd_selu_scan)

    p = sub.add_parser("simulate", help="dying-relu SGD trace as CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--samples", help="CSV file of x,y rows (overrides --seed)")
    p.add_argument("--gamma0", type=float, default=1.0)
    p.add_argument("--theta0", type=float, default=1.0)
    p.add_argument("--step-size", type=float, default=0.1)
    out_flag(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"actcheck {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
