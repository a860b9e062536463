"""Command-line surface: compute any quantity and reproduce reference tables.

Subcommands: wave, waves-sum, pn, prestricted, dilog-zero, saddle,
constants, coeffs, asym, classsum, identity, table.  Global flags select
precision, output format, thread count and whether slow (large-N wave)
cells are computed.

Exit codes: 0 success, 2 usage error, 3 precision/self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from . import asymptotics as asy
from . import combinatorics as cb
from . import dilog
from . import wavesums as ws
from . import waves as wv
from .errors import PrecisionError, SylwaveError, UsageError
from .numerics import PrecisionContext, scalar_format

TABLE_IDS = (
    "first_wave_sizes",
    "pn_vs_w1",
    "thm12_approx",
    "a1_approx",
    "c2_approx",
    "c2star_approx",
    "d1_approx",
    "e1_approx",
    "pn2n",
    "w2_conjecture",
    "figure2",
)


@dataclass(frozen=True)
class TableSpec:
    """A request for one reference table or figure dataset."""

    table_id: str
    params: dict
    format: str = "plain"

    def __post_init__(self) -> None:
        if self.table_id not in TABLE_IDS:
            raise UsageError(f"unknown table id {self.table_id!r}")


@dataclass(frozen=True)
class ResultRow:
    """One table row: labels plus decimal-string values."""

    labels: tuple
    values: tuple


def _fmt(v, digits: int) -> str:
    return scalar_format(v, digits)


def _parse_lambda(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse lambda {text!r}") from exc


def _lam_sigma(N: int, lam: Fraction) -> int:
    s = lam * N
    if s.denominator != 1:
        raise UsageError(f"lambda N must be an integer; got {lam} * {N}")
    return int(s)


def _family_columns(family: str, lam: Fraction, N: int, ms, ctx, sign: int = 1):
    ec = asy.expansion_coeffs(family, lam, max(ms), ctx)
    out = []
    for m in ms:
        sub = asy.ExpansionCoeffs(ec.family, ec.lam, ec.coeffs[:m], ec.base_zero, ec.scale)
        out.append(sign * asy.expansion_eval(sub, N, ctx))
    return out


def run_table(
    spec: TableSpec,
    ctx: PrecisionContext,
    slow: bool = False,
    threads: int = 1,
    digits_out: int = 6,
) -> list[ResultRow]:
    """Rows of the requested reference table; slow wave cells only with slow=True."""
    tid = spec.table_id
    p = spec.params
    ms = (1, 2, 3, 5)
    rows: list[ResultRow] = []

    if tid == "first_wave_sizes":
        ns = p.get("rows", (1000, 1500, 2000))
        for n in ns:
            if n > 1000 and not slow:
                vals = ["skipped(slow)"] * 4
            else:
                vals = [_fmt(wv.wave(k, n, n, ctx), 3) for k in (1, 2, 3, 4)]
            rows.append(ResultRow(("n", str(n)), tuple(vals)))
        return rows

    if tid == "pn_vs_w1":
        ns = p.get("rows", tuple(range(1200, 1801, 100)))
        ec = asy.expansion_coeffs("a", Fraction(1), 1, ctx)
        for n in ns:
            lead = asy.expansion_eval(ec, n, ctx)
            w1 = _fmt(wv.wave(1, n, n, ctx), 3) if slow or n <= 1200 else "skipped(slow)"
            rows.append(
                ResultRow(
                    ("n", str(n)),
                    (_fmt(mpfr(cb.partition_p(n)), 3), w1, _fmt(lead, 3)),
                )
            )
        return rows

    if tid == "thm12_approx":
        N = p.get("N", 3300)
        for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(2))):
            cols = [_fmt(v, digits_out) for v in _family_columns("a", lam, N, ms, ctx)]
            if slow:
                w1 = wv.wave(1, N, _lam_sigma(N, lam), ctx)
                cols.append(_fmt(w1, digits_out))
            else:
                cols.append("skipped(slow)")
            rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid == "a1_approx":
        N = p.get("N", 1200)
        for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(2))):
            cols = [_fmt(v, digits_out) for v in _family_columns("a", lam, N, ms, ctx)]
            direct = ws.sum_A1(N, -_lam_sigma(N, lam), ctx, threads=threads)
            cols.append(_fmt(direct.value, digits_out))
            rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid in ("c2_approx", "c2star_approx"):
        N = p.get("N", 1200)
        fam = "c" if tid == "c2_approx" else "c_star"
        for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(2))):
            cols = [_fmt(v, digits_out) for v in _family_columns(fam, lam, N, ms, ctx)]
            c2, c2s, _ = ws.sum_C(N, -_lam_sigma(N, lam), ctx, threads=threads)
            direct = c2 if tid == "c2_approx" else c2s
            cols.append(_fmt(direct.value, digits_out))
            rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid == "d1_approx":
        for N in p.get("Ns", (1200, 1203)):
            fam = "d_odd" if N % 2 else "d_even"
            for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(2))):
                cols = [_fmt(v, digits_out) for v in _family_columns(fam, lam, N, ms, ctx)]
                direct = ws.sum_D1(N, -_lam_sigma(N, lam), ctx, threads=threads)
                cols.append(_fmt(direct.value, digits_out))
                rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid == "e1_approx":
        N = p.get("N", 1200)
        for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(2))):
            cols = [_fmt(v, digits_out) for v in _family_columns("e", lam, N, ms, ctx)]
            direct = ws.sum_E1(N, -_lam_sigma(N, lam), ctx, threads=threads)
            cols.append(_fmt(direct.value, digits_out))
            rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid == "pn2n":
        Ns = p.get("Ns", tuple(range(2700, 3301, 100)))
        ec = asy.expansion_coeffs("a", Fraction(2), 1, ctx)
        for N in Ns:
            pn2n = cb.p_restricted_2n(N)
            lead = asy.expansion_eval(ec, N, ctx)
            w1 = (
                _fmt(wv.wave(1, N, 2 * N, ctx), 3) if slow else "skipped(slow)"
            )
            rows.append(
                ResultRow(
                    ("N", str(N)),
                    (_fmt(mpfr(pn2n), 3), w1, _fmt(lead, 3)),
                )
            )
        return rows

    if tid == "w2_conjecture":
        N = p.get("N", 3000)
        fam = "d_odd" if N % 2 else "d_even"
        sign = 1 if N % 2 else -1  # (-1)^(N+1)
        for lam in p.get("lams", (Fraction(1, 3), Fraction(1), Fraction(5, 3))):
            cols = [
                _fmt(v, digits_out)
                for v in _family_columns(fam, lam, N, ms, ctx, sign=sign)
            ]
            if slow:
                w2 = wv.wave(2, N, _lam_sigma(N, lam), ctx)
                cols.append(_fmt(w2, digits_out))
            else:
                cols.append("skipped(slow)")
            rows.append(ResultRow(("N", str(N), "lambda", str(lam)), tuple(cols)))
        return rows

    if tid == "figure2":
        ns = p.get("rows", (275, 300, 432, 500, 600))
        for n in ns:
            w1 = wv.wave_exact_w1(n, n)
            pn = cb.partition_p(n)
            val = 1 - Fraction(w1) / pn
            with ctx.active():
                rows.append(ResultRow(("n", str(n)), (_fmt(ctx.real(val), 6),)))
        return rows

    raise UsageError(f"unknown table id {tid!r}")


def _emit_rows(rows: list[ResultRow], fmt: str, header: list[str] | None, out) -> None:
    if fmt == "json":
        for r in rows:
            obj = {"labels": list(r.labels), "values": list(r.values)}
            out.write(json.dumps(obj, sort_keys=True) + "\n")
        return
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        if header:
            w.writerow(header)
        for r in rows:
            w.writerow(list(r.labels) + list(r.values))
        return
    for r in rows:
        out.write("  ".join(list(r.labels) + list(r.values)) + "\n")


def _add_global_flags(ap, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    ap.add_argument(
        "--digits",
        type=int,
        default=d(int(os.environ.get("SYLWAVE_DIGITS", "60"))),
        help="working decimal digits (default 60, env SYLWAVE_DIGITS)",
    )
    ap.add_argument("--threads", type=int, default=d(os.cpu_count() or 1))
    ap.add_argument(
        "--slow",
        action="store_true",
        default=d(False),
        help="compute large-N wave cells",
    )
    ap.add_argument("--format", choices=("plain", "csv", "json"), default=d("plain"))
    ap.add_argument(
        "--verify", action="store_true", default=d(False), help="rerun at doubled precision"
    )
    ap.add_argument("--cache-dir", default=d(None), help="persist Bernoulli/p(n) tables")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sylwave",
        description="Sylvester waves, dilogarithm zeros and saddle-point asymptotics",
    )
    _add_global_flags(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    sp = add_parser("wave", help="one Sylvester wave W_k(N, n)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--route", choices=wv.WAVE_ROUTES, default="auto")
    sp.add_argument("--poly", action="store_true", help="print the exact polynomials")
    sp.add_argument("--parts", default=None, help="comma-separated denumerant parts")

    sp = add_parser("waves-sum", help="sum of the first K waves")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--K", type=int, default=100)

    sp = add_parser("pn", help="partition numbers")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--hrr", action="store_true", help="Hardy-Ramanujan-Rademacher sum")
    sp.add_argument("--terms", type=int, default=None)

    sp = add_parser("prestricted", help="restricted partition count p_N(n)")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add_parser("dilog-zero", help="dilogarithm branch zero w(A, B)")
    sp.add_argument("--A", type=int, required=True)
    sp.add_argument("--B", type=int, required=True)

    sp = add_parser("saddle", help="saddle point z* for (m, d)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)

    sp = add_parser("constants", help="U, V, psi_lambda, tau_lambda")
    sp.add_argument("--lam", default="1")

    sp = add_parser("coeffs", help="expansion coefficient family")
    sp.add_argument("--family", choices=asy.FAMILIES, required=True)
    sp.add_argument("--lam", default="1")
    sp.add_argument("--m", type=int, default=3)

    sp = add_parser("asym", help="evaluate an asymptotic expansion at N")
    sp.add_argument("--family", choices=asy.FAMILIES + ("d",), required=True)
    sp.add_argument("--lam", default="1")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--m", type=int, default=3)

    sp = add_parser("classsum", help="direct Farey-class residue sum")
    sp.add_argument("--cls", choices=("A", "C", "C2", "C2star", "D", "E", "B"), required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--sigma", type=int, required=True)

    sp = add_parser("identity", help="key-identity residual check")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = add_parser("table", help="reproduce a reference table / figure dataset")
    sp.add_argument("--id", dest="table_id", choices=TABLE_IDS, required=True)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--rows", default=None, help="comma-separated row indices")
    return ap


def _poly_text(ps: wv.WavePolySet) -> str:
    den = ps.common_denominator()
    parts = []
    for poly in ps.polys:
        terms = []
        for i in range(len(poly) - 1, -1, -1):
            c = poly[i] * den
            if c == 0 and len(poly) > 1:
                continue
            c = int(c)
            if i == 0:
                terms.append(f"{'+' if c >= 0 and terms else ''}{c}")
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                sgn = "-" if c < 0 else ("+" if terms else "")
                pw = "n" if i == 1 else f"n^{i}"
                terms.append(f"{sgn}{mag}{pw}")
        parts.append("".join(terms) if terms else "0")
    return "[" + ", ".join(parts) + "]/" + str(den)


def _print_value(name: str, value, digits: int, verified: bool, out) -> None:
    marker = "" if verified else "~"
    out.write(f"{name} = {marker}{scalar_format(value, digits)}\n")


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args, sys.stdout)
    except PrecisionError as exc:
        print(f"error (precision/self-check): {exc}", file=sys.stderr)
        return 3
    except (UsageError, SylwaveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, out) -> int:
    ctx = PrecisionContext(max(args.digits, 30))
    digits_out = max(6, min(args.digits - 10, args.digits))
    if args.cache_dir:
        cb_load_cache(args.cache_dir)

    code = 0
    if args.cmd == "wave":
        if args.parts:
            parts = tuple(int(x) for x in args.parts.split(","))
            v = wv.wave_denumerant(args.k, wv.Denumerant(parts), args.n, ctx)
            _print_value(f"W_{args.k}(A={parts}, {args.n})", v, digits_out, False, out)
        elif args.poly:
            ps = wv.wave_poly(args.k, args.N, ctx)
            out.write(_poly_text(ps) + "\n")
        else:
            if args.verify:
                v = wv.wave_verified(args.k, args.N, args.n, ctx, args.route)
            else:
                v = wv.wave(args.k, args.N, args.n, ctx, args.route)
            _print_value(
                f"W_{args.k}({args.N},{args.n})", v, digits_out, args.verify, out
            )
    elif args.cmd == "waves-sum":
        v = ws.first_waves(args.N, args.n, args.K, ctx)
        _print_value(f"sum_k<=K W_k({args.N},{args.n})", v, digits_out, False, out)
    elif args.cmd == "pn":
        if args.hrr:
            terms = args.terms or math.isqrt(args.n) + 1
            v = cb.partition_p_hrr(args.n, terms, ctx, verify=args.verify)
            _print_value(f"p_hrr({args.n}; {terms} terms)", v, digits_out, args.verify, out)
        else:
            out.write(f"p({args.n}) = {cb.partition_p(args.n)}\n")
    elif args.cmd == "prestricted":
        out.write(f"p_{args.N}({args.n}) = {cb.p_restricted(args.N, args.n)}\n")
    elif args.cmd == "dilog-zero":
        z = dilog.dilog_zero(args.A, args.B, ctx)
        _print_value(f"w({args.A},{args.B})", z.w, digits_out, True, out)
    elif args.cmd == "saddle":
        sp = dilog.saddle_point(args.m, args.d, ctx)
        _print_value(f"z*({args.m},{args.d})", sp.z_star, digits_out, True, out)
        _print_value("p_d(z*)", sp.p_value, digits_out, True, out)
    elif args.cmd == "constants":
        lam = _parse_lambda(args.lam)
        wc = dilog.wave_constants(lam, ctx)
        for name, v in (("U", wc.U), ("V", wc.V), (f"psi_{lam}", wc.psi_lambda), (f"tau_{lam}", wc.tau_lambda)):
            _print_value(name, v, digits_out, True, out)
        _print_value("2pi/V", 2 * ctx.pi() / wc.V, digits_out, True, out)
    elif args.cmd == "coeffs":
        lam = _parse_lambda(args.lam)
        ec = asy.expansion_coeffs(args.family, lam, args.m, ctx)
        # only the a-family carries a built-in closed-form self-check
        verified = args.family == "a"
        for t, c in enumerate(ec.coeffs):
            _print_value(f"{args.family}_{t}({lam})", c, digits_out, verified, out)
    elif args.cmd == "asym":
        lam = _parse_lambda(args.lam)
        fam = args.family
        if fam == "d":
            fam = "d_odd" if args.N % 2 else "d_even"
        ec = asy.expansion_coeffs(fam, lam, args.m, ctx)
        v = asy.expansion_eval(ec, args.N, ctx)
        _print_value(f"{fam}[m={args.m}](N={args.N}, lambda={lam})", v, digits_out, False, out)
    elif args.cmd == "classsum":
        v = _classsum(args.cls, args.N, args.sigma, ctx, args.threads)
        out.write(
            f"{args.cls}({args.N},{args.sigma}) = ~{scalar_format(v.value, digits_out)}"
            f"  terms={v.term_count}\n"
        )
    elif args.cmd == "identity":
        rep = ws.key_identity_check(args.N, args.n, ctx, threads=args.threads)
        status = "PASS" if rep.passed else "FAIL"
        out.write(
            f"{status} residual={scalar_format(rep.residual, 3)} "
            f"(tolerance {scalar_format(rep.tolerance, 2)}, "
            f"first_waves={scalar_format(rep.first_waves, 8)}, p_N(n)={rep.p_restricted})\n"
        )
        code = 0 if rep.passed else 3
    elif args.cmd == "table":
        params = {}
        if args.N is not None:
            params["N"] = args.N
            params["Ns"] = (args.N,)
        if args.rows:
            params["rows"] = tuple(int(x) for x in args.rows.split(","))
        spec = TableSpec(args.table_id, params, args.format)
        # reference tables print 6 significant figures
        rows = run_table(spec, ctx, slow=args.slow, threads=args.threads, digits_out=6)
        _emit_rows(rows, args.format, None, out)
    else:  # pragma: no cover - argparse enforces choices
        raise UsageError(f"unknown command {args.cmd!r}")

    if args.cache_dir:
        cb_save_cache(args.cache_dir)
    return code


def _classsum(cls: str, N: int, sigma: int, ctx, threads: int) -> ws.ClassSum:
    if cls == "A":
        return ws.sum_A1(N, sigma, ctx, threads=threads)
    if cls in ("C", "C2", "C2star"):
        c2, c2s, c1 = ws.sum_C(N, sigma, ctx, threads=threads)
        return {"C": c1, "C2": c2, "C2star": c2s}[cls]
    if cls == "D":
        return ws.sum_D1(N, sigma, ctx, threads=threads)
    if cls == "E":
        return ws.sum_E1(N, sigma, ctx, threads=threads)
    return ws.sum_B(N, sigma, ctx, threads=threads)


# -- optional on-disk caches --------------------------------------------------

CACHE_HEADER = "sylwave-cache v1"


def cb_save_cache(directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    with cb._PART_LOCK:
        parts = list(cb._PARTITIONS)
    with open(os.path.join(directory, "partitions.txt"), "w") as fh:
        fh.write(CACHE_HEADER + "\n")
        for v in parts:
            fh.write(f"{v}\n")
    with open(os.path.join(directory, "bernoulli.txt"), "w") as fh:
        fh.write(CACHE_HEADER + "\n")
        for i in range(0, cb.bernoulli_cache_top() + 1, 2):
            b = cb.bernoulli(i)
            fh.write(f"{b.numerator}/{b.denominator}\n")


def _read_cache_lines(path: str) -> list[str]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CACHE_HEADER:
            raise UsageError(f"unrecognized cache header in {path}: {header!r}")
        return [line.strip() for line in fh if line.strip()]


def cb_load_cache(directory: str) -> None:
    ppath = os.path.join(directory, "partitions.txt")
    if os.path.exists(ppath):
        values = [int(x) for x in _read_cache_lines(ppath)]
        with cb._PART_LOCK:
            if len(values) > len(cb._PARTITIONS):
                cb._PARTITIONS[:] = values
                prefix = []
                acc = 0
                for v in values:
                    acc += v
                    prefix.append(acc)
                cb._PART_PREFIX[:] = prefix
    bpath = os.path.join(directory, "bernoulli.txt")
    if os.path.exists(bpath):
        primed = {}
        for i, text in enumerate(_read_cache_lines(bpath)):
            num, _, den = text.partition("/")
            primed[2 * i] = Fraction(int(num), int(den or "1"))
        cb.prime_bernoulli(primed)


if __name__ == "__main__":
    sys.exit(main())
