"""Command line front end: ``decomp [options] EXPRESSION``.

Exit status: 0 when a verified decomposition is printed, 2 when the search
gives up (budget exhausted or an internal failure reported honestly), 1 on
bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from .config import Config
from .decompose import MODES, DecompositionReport, decompose, verify
from .errors import DecompError, NotHomogeneous, PolynomialSyntaxError, UnknownVariable, ZeroPolynomial
from .parsing import parse_polynomial, variables_in_order

INPUT_ERRORS = (PolynomialSyntaxError, NotHomogeneous, UnknownVariable, ZeroPolynomial, ValueError)


# ------------------------------------------------------------ JSON encoding

def encode_number(x):
    """Fractions as "p/q" strings, reals as floats, complex as [re, im]."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def decode_number(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, list):
        return complex(x[0], x[1])
    return float(x)


def report_to_json(report: DecompositionReport, names: Sequence[str]) -> dict:
    enc = encode_number
    return {
        "mode": report.mode,
        "solved": report.solved,
        "rank": report.rank,
        "variables": list(names),
        "degree": report.degree,
        "forms": [[enc(c) for c in L] for L in report.forms],
        "weights": [enc(w) for w in report.weights],
        "pairs": [list(p) for p in report.pairs],
        "points": [None if p is None else [enc(c) for c in p] for p in report.points],
        "multiplicities": report.multiplicities,
        "exponents": report.exponents,
        "k": report.k,
        "kbar": report.kbar,
        "cofactors": [[[list(a), enc(v)] for a, v in sorted(N.items())] for N in report.cofactors],
        "basis": [list(b) for b in report.basis],
        "params": {k: enc(v) for k, v in report.params.items()},
        "residual": None if report.residual is None else enc(report.residual),
        "exact": report.exact,
        "essential_variables": report.essential,
        "lower_bound": report.lower_bound,
        "seed": report.seed,
        "warnings": report.warnings,
    }


def report_from_json(data: dict) -> DecompositionReport:
    dec = decode_number
    rep = DecompositionReport(data["mode"], bool(data.get("solved", True)))
    rep.rank = data.get("rank")
    rep.degree = data["degree"]
    rep.forms = [[dec(c) for c in L] for L in data["forms"]]
    rep.weights = [dec(w) for w in data.get("weights", [])]
    rep.pairs = [tuple(p) for p in data.get("pairs", [])]
    rep.exponents = list(data.get("exponents", []))
    rep.cofactors = [{tuple(a): dec(v) for a, v in N} for N in data.get("cofactors", [])]
    rep.exact = bool(data.get("exact", False))
    return rep


# ------------------------------------------------------------ text output

def _fmt(x) -> str:
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, complex):
        return f"({x.real:.12g}{x.imag:+.12g}j)"
    return f"{x:.12g}"


def _join(pairs) -> str:
    """'c*m' pieces joined with signs pulled out of real coefficients."""
    out = ""
    for c, mono in pairs:
        neg = not isinstance(c, complex) and c < 0
        a = -c if neg else c
        body = mono if mono and a == 1 else (f"{_fmt(a)}*{mono}" if mono else _fmt(a))
        if not out:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out or "0"


def _form_text(L, names) -> str:
    return _join((c, v) for c, v in zip(L, names) if c != 0)


def _terms_text(N, names) -> str:
    return _join(
        (c, "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(names, alpha) if e))
        for alpha, c in sorted(N.items(), reverse=True)
    )


def report_to_text(report: DecompositionReport, names: Sequence[str]) -> str:
    lines = [f"mode: {report.mode}"]
    if not report.solved:
        lines.append("status: no decomposition found")
        if report.lower_bound is not None:
            lines.append(f"lower bound: {report.lower_bound}")
    else:
        lines.append(f"rank: {report.rank}")
        pieces = [f"({_terms_text(N, names)})*({_form_text(L, names)})^{e}"
                  for e, L, N in report.terms() if any(c != 0 for c in N.values())]
        lines.append("F = " + "\n  + ".join(pieces))
        lines.append("points: " + "; ".join(
            "infinity" if p is None else "(" + ", ".join(_fmt(c) for c in p) + ")" for p in report.points))
        lines.append(f"multiplicities: {report.multiplicities}")
        if report.mode == "cactus":
            lines.append(f"exponents: {report.exponents}  (k = {report.k}, chain ranks {report.kbar})")
        lines.append("basis: {" + ", ".join(str(b) for b in report.basis) + "}")
        if report.params:
            lines.append("params: " + ", ".join(f"{k}={_fmt(v)}" for k, v in report.params.items()))
        lines.append(f"residual: {_fmt(report.residual)} ({'exact' if report.exact else 'numeric'})")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


# ------------------------------------------------------------ entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="decomp", description="Waring, tangential and cactus decompositions of forms over Q.")
    p.add_argument("expression", help="homogeneous polynomial, or a file containing one ('-' reads stdin)")
    p.add_argument("--mode", choices=MODES, default="waring")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--start-rank", type=int, default=None, help="skip the lower bound (diagnostics)")
    p.add_argument("--degree-cap", choices=("d", "r"), default="d")
    p.add_argument("--attempts", type=int, default=3)
    p.add_argument("--tol", type=float, default=None, help="relative tolerance of the final check")
    p.add_argument("--vars", default=None, help="comma separated variable order")
    p.add_argument("--no-mix", action="store_true", help="keep the input coordinates when already concise")
    p.add_argument("--json", action="store_true")
    p.add_argument("--verify-only", metavar="FILE", default=None,
                   help="re-expand a JSON report against the expression instead of solving")
    return p


def _read_expression(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _run_verify(path: str, F, names, tol: float, as_json: bool) -> int:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    report = report_from_json(data)
    residual = verify(report, F)
    ok = residual == 0 if report.exact else float(residual) <= tol
    if as_json:
        print(json.dumps({"residual": encode_number(residual), "ok": ok}))
    else:
        print(f"residual: {_fmt(residual)}  {'ok' if ok else 'FAILED'}")
    return 0 if ok else 2


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _read_expression(args.expression)
        names = [v.strip() for v in args.vars.split(",")] if args.vars else variables_in_order(text)
        F = parse_polynomial(text, names)
        if F.degree < 1:
            raise ValueError("the polynomial must have positive degree")
    except (OSError, *INPUT_ERRORS) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    cfg = Config(degree_cap=args.degree_cap, max_rank=args.max_rank, start_rank=args.start_rank,
                 attempts=args.attempts, mix=not args.no_mix)
    if args.tol is not None:
        cfg = cfg.with_(verify_tol=args.tol)
    if args.verify_only:
        try:
            return _run_verify(args.verify_only, F, names, cfg.verify_tol, args.json)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return 1
    try:
        report = decompose(F, args.mode, cfg, args.seed)
    except DecompError as exc:
        report = DecompositionReport(args.mode, False, seed=args.seed)
        report.warnings.append(f"{type(exc).__name__}: {exc}")
    if args.json:
        print(json.dumps(report_to_json(report, names), indent=2))
    else:
        print(report_to_text(report, names))
    return 0 if report.solved else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
