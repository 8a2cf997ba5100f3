"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 infinite norm or divergent series,
3 verification failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .bounds import main_bound_constant
from .expsum import SeriesDivergence
from .harness import SearchConfig, empirical_operator_norm, theorem_bound
from .kernels import KernelSpec, apply_operator, builtin_kernel
from .morrey import MorreyParams, PhiSpec, morrey_norm, phi_preset
from .numeric import as_exact, fmt
from .radial import (NonGeometricTail, NonIntegrable, RadialFunction, char_ball, char_sphere, japanese_bracket,
                     zero_function)
from .suite import VerifyConfig, verify_suite

TOL_ENV = "LOCALMORREY_TOL"
EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_FAILED = 0, 1, 2, 3
FUNCTION_PRESETS = ("char_ball:ETA", "char_sphere:ETA", "bracket:N", "zero")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(text: str):
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    return json.loads(text)


def parse_function(text: str, q: int) -> RadialFunction:
    text = text.strip()
    if text.startswith("{") or text.startswith("@"):
        return RadialFunction.from_json(_load_json(text), q)
    name, _, arg = text.partition(":")
    try:
        if name == "zero" and not arg:
            return zero_function(q)
        if name == "char_ball":
            return char_ball(int(arg), q)
        if name == "char_sphere":
            return char_sphere(int(arg), q)
        if name == "bracket":
            return japanese_bracket(as_exact(arg), q)
    except ValueError as exc:
        raise UsageError(f"bad function argument {text!r}: {exc}") from None
    raise UsageError(f"unknown function {text!r}; valid presets: {', '.join(FUNCTION_PRESETS)}, or JSON")


def parse_kernel(text: str) -> KernelSpec:
    text = text.strip()
    if text.startswith("{") or text.startswith("@"):
        return KernelSpec.from_json(_load_json(text))
    return builtin_kernel(text)


def parse_phi(text: str, r) -> PhiSpec:
    text = text.strip()
    if text.startswith("{") or text.startswith("@"):
        return PhiSpec.from_json(_load_json(text))
    return phi_preset(text, r)


def _params(args) -> MorreyParams:
    r = as_exact(args.r)
    return MorreyParams.make(args.q, r, as_exact(args.alpha), parse_phi(args.phi, r))


def _emit(args, record: dict):
    if args.format == "json":
        print(json.dumps(record, indent=2, sort_keys=True))
        return
    flat = {k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in record.items()}
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    w.writeheader()
    w.writerow(flat)
    sys.stdout.write(buf.getvalue())


def _echo(args) -> dict:
    out = {"command": args.command, "q": args.q}
    for key in ("r", "alpha", "phi", "kernel", "function"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    return out


def cmd_norm(args) -> int:
    P = _params(args)
    f = parse_function(args.function, args.q)
    rec = _echo(args)
    try:
        res = morrey_norm(f, P)
    except NonIntegrable as exc:
        rec.update({"value": "inf", "infinite": True, "note": str(exc), "side": exc.side})
        _emit(args, rec)
        return EXIT_MATH
    rec.update(res.to_json())
    _emit(args, rec)
    return EXIT_MATH if res.infinite else EXIT_OK


def cmd_apply(args) -> int:
    spec = parse_kernel(args.kernel)
    f = parse_function(args.function, args.q)
    rec = _echo(args)
    try:
        g = apply_operator(spec, f)
    except SeriesDivergence as exc:
        rec.update({"diverges": True, "message": str(exc), "sides": list(exc.sides or ())})
        _emit(args, rec)
        return EXIT_MATH
    except NonGeometricTail as exc:
        raise UsageError(str(exc)) from None
    rec["result"] = g.to_json()
    if args.probe is not None:
        rec["probe"] = {"m": args.probe, "value": fmt(g(args.probe))}
    _emit(args, rec)
    return EXIT_OK


def cmd_bound(args) -> int:
    spec = parse_kernel(args.kernel)
    res = main_bound_constant(spec, as_exact(args.r), as_exact(args.alpha), args.q, args.tol)
    rec = _echo(args)
    rec.pop("phi", None)
    rec.update(res.to_json())
    if not res.finite:
        rec["message"] = f"+inf, condition {res.finiteness_condition} violated"
    _emit(args, rec)
    return EXIT_OK if res.finite else EXIT_MATH


def cmd_search(args) -> int:
    spec = parse_kernel(args.kernel)
    P = _params(args)
    cfg = SearchConfig((args.window[0], args.window[1]), args.restarts, args.iters, args.random, args.seed)
    res = empirical_operator_norm(spec, P, cfg)
    tb = theorem_bound(spec, P, args.tol)
    rec = _echo(args)
    rec.update(res.to_json())
    rec.update({
        "C_rq": fmt(tb["C_rq"].value), "C_sm": fmt(tb["C_sm"]), "C_class": fmt(tb["C_class"]),
        "bound": fmt(tb["product"]), "within_bound": res.ratio <= tb["product"] * (1 + 1e-9),
    })
    if args.format == "csv":
        rec.pop("witness")
    _emit(args, rec)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = VerifyConfig.from_json(_load_json(args.config)) if args.config else VerifyConfig()
    if args.seed is not None:
        cfg = VerifyConfig.from_json({**cfg.to_json(), "seed": args.seed})
    report = verify_suite(cfg)
    text = report.to_json(timing=not args.no_timing) if args.format == "json" else report.to_csv(not args.no_timing)
    if args.output:
        Path(args.output).write_text(text)
        print(json.dumps({"output": args.output, "summary": report.summary(), "seed": cfg.seed}))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK if report.ok else EXIT_FAILED


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-12
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="localmorrey", description="Morrey-type norms and homogeneous operators on a local field.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, phi=True, function=True, kernel=False, rr=True):
        sp.add_argument("--q", type=int, default=2, help="residue field size")
        if rr:
            sp.add_argument("--r", default="2", help="integrability exponent")
            sp.add_argument("--alpha", default="1", help="weight exponent")
        if phi:
            sp.add_argument("--phi", default="lebesgue", help="lebesgue, lebesgue(R), central(T), envelope or JSON")
        if function:
            sp.add_argument("--function", default="char_ball:0", help="char_ball:ETA, bracket:N, zero or JSON")
        if kernel:
            sp.add_argument("--kernel", default="hlp", help="hardy, hilbert, hlp, identity or JSON")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", type=float, default=None, help=f"tolerance (default ${TOL_ENV} or 1e-12)")

    common(sub.add_parser("norm", help="generalized Morrey norm of a radial function"))
    ap = sub.add_parser("apply", help="apply a homogeneous kernel operator")
    common(ap, phi=False, kernel=True, rr=False)
    ap.add_argument("--probe", type=int, default=None, help="also print the value at |s| = q^-M")
    common(sub.add_parser("bound", help="operator bound constant"), phi=False, function=False, kernel=True)
    sp = sub.add_parser("search", help="empirical operator norm by witness search")
    common(sp, function=False, kernel=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--window", type=int, nargs=2, default=(-12, 12), metavar=("LO", "HI"))
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--random", type=int, default=1000, help="random functions scored before climbing")
    vp = sub.add_parser("verify", help="run the verification suite")
    vp.add_argument("--config", default=None, help="JSON object or @file with suite settings")
    vp.add_argument("--seed", type=int, default=None)
    vp.add_argument("--format", choices=("json", "csv"), default="json")
    vp.add_argument("--output", default=None, help="write the report here instead of stdout")
    vp.add_argument("--no-timing", action="store_true", help="omit per-check timings")
    return p


COMMANDS = {"norm": cmd_norm, "apply": cmd_apply, "bound": cmd_bound, "search": cmd_search, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "tol") and args.tol is None:
            args.tol = _default_tol()
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"localmorrey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
