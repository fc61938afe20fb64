"""Command line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import cube, estimators, norms, operators, semigroup
from .errors import AllRestartsDegenerate, CubeError, QuadratureUnderresolved
from .optimize import OptimizerConfig

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

TOL_IDENTITY = 1e-10
TOL_SEMIGROUP = 1e-11
TOL_QUADRATURE = 1e-6
TOL_ALGEBRA = 1e-12
QUADRATURE_MAX_N = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[int]:
    """"4..4096", "1,2,5" or "3"."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            restarts=args.restarts, max_iter=args.max_iter, seed=args.seed, threads=args.threads
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _algebra_discrepancy(f: cube.CubeFunction, rng) -> float:
    n = f.n
    worst = 0.0
    lap = operators.laplacian(f).values
    total = np.zeros_like(lap)
    riesz_sum = np.zeros_like(lap)
    for j in range(n):
        dj = operators.d_j(f, j)
        worst = max(worst, np.max(np.abs(operators.d_j(dj, j).values - dj.values)))
        pointwise = cube.sign_table(n)[:, j][:, None] * operators.partial_j(f, j).values
        worst = max(worst, np.max(np.abs(pointwise - dj.values)))
        total += dj.values
        riesz_sum += operators.riesz(f, j).values
    worst = max(worst, np.max(np.abs(total - lap)))
    worst = max(worst, np.max(np.abs(riesz_sum - (f.values - f.values.mean(axis=0)))))
    s, t = 0.4, 1.1
    twice = operators.heat(operators.heat(f, s), t).values
    worst = max(worst, np.max(np.abs(twice - operators.heat(f, s + t).values)))
    if n <= cube.MAX_N_TWO_CUBE:
        F = cube.TwoCubeFunction.random(n, f.d, rng)
        P = operators.rademacher_projection(F)
        worst = max(worst, np.max(np.abs(operators.rademacher_projection(P).values - P.values)))
    return float(worst)


def run_verify(n: int, d: int, seed: int, t_grid, functions: int) -> dict:
    if not 1 <= n <= cube.MAX_N:
        raise UsageError(f"n={n} outside [1, {cube.MAX_N}]")
    if d < 1 or functions < 1:
        raise UsageError("d and --functions must be positive")
    if any(t <= 0 for t in t_grid):
        raise UsageError("all times must be positive")
    rng = np.random.default_rng(seed)
    identity = semi = algebra = 0.0
    residual = 0.0
    signs = set()
    for _ in range(functions):
        f = cube.CubeFunction.random(n, d, rng)
        identity = max(identity, semigroup.verify_main_identity(f, t_grid))
        for t in t_grid:
            gap = semigroup.xi_expectation(f, t).values - operators.heat(f, t).values
            semi = max(semi, float(np.max(np.abs(gap))))
        algebra = max(algebra, _algebra_discrepancy(f, rng))
        if n <= QUADRATURE_MAX_N:
            f_list = [cube.CubeFunction.random(n, d, rng) for _ in range(n)]
            res, sign = semigroup.integral_residual(f_list)
            residual = max(residual, res)
            signs.add(sign)
    quad_ok = n > QUADRATURE_MAX_N or (residual <= TOL_QUADRATURE and len(signs) == 1)
    report = {
        "n": n,
        "d": d,
        "t_grid": list(t_grid),
        "max_discrepancy": identity,
        "sign": signs.pop() if len(signs) == 1 else None,
        "semigroup_discrepancy": semi,
        "quadrature_residual": residual if n <= QUADRATURE_MAX_N else None,
        "algebra_discrepancy": algebra,
    }
    report["passed"] = bool(
        identity <= TOL_IDENTITY and semi <= TOL_SEMIGROUP and algebra <= TOL_ALGEBRA and quad_ok
    )
    return report


def cmd_verify(args) -> int:
    report = run_verify(args.n, args.d, args.seed, args.t_grid, args.functions)
    _write(json.dumps(report) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def _check_n(kind, n):
    cap = estimators.MAX_N[kind]
    if not 1 <= n <= cap:
        raise UsageError(f"n={n} outside [1, {cap}] for {kind.value}")


def _norm(text, n=None):
    try:
        return norms.parse_norm(text, n)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None


def cmd_estimate(args) -> int:
    kind = estimators.InequalityKind(args.ineq)
    _check_n(kind, args.n)
    X = _norm(args.norm, args.n)
    if not 1 <= args.p < math.inf:
        raise UsageError(f"p={args.p} must lie in [1, inf)")
    config = _config(args)
    try:
        est = estimators.maximize(kind, X, args.n, args.p, config)
    except AllRestartsDegenerate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.format == "csv":
        row = estimators.ScanRow(est.n, kind.value, est.norm, est.p, est.value, est.restarts,
                                 est.converged, est.seed, result=est)
        text = estimators.rows_to_csv([row])
    else:
        text = est.to_json() + "\n"
    _write(text, args.output)
    if args.output:
        print(f"value={est.value!r} witness={args.output}")
    return EXIT_OK


_SCAN_KEYS = ("ineq", "norm", "p", "n", "restarts", "max_iter", "seed", "threads", "format", "output")


def _apply_config_file(args, parser):
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config) as fh:
            given = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    unknown = set(given) - set(_SCAN_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    defaults = {k: parser.get_default(k) for k in _SCAN_KEYS}
    for key, value in given.items():
        # flags that differ from their defaults take precedence over the file
        if getattr(args, key) == defaults[key]:
            setattr(args, key, str(value) if key == "n" else value)
    return args


def cmd_scan(args) -> int:
    if args.ineq is None or args.norm is None or args.n is None:
        raise UsageError("scan needs --ineq, --norm and --n (flags or --config)")
    kind = estimators.InequalityKind(args.ineq)
    n_range = parse_range(args.n)
    for n in n_range:
        _check_n(kind, n)
        _norm(args.norm, n)
    rows = estimators.scan(kind, args.norm, n_range, float(args.p), _config(args))
    text = estimators.rows_to_csv(rows) if args.format == "csv" else estimators.rows_to_jsonl(rows)
    _write(text, args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    ns = parse_range(args.n)
    if min(ns) < 1 or not 1 <= args.p < math.inf:
        raise UsageError("need n >= 1 and p in [1, inf)")
    bounds, rs = estimators.f1log_bound(np.array(ns), args.p, return_r=True)
    records = []
    for n, b, r in zip(ns, bounds, rs):
        ratio = b / (n * math.log(n)) if n > 1 else None
        records.append({"n": n, "p": float(args.p), "r_star": float(r), "bound": float(b),
                        "ratio": ratio})
    if args.format == "csv":
        lines = ["n,p,r_star,bound,ratio"]
        for rec in records:
            ratio = "" if rec["ratio"] is None else repr(float(rec["ratio"]))
            lines.append(f"{rec['n']},{rec['p']!r},{rec['r_star']!r},{rec['bound']!r},{ratio}")
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(json.dumps(rec) + "\n" for rec in records)
    _write(text, args.output)
    return EXIT_OK


def cmd_moduli(args) -> int:
    X = _norm(args.norm, args.n)
    config = _config(args)
    try:
        if args.modulus == "cotype":
            value, _ = norms.cotype_estimate(X, args.exponent, args.m, config)
        elif args.modulus == "type":
            value, _ = norms.type_estimate(X, args.exponent, args.m, config)
        else:
            if args.n is None:
                raise UsageError("kconvex needs --n")
            value, _ = norms.k_convexity_estimate(X, args.n, args.exponent, config)
    except AllRestartsDegenerate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    rec = {"modulus": args.modulus, "norm": X.descriptor, "exponent": args.exponent,
           "m": args.m, "n": args.n, "value": value, "lower_bound": True, "seed": args.seed}
    if args.format == "csv":
        keys = list(rec)
        text = ",".join(keys) + "\n" + ",".join("" if rec[k] is None else str(rec[k]) for k in keys) + "\n"
    else:
        text = json.dumps(rec) + "\n"
    _write(text, args.output)
    return EXIT_OK


def _add_optimizer(p):
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for restarts (default: $CUBE_PISIER_THREADS or 1)")


def _add_output(p, default="json"):
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--output", "-o", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cube-pisier", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="operator identity and quadrature suites")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--functions", type=int, default=3)
    p.add_argument("--t-grid", dest="t_grid", type=lambda s: [float(v) for v in s.split(",")],
                   default=[0.05, 0.3, 1.0, 3.0])
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_verify)

    ineqs = [k.value for k in estimators.InequalityKind]
    p = sub.add_parser("estimate", help="estimate one inequality constant")
    p.add_argument("--ineq", choices=ineqs, required=True)
    p.add_argument("--norm", default="scalar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=2.0)
    _add_optimizer(p)
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("scan", help="estimate constants over a range of n")
    p.add_argument("--config", default=None, help="JSON file of scan settings; flags override it")
    p.add_argument("--ineq", choices=ineqs, default=None)
    p.add_argument("--norm", default=None)
    p.add_argument("--n", default=None, help='range such as "1..6"')
    p.add_argument("--p", type=float, default=2.0)
    _add_optimizer(p)
    _add_output(p, default="csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bound", help="the n log n bound for F1")
    p.add_argument("--n", required=True)
    p.add_argument("--p", type=float, default=2.0)
    _add_output(p, default="csv")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("moduli", help="type, cotype or K-convexity lower bounds")
    p.add_argument("--modulus", choices=("type", "cotype", "kconvex"), required=True)
    p.add_argument("--norm", required=True)
    p.add_argument("--exponent", type=float, default=2.0)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=None)
    _add_optimizer(p)
    _add_output(p)
    p.set_defaults(func=cmd_moduli)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            args = _apply_config_file(args, sub_parser(parser, "scan"))
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureUnderresolved as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CubeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_NUMERIC


def sub_parser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


if __name__ == "__main__":
    sys.exit(main())
