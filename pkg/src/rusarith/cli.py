"""Command-line front end.

    rusarith reproduce {multerror,cheb,multiplier,reciprocals}
    rusarith simulate {gb,par,oaa,nonrus,expr} ...
    rusarith sqwave --function reciprocal --interval -0.1 0.6 --n 71 --k 8
    rusarith cost {expr,gb,par,baseline,cache} ...

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import costs as C
from . import primitives as prim
from . import published as pub
from .simkernel import RngStream, SimulationError
from .synth import expr as E
from .synth import multiply, reciprocal, sqwave

SCHEMA_VERSION = 1
DEFAULT_SEED = C.DEFAULT_SEED
DEFAULT_TRIALS = 10_000
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# output

def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.5e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render(report: dict, rows: list, columns: list, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])
        return buf.getvalue()
    body = {"schema_version": SCHEMA_VERSION, **report, "rows": rows}
    return json.dumps(_jsonable(body), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# reproduce

def _reproduce_multerror(args):
    rows = []
    for name, printed in pub.MULT_ERRORS.items():
        ex = multiply.multiplier(name)
        for xs, p in zip(pub.MULT_ERROR_X, printed):
            x = float(xs)
            err = abs(E.eval_angle(ex, [x, x]) - x * x)
            rows.append({"table": "multerror", "row": name, "column": xs, "computed": err,
                         "published": float(p), "match": pub.matches(err, p)})
    return rows


def _reproduce_cheb(args):
    rows = []
    for order, p in pub.CHEB_MAX_ERRORS.items():
        err = reciprocal.max_error(reciprocal.chebyshev_reciprocal(order))
        rows.append({"table": "cheb", "row": f"R{order}", "column": "max_abs_error",
                     "computed": err, "published": float(p), "match": pub.matches(err, p)})
    return rows


def _reproduce_multiplier(args):
    rows = []
    for method in ("carry_ripple", "table_lookup_mult"):
        for n, (tp, qp) in zip(pub.BITS, pub.MULTIPLIER_COSTS[method]):
            rep = C.baseline_cost(method, n, table_mode=True)
            ok = method == "carry_ripple" and pub.within_rel(rep.tcount, tp, 0.05) and rep.qubits == qp
            rows.append({"table": "multiplier", "row": method, "column": n, "computed": rep.tcount,
                         "published": float(tp), "qubits": rep.qubits, "published_qubits": qp,
                         "match": ok})
    estimates = C.multiplier_table(pub.BITS, ("m4", "m6"), args.seed, args.trials)
    for name in ("m4", "m6"):
        for n, (tp, qp) in zip(pub.BITS, pub.MULTIPLIER_COSTS[name]):
            est = estimates[name, n]
            ok = pub.within_factor(est.tcount, float(tp), 2.0) and est.qubits == qp
            rows.append({"table": "multiplier", "row": name, "column": n, "computed": est.tcount,
                         "published": float(tp), "qubits": est.qubits, "published_qubits": qp,
                         "match": ok})
    return rows


def _reproduce_reciprocals(args):
    rows = []
    for method in ("euclid", "newton", "table_lookup_recip"):
        for n, (tp, qp) in zip(pub.BITS, pub.RECIPROCAL_COSTS[method]):
            rep = C.baseline_cost(method, n, table_mode=True)
            ok = pub.within_rel(rep.tcount, tp, 0.01) and rep.qubits == qp
            rows.append({"table": "reciprocals", "row": method, "column": n, "computed": rep.tcount,
                         "published": float(tp), "qubits": rep.qubits, "published_qubits": qp,
                         "match": ok})
    for n, cell in zip(pub.BITS, pub.RECIPROCAL_COSTS["r2"]):
        if cell is not None:
            rows.append({"table": "reciprocals", "row": "r2", "column": n, "computed": None,
                         "published": float(cell[0]), "qubits": None,
                         "published_qubits": cell[1], "match": False})
    return rows


REPRODUCERS = {"multerror": _reproduce_multerror, "cheb": _reproduce_cheb,
               "multiplier": _reproduce_multiplier, "reciprocals": _reproduce_reciprocals}
REPRODUCE_COLUMNS = ["table", "row", "column", "computed", "published", "qubits",
                     "published_qubits", "match"]


def cmd_reproduce(args):
    rows = REPRODUCERS[args.table](args)
    report = {"command": "reproduce", "table": args.table, "seed": args.seed,
              "matched": sum(bool(r["match"]) for r in rows), "cells": len(rows)}
    return report, rows, REPRODUCE_COLUMNS


# simulate

def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None


def cmd_simulate(args):
    rng = RngStream(args.seed)
    if args.primitive == "expr":
        if not args.expr:
            raise UsageError("simulate expr needs --expr")
        ex = E.parse_expr(args.expr)
        inputs = _floats(args.inputs or "")
        if len(inputs) < E.arity(ex):
            raise UsageError(f"expression needs {E.arity(ex)} inputs")
        model = C.RotationCostModel.rotations()
        samples = C.sample_expr_cost(ex, model, inputs, rng, args.trials)
        analytic = C.expr_cost(ex, model, inputs)
        report = {"command": "simulate", "primitive": "expr", "expr": E.to_prefix(ex),
                  "inputs": inputs, "trials": args.trials, "seed": args.seed,
                  "angle": E.eval_angle(ex, inputs)}
        succ_emp = succ_an = None
    else:
        phis = _floats(args.angles or "")
        if not phis:
            raise UsageError("simulate needs --angles")
        if args.primitive == "nonrus" and len(phis) != 1:
            raise UsageError("the non-repeating gearbox takes one angle")
        kind = args.primitive
        attempts = prim.sample_attempts(kind, phis, rng, args.trials, args.max_attempts)
        per = prim.rotations_per_attempt(kind, len(phis))
        samples = attempts * per
        probs, ok = prim.attempt_distribution(kind, phis)
        p = float(probs[ok].sum())
        succ_emp = args.trials / attempts.sum()
        succ_an = {"gb": prim.gb_success_prob, "par": prim.par_success_prob,
                   "oaa": prim.par_success_prob,
                   "nonrus": lambda a: prim.nonrus_gb_success_prob(a[0])}[kind](phis)
        mean = per / p
        analytic = C.CostDist(mean, per * per * (1 - p) / p ** 2)
        report = {"command": "simulate", "primitive": kind, "angles": phis,
                  "trials": args.trials, "seed": args.seed,
                  "success_rate": succ_emp, "success_prob": succ_an}
    report["rotations_mean"] = float(samples.mean())
    report["rotations_variance"] = float(samples.var(ddof=1)) if samples.size > 1 else 0.0
    report["analytic_mean"] = analytic.mean
    report["analytic_variance"] = analytic.variance
    values, counts = np.unique(samples, return_counts=True)
    rows = [{"rotations": float(v), "count": int(c), "frequency": c / samples.size}
            for v, c in zip(values, counts)]
    return report, rows, ["rotations", "count", "frequency"]


# square waves

def _sq_function(args):
    name = args.function
    if name == "reciprocal":
        return lambda y: 1.0 / (1.0 - y)
    if name == "polynomial":
        coeffs = _floats(args.coeffs or "")
        if not coeffs:
            raise UsageError("polynomial needs --coeffs")
        return lambda y: np.polynomial.polynomial.polyval(y, coeffs)
    if name == "basis":
        lo, hi = args.interval
        _, periods = sqwave.mesh(lo, hi, args.n)
        if not 1 <= args.basis_index <= args.n:
            raise UsageError("--basis-index must lie in [1, n]")
        t = periods[args.basis_index - 1]
        return lambda y: sqwave.square_wave_basis(y, t, args.k, lo)
    raise UsageError(f"unknown function {name!r}")


def cmd_sqwave(args):
    if args.n < 1 or args.n > sqwave.MAX_WAVES:
        raise UsageError(f"--n must lie in [1, {sqwave.MAX_WAVES}]")
    lo, hi = args.interval
    if not hi > lo:
        raise UsageError("--interval must be increasing")
    if args.function == "mesh":
        if not args.mesh_file:
            raise UsageError("--function mesh needs --mesh-file")
        y = np.loadtxt(args.mesh_file, delimiter=",", ndmin=1)
        mids, _ = sqwave.mesh(lo, hi, y.size)
        fit = sqwave.SquareWaveRegressor(k=args.k).fit(mids, y).fit_
        f = None
    else:
        f = _sq_function(args)
        fit = sqwave.square_wave_fit(f, lo, hi, args.n, args.k, padding=0.0)
    e_lo, e_hi = args.eval_interval if args.eval_interval else (lo, hi)
    xs = np.linspace(e_lo, e_hi, args.points)
    approx = sqwave.square_wave_eval(fit, xs)
    report = {"command": "sqwave", "function": args.function, "fit": fit.to_dict(),
              "condition": fit.condition, "eval_interval": [e_lo, e_hi]}
    rows = []
    if f is not None:
        exact = f(xs)
        rel = np.abs(approx - exact) / np.abs(exact)
        report["max_relative_error"] = float(rel.max())
        report["mean_relative_error"] = float(rel.mean())
        rows = [{"x": a, "exact": b, "approx": c, "relative_error": d}
                for a, b, c, d in zip(xs, exact, approx, rel)]
    else:
        rows = [{"x": a, "exact": None, "approx": c, "relative_error": None}
                for a, c in zip(xs, approx)]
    return report, rows, ["x", "exact", "approx", "relative_error"]


# costs

def _model(text: str) -> C.RotationCostModel:
    kind, _, val = text.partition(":")
    try:
        if kind == "constant":
            return C.RotationCostModel.constant(float(val or 1))
        if kind == "synthesis":
            return C.RotationCostModel.synthesis(float(val))
        if kind == "rotations":
            return C.RotationCostModel.rotations()
        if kind == "encoded":
            return C.RotationCostModel.encoded(int(val))
    except ValueError as exc:
        raise UsageError(f"bad cost model {text!r}: {exc}") from None
    raise UsageError(f"unknown cost model {text!r}")


def cmd_cost(args):
    report = {"command": "cost", "kind": args.kind}
    if args.kind == "baseline":
        if not args.method or args.n is None:
            raise UsageError("cost baseline needs --method and --n")
        try:
            rep = C.baseline_cost(args.method, args.n, args.table_mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        report.update(rep.row())
        return report, [rep.row()], list(C.BASELINE_COLUMNS)
    if args.kind == "cache":
        if None in (args.kappa, args.eps, args.delta):
            raise UsageError("cost cache needs --kappa, --eps and --delta")
        try:
            t, rot = C.cache_cost(args.kappa, args.eps, args.delta, args.n1, args.n2)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        row = {"qubits": t, "rotations": rot}
        report.update(row)
        return report, [row], ["qubits", "rotations"]
    model = _model(args.model)
    if args.kind == "expr":
        if not args.expr:
            raise UsageError("cost expr needs --expr")
        ex = E.parse_expr(args.expr)
        inputs = _floats(args.inputs or "")
        if len(inputs) < E.arity(ex):
            raise UsageError(f"expression needs {E.arity(ex)} inputs")
        dist = C.expr_cost(ex, model, inputs)
        report["expr"] = E.to_prefix(ex)
    else:
        phis = _floats(args.angles or "")
        if not phis:
            raise UsageError(f"cost {args.kind} needs --angles")
        dist = (C.gb_tcount if args.kind == "gb" else C.par_tcount)(phis, model)
    row = {"mean": dist.mean, "variance": dist.variance}
    report.update(row)
    report["model"] = args.model
    return report, [row], ["mean", "variance"]


# parser and config

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--config", default=None, help="file of key=value lines")
    common.add_argument("--table-mode", action="store_true",
                        help="use the variants that match the published tables")

    p = _Parser(prog="rusarith", description="Repeat-until-success arithmetic tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reproduce", parents=[common], help="rebuild a published table")
    r.add_argument("table", choices=sorted(REPRODUCERS))
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo over a primitive")
    s.add_argument("primitive", choices=("gb", "par", "oaa", "nonrus", "expr"))
    s.add_argument("--angles", help="comma-separated input angles")
    s.add_argument("--expr", help="prefix expression, e.g. PAR(aff(0,1,0),aff(1,1,0))")
    s.add_argument("--inputs", help="comma-separated expression inputs")
    s.add_argument("--max-attempts", type=int, default=prim.DEFAULT_MAX_ATTEMPTS)
    s.set_defaults(func=cmd_simulate)

    q = sub.add_parser("sqwave", parents=[common], help="square-wave function fit")
    q.add_argument("--function", choices=("reciprocal", "polynomial", "basis", "mesh"),
                   default="reciprocal")
    q.add_argument("--interval", type=float, nargs=2, default=(-0.1, 0.6),
                   metavar=("LO", "HI"), help="fitting interval, padding included")
    q.add_argument("--eval-interval", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    q.add_argument("--n", type=int, default=71)
    q.add_argument("--k", type=int, default=8)
    q.add_argument("--coeffs", help="polynomial coefficients, ascending")
    q.add_argument("--basis-index", type=int, default=1)
    q.add_argument("--mesh-file", help="function values at the mesh midpoints")
    q.add_argument("--points", type=int, default=2001)
    q.set_defaults(func=cmd_sqwave)

    c = sub.add_parser("cost", parents=[common], help="cost models and baselines")
    c.add_argument("kind", choices=("expr", "gb", "par", "baseline", "cache"))
    c.add_argument("--expr")
    c.add_argument("--inputs")
    c.add_argument("--angles")
    c.add_argument("--model", default="constant:1",
                   help="constant:C, synthesis:EPS, rotations or encoded:N")
    c.add_argument("--method", choices=C.BASELINE_METHODS)
    c.add_argument("--n", type=int)
    c.add_argument("--kappa", type=float)
    c.add_argument("--eps", type=float)
    c.add_argument("--delta", type=float)
    c.add_argument("--n1", type=float, default=0.0)
    c.add_argument("--n2", type=float, default=0.0)
    c.set_defaults(func=cmd_cost)
    return p


def read_config(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(parser, argv, config: dict):
    """Config values become defaults, so explicit flags still win."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    first = parser.parse_args(argv)
    sp = sub.choices[first.command]
    known = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, val in config.items():
        if key not in known or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        act = known[key]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = val.lower() in ("1", "true", "yes", "on")
        elif act.nargs == 2:
            defaults[key] = [act.type(v) for v in val.replace(",", " ").split()]
        else:
            defaults[key] = act.type(val) if act.type else val
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(parser, argv, read_config(args.config))
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        report, rows, columns = args.func(args)
        _emit(render(report, rows, columns, args.format), args.out)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except E.ExprParseError as exc:
        print(f"parse error at position {exc.position}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (sqwave.SingularFitError, prim.ExhaustedError, SimulationError,
            np.linalg.LinAlgError, ArithmeticError, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
