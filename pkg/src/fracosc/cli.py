"""Command-line interface.

Subcommands
-----------
deriv       evaluate an order-alpha derivative of an expression in t (or a
            power-series given as JSON [[coeff, exponent], ...]) on a grid,
            exactly or by a discretization, writing CSV
el          Euler-Lagrange runs from a config file: ``reference`` mode checks
            the residual of a built-in family against its closed-form target
            on random jet samples; ``curve`` mode evaluates the residual along
            the exact jet of user-supplied curves, writing CSV
connection  build nonlinear-connection data from spray coefficients (dual and
            primal transcripts, metrical coefficients at a point, self-check
            residuals), writing JSON
solve       integrate a fractional ODE system D^alpha x = f(t, x) with the
            Adams-Bashforth-Moulton scheme, writing CSV

Exit codes: 0 success, 1 usage/config/parse problems, 2 domain or evaluation
failures, 3 failed accuracy assertions (``--assert``). Output is byte
deterministic: no timestamps, seeded sampling, canonical float repr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bundle import BundleSpec, dual_to_primal, jet_lift, pairing_residual, spray_to_dual
from .config import get_float, get_floats, get_int, get_str, load_config
from .connection import MetricField, MetricalConnection
from .errors import (
    AccuracyError,
    DomainError,
    EvalError,
    ParseError,
    SingularityError,
)
from .expr import Add, Mul, Num, Pow, Var, evaluate, normalize_terms, parse, to_str
from .lagrange import el_residual, reference_problem_classical, reference_problem_fractional
from .numeric import gl_derivative, l1_derivative, solve_fode
from .series import FracSeries, frac_derive


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems map to exit code 1, not 2
        raise ParseError(message)


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(meta: dict, columns: list[str], rows) -> str:
    lines = [
        f"# tool=fracosc version={__version__}",
        "# " + " ".join(f"{k}={v}" for k, v in meta.items()),
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"grid must be start:stop:step, got {text!r}")
    try:
        a, b, h = (float(p) for p in parts)
    except ValueError:
        raise ParseError(f"grid values must be numbers: {text!r}") from None
    if h <= 0 or b <= a:
        raise ParseError("grid needs stop > start and step > 0")
    n = int(np.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(n)


def _series_from_expr(e) -> FracSeries:
    terms = []
    for t in normalize_terms(e):
        if t.others:
            raise DomainError("expression is not a pure power series in t")
        power = 0.0
        for name, p in t.powers:
            if name != "t":
                raise DomainError(f"unexpected variable {name!r}; expected t")
            power = p
        terms.append((t.coeff.value(), power))
    return FracSeries(tuple(terms))


# ------------------------------------------------------------------- deriv --


def cmd_deriv(args) -> int:
    alpha = args.alpha
    ts = _parse_grid(args.grid)
    if args.series is not None:
        f = FracSeries.from_json_text(args.series)
    else:
        f = _series_from_expr(parse(args.expr))
    values = np.array([f(t) for t in ts])
    if args.scheme == "exact":
        d = frac_derive(f, alpha)
        dvals = np.array([d(t) for t in ts])
    else:
        if ts[0] != 0.0:
            raise ParseError("gl/l1 grids must start at the base point 0")
        h = float(ts[1] - ts[0])
        if args.scheme == "gl":
            dvals = gl_derivative(values, alpha, h, side=args.side)
        else:
            if args.side != "left":
                raise ParseError("l1 supports only the left-sided derivative")
            dvals = l1_derivative(values, alpha, h)
    meta = {"alpha": repr(alpha), "k": 1, "n": 1, "scheme": args.scheme,
            "config_sha256": "-"}
    text = _csv(meta, ["t", "f", "d"], zip(ts, values, dvals))
    _write(text, args.out)
    return 0


# ---------------------------------------------------------------------- el --


def _reference_problem(cfg):
    kind = get_str(cfg, "el.kind", "fractional")
    alpha = get_float(cfg, "el.alpha", 0.3)
    power = get_float(cfg, "el.power", 2.0)
    c = get_float(cfg, "el.c", 1.0)
    coeffs = get_floats(cfg, "el.coeffs", (1.0, 1.0, 1.0))
    if kind == "fractional":
        prob = reference_problem_fractional(alpha, power, c, coeffs)
        fibre_exp = 2.0 * alpha
    elif kind == "classical":
        prob = reference_problem_classical(alpha, power, c, coeffs)
        fibre_exp = 2.0
    else:
        raise ParseError(f"el.kind must be fractional or classical, got {kind!r}")
    perturb = get_float(cfg, "el.perturb", 0.0)
    if perturb != 0.0:
        # deliberately detune the Lagrangian (not the target)
        bad = Add(prob.lagrangian, Mul(Num(perturb), Pow(Var("y1_1"), fibre_exp)))
        prob = type(prob)(prob.spec, bad, prob.target, prob.mode)
    return prob, kind


def _el_reference(cfg, sha, tol, out) -> int:
    prob, kind = _reference_problem(cfg)
    samples = get_int(cfg, "el.samples", 25)
    seed = get_int(cfg, "el.seed", 7)
    rng = np.random.default_rng(seed)
    E = el_residual(prob.spec, prob.lagrangian, prob.mode)[0]
    worst = 0.0
    for _ in range(samples):
        env = {"x1": rng.uniform(0.5, 2.0)}
        for a in range(1, prob.spec.k + 2):
            env[f"y1_{a}"] = rng.uniform(0.5, 2.0)
        worst = max(worst, abs(evaluate(E, env) - evaluate(prob.target, env)))
    payload = {
        "tool": "fracosc",
        "version": __version__,
        "mode": "reference",
        "kind": kind,
        "alpha": prob.spec.alpha,
        "k": prob.spec.k,
        "n": 1,
        "samples": samples,
        "max_residual": worst,
        "lagrangian": to_str(prob.lagrangian),
        "target": to_str(prob.target),
        "config_sha256": sha,
    }
    _write(_json(payload), out)
    if tol is not None and worst > tol:
        print(f"assertion failed: max residual {worst:.3e} > {tol:.3e}",
              file=sys.stderr)
        return 3
    return 0


def _el_curve(cfg, sha, tol, out) -> int:
    alpha = get_float(cfg, "el.alpha")
    k = get_int(cfg, "el.k")
    mode = get_str(cfg, "el.kind", "fractional")
    if mode not in ("fractional", "classical"):
        raise ParseError(f"el.kind must be fractional or classical, got {mode!r}")
    L = parse(get_str(cfg, "el.lagrangian"))
    curves = []
    i = 1
    while f"curve.x{i}" in cfg:
        curves.append(FracSeries.from_json_text(cfg[f"curve.x{i}"]))
        i += 1
    if not curves:
        raise ParseError("curve mode needs curve.x1 (JSON [[coeff, exponent], ...])")
    spec = BundleSpec(len(curves), k, alpha)
    ts = _parse_grid(get_str(cfg, "el.grid"))
    if ts[0] <= 0.0:
        ts = ts[1:]  # jets of power curves blow up / degenerate at t = 0
    E = el_residual(spec, L, mode)
    rows = []
    worst = 0.0
    for t in ts:
        env = jet_lift(curves, alpha, k + 1, float(t)).env()
        res = [evaluate(e, env) for e in E]
        worst = max(worst, max(abs(r) for r in res))
        rows.append([t, *res])
    meta = {"alpha": repr(alpha), "k": k, "n": spec.n, "config_sha256": sha}
    cols = ["t"] + [f"residual_{i + 1}" for i in range(spec.n)]
    _write(_csv(meta, cols, rows), out)
    if tol is not None and worst > tol:
        print(f"assertion failed: max residual {worst:.3e} > {tol:.3e}",
              file=sys.stderr)
        return 3
    return 0


def cmd_el(args) -> int:
    cfg, sha = load_config(args.config)
    mode = get_str(cfg, "el.mode", "reference")
    if mode == "reference":
        return _el_reference(cfg, sha, args.assert_tol, args.out)
    if mode == "curve":
        return _el_curve(cfg, sha, args.assert_tol, args.out)
    raise ParseError(f"el.mode must be reference or curve, got {mode!r}")


# -------------------------------------------------------------- connection --


def cmd_connection(args) -> int:
    cfg, sha = load_config(args.config)
    alpha = get_float(cfg, "bundle.alpha")
    k = get_int(cfg, "bundle.k")
    n = get_int(cfg, "bundle.n")
    spec = BundleSpec(n, k, alpha)
    G = tuple(parse(get_str(cfg, f"spray.{i + 1}")) for i in range(n))
    dual = spray_to_dual(spec, G)
    primal = dual_to_primal(dual)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            e = parse(get_str(cfg, f"metric.{i + 1}.{j + 1}"))
            rows[i][j] = rows[j][i] = e
    metric = MetricField.from_matrix(spec, tuple(tuple(r) for r in rows))
    env = {}
    for name in spec.all_names():
        env[name] = get_float(cfg, f"point.{name}")
    conn = MetricalConnection(spec, metric, primal)
    coeff = conn.coefficients_at(env)
    payload = {
        "tool": "fracosc",
        "version": __version__,
        "alpha": alpha,
        "k": k,
        "n": n,
        "dual": {
            str(b): [[to_str(dual.order(b)[i][j]) for j in range(n)] for i in range(n)]
            for b in range(1, k + 1)
        },
        "primal": {
            str(b): [[to_str(primal.order(b)[i][j]) for j in range(n)] for i in range(n)]
            for b in range(1, k + 1)
        },
        "metrical": {
            "L": coeff.L.tolist(),
            "C": [c.tolist() for c in coeff.C],
        },
        "checks": {
            "pairing_residual": pairing_residual(spec, primal, env),
            "metricity_residual": conn.metricity_residual(env),
        },
        "config_sha256": sha,
    }
    _write(_json(payload), args.out)
    if args.assert_tol is not None:
        worst = max(payload["checks"].values())
        if worst > args.assert_tol:
            print(
                f"assertion failed: self-check residual {worst:.3e} > "
                f"{args.assert_tol:.3e}",
                file=sys.stderr,
            )
            return 3
    return 0


# ------------------------------------------------------------------- solve --


def cmd_solve(args) -> int:
    cfg, sha = load_config(args.config)
    alpha = get_float(cfg, "solve.alpha")
    h = get_float(cfg, "solve.h")
    t_end = get_float(cfg, "solve.t_end")
    x0 = np.array(get_floats(cfg, "solve.x0"))
    n = len(x0)
    rhs_exprs = [parse(get_str(cfg, f"solve.rhs.{i + 1}")) for i in range(n)]

    def rhs(t, s):
        env = {"t": float(t)}
        for i in range(n):
            env[f"x{i + 1}"] = float(s[i])
        return np.array([evaluate(e, env) for e in rhs_exprs])

    res = solve_fode(rhs, x0, alpha, t_end, h)
    meta = {"alpha": repr(alpha), "k": 1, "n": n, "config_sha256": sha}
    cols = ["t"] + [f"x{i + 1}" for i in range(n)]
    rows = ([t, *state] for t, state in zip(res.t, res.x))
    _write(_csv(meta, cols, rows), args.out)
    return 0


# -------------------------------------------------------------------- main --


def build_parser() -> _Parser:
    p = _Parser(prog="fracosc", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"fracosc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deriv", help="order-alpha derivative on a grid")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr", help="expression in t, e.g. 't^2 + 1'")
    src.add_argument("--series", help="JSON [[coeff, exponent], ...]")
    d.add_argument("--alpha", type=float, required=True)
    d.add_argument("--grid", required=True, help="start:stop:step")
    d.add_argument("--scheme", choices=("exact", "gl", "l1"), default="exact")
    d.add_argument("--side", choices=("left", "right"), default="left")
    d.add_argument("--out")
    d.set_defaults(func=cmd_deriv)

    e = sub.add_parser("el", help="Euler-Lagrange residual runs")
    e.add_argument("--config", required=True)
    e.add_argument("--assert", dest="assert_tol", type=float, default=None,
                   help="exit 3 if the max residual exceeds this")
    e.add_argument("--out")
    e.set_defaults(func=cmd_el)

    c = sub.add_parser("connection", help="nonlinear connection from a spray")
    c.add_argument("--config", required=True)
    c.add_argument("--assert", dest="assert_tol", type=float, default=None,
                   help="exit 3 if a self-check residual exceeds this")
    c.add_argument("--out")
    c.set_defaults(func=cmd_connection)

    s = sub.add_parser("solve", help="integrate D^alpha x = f(t, x)")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, EvalError, SingularityError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
