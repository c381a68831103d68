"""Variational calculus on the order-k fractional bundle.

Euler-Lagrange operator
-----------------------
For a Lagrangian L(x, y^{(1)}, ..., y^{(k)}) the residual along coordinate i is

    E_i = d_{x^i} L + sum_{a=1..k} (-1)^a d_t ( d_{y^{i(a)}} L )

with the jet total derivative applied once per order,

    d_t = sum_{i} sum_{b=1..k+1} y^{i(b)} d_{y^{i(b-1)}}        (y^{(0)} = x).

Both derivative semantics are supported: ``mode="fractional"`` takes every
partial in the reviewed order-alpha sense, ``mode="classical"`` takes ordinary
partials. The residual involves jet variables one level past k (the y^{(k+1)}
introduced by d_t), so numeric evaluation expects overshoot jet points.

A curve is extremal when the residual vanishes along its jet. The residual is
linear in the overshoot variables for Lagrangians polynomial in the fibre
coordinates, which is what :func:`extract_spray` exploits: it solves
E_i = 0 for y^{i(k+1)} when the overshoot coupling matrix is diagonal.

Covector ladder
---------------
``craig_synge_level`` builds the graded covector components

    E^{(l)}_i = sum_{a=max(l,1)..k} (-1)^a [1/Gamma(1+alpha a)]
                        d_t ( d_{y^{i(a)}} L ),     l = 0..k,

with the base partial d_{x^i} L added at level 0. An alternative closed form
for the next-to-top component circulates in terms of the fundamental tensor
(``craig_synge_closed_form``); the two disagree on quadratic Lagrangians and
the gap is exposed as a measured quantity (``covector_gap``), not patched.

Prolongations
-------------
``prolong_riemann`` / ``prolong_finsler`` / ``prolong_lagrange`` all funnel
into one canonical construction: a fundamental tensor g, its Levi-Civita-type
coefficients with base partials taken fractionally,

    gamma^i_{jl} = 1/2 g^{is} (D^alpha_{x^j} g_sl + D^alpha_{x^l} g_js
                               - D^alpha_{x^s} g_jl),

the quadratic spray G^i = 1/2 gamma^i_{pm} y^{p(1)} y^{m(1)} and the
first-order dual coefficients M^{(1)i}_j = gamma^i_{jm} y^{m(1)}. They differ
only in how g is produced: given directly (Riemann), as half the fractional
fibre Hessian of an energy function (Finsler), or as half the fibre Hessian
of a Lagrangian, classical by default (``semantics="hybrid"``) or fractional
(``semantics="fractional"``). On diagonal metrics the fractional Hessian of
the matched energy (:func:`alpha_square`) reproduces g exactly, so the three
prolongations agree there; symbolic inversion is only provided for
structurally diagonal fundamental tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import BundleSpec, jet_lift
from .errors import DomainError
from .expr import (
    Add,
    Div,
    Expr,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    classical_partial,
    evaluate,
    frac_partial,
    normal_form,
)
from .series import FracSeries
from .specfun import gamma

__all__ = [
    "jet_var",
    "total_jet_derivative",
    "el_residual",
    "craig_synge_level",
    "craig_synge_closed_form",
    "covector_gap",
    "extract_spray",
    "spray_coefficient_from_el",
    "spray_ode_residual",
    "ReferenceProblem",
    "reference_problem_fractional",
    "reference_problem_classical",
    "reference_residual",
    "fundamental_tensor",
    "alpha_square",
    "diagonal_inverse",
    "Prolongation",
    "canonical_prolongation",
    "prolong_riemann",
    "prolong_finsler",
    "prolong_lagrange",
]


def jet_var(i: int, level: int) -> str:
    """Variable name for coordinate i (0-indexed) at jet level 0..k+1."""
    return f"x{i + 1}" if level == 0 else f"y{i + 1}_{level}"


def _partial(f: Expr, var: str, alpha: float, mode: str) -> Expr:
    if mode == "fractional":
        return frac_partial(f, var, alpha)
    if mode == "classical":
        return classical_partial(f, var)
    raise DomainError(f"unknown derivative mode {mode!r}")


def _sum(pieces) -> Expr:
    out: Expr = Num(0.0)
    for p in pieces:
        out = Add(out, p)
    return normal_form(out)


def total_jet_derivative(
    spec: BundleSpec,
    f: Expr,
    mode: str = "fractional",
    levels: int | None = None,
) -> Expr:
    """Single application of d_t = sum_{i,b} y^{i(b)} d_{y^{i(b-1)}}, with b
    running to ``levels`` (default k+1, the overshoot needed by the
    Euler-Lagrange residual)."""
    levels = spec.k + 1 if levels is None else levels
    pieces = []
    for b in range(1, levels + 1):
        for i in range(spec.n):
            d = _partial(f, jet_var(i, b - 1), spec.alpha, mode)
            pieces.append(Mul(Var(jet_var(i, b)), d))
    return _sum(pieces)


def el_residual(spec: BundleSpec, L: Expr, mode: str = "fractional") -> tuple[Expr, ...]:
    """Euler-Lagrange residual components E_i (zero along extremal jets)."""
    out = []
    for i in range(spec.n):
        pieces = [_partial(L, jet_var(i, 0), spec.alpha, mode)]
        for a in range(1, spec.k + 1):
            inner = _partial(L, jet_var(i, a), spec.alpha, mode)
            term = total_jet_derivative(spec, inner, mode)
            pieces.append(Mul(Num((-1.0) ** a), term))
        out.append(_sum(pieces))
    return tuple(out)


# ------------------------------------------------------------ covector ladder --


def craig_synge_level(spec: BundleSpec, L: Expr, level: int) -> tuple[Expr, ...]:
    """Graded covector component at the given level (0..k), fractional mode."""
    if not (0 <= level <= spec.k):
        raise DomainError(f"ladder level must be in 0..{spec.k}, got {level}")
    out = []
    for i in range(spec.n):
        pieces = []
        if level == 0:
            pieces.append(frac_partial(L, jet_var(i, 0), spec.alpha))
        for a in range(max(level, 1), spec.k + 1):
            inner = frac_partial(L, jet_var(i, a), spec.alpha)
            term = total_jet_derivative(spec, inner, "fractional")
            scale = (-1.0) ** a / gamma(1.0 + spec.alpha * a)
            pieces.append(Mul(Num(scale), term))
        out.append(_sum(pieces))
    return tuple(out)


def craig_synge_closed_form(
    spec: BundleSpec, L: Expr, fundamental
) -> tuple[Expr, ...]:
    """Alternative closed form for the next-to-top covector component:

        d_{y^{i(k-1)}} L - d_t|_{trunc} ( d_{y^{i(k)}} L ) - g_ij y^{j(k+1)}

    with the total derivative truncated to levels <= k and g the fundamental
    tensor. Disagrees with the ladder on quadratic Lagrangians; see
    :func:`covector_gap`."""
    out = []
    for i in range(spec.n):
        lead = frac_partial(L, jet_var(i, spec.k - 1), spec.alpha)
        inner = frac_partial(L, jet_var(i, spec.k), spec.alpha)
        dragged = total_jet_derivative(spec, inner, "fractional", levels=spec.k)
        pieces = [lead, Neg(dragged)]
        for j in range(spec.n):
            pieces.append(Neg(Mul(fundamental[i][j], Var(jet_var(j, spec.k + 1)))))
        out.append(_sum(pieces))
    return tuple(out)


def covector_gap(
    spec: BundleSpec, L: Expr, fundamental, env: dict[str, float]
) -> float:
    """Pointwise gap between the ladder's next-to-top component and the
    closed form — a reported measurement, deliberately not reconciled."""
    ladder = craig_synge_level(spec, L, spec.k - 1) if spec.k >= 1 else ()
    closed = craig_synge_closed_form(spec, L, fundamental)
    return max(
        abs(evaluate(a, env) - evaluate(b, env)) for a, b in zip(ladder, closed)
    )


# ------------------------------------------------------------ spray extraction --


def extract_spray(spec: BundleSpec, L: Expr, mode: str = "fractional") -> tuple[Expr, ...]:
    """Solve E_i = 0 for the overshoot variables y^{i(k+1)}.

    Requires the overshoot coupling to be diagonal and structurally nonzero
    (true for fibre-decoupled polynomial Lagrangians); returns the solved
    expressions."""
    E = el_residual(spec, L, mode)
    out = []
    for i in range(spec.n):
        for j in range(spec.n):
            A_ij = normal_form(classical_partial(E[i], jet_var(j, spec.k + 1)))
            if i == j:
                A_ii = A_ij
            elif A_ij != Num(0.0):
                raise DomainError(
                    "overshoot coupling is not diagonal; spray extraction "
                    "supports fibre-decoupled Lagrangians only"
                )
        if A_ii == Num(0.0):
            raise DomainError(f"Lagrangian is degenerate along coordinate {i + 1}")
        rest = normal_form(Sub(E[i], Mul(A_ii, Var(jet_var(i, spec.k + 1)))))
        out.append(normal_form(Div(Neg(rest), A_ii)))
    return tuple(out)


def spray_coefficient_from_el(spec: BundleSpec, solved: tuple[Expr, ...]) -> tuple[Expr, ...]:
    """Spray coefficients from the solved overshoot values:
    G^i = -[Gamma(1+alpha k)/Gamma(1+alpha(k+1))] y^{i(k+1)}_solved."""
    scale = -gamma(1.0 + spec.alpha * spec.k) / gamma(1.0 + spec.alpha * (spec.k + 1))
    return tuple(normal_form(Mul(Num(scale), g)) for g in solved)


def spray_ode_residual(
    spec: BundleSpec,
    solved: tuple[Expr, ...],
    curves: list[FracSeries],
    ts,
) -> float:
    """max over sample times of |y^{i(k+1)}(t) - solved_i(jet(t))| along the
    exact jet of the given curves."""
    worst = 0.0
    for t in ts:
        jp = jet_lift(curves, spec.alpha, spec.k + 1, float(t))
        env = jp.env()
        for i in range(spec.n):
            worst = max(worst, abs(jp.y[spec.k][i] - evaluate(solved[i], env)))
    return worst


# ------------------------------------------------------------ reference problems --


@dataclass(frozen=True)
class ReferenceProblem:
    """A Lagrangian whose Euler-Lagrange residual has a pinned closed form."""

    spec: BundleSpec
    lagrangian: Expr
    target: Expr
    mode: str


def _reference_target(alpha: float, power: float, c: float, coeffs) -> Expr:
    lead = c * gamma(1.0 + power) / gamma(1.0 + power - alpha)
    target: Expr = Mul(Num(lead), Pow(Var("x1"), power - alpha))
    for a, a_coeff in enumerate(coeffs, start=1):
        scale = a_coeff * gamma(1.0 + alpha * (a + 1))
        target = Add(target, Mul(Num(scale), Var(jet_var(0, a + 1))))
    return normal_form(target)


def reference_problem_fractional(
    alpha: float = 0.3,
    power: float = 2.0,
    c: float = 1.0,
    coeffs=(1.0, 1.0, 1.0),
    fibre_exponent_alpha: bool = False,
) -> ReferenceProblem:
    """n = 1 Lagrangian  c x^p + sum_a c_a (y^{(a)})^{2 alpha}  with

        c_a = (-1)^a a_a Gamma(1+alpha(a+1)) / Gamma(1+2 alpha),

    whose fractional residual is exactly

        c G(1+p)/G(1+p-alpha) x^{p-alpha} + sum_a a_a Gamma(1+alpha(a+1)) y^{(a+1)}.

    ``fibre_exponent_alpha=True`` swaps the fibre exponent 2*alpha for alpha; the
    order-alpha partial of (y)^alpha is the constant Gamma(1+alpha), so every
    fibre term drops out of the residual and the target is missed — kept as a
    measurable variant."""
    k = len(coeffs)
    spec = BundleSpec(1, k, alpha)
    exponent = alpha if fibre_exponent_alpha else 2.0 * alpha
    L: Expr = Mul(Num(c), Pow(Var("x1"), power))
    for a, a_coeff in enumerate(coeffs, start=1):
        c_a = (-1.0) ** a * a_coeff * gamma(1.0 + alpha * (a + 1)) / gamma(1.0 + 2.0 * alpha)
        L = Add(L, Mul(Num(c_a), Pow(Var(jet_var(0, a)), exponent)))
    return ReferenceProblem(
        spec, normal_form(L), _reference_target(alpha, power, c, coeffs), "fractional"
    )


def reference_problem_classical(
    alpha: float = 0.3,
    power: float = 2.0,
    c: float = 1.0,
    coeffs=(1.0, 1.0, 1.0),
) -> ReferenceProblem:
    """n = 1 Lagrangian with ordinary squares on the fibres,

        c G(1+p)/[G(1+p-alpha)(p-alpha+1)] x^{p-alpha+1}
            + sum_a (-1)^a (a_a/2) Gamma(1+alpha(a+1)) (y^{(a)})^2,

    whose classical residual hits the same target as the fractional problem."""
    k = len(coeffs)
    spec = BundleSpec(1, k, alpha)
    lead = c * gamma(1.0 + power) / (gamma(1.0 + power - alpha) * (power - alpha + 1.0))
    L: Expr = Mul(Num(lead), Pow(Var("x1"), power - alpha + 1.0))
    for a, a_coeff in enumerate(coeffs, start=1):
        c_a = (-1.0) ** a * 0.5 * a_coeff * gamma(1.0 + alpha * (a + 1))
        L = Add(L, Mul(Num(c_a), Pow(Var(jet_var(0, a)), 2.0)))
    return ReferenceProblem(
        spec, normal_form(L), _reference_target(alpha, power, c, coeffs), "classical"
    )


def reference_residual(problem: ReferenceProblem, env: dict[str, float]) -> float:
    """|E(env) - target(env)| for the problem's single coordinate."""
    E = el_residual(problem.spec, problem.lagrangian, problem.mode)
    return max(
        abs(evaluate(e, env) - evaluate(problem.target, env)) for e in E
    )


# ------------------------------------------------------------- prolongations --


def fundamental_tensor(spec: BundleSpec, L: Expr, semantics: str = "classical"):
    """Half the level-1 fibre Hessian of L: classical partials or reviewed
    fractional partials depending on ``semantics``."""
    mode = {"classical": "classical", "fractional": "fractional"}.get(semantics)
    if mode is None:
        raise DomainError(f"unknown Hessian semantics {semantics!r}")
    n = spec.n
    rows = []
    for i in range(n):
        di = _partial(L, jet_var(i, 1), spec.alpha, mode)
        row = []
        for j in range(n):
            dij = _partial(di, jet_var(j, 1), spec.alpha, mode)
            row.append(normal_form(Mul(Num(0.5), dij)))
        rows.append(tuple(row))
    return tuple(rows)


def alpha_square(spec: BundleSpec, diag_entries) -> Expr:
    """Energy function matched to a diagonal metric: the fractional fibre
    Hessian of  (2/Gamma(1+2 alpha)) sum_i g_ii (y^{i(1)})^{2 alpha}  is
    exactly diag(g_ii)."""
    if len(diag_entries) != spec.n:
        raise DomainError(f"need {spec.n} diagonal entries")
    scale = 2.0 / gamma(1.0 + 2.0 * spec.alpha)
    pieces = [
        Mul(Num(scale), Mul(g, Pow(Var(jet_var(i, 1)), 2.0 * spec.alpha)))
        for i, g in enumerate(diag_entries)
    ]
    return _sum(pieces)


def diagonal_inverse(spec: BundleSpec, rows):
    """Symbolic inverse of a structurally diagonal tensor; off-diagonal
    entries must normalize to zero."""
    n = spec.n
    for i in range(n):
        for j in range(n):
            if i != j and normal_form(rows[i][j]) != Num(0.0):
                raise DomainError(
                    "symbolic inversion is only provided for diagonal tensors"
                )
    return tuple(
        tuple(
            normal_form(Div(Num(1.0), rows[i][i])) if i == j else Num(0.0)
            for j in range(n)
        )
        for i in range(n)
    )


@dataclass(frozen=True)
class Prolongation:
    """Canonical first-order data built from a fundamental tensor."""

    spec: BundleSpec
    fundamental: tuple
    christoffels: tuple  # gamma[i][j][l]
    spray: tuple[Expr, ...]  # G^i = 1/2 gamma^i_{pm} y^p y^m
    dual1: tuple  # M^{(1)i}_j = gamma^i_{jm} y^m


def canonical_prolongation(spec: BundleSpec, rows, inverse_rows=None) -> Prolongation:
    n, alpha = spec.n, spec.alpha
    ginv = diagonal_inverse(spec, rows) if inverse_rows is None else inverse_rows
    dgs = [
        [[frac_partial(rows[s][l], f"x{j + 1}", alpha) for l in range(n)]
         for s in range(n)]
        for j in range(n)
    ]
    christoffels = []
    for i in range(n):
        mat = []
        for j in range(n):
            row = []
            for l in range(n):
                pieces = []
                for s in range(n):
                    combo = Sub(Add(dgs[j][s][l], dgs[l][j][s]), dgs[s][j][l])
                    pieces.append(Mul(Num(0.5), Mul(ginv[i][s], combo)))
                row.append(_sum(pieces))
            mat.append(tuple(row))
        christoffels.append(tuple(mat))
    christoffels = tuple(christoffels)
    spray = tuple(
        _sum(
            Mul(
                Num(0.5),
                Mul(christoffels[i][p][m], Mul(Var(jet_var(p, 1)), Var(jet_var(m, 1)))),
            )
            for p in range(n)
            for m in range(n)
        )
        for i in range(n)
    )
    dual1 = tuple(
        tuple(
            _sum(Mul(christoffels[i][j][m], Var(jet_var(m, 1))) for m in range(n))
            for j in range(n)
        )
        for i in range(n)
    )
    return Prolongation(spec, tuple(tuple(r) for r in rows), christoffels, spray, dual1)


def prolong_riemann(spec: BundleSpec, rows, inverse_rows=None) -> Prolongation:
    """Prolongation of a base metric given as a full matrix of Exprs."""
    n = spec.n
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DomainError(f"metric must be {n} x {n}")
    return canonical_prolongation(spec, rows, inverse_rows)


def prolong_finsler(spec: BundleSpec, energy: Expr, inverse_rows=None) -> Prolongation:
    """Prolongation of an energy function via its fractional fibre Hessian."""
    return canonical_prolongation(
        spec, fundamental_tensor(spec, energy, "fractional"), inverse_rows
    )


def prolong_lagrange(
    spec: BundleSpec, L: Expr, semantics: str = "hybrid", inverse_rows=None
) -> Prolongation:
    """Prolongation of a Lagrangian; ``semantics="hybrid"`` (default) reads
    the fibre Hessian classically, ``"fractional"`` matches prolong_finsler."""
    kind = {"hybrid": "classical", "fractional": "fractional"}.get(semantics)
    if kind is None:
        raise DomainError(f"unknown prolongation semantics {semantics!r}")
    return canonical_prolongation(
        spec, fundamental_tensor(spec, L, kind), inverse_rows
    )
