"""The order-k fractional jet bundle over an n-dimensional positive chart.

Coordinates
-----------
A point carries base coordinates x^i (named ``x1..xn``) and fibre ("jet")
coordinates y^{i(a)} for levels a = 1..k (named ``y<i>_<a>``), normalized
against the iterated reviewed derivative of a curve:

    y^{i(a)}(t) = D^(alpha a) x^i(t) / Gamma(1 + alpha a),

where D^(alpha a) is the a-fold order-alpha derivative. Level 0 is the base.

Weight ladder
-------------
The canonical vertical dilation fields and sprays carry rung weights

    w_1 = Gamma(1 + alpha),     w_b = Gamma(alpha b)/Gamma(alpha)  (b >= 2).

Applied uniformly (the default ``WeightConvention.UNIFORM``) they make the
whole structure telescope exactly: the tangent shift J maps the order-a
dilation field onto the order-(a-1) one and maps any spray onto the top
dilation field, at every order. ``WeightConvention.FIRST_ORDER_UNWEIGHTED`` leaves the
order-1 dilation field unweighted, which breaks the telescope by the factor
Gamma(1+alpha) at order 2 — kept so the mismatch can be measured.

Vertical structures
-------------------
* ``liouville_field(spec, a)``: order-a dilation field; occupies slot levels
  k-a+b with coefficient w_b y^{i(b)}, b = 1..a.
* ``tangent_shift``/``tangent_structure_matrix``: the order-alpha tangent
  endomorphism; shifts slot level c to c+1 and kills the top. Nilpotent of
  index k+1 with rank k*n.
* ``spray_field(spec, G)``: slot level a gets w_{a+1} y^{i(a+1)} (a < k) and
  the top slot gets -w_k G^i; any such field satisfies J(S) = top dilation.

Change of charts
----------------
``jet_transform`` prolongs a base coordinate change u(x) to all jet levels:
level 1 is the weighted Jacobian acting on y^{(1)}, and level a >= 2 is

    w_a ybar^{i(a)} = sum_{b=1..a} w_b * Jw(Ybar^{(a-1)}, u^{(b-1)})^i_j y^{j(b)}

where Ybar^{(a-1)} are the already-transformed level-(a-1) expressions,
u^{(0)} = x, u^{(c)} = y^{(c)}, and Jw is the same (.)^(alpha-1)/(.)^(1-alpha)
weighted Jacobian with classical partials. Orders 1 and 2 are exactly
functorial; the order-3 round trip is a measured quantity (see tests).

Nonlinear connections
---------------------
Primal coefficients N^{(b)} define the adapted frame
delta_{(a)j} = D_{(a)j} - sum_b N^{(b)m}_j D_{(a+b)m}; dual coefficients
M^{(b)} define the adapted coframe. The two are related by the triangular
recursion M^{(d)} = N^{(d)} + sum_{f<d} M^{(d-f)} N^{(f)}, inverted exactly by
structural cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .expr import (
    Add,
    Expr,
    Mul,
    Num,
    Var,
    classical_partial,
    evaluate,
    frac_partial,
    normal_form,
    simplify,
)
from .geometry import ChartMap, base_vars, require_invertible, weighted_jacobian_exprs
from .series import FracSeries, frac_derive
from .specfun import gamma

__all__ = [
    "BundleSpec",
    "WeightConvention",
    "rung_weight",
    "JetPoint",
    "jet_lift",
    "BundleField",
    "liouville_field",
    "tangent_shift",
    "tangent_structure_matrix",
    "spray_field",
    "spray_derivation",
    "jet_transform",
    "transform_jet_point",
    "jet_round_trip_residual",
    "PrimalCoefficients",
    "DualCoefficients",
    "primal_to_dual",
    "dual_to_primal",
    "adapted_frame",
    "dual_coframe",
    "pairing_residual",
    "spray_to_dual",
    "transform_primal_first_order",
    "horizontal_transform_residual",
]


@dataclass(frozen=True)
class BundleSpec:
    """Shape of the bundle: n base dimensions, k jet levels, order alpha."""

    n: int
    k: int
    alpha: float

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise DomainError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"order must be in (0, 1], got {self.alpha}")

    def x_names(self) -> tuple[str, ...]:
        return base_vars(self.n)

    def y_names(self, level: int) -> tuple[str, ...]:
        return tuple(f"y{i + 1}_{level}" for i in range(self.n))

    def level_names(self, level: int) -> tuple[str, ...]:
        """Names at slot level 0..k (level 0 = base coordinates)."""
        return self.x_names() if level == 0 else self.y_names(level)

    def all_names(self, upto: int | None = None) -> tuple[str, ...]:
        upto = self.k if upto is None else upto
        out: list[str] = list(self.x_names())
        for a in range(1, upto + 1):
            out.extend(self.y_names(a))
        return tuple(out)

    @property
    def dim(self) -> int:
        return (self.k + 1) * self.n


class WeightConvention(Enum):
    UNIFORM = "uniform"            # rung weights at every order, exact telescope
    FIRST_ORDER_UNWEIGHTED = "first-order-unweighted"  # order-1 dilation field unweighted


def rung_weight(alpha: float, b: int) -> float:
    """Ladder weight w_b: Gamma(1+alpha) at b=1, Gamma(alpha b)/Gamma(alpha) after."""
    if b < 1:
        raise DomainError(f"rung index must be >= 1, got {b}")
    if b == 1:
        return gamma(1.0 + alpha)
    return gamma(alpha * b) / gamma(alpha)


# ------------------------------------------------------------------ points --


@dataclass(frozen=True)
class JetPoint:
    """Numeric point of the bundle; ``y`` may extend past level k when an
    operation (Euler-Lagrange, spray extraction) needs overshoot levels."""

    x: tuple[float, ...]
    y: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def levels(self) -> int:
        return len(self.y)

    def env(self) -> dict[str, float]:
        out = {f"x{i + 1}": v for i, v in enumerate(self.x)}
        for a, level in enumerate(self.y, start=1):
            for i, v in enumerate(level):
                out[f"y{i + 1}_{a}"] = v
        return out

    def flat(self) -> np.ndarray:
        out = list(self.x)
        for level in self.y:
            out.extend(level)
        return np.array(out)


def jet_lift(curves: list[FracSeries], alpha: float, levels: int, t: float) -> JetPoint:
    """Jet of a curve at parameter t: level a is the a-fold order-alpha
    derivative scaled by 1/Gamma(1+alpha*a)."""
    x = tuple(float(c(t)) for c in curves)
    ys = []
    ders = list(curves)
    for a in range(1, levels + 1):
        ders = [frac_derive(d, alpha) for d in ders]
        scale = 1.0 / gamma(1.0 + alpha * a)
        ys.append(tuple(scale * float(d(t)) for d in ders))
    return JetPoint(x, tuple(ys))


# ------------------------------------------------------------------ fields --


@dataclass(frozen=True)
class BundleField:
    """Vector field on the bundle in the natural frame: one coefficient Expr
    per slot, levels 0..k (level 0 multiplies the base-partial slots)."""

    spec: BundleSpec
    coeffs: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.k + 1 or any(
            len(level) != self.spec.n for level in self.coeffs
        ):
            raise DomainError("field needs (k+1) levels of n coefficients")

    def eval_at(self, env: dict[str, float]) -> np.ndarray:
        return np.array([evaluate(c, env) for level in self.coeffs for c in level])

    def is_structurally_zero(self) -> bool:
        return all(
            normal_form(c) == Num(0.0) for level in self.coeffs for c in level
        )


def _zero_level(n: int) -> tuple[Expr, ...]:
    return tuple(Num(0.0) for _ in range(n))


def liouville_field(
    spec: BundleSpec, a: int, convention: WeightConvention = WeightConvention.UNIFORM
) -> BundleField:
    """Order-a vertical dilation field, 1 <= a <= k: slot level k-a+b carries
    w_b y^{i(b)} for b = 1..a (so order 1 populates only the top level)."""
    if not (1 <= a <= spec.k):
        raise DomainError(f"dilation order must be in 1..{spec.k}, got {a}")
    levels: list[tuple[Expr, ...]] = [_zero_level(spec.n) for _ in range(spec.k + 1)]
    for b in range(1, a + 1):
        w = rung_weight(spec.alpha, b)
        if convention is WeightConvention.FIRST_ORDER_UNWEIGHTED and a == 1:
            w = 1.0
        slot = spec.k - a + b
        levels[slot] = tuple(
            simplify(Mul(Num(w), Var(name))) for name in spec.y_names(b)
        )
    return BundleField(spec, tuple(levels))


def tangent_shift(field: BundleField) -> BundleField:
    """Order-alpha tangent endomorphism J: slot level c feeds level c+1, the
    top level is annihilated, the base level of the image is zero."""
    spec = field.spec
    levels = [_zero_level(spec.n)]
    for c in range(spec.k):
        levels.append(field.coeffs[c])
    return BundleField(spec, tuple(levels))


def tangent_structure_matrix(spec: BundleSpec) -> np.ndarray:
    """J as a matrix on natural-frame coefficient vectors (integer 0/1);
    nilpotent of index k+1 and rank k*n."""
    d = spec.dim
    J = np.zeros((d, d), dtype=int)
    for c in range(spec.k):
        for i in range(spec.n):
            J[(c + 1) * spec.n + i, c * spec.n + i] = 1
    return J


def spray_field(
    spec: BundleSpec,
    G: tuple[Expr, ...],
    convention: WeightConvention = WeightConvention.UNIFORM,
) -> BundleField:
    """Second-order-type field with coefficients G^i in the top slot:
    level a < k carries w_{a+1} y^{i(a+1)}, the top level carries -w_k G^i.
    The tangent shift maps any such field onto the top dilation field."""
    if len(G) != spec.n:
        raise DomainError(f"spray needs {spec.n} coefficient expressions")
    levels = []
    for a in range(spec.k):
        w = rung_weight(spec.alpha, a + 1)
        levels.append(
            tuple(simplify(Mul(Num(w), Var(name))) for name in spec.y_names(a + 1))
        )
    wk = rung_weight(spec.alpha, spec.k)
    levels.append(tuple(simplify(Mul(Num(-wk), g)) for g in G))
    return BundleField(spec, tuple(levels))


def spray_derivation(
    spec: BundleSpec,
    G: tuple[Expr, ...],
    convention: WeightConvention = WeightConvention.UNIFORM,
):
    """The scalar derivation of the spray: fractional partials along the base
    (order alpha), classical partials along the fibre levels.

    S(f) = sum_h w_1 y^{h(1)} D^alpha_{x_h} f
         + sum_{b=2..k} sum_h w_b y^{h(b)} d f / d y^{h(b-1)}
         - sum_h w_k G^h d f / d y^{h(k)}.
    """
    if len(G) != spec.n:
        raise DomainError(f"spray needs {spec.n} coefficient expressions")

    def apply(f: Expr) -> Expr:
        pieces: list[Expr] = []
        for h in range(spec.n):
            xh = f"x{h + 1}"
            d = frac_partial(f, xh, spec.alpha)
            pieces.append(Mul(Mul(Num(rung_weight(spec.alpha, 1)),
                                  Var(f"y{h + 1}_1")), d))
        for b in range(2, spec.k + 1):
            w = rung_weight(spec.alpha, b)
            for h in range(spec.n):
                d = classical_partial(f, f"y{h + 1}_{b - 1}")
                pieces.append(Mul(Mul(Num(w), Var(f"y{h + 1}_{b}")), d))
        wk = rung_weight(spec.alpha, spec.k)
        for h in range(spec.n):
            d = classical_partial(f, f"y{h + 1}_{spec.k}")
            pieces.append(Mul(Mul(Num(-wk), G[h]), d))
        out: Expr = Num(0.0)
        for p in pieces:
            out = Add(out, p)
        return normal_form(out)

    return apply


# ------------------------------------------------------------ jet transform --


def jet_transform(cm: ChartMap, spec: BundleSpec) -> list[tuple[Expr, ...]]:
    """Prolong a base chart change to all jet levels; returns levels 0..k as
    tuples of Exprs in the source variables (x and y up to each level)."""
    if cm.n != spec.n:
        raise DomainError(f"chart map dimension {cm.n} != bundle dimension {spec.n}")
    alpha = spec.alpha
    levels: list[tuple[Expr, ...]] = [tuple(cm.components)]
    for a in range(1, spec.k + 1):
        prev = levels[a - 1]
        w_a = rung_weight(alpha, a)
        comps = []
        for i in range(spec.n):
            acc: Expr = Num(0.0)
            for b in range(1, a + 1):
                w_b = rung_weight(alpha, b)
                source_names = spec.level_names(b - 1)
                Jrow = weighted_jacobian_exprs((prev[i],), source_names, alpha)[0]
                for j in range(spec.n):
                    y_b = Var(spec.y_names(b)[j])
                    acc = Add(acc, Mul(Num(w_b / w_a), Mul(Jrow[j], y_b)))
            comps.append(simplify(acc))
        levels.append(tuple(comps))
    return levels


def transform_jet_point(cm: ChartMap, spec: BundleSpec, jp: JetPoint) -> JetPoint:
    """Numeric image of a jet point under the prolonged chart change."""
    if jp.levels < spec.k:
        raise DomainError(f"jet point has {jp.levels} levels, bundle needs {spec.k}")
    env = jp.env()
    levels = jet_transform(cm, spec)
    x = tuple(evaluate(c, env) for c in levels[0])
    ys = tuple(
        tuple(evaluate(c, env) for c in levels[a]) for a in range(1, spec.k + 1)
    )
    return JetPoint(x, ys)


def jet_round_trip_residual(
    forward: ChartMap, inverse: ChartMap, spec: BundleSpec, jp: JetPoint
) -> float:
    """max |inverse-prolongation(forward-prolongation(jp)) - jp|."""
    there = transform_jet_point(forward, spec, jp)
    back = transform_jet_point(inverse, spec, there)
    return float(np.max(np.abs(back.flat() - jp.flat())))


# ------------------------------------------------- connection coefficients --


def _expr_matrix_validate(mats, spec: BundleSpec):
    if len(mats) != spec.k:
        raise DomainError(f"need coefficient matrices for orders 1..{spec.k}")
    for m in mats:
        if len(m) != spec.n or any(len(row) != spec.n for row in m):
            raise DomainError("each coefficient matrix must be n x n")


@dataclass(frozen=True)
class PrimalCoefficients:
    """Adapted-frame (primal) coefficients N^{(b)}, b = 1..k; entry [m][j] is
    the Expr multiplying -D_{(a+b)m} inside delta_{(a)j}."""

    spec: BundleSpec
    mats: tuple[tuple[tuple[Expr, ...], ...], ...]

    def __post_init__(self):
        _expr_matrix_validate(self.mats, self.spec)

    def order(self, b: int):
        return self.mats[b - 1]


@dataclass(frozen=True)
class DualCoefficients:
    """Adapted-coframe (dual) coefficients M^{(b)}, b = 1..k."""

    spec: BundleSpec
    mats: tuple[tuple[tuple[Expr, ...], ...], ...]

    def __post_init__(self):
        _expr_matrix_validate(self.mats, self.spec)

    def order(self, b: int):
        return self.mats[b - 1]


def _mat_mul(A, B, n: int):
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: Expr = Num(0.0)
            for l in range(n):
                acc = Add(acc, Mul(A[i][l], B[l][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_add(A, B, n: int, sign: float = 1.0):
    return tuple(
        tuple(Add(A[i][j], Mul(Num(sign), B[i][j])) for j in range(n))
        for i in range(n)
    )


def _mat_normal(A, n: int):
    return tuple(tuple(normal_form(A[i][j]) for j in range(n)) for i in range(n))


def primal_to_dual(N: PrimalCoefficients) -> DualCoefficients:
    """M^{(d)} = N^{(d)} + sum_{f=1}^{d-1} M^{(d-f)} N^{(f)} (exact)."""
    n, k = N.spec.n, N.spec.k
    M: list = []
    for d in range(1, k + 1):
        acc = N.order(d)
        for f in range(1, d):
            acc = _mat_add(acc, _mat_mul(M[d - f - 1], N.order(f), n), n)
        M.append(_mat_normal(acc, n))
    return DualCoefficients(N.spec, tuple(M))


def dual_to_primal(M: DualCoefficients) -> PrimalCoefficients:
    """Inverse of :func:`primal_to_dual`; exact by structural cancellation."""
    n, k = M.spec.n, M.spec.k
    N: list = []
    for d in range(1, k + 1):
        acc = M.order(d)
        for f in range(1, d):
            acc = _mat_add(acc, _mat_mul(M.order(d - f), N[f - 1], n), n, sign=-1.0)
        N.append(_mat_normal(acc, n))
    return PrimalCoefficients(M.spec, tuple(N))


def _eval_mat(mat, env, n: int) -> np.ndarray:
    return np.array([[evaluate(mat[i][j], env) for j in range(n)] for i in range(n)])


def adapted_frame(spec: BundleSpec, N: PrimalCoefficients, env: dict[str, float]) -> np.ndarray:
    """Rows = adapted fields delta_{(a)j} in natural-frame coordinates.

    Row index r = a*n + j; F[r, (a+b)*n + m] = -N^{(b)}[m][j] for b >= 1."""
    d = spec.dim
    F = np.eye(d)
    for a in range(spec.k + 1):
        for b in range(1, spec.k - a + 1):
            Nb = _eval_mat(N.order(b), env, spec.n)
            for j in range(spec.n):
                for m in range(spec.n):
                    F[a * spec.n + j, (a + b) * spec.n + m] = -Nb[m][j]
    return F


def dual_coframe(spec: BundleSpec, M: DualCoefficients, env: dict[str, float]) -> np.ndarray:
    """Rows = adapted covectors in natural-coframe coordinates.

    Row index r = a*n + j; D[r, (a-b)*n + m] = +M^{(b)}[j][m] for b >= 1."""
    d = spec.dim
    D = np.eye(d)
    for a in range(spec.k + 1):
        for b in range(1, a + 1):
            Mb = _eval_mat(M.order(b), env, spec.n)
            for j in range(spec.n):
                for m in range(spec.n):
                    D[a * spec.n + j, (a - b) * spec.n + m] = Mb[j][m]
    return D


def pairing_residual(spec: BundleSpec, N: PrimalCoefficients, env: dict[str, float]) -> float:
    """max |<adapted coframe, adapted frame> - identity| at a point, with the
    coframe built from primal_to_dual(N)."""
    F = adapted_frame(spec, N, env)
    D = dual_coframe(spec, primal_to_dual(N), env)
    return float(np.max(np.abs(D @ F.T - np.eye(spec.dim))))


def spray_to_dual(
    spec: BundleSpec,
    G: tuple[Expr, ...],
    convention: WeightConvention = WeightConvention.UNIFORM,
) -> DualCoefficients:
    """Dual coefficients generated by a spray:

        M^{(1)i}_j = d G^i / d y^{j(1)}            (classical fibre partial)
        M^{(a+1)}  = [Gamma(alpha a)/Gamma(alpha(a+1))] (S(M^{(a)}) + M^{(1)} M^{(a)})

    with S the spray derivation (fractional along the base, classical along
    the fibres)."""
    n, alpha = spec.n, spec.alpha
    S = spray_derivation(spec, G, convention)
    M1 = tuple(
        tuple(normal_form(classical_partial(G[i], f"y{j + 1}_1")) for j in range(n))
        for i in range(n)
    )
    mats = [M1]
    for a in range(1, spec.k):
        scale = gamma(alpha * a) / gamma(alpha * (a + 1))
        prev = mats[-1]
        derived = tuple(tuple(S(prev[i][j]) for j in range(n)) for i in range(n))
        correction = _mat_mul(M1, prev, n)
        nxt = tuple(
            tuple(
                normal_form(Mul(Num(scale), Add(derived[i][j], correction[i][j])))
                for j in range(n)
            )
            for i in range(n)
        )
        mats.append(nxt)
    return DualCoefficients(spec, tuple(mats))


# ---------------------------------------- first-order chart transformation --


def transform_primal_first_order(
    cm: ChartMap, spec: BundleSpec, N: PrimalCoefficients, jp: JetPoint
) -> np.ndarray:
    """Numeric transformed first-order primal coefficients at the image of jp
    for a k=1 bundle:  Nbar = (Jyy N - Jyx) Jx^{-1}, where Jx, Jyx, Jyy are
    the weighted Jacobian blocks of the prolonged chart change."""
    if spec.k != 1:
        raise DomainError("first-order transformation law needs k = 1")
    env = jp.env()
    levels = jet_transform(cm, spec)
    xs, ys = spec.x_names(), spec.y_names(1)
    Jx = np.array([[evaluate(e, env) for e in row]
                   for row in weighted_jacobian_exprs(levels[0], xs, spec.alpha)])
    Jyx = np.array([[evaluate(e, env) for e in row]
                    for row in weighted_jacobian_exprs(levels[1], xs, spec.alpha)])
    Jyy = np.array([[evaluate(e, env) for e in row]
                    for row in weighted_jacobian_exprs(levels[1], ys, spec.alpha)])
    N1 = _eval_mat(N.order(1), env, spec.n)
    return (Jyy @ N1 - Jyx) @ require_invertible(Jx, "base-block Jacobian")


def horizontal_transform_residual(
    cm: ChartMap, spec: BundleSpec, N: PrimalCoefficients, jp: JetPoint
) -> float:
    """Defect of the horizontal correspondence: the tangent map of the
    prolonged chart change must send each adapted field delta_{x^j} to the
    Jx-combination of the transformed adapted fields."""
    env = jp.env()
    levels = jet_transform(cm, spec)
    xs, ys = spec.x_names(), spec.y_names(1)
    Jx = np.array([[evaluate(e, env) for e in row]
                   for row in weighted_jacobian_exprs(levels[0], xs, spec.alpha)])
    Jyx = np.array([[evaluate(e, env) for e in row]
                    for row in weighted_jacobian_exprs(levels[1], xs, spec.alpha)])
    Jyy = np.array([[evaluate(e, env) for e in row]
                    for row in weighted_jacobian_exprs(levels[1], ys, spec.alpha)])
    N1 = _eval_mat(N.order(1), env, spec.n)
    Nbar = transform_primal_first_order(cm, spec, N, jp)
    # T(delta_j) components: base part Jx[., j], fibre part Jyx[., j] - Jyy N1[., j]
    fibre_image = Jyx - Jyy @ N1
    # Jx-combination of transformed adapted fields: fibre part -Nbar Jx
    expected_fibre = -Nbar @ Jx
    return float(np.max(np.abs(fibre_image - expected_fibre)))
