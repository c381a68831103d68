"""Metrical connection and lifted metric on the order-k fractional bundle.

Given a symmetric metric g_ij (Exprs in the bundle coordinates) and primal
nonlinear-connection coefficients N^{(b)}, the adapted derivations are

    Delta_{x_j}      = D^alpha_{x_j}      - sum_{b,m} N^{(b)m}_j D^alpha_{y^{m(b)}}
    Delta_{y^{i(a)}} = D^alpha_{y^{i(a)}} - sum_{b,m} N^{(b)m}_i D^alpha_{y^{m(a+b)}}

(all partials taken in the reviewed fractional sense along every slot; terms
past level k are dropped). The metrical coefficients are the Levi-Civita-type
combinations

    L^i_{jl}      = 1/2 g^{is} (Delta_{x_j} g_sl + Delta_{x_l} g_js - Delta_{x_s} g_jl)
    C^{(a)i}_{jl} = 1/2 g^{is} (Delta_{y^{j(a)}} g_sl + Delta_{y^{l(a)}} g_js
                                 - Delta_{y^{s(a)}} g_jl)

evaluated numerically at a point. Because every slot of the combination uses
one shared derivation and the metric stores each symmetric entry once, the
compatibility identity (the adapted covariant derivative of g vanishing)
holds algebraically for *any* choice of N; the computed residual only carries
the rounding of the numeric matrix inversion.

The lifted (diagonal-type) metric on the full bundle pairs the adapted
coframe blocks with g on every level: in natural coordinates it is
B^T blockdiag(g, ..., g) B for the coframe matrix B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import BundleSpec, DualCoefficients, PrimalCoefficients, dual_coframe
from .errors import DomainError
from .expr import Add, Expr, Mul, Neg, Num, evaluate, frac_partial, normal_form, to_str

__all__ = [
    "MetricField",
    "MetricalConnection",
    "ConnectionCoefficients",
    "sasaki_lift",
]


@dataclass(frozen=True)
class MetricField:
    """Symmetric metric on the base indices; each entry above the diagonal is
    stored once and aliased below it, so g_ij and g_ji are the same Expr and
    evaluate bitwise identically."""

    spec: BundleSpec
    upper: tuple[tuple[Expr, ...], ...]  # row i holds entries (i, i), ..., (i, n-1)

    def __post_init__(self):
        n = self.spec.n
        if len(self.upper) != n or any(
            len(row) != n - i for i, row in enumerate(self.upper)
        ):
            raise DomainError("metric storage must be the upper triangle, row-major")

    @staticmethod
    def from_matrix(spec: BundleSpec, rows) -> "MetricField":
        """Build from a full n x n matrix of Exprs; the two triangles must be
        structurally equal (after normalization) and only the upper one is kept."""
        n = spec.n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DomainError(f"metric must be {n} x {n}")
        for i in range(n):
            for j in range(i + 1, n):
                if to_str(normal_form(rows[i][j])) != to_str(normal_form(rows[j][i])):
                    raise DomainError(
                        f"metric entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ"
                    )
        return MetricField(
            spec, tuple(tuple(rows[i][j] for j in range(i, n)) for i in range(n))
        )

    def entry(self, i: int, j: int) -> Expr:
        if i > j:
            i, j = j, i
        return self.upper[i][j - i]

    def evaluate_at(self, env: dict[str, float]) -> np.ndarray:
        n = self.spec.n
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = evaluate(self.entry(i, j), env)
        return g

    def inverse_at(self, env: dict[str, float]) -> np.ndarray:
        g = self.evaluate_at(env)
        try:
            ginv = np.linalg.inv(g)
        except np.linalg.LinAlgError:
            raise DomainError("metric is singular at the evaluation point") from None
        return 0.5 * (ginv + ginv.T)


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Numeric coefficients at a point: L[i,j,l] = L^i_{jl} for the base
    directions and C[a-1][i,j,l] = C^{(a)i}_{jl} for fibre level a."""

    L: np.ndarray
    C: tuple[np.ndarray, ...]


def _sum_exprs(pieces: list[Expr]) -> Expr:
    out: Expr = Num(0.0)
    for p in pieces:
        out = Add(out, p)
    return normal_form(out)


@dataclass(frozen=True)
class MetricalConnection:
    spec: BundleSpec
    metric: MetricField
    primal: PrimalCoefficients

    def __post_init__(self):
        if self.metric.spec != self.spec or self.primal.spec != self.spec:
            raise DomainError("metric / coefficients built for a different bundle")

    # -- adapted derivations --------------------------------------------------

    def delta_x(self, f: Expr, j: int) -> Expr:
        """Delta along the j-th base direction (0-indexed)."""
        spec = self.spec
        pieces = [frac_partial(f, f"x{j + 1}", spec.alpha)]
        for b in range(1, spec.k + 1):
            Nb = self.primal.order(b)
            for m in range(spec.n):
                d = frac_partial(f, f"y{m + 1}_{b}", spec.alpha)
                pieces.append(Neg(Mul(Nb[m][j], d)))
        return _sum_exprs(pieces)

    def delta_y(self, f: Expr, a: int, i: int) -> Expr:
        """Delta along fibre direction y^{i(a)} (level a in 1..k, i 0-indexed)."""
        spec = self.spec
        if not (1 <= a <= spec.k):
            raise DomainError(f"fibre level must be in 1..{spec.k}, got {a}")
        pieces = [frac_partial(f, f"y{i + 1}_{a}", spec.alpha)]
        for b in range(1, spec.k - a + 1):
            Nb = self.primal.order(b)
            for m in range(spec.n):
                d = frac_partial(f, f"y{m + 1}_{a + b}", spec.alpha)
                pieces.append(Neg(Mul(Nb[m][i], d)))
        return _sum_exprs(pieces)

    # -- coefficients at a point ----------------------------------------------

    def _delta_metric_x(self, env) -> np.ndarray:
        """Dg[j, s, l] = (Delta_{x_j} g_sl)(env); symmetric in (s, l)."""
        n = self.spec.n
        out = np.empty((n, n, n))
        for s in range(n):
            for l in range(s, n):
                g_sl = self.metric.entry(s, l)
                for j in range(n):
                    v = evaluate(self.delta_x(g_sl, j), env)
                    out[j, s, l] = out[j, l, s] = v
        return out

    def _delta_metric_y(self, a: int, env) -> np.ndarray:
        n = self.spec.n
        out = np.empty((n, n, n))
        for s in range(n):
            for l in range(s, n):
                g_sl = self.metric.entry(s, l)
                for j in range(n):
                    v = evaluate(self.delta_y(g_sl, a, j), env)
                    out[j, s, l] = out[j, l, s] = v
        return out

    @staticmethod
    def _levi_civita(ginv: np.ndarray, Dg: np.ndarray) -> np.ndarray:
        # B[s,j,l] = Dg[j,s,l] + Dg[l,j,s] - Dg[s,j,l]; K = 1/2 g^{-1} B
        B = Dg.transpose(1, 0, 2) + Dg.transpose(2, 1, 0) - Dg
        return 0.5 * np.einsum("is,sjl->ijl", ginv, B)

    def coefficients_at(self, env: dict[str, float]) -> ConnectionCoefficients:
        ginv = self.metric.inverse_at(env)
        L = self._levi_civita(ginv, self._delta_metric_x(env))
        C = tuple(
            self._levi_civita(ginv, self._delta_metric_y(a, env))
            for a in range(1, self.spec.k + 1)
        )
        return ConnectionCoefficients(L, C)

    # -- compatibility and covariant derivative --------------------------------

    def metricity_residual(self, env: dict[str, float]) -> float:
        """max over all adapted directions of the covariant derivative of g;
        zero up to inversion rounding for any primal coefficients."""
        g = self.metric.evaluate_at(env)
        coeff = self.coefficients_at(env)
        worst = _nabla_g_norm(g, self._delta_metric_x(env), coeff.L)
        for a in range(1, self.spec.k + 1):
            worst = max(
                worst, _nabla_g_norm(g, self._delta_metric_y(a, env), coeff.C[a - 1])
            )
        return worst

    def covariant_derivative_x(self, tensor, env: dict[str, float]) -> np.ndarray:
        """Adapted covariant derivative of a covariant tensor (nested tuples of
        Exprs, any rank >= 1) along the base directions; returns the numeric
        components with the new direction index first:

            out[m, i1, ..., ir] = (Delta_m T)_{i1..ir}
                                  - sum_q L^s_{i_q m} T_{i1 .. s .. ir}.
        """
        n = self.spec.n
        shape = _shape(tensor, n)
        flat = list(_flatten(tensor))
        comps = np.array([evaluate(c, env) for c in flat]).reshape(shape)
        rank = comps.ndim
        L = self.coefficients_at(env).L
        out = np.empty((n,) + shape)
        for m in range(n):
            d = np.array(
                [evaluate(self.delta_x(c, m), env) for c in flat]
            ).reshape(shape)
            for q in range(rank):
                corr = np.tensordot(L[:, :, m], comps, axes=([0], [q]))
                d = d - np.moveaxis(corr, 0, q)
            out[m] = d
        return out


def _nabla_g_norm(g: np.ndarray, Dg: np.ndarray, K: np.ndarray) -> float:
    # resid[i,j,m] = Dg[m,i,j] - K^s_{im} g_sj - K^s_{jm} g_is
    term1 = np.einsum("sj,sim->ijm", g, K)
    term2 = np.einsum("is,sjm->ijm", g, K)
    resid = np.einsum("mij->ijm", Dg) - term1 - term2
    return float(np.max(np.abs(resid)))


def _flatten(tensor):
    if isinstance(tensor, (tuple, list)):
        for t in tensor:
            yield from _flatten(t)
    else:
        yield tensor


def _shape(tensor, n: int) -> tuple[int, ...]:
    shape = []
    t = tensor
    while isinstance(t, (tuple, list)):
        if len(t) != n:
            raise DomainError("tensor components must have extent n in every slot")
        shape.append(len(t))
        t = t[0]
    return tuple(shape)


def sasaki_lift(
    spec: BundleSpec,
    metric: MetricField,
    dual: DualCoefficients,
    env: dict[str, float],
) -> np.ndarray:
    """Lifted metric on the full bundle in natural coordinates: the adapted
    coframe pairs each level with g, so the matrix is B^T blockdiag(g,...,g) B
    for the coframe matrix B. For k = 1, n = 1, g = 1 and dual coefficient m
    this is [[1 + m^2, m], [m, 1]]."""
    if metric.spec != spec or dual.spec != spec:
        raise DomainError("metric / coefficients built for a different bundle")
    B = dual_coframe(spec, dual, env)
    g = metric.evaluate_at(env)
    blocks = np.kron(np.eye(spec.k + 1), g)
    lifted = B.T @ blocks @ B
    return 0.5 * (lifted + lifted.T)
