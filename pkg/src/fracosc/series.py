"""Exact calculus on finite fractional-power series  f(t) = sum_i c_i t^{e_i}.

This is the symbolic backbone of the package: the reviewed fractional
derivative acts on such series *exactly* through the power rule

    D^nu [t^g] = Gamma(1+g)/Gamma(1+g-nu) * t^(g-nu),        g >= nu,
    D^nu [t^0] = 0                                            (nu > 0),

where "reviewed" means the operator is applied to f - f(base), so constants
are annihilated and the result agrees with the Caputo derivative for smooth f
and 0 < nu <= 1. Negative nu is the corresponding fractional *integral* (same
gamma-ratio formula, always admissible for exponents > -1).

Admissibility: exponents strictly between 0 and nu are rejected with
DomainError -- the power rule would produce a t^(negative) singularity that
the reviewed operator is defined to exclude.

Exponents live on a float lattice; after differentiation an exponent within
EXP_SNAP of zero is snapped to exactly 0.0 so iterated derivatives of
t^(a*m) hit the constant-annihilation branch despite rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EvalError
from .specfun import gamma, gamma_ratio, gen_binomial

__all__ = [
    "FracSeries",
    "frac_derive",
    "frac_derive_iterated",
    "classical_derive",
    "semigroup_residual",
    "leibniz_series",
    "ml_reconstruct",
    "series_distance",
    "definite_integral",
    "ml_series",
]

#: exponents closer to an admissibility boundary than this are snapped to it
EXP_SNAP = 1e-12


def _snap(e: float) -> float:
    return 0.0 if abs(e) < EXP_SNAP else e


@dataclass(frozen=True)
class FracSeries:
    """Finite sum of real-power terms, canonically sorted by exponent.

    terms: tuple of (coefficient, exponent); exponents unique and ascending.
    The domain is t >= 0 (t > 0 where negative exponents are present).
    """

    terms: tuple[tuple[float, float], ...]

    def __init__(self, terms):
        merged: dict[float, float] = {}
        for c, e in terms:
            e = _snap(float(e))
            merged[e] = merged.get(e, 0.0) + float(c)
        clean = sorted(((c, e) for e, c in merged.items() if c != 0.0), key=lambda t: t[1])
        object.__setattr__(self, "terms", tuple(clean))

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def monomial(coeff: float, exponent: float) -> "FracSeries":
        return FracSeries([(coeff, exponent)])

    @staticmethod
    def zero() -> "FracSeries":
        return FracSeries([])

    # -- ring operations ------------------------------------------------------

    def __add__(self, other: "FracSeries") -> "FracSeries":
        return FracSeries(list(self.terms) + list(other.terms))

    def __sub__(self, other: "FracSeries") -> "FracSeries":
        return self + other.scaled(-1.0)

    def __neg__(self) -> "FracSeries":
        return self.scaled(-1.0)

    def scaled(self, c: float) -> "FracSeries":
        return FracSeries([(c * ci, ei) for ci, ei in self.terms])

    def __mul__(self, other: "FracSeries") -> "FracSeries":
        out = []
        for c1, e1 in self.terms:
            for c2, e2 in other.terms:
                out.append((c1 * c2, e1 + e2))
        return FracSeries(out)

    # -- queries --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_at(self, exponent: float, tol: float = EXP_SNAP) -> float:
        for c, e in self.terms:
            if abs(e - exponent) <= tol:
                return c
        return 0.0

    def value_at_origin(self) -> float:
        """f(0+): the constant term (positive powers vanish)."""
        return self.coefficient_at(0.0)

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """Evaluate at scalar or ndarray t >= 0."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0.0):
            raise EvalError("fractional-power series require t >= 0")
        out = np.zeros_like(arr)
        for c, e in self.terms:
            if e == 0.0:
                out = out + c
            elif e < 0.0:
                if np.any(arr == 0.0):
                    raise EvalError(f"t=0 with negative exponent {e}")
                out = out + c * arr**e
            else:
                # 0**positive is fine and equals 0
                out = out + c * np.where(arr > 0, arr, 0.0) ** e
        return float(out) if np.isscalar(t) or out.ndim == 0 else out

    # -- serialization ---------------------------------------------------------

    def to_json_text(self) -> str:
        """JSON array of [coefficient, exponent] pairs, ascending exponents."""
        return json.dumps([[c, e] for c, e in self.terms])

    @staticmethod
    def from_json_text(text: str) -> "FracSeries":
        try:
            data = json.loads(text)
            return FracSeries([(float(c), float(e)) for c, e in data])
        except (ValueError, TypeError) as exc:
            raise DomainError(f"bad series text {text!r}: {exc}") from None


def frac_derive(f: FracSeries, nu: float) -> FracSeries:
    """Reviewed fractional derivative (nu > 0) / integral (nu < 0) of order nu.

    Constants are annihilated for nu > 0 (reviewed convention); exponents in
    the open interval (0, nu) raise DomainError. nu = 0 returns f unchanged.
    """
    if nu == 0.0:
        return f
    out = []
    for c, e in f.terms:
        if nu > 0.0:
            if e == 0.0:
                continue  # reviewed operator kills constants
            if e < nu - EXP_SNAP:
                raise DomainError(
                    f"exponent {e} below derivative order {nu} (and nonzero): "
                    "fractional power rule inadmissible"
                )
        new_e = _snap(e - nu)
        coeff = c * gamma_ratio(1.0 + e, 1.0 + new_e)
        out.append((coeff, new_e))
    return FracSeries(out)


def frac_derive_iterated(f: FracSeries, alpha: float, times: int) -> FracSeries:
    """Apply the reviewed order-alpha derivative ``times`` times."""
    if times < 0:
        raise DomainError(f"iteration count must be >= 0, got {times}")
    for _ in range(times):
        f = frac_derive(f, alpha)
    return f


def classical_derive(f: FracSeries, times: int = 1) -> FracSeries:
    """Ordinary derivative d/dt applied ``times`` times (exact on powers)."""
    for _ in range(times):
        f = FracSeries([(c * e, e - 1.0) for c, e in f.terms if e != 0.0])
    return f


def semigroup_residual(f: FracSeries, alpha: float, beta: float) -> float:
    """max |D^beta f  -  D^alpha (D^(beta-alpha) f)| over matched terms.

    Preconditions: 0 < alpha < beta <= 1 and every exponent of f is 0 or
    >= beta (so both factorizations are admissible).
    """
    if not (0.0 < alpha < beta <= 1.0):
        raise DomainError(f"need 0 < alpha < beta <= 1, got {alpha}, {beta}")
    direct = frac_derive(f, beta)
    split = frac_derive(frac_derive(f, beta - alpha), alpha)
    return series_distance(direct, split)


def series_distance(a: FracSeries, b: FracSeries, exp_tol: float = 1e-9) -> float:
    """max coefficient discrepancy after matching exponents within exp_tol."""
    worst = 0.0
    used = [False] * len(b.terms)
    for c1, e1 in a.terms:
        hit = None
        for j, (c2, e2) in enumerate(b.terms):
            if not used[j] and abs(e1 - e2) <= exp_tol:
                hit = j
                break
        if hit is None:
            worst = max(worst, abs(c1))
        else:
            used[hit] = True
            worst = max(worst, abs(c1 - b.terms[hit][0]))
    for j, (c2, _) in enumerate(b.terms):
        if not used[j]:
            worst = max(worst, abs(c2))
    return worst


def leibniz_series(f1: FracSeries, f2: FracSeries, alpha: float, K: int) -> FracSeries:
    """Truncated fractional product rule
    sum_{k=0}^{K} C(alpha, k) * D^(alpha-k) f1 * (d/dt)^k f2.

    For k >= 1 the order alpha-k is negative, i.e. those factors are
    fractional *integrals* of f1. If f2 is a polynomial the classical
    derivatives terminate and the truncated sum is exact once K exceeds its
    degree; otherwise the caller owns the truncation error (empirically
    ~K^-2 for half-power pairs). Very large K (>~300) produces terms whose
    evaluation can overflow for t > 1 even though their coefficients are
    negligible; stay in the K <= 200 operating range.
    """
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    total = FracSeries.zero()
    d2 = f2
    for k in range(K + 1):
        if d2.is_zero and k > 0:
            break  # classical derivatives terminated: sum is exact
        coeff = gen_binomial(alpha, k)
        total = total + (frac_derive(f1, alpha - k) * d2).scaled(coeff)
        d2 = classical_derive(d2)
    return total


def ml_reconstruct(f: FracSeries, alpha: float, H: int) -> FracSeries:
    """Rebuild f from its fractional jet at the origin:

        sum_{h=0}^{H}  t^(alpha h) / Gamma(1 + alpha h) * (D^(alpha h) f)(0+)

    where D^(alpha h) is the h-fold reviewed derivative of order alpha. Exact
    (up to rounding) when every exponent of f is alpha*m with m <= H.
    """
    out = []
    jet = f
    for h in range(H + 1):
        c = jet.value_at_origin()
        if c != 0.0:
            out.append((c / gamma(1.0 + alpha * h), alpha * h))
        jet = frac_derive(jet, alpha)
    return FracSeries(out)


def definite_integral(f: FracSeries, b: float) -> float:
    """Exact integral of f over [0, b]: sum c * b^(e+1)/(e+1)."""
    if b < 0:
        raise DomainError(f"integration endpoint must be >= 0, got {b}")
    total = 0.0
    for c, e in f.terms:
        if e <= -1.0:
            raise DomainError(f"exponent {e} not integrable at 0")
        total += c * b ** (e + 1.0) / (e + 1.0)
    return total


def ml_series(alpha: float, n_terms: int) -> FracSeries:
    """Truncation of E_alpha(t^alpha) = sum_m t^(alpha m)/Gamma(1+alpha m).

    Useful as an exact eigenfunction fragment: D^alpha applied to the
    truncation reproduces it up to the dropped tail term.
    """
    return FracSeries([(1.0 / gamma(1.0 + alpha * m), alpha * m) for m in range(n_terms)])
