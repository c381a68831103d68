"""Scalar special functions: gamma, generalized binomials, Mittag-Leffler.

The gamma function itself is delegated to :func:`math.gamma` (platform libm,
~1 ulp); this module adds the domain policy the rest of the package relies on
(poles raise :class:`~fracosc.errors.DomainError` instead of ``ValueError``)
plus the two series-based functions the calculus layer needs.

Conventions
-----------
* ``gen_binomial(alpha, k)`` is the generalized binomial coefficient
  ``C(alpha, k) = alpha (alpha-1) ... (alpha-k+1) / k!`` computed by the
  stable multiplicative recursion, valid for any real ``alpha``.
* ``mittag_leffler(alpha, z)`` is the one-parameter function
  ``E_alpha(z) = sum_m z^m / Gamma(1 + alpha m)`` summed directly with a
  tail-based stopping rule; it refuses to silently return garbage when the
  requested tolerance was not reached (raises AccuracyError).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AccuracyError, DomainError

__all__ = ["gamma", "gamma_ratio", "gen_binomial", "MLParams", "mittag_leffler"]


def gamma(x: float) -> float:
    """Gamma function with poles mapped to DomainError.

    ``math.gamma`` raises ``ValueError`` both at the poles (x = 0, -1, -2, ...)
    and nowhere else on the reals, so translating that exception is enough.
    """
    try:
        return math.gamma(x)
    except ValueError:
        raise DomainError(f"gamma pole at x={x!r}") from None
    except OverflowError:
        raise DomainError(f"gamma overflow at x={x!r}") from None


def gamma_ratio(top: float, bottom: float) -> float:
    """Gamma(top)/Gamma(bottom) with the pole policy of :func:`gamma`.

    For large positive arguments the ratio is formed in log space so that a
    huge denominator underflows cleanly to 0.0 instead of tripping the
    intermediate overflow of Gamma alone (arguments beyond ~171).
    """
    if (top > 170.0 or bottom > 170.0) and top > 0.0 and bottom > 0.0:
        try:
            return math.exp(math.lgamma(top) - math.lgamma(bottom))
        except OverflowError:
            raise DomainError(
                f"gamma ratio overflow: Gamma({top})/Gamma({bottom})"
            ) from None
    return gamma(top) / gamma(bottom)


def gen_binomial(alpha: float, k: int) -> float:
    """Generalized binomial coefficient C(alpha, k) for integer k >= 0.

    Uses the recursion C(alpha, 0) = 1, C(alpha, j) = C(alpha, j-1) *
    (alpha - j + 1)/j, which is well defined for every real alpha (no gamma
    poles to dodge) and numerically stable: each factor is O(1) for j > alpha.
    """
    if k < 0:
        raise DomainError(f"binomial order must be >= 0, got {k}")
    out = 1.0
    for j in range(1, k + 1):
        out *= (alpha - j + 1) / j
    return out


@dataclass(frozen=True)
class MLParams:
    """Tuning knobs for the Mittag-Leffler series evaluation.

    max_terms: hard cap on summed terms before giving up.
    tol:       relative tail tolerance; summation stops once the current term
               is below ``tol * max(1, |partial sum|)`` *and* terms have
               entered their decreasing regime.
    """

    max_terms: int = 600
    tol: float = 1e-15


def mittag_leffler(alpha: float, z: float, params: MLParams | None = None) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z) by direct summation.

    Entire in z for alpha > 0; the series is summed until the term magnitude
    falls below the relative tolerance after the terms have started to
    decrease (for |z| > 1 the early terms grow before factorial decay wins).
    Raises AccuracyError if ``params.max_terms`` terms were not enough --
    callers must never receive a silently unconverged value.
    """
    if alpha <= 0:
        raise DomainError(f"mittag_leffler requires alpha > 0, got {alpha}")
    p = params or MLParams()
    total = 0.0
    prev = math.inf
    zm = 1.0  # z^m
    for m in range(p.max_terms):
        term = zm / gamma(1.0 + alpha * m)
        total += term
        if abs(term) <= p.tol * max(1.0, abs(total)) and abs(term) <= prev:
            return total
        prev = abs(term)
        zm *= z
    raise AccuracyError(
        f"mittag_leffler(alpha={alpha}, z={z}) did not converge within "
        f"{p.max_terms} terms (last |term|={abs(term):.3e})"
    )
