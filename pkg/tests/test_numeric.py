"""Tests for the discretization layer (GL, L1, integration by parts, solver)."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracosc.errors import DomainError
from fracosc.numeric import (
    FodeResult,
    convergence_order,
    gl_derivative,
    gl_weights,
    int_by_parts_residual,
    l1_derivative,
    solve_fode,
)
from fracosc.series import FracSeries
from fracosc.specfun import gen_binomial, mittag_leffler


def _exact_power_derivative(g, alpha, t):
    return math.gamma(1 + g) / math.gamma(1 + g - alpha) * t ** (g - alpha)


# ------------------------------------------------------------------ weights

@given(st.floats(min_value=0.05, max_value=1.0), st.integers(min_value=0, max_value=80))
def test_gl_weights_are_signed_binomials(alpha, j):
    w = gl_weights(alpha, j)
    assert w[j] == pytest.approx((-1.0) ** j * gen_binomial(alpha, j), rel=1e-10, abs=1e-15)


def test_gl_weights_partial_sums_positive():
    # sum_{j<=n} w_j = C(alpha-1, n)*(-1)^n > 0 for 0<alpha<1
    w = gl_weights(0.5, 60)
    sums = np.cumsum(w)
    assert np.all(sums > 0)


# ------------------------------------------------------------- GL / L1 rates

def test_gl_matches_power_rule_and_is_first_order():
    alpha = 0.6
    errs, hs = [], []
    for n in (128, 256, 512):
        t = np.linspace(0, 1, n + 1)
        approx = gl_derivative(t**2, alpha, 1 / n)
        errs.append(np.max(np.abs(approx - _exact_power_derivative(2, alpha, t))))
        hs.append(1 / n)
    assert abs(convergence_order(errs, hs) - 1.0) < 0.2


def test_l1_matches_power_rule_at_two_minus_alpha():
    alpha = 0.6
    errs, hs = [], []
    for n in (128, 256, 512):
        t = np.linspace(0, 1, n + 1)
        approx = l1_derivative(t**2, alpha, 1 / n)
        errs.append(np.max(np.abs(approx - _exact_power_derivative(2, alpha, t))))
        hs.append(1 / n)
    assert abs(convergence_order(errs, hs) - (2.0 - alpha)) < 0.2


def test_gl_annihilates_constants_exactly():
    out = gl_derivative(np.full(64, 3.7), 0.5, 0.01)
    assert np.all(out == 0.0)


def test_right_derivative_mirrors_left():
    t = np.linspace(0, 1, 201)
    f = t**1.5
    left = gl_derivative(f, 0.4, 0.005, side="left")
    right = gl_derivative(f[::-1], 0.4, 0.005, side="right")
    np.testing.assert_allclose(right, left[::-1], rtol=0, atol=0)


def test_first_node_is_zero_for_both_schemes():
    f = np.linspace(0, 1, 11) ** 1.2
    assert gl_derivative(f, 0.3, 0.1)[0] == 0.0
    assert l1_derivative(f, 0.3, 0.1)[0] == 0.0


@pytest.mark.parametrize("bad", [0.0, -0.3, 1.5])
def test_order_validation(bad):
    with pytest.raises(DomainError):
        gl_derivative([0.0, 1.0], bad, 0.1)


# ------------------------------------------------------ integration by parts

def test_int_by_parts_residual_halves_under_refinement():
    f1 = FracSeries([(1.0, 0.7), (-1.0, 2.0)])  # vanishes at b = 1
    f2 = FracSeries([(1.0, 1.3), (2.0, 0.6)])   # vanishes at 0
    r200 = int_by_parts_residual(f1, f2, 0.5, 1.0, 200)
    r400 = int_by_parts_residual(f1, f2, 0.5, 1.0, 400)
    assert r200 / r400 >= 1.5
    assert r400 < 1e-3


def test_int_by_parts_preconditions():
    good_f1 = FracSeries([(1.0, 0.7), (-1.0, 2.0)])
    good_f2 = FracSeries([(1.0, 1.3)])
    with pytest.raises(DomainError):  # f2 has a constant term
        int_by_parts_residual(good_f1, FracSeries([(1.0, 0.0), (1.0, 1.0)]), 0.5, 1.0, 50)
    with pytest.raises(DomainError):  # f1 does not vanish at b
        int_by_parts_residual(FracSeries([(1.0, 2.0)]), good_f2, 0.5, 1.0, 50)


# ------------------------------------------------------------------- solver

def test_solver_reproduces_mittag_leffler_eigenfunction():
    res = solve_fode(lambda t, x: x, [1.0], 0.5, 1.0, 1e-3)
    target = mittag_leffler(0.5, 1.0)
    assert isinstance(res, FodeResult)
    assert res.x[-1, 0] == pytest.approx(target, abs=5e-3)
    # whole-trajectory check against E_alpha(t^alpha)
    ref = np.array([mittag_leffler(0.5, ti**0.5) for ti in res.t])
    assert np.max(np.abs(res.x[:, 0] - ref)) < 5e-3


def test_solver_alpha_one_reduces_to_classical_exponential():
    res = solve_fode(lambda t, x: -x, [2.0], 1.0, 1.0, 1e-3)
    assert res.x[-1, 0] == pytest.approx(2.0 * math.exp(-1.0), abs=1e-4)


def test_solver_handles_systems():
    # D^alpha (x, y) = (y, -x): fractional oscillator; energy-ish sanity only
    res = solve_fode(lambda t, x: np.array([x[1], -x[0]]), [1.0, 0.0], 0.9, 2.0, 1e-3)
    assert res.x.shape == (2001, 2)
    assert np.all(np.isfinite(res.x))


def test_solver_order_is_one_plus_alpha_ish():
    alpha = 0.5
    target = mittag_leffler(alpha, 1.0)
    errs, hs = [], []
    for h in (1 / 100, 1 / 200, 1 / 400):
        r = solve_fode(lambda t, x: x, [1.0], alpha, 1.0, h)
        errs.append(abs(r.x[-1, 0] - target))
        hs.append(h)
    assert 1.0 < convergence_order(errs, hs) < 2.0


def test_solver_input_validation():
    with pytest.raises(DomainError):
        solve_fode(lambda t, x: x, [1.0], 0.5, 1.0, -0.1)
    with pytest.raises(DomainError):
        solve_fode(lambda t, x: x, [1.0], 0.5, 0.001, 0.1)


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.2, max_value=1.0))
def test_solver_zero_rhs_stays_put(alpha):
    res = solve_fode(lambda t, x: np.zeros_like(x), [1.5, -2.0], alpha, 0.5, 0.01)
    assert np.max(np.abs(res.x - np.array([1.5, -2.0]))) < 1e-12
