"""Tests for charts, fractional Jacobians, and the exterior derivative."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fracosc.errors import DomainError
from fracosc.expr import Mul, Num, Pow, Var, parse
from fracosc.geometry import (
    ChartMap,
    frac_exterior_d0,
    frac_exterior_d1,
    frac_jacobian,
    frac_jacobian_gamma_form,
    jacobian_form_discrepancy,
    jacobian_identity_residual,
)


def _monomial_map(coeffs, P):
    """Map components c_i * prod_j xj^P[i][j] as a ChartMap."""
    comps = []
    for c, row in zip(coeffs, P):
        e = Num(float(c))
        for j, p in enumerate(row):
            if p != 0:
                e = Mul(e, Pow(Var(f"x{j + 1}"), float(p)))
        comps.append(e)
    return ChartMap(tuple(comps))


def _monomial_inverse(coeffs, P):
    """Exact inverse of a monomial map: exponent matrix P^-1, coefficients
    prod_i c_i^(-Q[j][i])."""
    Q = np.linalg.inv(np.asarray(P, dtype=float))
    n = len(coeffs)
    comps = []
    for j in range(n):
        scale = 1.0
        for i in range(n):
            scale *= coeffs[i] ** (-Q[j][i])
        e = Num(scale)
        for i in range(n):
            if Q[j][i] != 0.0:
                e = Mul(e, Pow(Var(f"x{i + 1}"), float(Q[j][i])))
        comps.append(e)
    return ChartMap(tuple(comps))


# ------------------------------------------------------------- Jacobians

def test_dilation_by_two_gives_two_to_alpha():
    alpha = 0.3
    fwd = ChartMap((parse("2*x1"),))
    inv = ChartMap((parse("0.5*x1"),))
    J = frac_jacobian(fwd, alpha, [1.0])
    assert J[0, 0] == pytest.approx(2.0**alpha, rel=1e-14)
    Jb = frac_jacobian(inv, alpha, [2.0])  # at the image point
    assert Jb[0, 0] == pytest.approx(2.0**-alpha, rel=1e-14)
    assert jacobian_identity_residual(fwd, inv, alpha, [1.0]) < 1e-14


def test_identity_map_gives_identity_matrix():
    cm = ChartMap((parse("x1"), parse("x2")))
    J = frac_jacobian(cm, 0.7, [1.3, 0.4])
    np.testing.assert_allclose(J, np.eye(2), atol=1e-15)


def test_alpha_one_reduces_to_classical_jacobian():
    cm = ChartMap((parse("x1^2*x2"), parse("3*x2")))
    pt = [1.2, 0.7]
    J = frac_jacobian(cm, 1.0, pt)
    classical = np.array([[2 * 1.2 * 0.7, 1.2**2], [0.0, 3.0]])
    np.testing.assert_allclose(J, classical, rtol=1e-12)


@settings(max_examples=60)
@given(st.data())
def test_monomial_map_product_identity(data):
    n = data.draw(st.integers(min_value=1, max_value=3))
    alpha = data.draw(st.floats(min_value=0.1, max_value=1.0))
    P = data.draw(
        st.lists(
            st.lists(st.integers(min_value=-2, max_value=3), min_size=n, max_size=n),
            min_size=n, max_size=n))
    assume(abs(np.linalg.det(np.asarray(P, dtype=float))) > 0.5)
    coeffs = data.draw(
        st.lists(st.floats(min_value=0.25, max_value=4.0), min_size=n, max_size=n))
    point = data.draw(
        st.lists(st.floats(min_value=0.3, max_value=3.0), min_size=n, max_size=n))
    fwd = _monomial_map(coeffs, P)
    inv = _monomial_inverse(coeffs, P)
    assert jacobian_identity_residual(fwd, inv, alpha, point) < 1e-7


def test_weighted_jacobian_is_functorial_under_composition():
    # J(u∘v, x) = J(u, v)|_{v(x)} . J(v, x): the fibre weights telescope.
    alpha = 0.45
    v = ChartMap((parse("x1^2"), parse("x1*x2")))
    u = ChartMap((parse("x2"), parse("x1^3")))
    x = np.array([1.3, 0.8])
    vx = v.apply(x)
    composed = ChartMap((parse("x1*x2"), parse("x1^6")))  # u(v(x)) expanded
    np.testing.assert_allclose(
        frac_jacobian(composed, alpha, x),
        frac_jacobian(u, alpha, vx) @ frac_jacobian(v, alpha, x),
        rtol=1e-12,
    )


def test_positivity_guards():
    cm = ChartMap((parse("x1 - 2"),))
    with pytest.raises(DomainError):
        frac_jacobian(cm, 0.5, [1.0])  # image -1 < 0
    with pytest.raises(DomainError):
        frac_jacobian(ChartMap((parse("x1"),)), 0.5, [-1.0])


def test_chart_map_validation():
    with pytest.raises(DomainError):
        ChartMap((parse("x1 + x3"),))  # x3 not a source variable of a 1d map


# ------------------------------------------------- gamma-form cross-check

def test_gamma_form_agrees_on_linear_maps():
    cm = ChartMap((parse("2*x1"), parse("x1 + 3*x2")))
    # linear but non-monomial second row: restrict to the monomial first row
    lin = ChartMap((parse("2*x1"), parse("3*x2")))
    assert jacobian_form_discrepancy(lin, 0.4, [1.1, 0.9]) < 1e-12


def test_gamma_form_disagrees_on_curved_monomials():
    alpha = 0.4
    cm = ChartMap((parse("x1^2"),))
    x = 1.0
    got = jacobian_form_discrepancy(cm, alpha, [x])
    predicted = abs(
        2.0 - math.gamma(1 + 2 * alpha) / (math.gamma(1 + alpha) ** 2)
    ) * x ** alpha
    assert got == pytest.approx(predicted, rel=1e-12)
    assert got > 0.05  # genuinely different: the closed form is the primitive


def test_gamma_form_rejects_non_monomial_components():
    with pytest.raises(DomainError):
        frac_jacobian_gamma_form(ChartMap((parse("x1 + x1^2"),)), 0.5, [1.0])


# ------------------------------------------------------ exterior derivative

def test_d0_components_are_fractional_partials():
    alpha = 0.5
    f = parse("x1^1.5*x2")
    om = frac_exterior_d0(f, 2, alpha)
    c0 = om.component_expr(0)
    env = {"x1": 1.7, "x2": 0.6}
    from fracosc.expr import evaluate, frac_partial

    assert evaluate(c0, env) == pytest.approx(
        evaluate(frac_partial(f, "x1", alpha), env), rel=1e-14)


@settings(max_examples=100)
@given(st.data())
def test_d_of_d_is_structurally_zero(data):
    n = data.draw(st.integers(min_value=2, max_value=3))
    alpha = data.draw(st.floats(min_value=0.1, max_value=0.9))
    n_terms = data.draw(st.integers(min_value=1, max_value=4))
    terms = []
    for _ in range(n_terms):
        c = data.draw(st.floats(min_value=-3, max_value=3))
        e = Num(c)
        for j in range(n):
            gap = data.draw(st.floats(min_value=0.0, max_value=2.0))
            use = data.draw(st.booleans())
            if use:
                e = Mul(e, Pow(Var(f"x{j + 1}"), alpha + gap + 1e-3))
        terms.append(e)
    f = terms[0]
    for t in terms[1:]:
        from fracosc.expr import Add

        f = Add(f, t)
    ddf = frac_exterior_d1(frac_exterior_d0(f, n, alpha))
    assert ddf.is_zero  # exact: term lists empty, not merely small


def test_d1_detects_non_closed_forms():
    from fracosc.expr import normalize_terms

    alpha = 0.5
    omega_components = (normalize_terms(parse("x2^1.2")), ())
    from fracosc.geometry import FracOneForm

    om = FracOneForm(alpha, omega_components)
    dom = frac_exterior_d1(om)
    assert not dom.is_zero
    env = {"x1": 1.0, "x2": 1.0}
    from fracosc.expr import evaluate

    expected = -math.gamma(2.2) / math.gamma(2.2 - alpha)
    assert evaluate(dom.component_expr(0, 1), env) == pytest.approx(expected, rel=1e-13)
