#!/usr/bin/env python3
"""Empirical convergence of the discretizations.

Tabulates errors and observed orders for
  * Grunwald-Letnikov on f(t) = t^2.3 (expected order 1),
  * L1 on the same function (expected order 2 - alpha),
  * the fractional Adams solver on D^alpha x = x (expected order 1 + alpha).
"""

import numpy as np

from fracosc.numeric import convergence_order, gl_derivative, l1_derivative, solve_fode
from fracosc.series import FracSeries, frac_derive
from fracosc.specfun import mittag_leffler

HS = [2.0 ** -e for e in range(6, 11)]
POWER = 2.3


def scheme_errors(alpha, scheme):
    f = FracSeries.monomial(1.0, POWER)
    d = frac_derive(f, alpha)
    errs = []
    for h in HS:
        t = h * np.arange(int(round(1.0 / h)) + 1)
        approx = scheme(f(t), alpha, h)
        errs.append(np.max(np.abs(approx[1:] - d(t[1:]))))
    return errs


def solver_errors(alpha):
    errs = []
    for h in HS:
        res = solve_fode(lambda t, x: x, np.array([1.0]), alpha, 1.0, h)
        exact = np.array([mittag_leffler(alpha, t ** alpha) for t in res.t])
        errs.append(np.max(np.abs(res.x[:, 0] - exact)))
    return errs


def report(label, expected, errs):
    order = convergence_order(errs, HS)
    print(f"{label}: expected order {expected:.2f}, observed {order:.3f}")
    for h, e in zip(HS, errs):
        print(f"    h = {h:.6f}   err = {e:.3e}")


def main():
    for alpha in (0.3, 0.5, 0.8):
        print(f"== alpha = {alpha} ==")
        report("GL ", 1.0, scheme_errors(alpha, gl_derivative))
        report("L1 ", 2.0 - alpha, scheme_errors(alpha, l1_derivative))
        report("ABM", 1.0 + alpha, solver_errors(alpha))
        print()


if __name__ == "__main__":
    main()
