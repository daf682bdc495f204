"""High-precision reference values, independent of the library under test.

Everything here is evaluated with mpmath at 50 significant digits straight
from the defining formulas (dispersion relation, coupling constants, exact
finite sums).  Tests import these helpers, or the frozen constants printed
by ``python tests/oracles.py``, as expected values.  Nothing in this module
may import from ``bathybands``.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 50


def kappa(p, theta=0):
    """Dispersion value (p + theta) tanh(p + theta) at unit depth."""
    a = mp.mpf(p) + mp.mpf(theta)
    return a * mp.tanh(a)


def tau(p, theta=0):
    return 1 / (1 + kappa(p, theta))


def coupling_f(p):
    """Half-gap coupling constant (p/2)^2 / cosh^2(p/2)."""
    h = mp.mpf(p) / 2
    return h**2 / mp.cosh(h) ** 2


def slope_k(p):
    """Quasi-momentum coefficient of the reduced 2x2 problem."""
    p = mp.mpf(p)
    return p / mp.cosh(p) ** 2 * (1 + mp.sinh(2 * p) / (2 * p))


def weight(k, p):
    """Second-order summand weight (k^2 - kk*kp) / (kp - kk)."""
    kk, kp = kappa(k), kappa(p)
    return (mp.mpf(k) ** 2 - kk * kp) / (kp - kk)


def second_order_sums(p, coeffs, k_range=200):
    """Exact finite sums (J_p, S_p) for a coefficient table {k: b_k}.

    The sum runs over a deliberately generous index window so that no
    band-limit reasoning from the implementation is reused here.
    """

    def b(k):
        return mp.mpc(coeffs.get(k, 0))

    J = mp.mpf(0)
    S = mp.mpc(0)
    for k in range(-k_range, k_range + 1):
        if k in (0, p, -p):
            continue
        w = weight(k, p)
        J += w * abs(b(k - p)) ** 2
        S += w * b(k + p) * mp.conj(b(k - p))
    pref = mp.mpf(p) ** 2 / mp.cosh(p) ** 2
    return pref * J, pref * S


# Coefficient tables of the profiles used throughout the test-suite:
# 2cos(2x), 2cos(x) + 2cos(3x), 2cos(x), 2cos(4x).
COS2X = {2: 1, -2: 1}
COS1X_COS3X = {1: 1, -1: 1, 3: 1, -3: 1}
COS1X = {1: 1, -1: 1}
COS4X = {4: 1, -4: 1}


def main():
    rows = [
        ("kappa(1, 0) = tanh 1", kappa(1)),
        ("kappa(0, 1/4)", kappa(0, mp.mpf(1) / 4)),
        ("kappa(0, 1/2)", kappa(0, mp.mpf(1) / 2)),
        ("kappa(-1, 0.3)", kappa(-1, mp.mpf("0.3"))),
        ("tau(1, 0)", tau(1)),
        ("1/cosh(1)", 1 / mp.cosh(1)),
        ("F_1", coupling_f(1)),
        ("F_2", coupling_f(2)),
        ("2*F_1", 2 * coupling_f(1)),
        ("2*F_2", 2 * coupling_f(2)),
        ("K_1", slope_k(1)),
        ("2*pi*F_2", 2 * mp.pi * coupling_f(2)),
    ]
    J1, S1 = second_order_sums(1, COS1X_COS3X)
    rows += [
        ("J_1[2cosx+2cos3x]", J1),
        ("S_1[2cosx+2cos3x]", S1),
        ("2*|S_1|", 2 * abs(S1)),
    ]
    J1b, S1b = second_order_sums(1, COS2X)
    rows += [("J_1[2cos2x]", J1b), ("S_1[2cos2x]", S1b)]
    for name, value in rows:
        print(f"{name:28s} {mp.nstr(value, 20)}")


if __name__ == "__main__":
    main()
