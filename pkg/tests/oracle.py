"""Brute-force reference sums used as an independent oracle.

Plain double loops over a fixed square window with ``cmath``; nothing here
imports the package under test. Radius 40 is far beyond any tail that
matters for Im-eigenvalues of order one.
"""

import cmath
import math

RADIUS = 40


def brute_theta(a, c, b, d, x, y, t11, t22, t12, radius=RADIUS, deriv=None):
    """Sum the genus-2 series directly.

    ``deriv`` is None for the value, ``"x"`` or ``"y"`` for the term-wise
    partial derivative in the first or second argument.
    """
    a, c, b, d = float(a), float(c), float(b), float(d)
    total = 0j
    for m in range(-radius, radius + 1):
        mm = m + a / 2
        for n in range(-radius, radius + 1):
            nn = n + c / 2
            expo = 1j * math.pi * (t11 * mm * mm + t22 * nn * nn + 2 * t12 * mm * nn)
            expo += 2j * math.pi * (mm * (x + b / 2) + nn * (y + d / 2))
            if expo.real < -745:
                continue
            term = cmath.exp(expo)
            if deriv == "x":
                term *= 2j * math.pi * mm
            elif deriv == "y":
                term *= 2j * math.pi * nn
            total += term
    return total


def brute_doubled(a, c, b, d, x, y, t11, t22, t12, **kw):
    return brute_theta(a, c, b, d, x, y, 2 * t11, 2 * t22, 2 * t12, **kw)


FRAME_CHARS = {
    "P0": (0, 0, 1, 1), "P1": (0, 0, 0, 1), "P2": (0, 0, 1, 0), "P3": (0, 0, 0, 0),
    "Q0": (1, 0, 1, 1), "Q1": (1, 0, 0, 1), "Q2": (1, 0, 1, 0), "Q3": (1, 0, 0, 0),
    "R0": (0, 1, 1, 1), "R1": (0, 1, 0, 1), "R2": (0, 1, 1, 0), "R3": (0, 1, 0, 0),
    "S0": (1, 1, 1, 1), "S1": (1, 1, 0, 1), "S2": (1, 1, 1, 0), "S3": (1, 1, 0, 0),
}


def brute_frame(u, v, tau):
    return {k: brute_theta(*ch, u, v, *tau) for k, ch in FRAME_CHARS.items()}


def brute_nulls(tau):
    return tuple(
        brute_doubled(a, c, 0, 0, 0, 0, *tau) for a, c in ((0, 0), (1, 0), (0, 1), (1, 1))
    )


def brute_AB(tau):
    return (
        brute_doubled(0.5, 0.5, 0, 0, 0, 0, *tau),
        brute_doubled(0.5, -0.5, 0, 0, 0, 0, *tau),
    )


def brute_derivative_constants(tau):
    """alpha, beta, gamma, delta from differentiated doubled-moduli sums."""

    def diff(a1, c1, a2, c2, var):
        return brute_doubled(a1, c1, 0, 0, 0, 0, *tau, deriv=var) - brute_doubled(
            a2, c2, 0, 0, 0, 0, *tau, deriv=var
        )

    alpha = diff(0.5, 0.5, -0.5, -0.5, "x")
    beta = diff(0.5, -0.5, -0.5, 0.5, "x")
    gamma = diff(0.5, 0.5, -0.5, -0.5, "y")
    delta = diff(0.5, -0.5, -0.5, 0.5, "y")
    return alpha, beta, gamma, delta


def kummer_from_nulls(t, u, v, w):
    """Rational expressions for C, E, F and |D| written out longhand."""
    t2, u2, v2, w2 = t * t, u * u, v * v, w * w
    E = (t2 * u2 + t2 * v2 + u2 * w2 + v2 * w2 + 4 * t * u * v * w) / (
        2 * (t * u + v * w) * (t * v + u * w)
    )
    F = (t2 * t2 + u2 * u2 + v2 * v2 + w2 * w2 - 2 * t2 * w2 - 2 * u2 * v2) / (
        (t2 + u2 - v2 - w2) * (t2 - u2 + v2 - w2)
    )
    C = (t2 * u2 + t2 * v2 + u2 * w2 + v2 * w2 - 4 * t * u * v * w) / (
        2 * (t * u - v * w) * (t * v - u * w)
    )
    D = (
        (t2 - w2) ** 2
        * (u2 - v2) ** 2
        * cmath.sqrt((t2 + u2 + v2 + w2) * (t2 - u2 - v2 + w2) * (t2 * w2 - u2 * v2))
        / ((t2 + u2 - v2 - w2) * (t2 - u2 + v2 - w2) * (t2 * u2 - v2 * w2) * (t2 * v2 - u2 * w2))
    )
    return C, D, E, F
