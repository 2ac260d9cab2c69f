"""Linear frame relation, Kummer quartic coefficients and the Hudson form."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import NearZeroDenominator
from .frame import GoepelFrame, ThetaNulls, compute_frame, compute_nulls
from .theta import DEFAULT_EPS, Characteristic, RiemannMatrix, theta_many

# fixed generic point used to resolve the sign of D once per tau
PROBE_POINT = (0.11 + 0.03j, 0.07 - 0.02j)
DENOM_TOL = 1e-8
# floor for residual normalization, relative to the frame scale to the
# relation's degree; keeps points where every term vanishes (the origin)
# from dividing rounding noise by rounding noise
TERM_FLOOR = 1e-5


@dataclass(frozen=True)
class GoepelLinearConstants:
    """Constants of Q1 R1 = ga P1 S1 + gb P2 S2."""

    A: complex
    B: complex
    ga: complex
    gb: complex


@dataclass(frozen=True)
class KummerCoefficients:
    C: complex
    D: complex
    E: complex
    F: complex
    d_sign: int = 1  # +1: principal root kept, -1: flipped by the probe

    def identity_residual(self) -> float:
        """|C^2 - D^2 + E^2 + F^2 - 2CEF - 1| relative to the largest term (at least 1)."""
        C, D, E, F = self.C, self.D, self.E, self.F
        terms = [C * C, D * D, E * E, F * F, 2 * C * E * F, 1]
        return abs(C * C - D * D + E * E + F * F - 2 * C * E * F - 1) / max(abs(t) for t in terms)


@dataclass(frozen=True)
class HudsonCoefficients:
    A1: complex
    B1: complex
    C1: complex
    D1: complex
    ha: complex
    hb: complex
    hc: complex
    hd: complex

    def identity_value(self) -> complex:
        A1, B1, C1, D1 = self.A1, self.B1, self.C1, self.D1
        return A1 * A1 + B1 * B1 + C1 * C1 - D1 * D1 - A1 * B1 * C1


def _guard(value, scale, name):
    if abs(value) < DENOM_TOL * scale:
        raise NearZeroDenominator(f"factor {name} = {value:.3g} collapsed (scale {scale:.3g})")


def compute_AB(tau: RiemannMatrix, eps: float = DEFAULT_EPS):
    """A = Th[1/2 1/2; 0 0](0,0), B = Th[1/2 -1/2; 0 0](0,0) at doubled moduli."""
    chars = [Characteristic("1/2", "1/2", 0, 0), Characteristic("1/2", "-1/2", 0, 0)]
    vals, _, _ = theta_many(chars, 0, 0, tau.doubled(), eps)
    A, B = complex(vals[0]), complex(vals[1])
    _guard(A * B, max(abs(A), abs(B)) ** 2, "A*B")
    return A, B


def compute_ga_gb(A: complex, B: complex) -> GoepelLinearConstants:
    """ga = (A^2+B^2)/(2AB), gb = (B^2-A^2)/(2AB), so ga^2 - gb^2 = 1.

    The sign of gb is the one for which the linear relation holds with
    frame values computed from the series.
    """
    _guard(A * B, max(abs(A), abs(B)) ** 2, "A*B")
    ga = (A * A + B * B) / (2 * A * B)
    gb = (B * B - A * A) / (2 * A * B)
    return GoepelLinearConstants(A, B, ga, gb)


def linear_constant_checks(lc: GoepelLinearConstants, nulls: ThetaNulls, origin: GoepelFrame) -> dict:
    """Cross-checks of ga, gb against null expressions (relative residuals)."""
    t, u, v, w = nulls.as_tuple()
    P3, S3, Q3, R3 = origin.P3, origin.S3, origin.Q3, origin.R3
    A, B = lc.A, lc.B
    den = 2 * (t * u + v * w) * (t * v + u * w)
    ga2 = (t * w + u * v) * (t * t + u * u + v * v + w * w) / den
    gb2 = (t * t - u * u - v * v + w * w) * (t * w - u * v) / den

    def rel(x, y):
        return abs(x - y) / max(abs(x), abs(y), 1e-300)

    return {
        "ga2-gb2=1": abs(lc.ga ** 2 - lc.gb ** 2 - 1),
        "S3P3=2(A2+B2)": rel(S3 * P3, 2 * (A * A + B * B)),
        "Q3R3=4AB": rel(Q3 * R3, 4 * A * B),
        "ga=S3P3/(Q3R3)": rel(lc.ga, S3 * P3 / (Q3 * R3)),
        "ga2 from nulls": rel(lc.ga ** 2, ga2),
        "gb2 from nulls": rel(lc.gb ** 2, gb2),
        "gb2=ga2-1": rel(gb2, ga2 - 1),
    }


def goepel_relation_residual(frame: GoepelFrame, lc: GoepelLinearConstants) -> float:
    lhs = frame.Q1 * frame.R1
    t1 = frame.P1 * frame.S1
    t2 = frame.P2 * frame.S2
    floor = TERM_FLOOR * max(1.0, abs(lc.ga), abs(lc.gb)) * frame.scale() ** 2
    scale = max(abs(lhs), abs(lc.ga * t1), abs(lc.gb * t2), floor, 1e-300)
    return abs(lhs - lc.ga * t1 - lc.gb * t2) / scale


def _kummer_terms(frame: GoepelFrame, k: KummerCoefficients):
    P1, P2, S1, S2 = frame.P1, frame.P2, frame.S1, frame.S2
    a, b, c, d = P1 * P1, P2 * P2, S1 * S1, S2 * S2
    return [
        a * a, c * c, b * b, d * d,
        -2 * k.F * a * b, -2 * k.F * c * d,
        2 * k.C * a * d, 2 * k.C * b * c,
        -2 * k.E * a * c, -2 * k.E * b * d,
        -4 * k.D * P1 * P2 * S1 * S2,
    ]


def kummer_residual(frame: GoepelFrame, k: KummerCoefficients) -> float:
    """Quartic relation among P1, P2, S1, S2, normalized by the largest term."""
    terms = _kummer_terms(frame, k)
    return abs(sum(terms)) / max(max(abs(t) for t in terms), TERM_FLOOR * frame.scale() ** 4, 1e-300)


def compute_kummer_coeffs(nulls: ThetaNulls, probe: GoepelFrame | None = None) -> KummerCoefficients:
    """C, D, E, F as rational expressions in the nulls (D with one square root).

    With a ``probe`` frame the sign of D is the one giving the smaller
    quartic residual there; without it the principal root is kept.
    """
    t, u, v, w = nulls.as_tuple()
    s2 = nulls.scale() ** 2
    t2, u2, v2, w2 = t * t, u * u, v * v, w * w
    f_tu_p, f_tv_p = t * u + v * w, t * v + u * w
    f_tu_m, f_tv_m = t * u - v * w, t * v - u * w
    f_a, f_b = t2 + u2 - v2 - w2, t2 - u2 + v2 - w2
    f_c, f_d = t2 * u2 - v2 * w2, t2 * v2 - u2 * w2
    for val, deg, name in [
        (f_tu_p, 1, "(tu+vw)"), (f_tv_p, 1, "(tv+uw)"),
        (f_tu_m, 1, "(tu-vw)"), (f_tv_m, 1, "(tv-uw)"),
        (f_a, 1, "(t2+u2-v2-w2)"), (f_b, 1, "(t2-u2+v2-w2)"),
        (f_c, 2, "(t2u2-v2w2)"), (f_d, 2, "(t2v2-u2w2)"),
    ]:
        _guard(val, s2 ** deg, name)
    sym = t2 * u2 + t2 * v2 + u2 * w2 + v2 * w2
    E = (sym + 4 * t * u * v * w) / (2 * f_tu_p * f_tv_p)
    C = (sym - 4 * t * u * v * w) / (2 * f_tu_m * f_tv_m)
    F = (t2 * t2 + u2 * u2 + v2 * v2 + w2 * w2 - 2 * t2 * w2 - 2 * u2 * v2) / (f_a * f_b)
    root = cmath.sqrt((t2 + u2 + v2 + w2) * (t2 - u2 - v2 + w2) * (t2 * w2 - u2 * v2))
    D = (t2 - w2) ** 2 * (u2 - v2) ** 2 * root / (f_a * f_b * f_c * f_d)
    k = KummerCoefficients(C, D, E, F, 1)
    if probe is not None:
        flipped = KummerCoefficients(C, -D, E, F, -1)
        if kummer_residual(probe, flipped) < kummer_residual(probe, k):
            k = flipped
    return k


def kummer_for_tau(tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> KummerCoefficients:
    """Coefficients with the sign of D resolved at the fixed probe point."""
    return compute_kummer_coeffs(compute_nulls(tau, eps), compute_frame(PROBE_POINT, tau, eps))


def hudson_nulls(tau: RiemannMatrix, eps: float = DEFAULT_EPS):
    """(P3, S3, P0, S0) at the origin."""
    f = compute_frame((0, 0), tau, eps)
    return f.P3, f.S3, f.P0, f.S0


def hudson_coeffs(ha, hb, hc, hd) -> HudsonCoefficients:
    a2, b2, c2, d2 = ha * ha, hb * hb, hc * hc, hd * hd
    scale = max(abs(a2), abs(b2), abs(c2), abs(d2)) ** 2
    dens = {"a2d2-b2c2": a2 * d2 - b2 * c2, "b2d2-a2c2": b2 * d2 - a2 * c2, "c2d2-a2b2": c2 * d2 - a2 * b2}
    for name, val in dens.items():
        _guard(val, scale, name)
    da, db, dc = dens.values()
    A1 = (b2 * b2 + c2 * c2 - a2 * a2 - d2 * d2) / da
    B1 = (a2 * a2 + c2 * c2 - b2 * b2 - d2 * d2) / db
    C1 = (a2 * a2 + b2 * b2 - c2 * c2 - d2 * d2) / dc
    D1 = (
        ha * hb * hc * hd
        * (a2 + d2 - b2 - c2) * (b2 + d2 - a2 - c2) * (c2 + d2 - a2 - b2) * (a2 + b2 + c2 + d2)
        / (da * db * dc)
    )
    return HudsonCoefficients(A1, B1, C1, D1, ha, hb, hc, hd)


def hudson_kummer_match(h: HudsonCoefficients, k: KummerCoefficients):
    """Compare (A1, B1, C1, 2 s D1) with (2C, -2F, -2E, -4D).

    D1 is odd in the product ha hb hc hd, whose sign the squared null
    relations do not fix; s in {+1, -1} is picked to match.  Returns
    ``(max relative deviation, s)``.
    """
    s = 1 if abs(2 * h.D1 + 4 * k.D) <= abs(2 * h.D1 - 4 * k.D) else -1
    pairs = [(h.A1, 2 * k.C), (h.B1, -2 * k.F), (h.C1, -2 * k.E), (2 * s * h.D1, -4 * k.D)]
    return max(abs(x - y) / max(abs(y), 1.0) for x, y in pairs), s


def hudson_residual(frame: GoepelFrame, h: HudsonCoefficients, d1_sign: int = 1) -> float:
    """Normalized residual of the normalized quartic
    P1^4+S1^4+P2^4+S2^4 + A1(P1^2S2^2+P2^2S1^2) + B1(P1^2P2^2+S1^2S2^2)
    + C1(P1^2S1^2+P2^2S2^2) + 2 d1_sign D1 P1P2S1S2."""
    P1, P2, S1, S2 = frame.P1, frame.P2, frame.S1, frame.S2
    a, b, c, d = P1 * P1, P2 * P2, S1 * S1, S2 * S2
    terms = [
        a * a, c * c, b * b, d * d,
        h.A1 * a * d, h.A1 * b * c,
        h.B1 * a * b, h.B1 * c * d,
        h.C1 * a * c, h.C1 * b * d,
        2 * d1_sign * h.D1 * P1 * P2 * S1 * S2,
    ]
    return abs(sum(terms)) / max(max(abs(t) for t in terms), TERM_FLOOR * frame.scale() ** 4, 1e-300)
