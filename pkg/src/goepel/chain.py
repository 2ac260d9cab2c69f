"""Algebra and differentials from frame ratios down to separated variables.

Variables, in the order they appear:

* p = S1/P1, q = S2/P2, s = P1/P2 and phi, psi with
  phi P1 P2 = P3 S3 + P0 S0, psi P1 P2 = P3 S3 - P0 S0;
* derivative constants alpha..delta and the linear forms
  dmu = -i (beta du + delta dv) / B, dnu = i (alpha du + gamma dv) / A,
  for which s dp - dq/s = phi dmu and s dp + dq/s = psi dnu;
* y, z with p, q given by the elliptic addition law on
  w^2 = 1 - 2E x^2 + x^4 (so dp/Dp = dy/Dy + dz/Dz, dq/Dq = dy/Dy - dz/Dz);
* y' with z = alphaE D(y') / (1 - alphaE^2 y'^2) (so dz/Dz = dy'/Dy').

Square-root signs that the algebra leaves open are fixed either by an
explicit closed form or by a residual test, and reported as flags.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchInconsistency, DegenerateModuli, PoleAtPoint, SingularLocus
from .frame import GoepelFrame, ThetaNulls, compute_frame, frame_partials
from .kummer import KummerCoefficients, compute_AB
from .theta import DEFAULT_EPS, Characteristic, RiemannMatrix, theta_many

POLE_TOL = 1e-8
GUARD_TOL = 1e-8
SINGULAR_TOL = 1e-10


def _rel(lhs, rhs, *terms) -> float:
    scale = max([abs(lhs), abs(rhs)] + [abs(t) for t in terms] + [1e-300])
    return abs(lhs - rhs) / scale


def quartic(e, x):
    """1 - 2 e x^2 + x^4."""
    x2 = x * x
    return 1 - 2 * e * x2 + x2 * x2


def delta(x, E):
    """Principal square root of 1 - 2E x^2 + x^4."""
    return cmath.sqrt(quartic(E, x))


# ---------------------------------------------------------------- ratios


@dataclass(frozen=True)
class PQState:
    p: complex
    q: complex
    s: complex
    phi: complex
    psi: complex
    point: tuple
    tau: RiemannMatrix


def compute_pq_state(frame: GoepelFrame) -> PQState:
    scale = frame.scale()
    for name in ("P1", "P2"):
        if abs(getattr(frame, name)) < POLE_TOL * scale:
            raise PoleAtPoint(f"{name} vanishes at {frame.point}: point on the theta divisor")
    P1P2 = frame.P1 * frame.P2
    return PQState(
        p=frame.S1 / frame.P1,
        q=frame.S2 / frame.P2,
        s=frame.P1 / frame.P2,
        phi=(frame.P3 * frame.S3 + frame.P0 * frame.S0) / P1P2,
        psi=(frame.P3 * frame.S3 - frame.P0 * frame.S0) / P1P2,
        point=frame.point,
        tau=frame.tau,
    )


# ------------------------------------------------------- derivative constants

_HALF = [
    Characteristic("1/2", "1/2", 0, 0),
    Characteristic("-1/2", "-1/2", 0, 0),
    Characteristic("1/2", "-1/2", 0, 0),
    Characteristic("-1/2", "1/2", 0, 0),
]


@dataclass(frozen=True)
class DerivativeConstants:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    A: complex
    B: complex
    fd_agreement: float = 0.0

    def dmu(self, du, dv):
        return -1j * (self.beta * du + self.delta * dv) / self.B

    def dnu(self, du, dv):
        return 1j * (self.alpha * du + self.gamma * dv) / self.A


def _half_diffs(x, y, tau2: RiemannMatrix, eps):
    vals, _, _ = theta_many(_HALF, x, y, tau2, eps)
    return vals[0] - vals[1], vals[2] - vals[3]


def derivative_constants(tau: RiemannMatrix, eps: float = 1e-15, h: float = 1e-3) -> DerivativeConstants:
    """alpha, beta (d/du at 0) and gamma, delta (d/dv at 0).

    Computed from term-wise differentiated series; a five-point finite
    difference of the same differences is kept as ``fd_agreement``.
    """
    tau2 = tau.doubled()
    _, _, _, dx, dy = theta_many(_HALF, 0, 0, tau2, eps, partials=True)
    alpha, beta = dx[0] - dx[1], dx[2] - dx[3]
    gamma, delta_ = dy[0] - dy[1], dy[2] - dy[3]

    def fd(axis):
        acc = np.zeros(2, dtype=complex)
        for k, w in ((-2, 1), (-1, -8), (1, 8), (2, -1)):
            pt = (k * h, 0) if axis == 0 else (0, k * h)
            acc += w * np.array(_half_diffs(*pt, tau2, eps))
        return acc / (12 * h)

    fx, fy = fd(0), fd(1)
    series = np.array([alpha, beta, gamma, delta_])
    approx = np.array([fx[0], fx[1], fy[0], fy[1]])
    agree = float(np.max(np.abs(series - approx)) / max(np.abs(series).max(), 1e-300))
    A, B = compute_AB(tau, eps)
    return DerivativeConstants(complex(alpha), complex(beta), complex(gamma), complex(delta_), A, B, agree)


@dataclass(frozen=True)
class FGValues:
    f: complex
    g: complex
    f_frame: complex
    g_frame: complex
    deviation: float


def fg_values(point, tau: RiemannMatrix, eps: float = DEFAULT_EPS, AB=None) -> FGValues:
    """f, g at (2u, 2v) from the series and from (P3 S3 -+ P0 S0) / (2A or 2B)."""
    u, v = (complex(z) for z in point)
    vals, _, _ = theta_many(_HALF, 2 * u, 2 * v, tau.doubled(), eps)
    f = complex(vals[0] + vals[1])
    g = complex(vals[2] + vals[3])
    A, B = AB if AB is not None else compute_AB(tau, eps)
    fr = compute_frame(point, tau, eps)
    f2 = (fr.P3 * fr.S3 - fr.P0 * fr.S0) / (2 * A)
    g2 = (fr.P3 * fr.S3 + fr.P0 * fr.S0) / (2 * B)
    dev = max(_rel(f, f2), _rel(g, g2))
    return FGValues(f, g, f2, g2, dev)


def starting_differential_residual(point, tau: RiemannMatrix, h: float = 1e-5, eps: float = 1e-15, dc=None):
    """Residuals of the first-order theta derivative relations.

    Returns ``(series_residual, fd_residual)``:

    * P1 dS1 - S1 dP1 = i f (alpha du + gamma dv) - i g (beta du + delta dv) and
      P2 dS2 - S2 dP2 = i f (alpha du + gamma dv) + i g (beta du + delta dv),
      both directions, using term-wise partials;
    * s dp - dq/s = phi dmu and s dp + dq/s = psi dnu with dp, dq from
      central differences of step ``h``.
    """
    if not 1e-6 <= h <= 1e-4:
        raise ValueError("h must lie in [1e-6, 1e-4]")
    dc = dc or derivative_constants(tau, eps)
    names = ("P1", "P2", "S1", "S2")
    val, du_, dv_ = frame_partials(point, tau, names, eps)
    fg = fg_values(point, tau, eps, (dc.A, dc.B))
    f, g = fg.f, fg.g
    worst = 0.0
    for d, (a, b) in ((du_, (dc.alpha, dc.beta)), (dv_, (dc.gamma, dc.delta))):
        I = val["P1"] * d["S1"] - val["S1"] * d["P1"]
        J = val["P2"] * d["S2"] - val["S2"] * d["P2"]
        tf, tg = 1j * f * a, 1j * g * b
        worst = max(worst, _rel(I, tf - tg, tf, tg), _rel(J, tf + tg, tf, tg))

    st = compute_pq_state(compute_frame(point, tau, eps))
    u, v = (complex(z) for z in point)
    worst_fd = 0.0
    for du, dv in ((h, 0), (0, h)):
        sp = compute_pq_state(compute_frame((u + du, v + dv), tau, eps))
        sm = compute_pq_state(compute_frame((u - du, v - dv), tau, eps))
        dp = (sp.p - sm.p) / (2 * h)
        dq = (sp.q - sm.q) / (2 * h)
        lhs_mu = st.s * dp - dq / st.s
        lhs_nu = st.s * dp + dq / st.s
        rhs_mu = st.phi * dc.dmu(du / h, dv / h)
        rhs_nu = st.psi * dc.dnu(du / h, dv / h)
        worst_fd = max(worst_fd, _rel(lhs_mu, rhs_mu, st.s * dp), _rel(lhs_nu, rhs_nu, st.s * dp))
    return worst, worst_fd


# ------------------------------------------------------------- G and Delta


def G_and_Delta(p, q, k: KummerCoefficients):
    """G(p,q) = F(1+p^2 q^2) - C(p^2+q^2) + 2Dpq and principal Delta(p), Delta(q)."""
    G = k.F * (1 + p * p * q * q) - k.C * (p * p + q * q) + 2 * k.D * p * q
    return G, delta(p, k.E), delta(q, k.E)


def s_form_residual(state: PQState, k: KummerCoefficients) -> float:
    """Quartic relation with s eliminated into one equation:
    (1-2Ep^2+p^4) s^2 + (1-2Eq^2+q^4) / s^2 = 2G."""
    G, _, _ = G_and_Delta(state.p, state.q, k)
    t1 = quartic(k.E, state.p) * state.s ** 2
    t2 = quartic(k.E, state.q) / state.s ** 2
    return _rel(t1 + t2, 2 * G, t1, t2)


# --------------------------------------------------------- chain constants


@dataclass(frozen=True)
class ChainConstants:
    ca: complex
    cb: complex
    cc: complex
    cb1: complex
    cc1: complex
    E1: complex
    E2: complex
    E3: complex
    E4: complex
    m: complex
    m1: complex
    m2: complex
    alphaE: complex
    betaE: complex
    rt: complex  # sqrt((C^2-1)(E^2-1))
    se: complex  # sqrt(E^2-1)
    k: KummerCoefficients
    flags: dict = field(default_factory=dict)

    def e_identities(self):
        """The three relations among E and E1..E4 (relative residuals)."""
        E, F = self.k.E, self.k.F
        E1, E2, E3, E4 = self.E1, self.E2, self.E3, self.E4
        return (
            _rel(1 + E1 * E3, E * (E1 + E3), 1),
            _rel(1 + E2 * E4, E * (E2 + E4), 1),
            _rel((E - E4) / (E - E3), (F + 1) / (F - 1)),
        )


def _select_alpha(E, se):
    """Root of x^4 - 2E x^2 + 1 with |x| <= 1 and Re x >= 0 (ties: Im x >= 0)."""
    # the two values of x^2 multiply to 1; take the reciprocal of the larger
    # one to avoid cancellation in E - sqrt(E^2 - 1) when |E| is large
    big = E + se if abs(E + se) >= abs(E - se) else E - se
    roots = []
    for sq in (big, 1 / big):
        r = cmath.sqrt(sq)
        roots += [r, -r]
    small = sorted(roots, key=lambda r: abs(r))[:2]
    small.sort(key=lambda r: (-round(r.real, 12), -round(r.imag, 12)))
    return small[0]


def chain_constants(k: KummerCoefficients, nulls: ThetaNulls | None = None) -> ChainConstants:
    """All Step II-V constants.

    With ``nulls`` the two square roots sqrt((C^2-1)(E^2-1)) and
    sqrt(E^2-1) take the signs of their rational null expressions;
    otherwise principal roots are used (flag ``roots=principal``).
    """
    C, D, E, F = k.C, k.D, k.E, k.F

    def guard(val, scale, what):
        if abs(val) < GUARD_TOL * max(1.0, scale):
            raise DegenerateModuli(f"{what} (value {val:.3g})")

    guard(C * C - 1, abs(C) ** 2, "C^2 = 1")
    guard(E * E - 1, abs(E) ** 2, "E^2 = 1")
    guard(E - 1, abs(E), "E = 1")
    guard(F - 1, abs(F), "F = 1")
    guard(F + 1, abs(F), "F = -1")
    flags = {}
    if nulls is not None:
        t, u, v, w = nulls.as_tuple()
        t2, u2, v2, w2 = t * t, u * u, v * v, w * w
        rt = (t2 - w2) ** 2 * (u2 - v2) ** 2 / (4 * (t2 * u2 - v2 * w2) * (t2 * v2 - u2 * w2))
        se = (t2 - w2) * (u2 - v2) / (2 * (t * u + v * w) * (t * v + u * w))
        flags["roots"] = "nulls"
    else:
        rt = cmath.sqrt((C * C - 1) * (E * E - 1))
        se = cmath.sqrt(E * E - 1)
        flags["roots"] = "principal"
    ca = (C * C - 1) / rt
    cb = (C * F - E) / rt
    cc = C * D / rt
    cb1 = D / rt
    cc1 = (C * E - F) / rt
    E1 = (C - E - D) / (F - 1)
    E2 = (C + E - D) / (F + 1)
    E3 = (C + E + D) / (F + 1)
    E4 = (C - E + D) / (F - 1)
    guard(E1 - 1, abs(E1), "E1 = 1")
    guard(E2 - 1, abs(E2), "E2 = 1")
    m = (E + 1) / (E - 1)
    m1 = (E1 + 1) / (E1 - 1)
    m2 = (E2 + 1) / (E2 - 1)
    alpha = _select_alpha(E, se)
    return ChainConstants(ca, cb, cc, cb1, cc1, E1, E2, E3, E4, m, m1, m2, alpha, 1 / alpha, rt, se, k, flags)


def root_checks(cc: ChainConstants) -> dict:
    """Squares of the stored roots against their radicands."""
    C, E = cc.k.C, cc.k.E
    return {
        "rt^2": _rel(cc.rt ** 2, (C * C - 1) * (E * E - 1)),
        "se^2": _rel(cc.se ** 2, E * E - 1),
        "Delta(alphaE)": abs(quartic(E, cc.alphaE)),
        "alphaE*betaE": abs(cc.alphaE * cc.betaE - 1),
    }


# ------------------------------------------------------- phi, psi in p, q


def phi_sq_pq(p, q, cc: ChainConstants):
    """phi^2 as a polynomial in p, q."""
    return (cc.cb - cc.cb1) * (1 + p * p * q * q) - cc.ca * (p * p + q * q) + 2 * (cc.cc + cc.cc1) * p * q


def psi_sq_pq(p, q, cc: ChainConstants):
    """psi^2 as a polynomial in p, q."""
    return (cc.cb + cc.cb1) * (1 + p * p * q * q) - cc.ca * (p * p + q * q) + 2 * (cc.cc - cc.cc1) * p * q


def _bilinear(p, q, cc: ChainConstants):
    return cc.cb1 * (1 + p * p * q * q) / 2 - cc.cc1 * p * q


def half_phi_psi_identities(state: PQState, cc: ChainConstants, sign: int = -1):
    """Residuals of the three phi/psi identities.

    * (phi^2 + psi^2)/2 = cb(1+p^2q^2) - ca(p^2+q^2) + 2 cc pq
    * (phi psi)^2 = (G^2 - D(p)^2 D(q)^2) / (E^2 - 1)
    * (phi^2 - psi^2)/4 = sign * (cb1(1+p^2q^2)/2 - cc1 pq)

    ``sign=-1`` is the choice consistent with the series; pass ``sign=+1``
    to test the other one.
    """
    p, q = state.p, state.q
    phi2, psi2 = state.phi ** 2, state.psi ** 2
    rhs1 = cc.cb * (1 + p * p * q * q) - cc.ca * (p * p + q * q) + 2 * cc.cc * p * q
    r1 = _rel((phi2 + psi2) / 2, rhs1, phi2, psi2)
    G, _, _ = G_and_Delta(p, q, cc.k)
    qp, qq = quartic(cc.k.E, p), quartic(cc.k.E, q)
    E2m1 = cc.k.E ** 2 - 1
    r2 = _rel((state.phi * state.psi) ** 2, (G * G - qp * qq) / E2m1, G * G / E2m1, qp * qq / E2m1)
    bil = _bilinear(p, q, cc)
    r3 = _rel((phi2 - psi2) / 4, sign * bil, phi2, psi2)
    return r1, r2, r3


def sign_discrimination(state: PQState, cc: ChainConstants):
    """Residual of the (phi^2 - psi^2)/4 relation under each sign.

    Returns ``(res_plus, res_minus, chosen)`` where chosen is the sign
    with the smaller residual.
    """
    _, _, rp = half_phi_psi_identities(state, cc, +1)
    _, _, rm = half_phi_psi_identities(state, cc, -1)
    return rp, rm, (+1 if rp < rm else -1)


def phi_psi_sq_residual(state: PQState, cc: ChainConstants) -> float:
    """phi^2 and psi^2 from the frame against their p, q polynomials."""
    p, q = state.p, state.q
    return max(
        _rel(state.phi ** 2, phi_sq_pq(p, q, cc), cc.cb * (1 + p * p * q * q)),
        _rel(state.psi ** 2, psi_sq_pq(p, q, cc), cc.cb * (1 + p * p * q * q)),
    )


def tangent_form_residual(state: PQState, cc: ChainConstants) -> float:
    """(1-2Ep^2+p^4) s^2 - (1-2Eq^2+q^4)/s^2 = 2 sqrt(E^2-1) phi psi."""
    t1 = quartic(cc.k.E, state.p) * state.s ** 2
    t2 = quartic(cc.k.E, state.q) / state.s ** 2
    return _rel(t1 - t2, 2 * cc.se * state.phi * state.psi, t1, t2)


# ------------------------------------------------------------ y, z step


def pq_from_yz(y, z, E, dz=None):
    """Addition law: returns (p, q, Delta(p), Delta(q)).

    Delta(p), Delta(q) are the branches for which dp/Delta(p) and
    dq/Delta(q) are dy/Delta(y) +- dz/Delta(z), with principal Delta(y) and
    principal Delta(z) unless ``dz`` supplies another branch.
    """
    yz2 = (y * z) ** 2
    den = 1 - yz2
    if abs(den) < SINGULAR_TOL:
        raise SingularLocus(f"1 - y^2 z^2 = {den:.3g}")
    dy = delta(y, E)
    dz = delta(z, E) if dz is None else dz
    p = (y * dz + z * dy) / den
    q = (y * dz - z * dy) / den
    yz = y * z
    s2 = y * y + z * z
    Dp = ((1 + yz2) * (dy * dz - 2 * E * yz) + 2 * yz * s2) / den ** 2
    Dq = ((1 + yz2) * (dy * dz + 2 * E * yz) - 2 * yz * s2) / den ** 2
    return p, q, Dp, Dq


def delta_product_yz(y, z, E, convention: int = -1):
    """Delta(p) Delta(q) as a symmetric function of y, z.

    Returns ``convention * expr / (1 - y^2 z^2)^2``.  The addition-law
    branches correspond to ``convention=+1``; the separation identity
    below is written with ``convention=-1``.
    """
    yz2 = (y * z) ** 2
    s2 = y * y + z * z
    expr = (1 + yz2) ** 2 - 2 * E * (1 + yz2) * s2 + s2 ** 2
    return convention * expr / (1 - yz2) ** 2


def pq_symmetric_residual(y, z, E) -> float:
    """pq and p^2 + q^2 from the addition law against their closed forms."""
    p, q, Dp, Dq = pq_from_yz(y, z, E)
    yz2 = (y * z) ** 2
    s2 = y * y + z * z
    pq_ = (y * y - z * z) / (1 - yz2)
    ss = 2 * ((1 + yz2) * s2 - 4 * E * yz2) / (1 - yz2) ** 2
    dd = delta_product_yz(y, z, E, convention=+1)
    return max(_rel(p * q, pq_, p * p, q * q), _rel(p * p + q * q, ss, p * p, q * q),
               _rel(Dp * Dq, dd, Dp * Dp, Dq * Dq),
               _rel(Dp * Dp, quartic(E, p), 1, p ** 4), _rel(Dq * Dq, quartic(E, q), 1, q ** 4))


def yz_from_pq(p, q, E):
    """Invert the addition law.

    With a = y^2, b = z^2 and P = pq, S = p^2 + q^2 the relations
    a - b = P(1 - ab) and S(1 - ab)^2 / 2 = (1 + ab)(a + b) - 4E ab give a
    quartic for ab.  Among preimages reproducing (p, q) the one with the
    smallest |z| is returned (the branch continuous from z = 0).
    """
    P = p * q
    S = p * p + q * q
    pi = np.polynomial.Polynomial([0, 1])
    sig_num = S * (1 - pi) ** 2 / 2 + 4 * E * pi
    poly = sig_num ** 2 - (1 + pi) ** 2 * (P * P * (1 - pi) ** 2 + 4 * pi)
    best = None
    target = max(abs(p), abs(q), 1.0)
    for r in poly.roots():
        if abs(1 + r) < SINGULAR_TOL:
            continue
        sig = sig_num(r) / (1 + r)
        dl = P * (1 - r)
        a, b = (sig + dl) / 2, (sig - dl) / 2
        ya, zb = cmath.sqrt(a), cmath.sqrt(b)
        for y in (ya, -ya):
            for z in (zb, -zb):
                try:
                    pp, qq, _, _ = pq_from_yz(y, z, E)
                except (SingularLocus, OverflowError):
                    continue
                err = max(abs(pp - p), abs(qq - q)) / target
                key = (err > 1e-8, abs(z), err)
                if best is None or key < best[0]:
                    best = (key, y, z)
    if best is None or best[0][0]:
        raise SingularLocus("no (y, z) reproduces the given (p, q)")
    return complex(best[1]), complex(best[2])


def separability_residual(y, z, k: KummerCoefficients) -> float:
    """2G +- 2 Delta(p)Delta(q) against the product of a y-quartic and a z-quartic.

    For sign s in (+1, -1):
    2G + s 2DD = 2(F - s)/(1-y^2z^2)^2 * Q((C - sE - D)/(F - s), y) * Q((C - sE + D)/(F - s), z)
    with DD taken in the ``convention=-1`` sign.
    """
    p, q, _, _ = pq_from_yz(y, z, k.E)
    G, _, _ = G_and_Delta(p, q, k)
    dd = delta_product_yz(y, z, k.E, convention=-1)
    den = (1 - (y * z) ** 2) ** 2
    worst = 0.0
    for s in (+1, -1):
        lhs = 2 * G + s * 2 * dd
        Fs = k.F - s
        rhs = 2 * Fs / den * quartic((k.C - s * k.E - k.D) / Fs, y) * quartic((k.C - s * k.E + k.D) / Fs, z)
        worst = max(worst, _rel(lhs, rhs, 2 * G, 2 * dd))
    return worst


def phi_psi_yz_residual(y, z, cc: ChainConstants) -> float:
    """phi^2 = (cb-cb1) Q(E2,y) Q(E4,z) / (1-y^2z^2)^2 and
    psi^2 = (cb+cb1) Q(E1,y) Q(E3,z) / (1-y^2z^2)^2, with p, q from y, z."""
    p, q, _, _ = pq_from_yz(y, z, cc.k.E)
    den = (1 - (y * z) ** 2) ** 2
    phi2 = (cc.cb - cc.cb1) / den * quartic(cc.E2, y) * quartic(cc.E4, z)
    psi2 = (cc.cb + cc.cb1) / den * quartic(cc.E1, y) * quartic(cc.E3, z)
    return max(_rel(phi_sq_pq(p, q, cc), phi2), _rel(psi_sq_pq(p, q, cc), psi2))


# ------------------------------------------------------------ y' step


def z_from_yprime(yp, alphaE):
    """z = alphaE D(y') / (1 - alphaE^2 y'^2) and its Delta.

    Returns ``(z, Dz)`` with Dz = betaE (alphaE^4 - 1) y' / (1 - alphaE^2 y'^2),
    the branch satisfying dz/Dz = dy'/Delta(y').
    """
    a2 = alphaE * alphaE
    E = (a2 + 1 / a2) / 2
    den = 1 - a2 * yp * yp
    if abs(den) < SINGULAR_TOL:
        raise SingularLocus(f"1 - alphaE^2 y'^2 = {den:.3g}")
    z = alphaE * delta(yp, E) / den
    Dz = (a2 * a2 - 1) * yp / (alphaE * den)
    return z, Dz


def moebius_residual(yp, cc: ChainConstants):
    """(z^2 Moebius form, quartic ratio identity) residuals at y'."""
    z, Dz = z_from_yprime(yp, cc.alphaE)
    a2 = cc.alphaE ** 2
    r_sq = _rel(z * z, (a2 - yp * yp) / (1 - a2 * yp * yp))
    E, F = cc.k.E, cc.k.F
    lhs = quartic(cc.E3, z) / quartic(cc.E4, z)
    rhs = (F - 1) / (F + 1) * quartic(cc.E1, yp) / quartic(cc.E2, yp)
    r_ratio = _rel(lhs, rhs)
    r_dz = _rel(Dz * Dz, quartic(E, z), 1, z ** 4)
    return r_sq, r_ratio, r_dz


# ---------------------------------------------- separated differentials


@dataclass(frozen=True)
class SeparableResidual:
    mu: float
    nu: float
    flags: dict


def _separated_weights(x, cc: ChainConstants):
    """sqrt(Q(E1,x) / (Q(E,x) Q(E2,x))) and sqrt(Q(E2,x) / (Q(E,x) Q(E1,x)))."""
    qe, q1, q2 = quartic(cc.k.E, x), quartic(cc.E1, x), quartic(cc.E2, x)
    return cmath.sqrt(q1 / (qe * q2)), cmath.sqrt(q2 / (qe * q1))


def _pq_of(y, yp, E, alphaE):
    # Delta(z) follows y' analytically; the principal root would jump where
    # z passes alphaE (at y' = 0)
    z, Dz = z_from_yprime(yp, alphaE)
    p, q, _, _ = pq_from_yz(y, z, E, Dz)
    return p, q


def separable_differential_residual(y, yp, cc: ChainConstants, k: KummerCoefficients | None = None,
                                    h: float = 1e-5, pairing: str = "derived") -> SeparableResidual:
    """Compare dmu, dnu in (p, q) form with the separated (y, y') forms.

    (p, q) form, with R(+-) = sqrt(2G +- 2 Delta(p)Delta(q)):
        phi dmu = R(-) (dp/Dp + dq/Dq)/2 + R(+) (dp/Dp - dq/Dq)/2
        psi dnu = R(+) (dp/Dp + dq/Dq)/2 + R(-) (dp/Dp - dq/Dq)/2
    Separated forms, with w1, w2 from ``_separated_weights``:
        ``derived``: dmu = sqrt(2(F-1)/(cb-cb1)) (w1(y) dy + w1(y') dy'),
                     dnu = sqrt(2(F+1)/(cb+cb1)) (w2(y) dy + w2(y') dy')
        ``swapped``: the two right-hand sides exchanged.
    dp, dq come from central differences in y and in y'.  The sign of each
    separated term is matched per component (square roots carry no global
    orientation); the relative sign of R(+) and R(-) is tracked and flipped
    once if the first evaluation is inconsistent.
    """
    k = k or cc.k
    E = k.E
    z, Dz = z_from_yprime(yp, cc.alphaE)
    p, q, Dp, Dq = pq_from_yz(y, z, E, Dz)
    if min(abs(Dp), abs(Dq)) < SINGULAR_TOL:
        raise SingularLocus(f"p or q at a root of the quartic (y={y}, y'={yp})")
    G, _, _ = G_and_Delta(p, q, k)
    dd = Dp * Dq
    r_plus = cmath.sqrt(2 * G + 2 * dd)
    r_minus = cmath.sqrt(2 * G - 2 * dd)
    phi = cmath.sqrt(phi_sq_pq(p, q, cc))
    psi = cmath.sqrt(psi_sq_pq(p, q, cc))

    grads = []
    for var in (0, 1):
        if var == 0:
            pp, qp = _pq_of(y + h, yp, E, cc.alphaE)
            pm, qm = _pq_of(y - h, yp, E, cc.alphaE)
        else:
            pp, qp = _pq_of(y, yp + h, E, cc.alphaE)
            pm, qm = _pq_of(y, yp - h, E, cc.alphaE)
        grads.append(((pp - pm) / (2 * h), (qp - qm) / (2 * h)))

    w1y, w2y = _separated_weights(y, cc)
    w1p, w2p = _separated_weights(yp, cc)
    n_mu = cmath.sqrt(2 * (k.F - 1) / (cc.cb - cc.cb1))
    n_nu = cmath.sqrt(2 * (k.F + 1) / (cc.cb + cc.cb1))
    sep_mu = (n_mu * w1y, n_mu * w1p)
    sep_nu = (n_nu * w2y, n_nu * w2p)
    if pairing == "swapped":
        sep_mu, sep_nu = sep_nu, sep_mu
    elif pairing != "derived":
        raise ValueError(f"unknown pairing {pairing!r}")

    def evaluate(rel_sign):
        rp = rel_sign * r_plus
        mu_res = nu_res = 0.0
        for (dp, dq), smu, snu in zip(grads, sep_mu, sep_nu):
            a = (dp / Dp + dq / Dq) / 2
            b = (dp / Dp - dq / Dq) / 2
            dmu = (r_minus * a + rp * b) / phi
            dnu = (rp * a + r_minus * b) / psi
            mu_res = max(mu_res, min(_rel(dmu, smu), _rel(dmu, -smu)))
            nu_res = max(nu_res, min(_rel(dnu, snu), _rel(dnu, -snu)))
        return mu_res, nu_res

    flags = {"pairing": pairing, "R+ sign": 1, "retried": False}
    mu_res, nu_res = evaluate(1)
    if max(mu_res, nu_res) > 1e-3:
        mu2, nu2 = evaluate(-1)
        if max(mu2, nu2) < 1e-3:
            flags.update({"R+ sign": -1, "retried": True})
            mu_res, nu_res = mu2, nu2
        elif pairing == "derived":
            raise BranchInconsistency(
                f"separated differentials inconsistent at y={y}, y'={yp} "
                f"(residuals {mu_res:.2e}, {nu_res:.2e}; flipped {mu2:.2e}, {nu2:.2e})",
                flags,
            )
    return SeparableResidual(mu_res, nu_res, flags)
