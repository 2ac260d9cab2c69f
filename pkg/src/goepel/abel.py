"""Quintic curve, period map and the inversion solver.

x and x' are the two roots determined by p, q:

    x, x' = (E(1 + p^2 q^2) - (p^2 + q^2) -+ Delta(p)Delta(q)) / ((E + 1)(pq + 1)^2)

and satisfy, for a constant 2x2 matrix K,

    dx/sqrt(f5(x)) + dx'/sqrt(f5(x'))     = dU1 = K[0] . (du, dv)
    x dx/sqrt(f5(x)) + x' dx'/sqrt(f5(x')) = dU2 = K[1] . (du, dv)

with f5(x) = x (1 - x)(1 - m x)(1 - m1 x)(1 - m2 x).
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    ChainConstants,
    DerivativeConstants,
    chain_constants,
    derivative_constants,
    quartic,
)
from .errors import (
    BranchInconsistency,
    DegenerateCurve,
    DegenerateModuli,
    NearBranchPoint,
    PoleAtPoint,
    SingularPeriodMap,
)
from .frame import FRAME_CHARS, compute_nulls
from .kummer import KummerCoefficients, kummer_for_tau
from .theta import Characteristic, RiemannMatrix, theta_many

PIPELINE_EPS = 1e-15
BRANCH_TOL = 1e-6
DISTINCT_TOL = 1e-8
DIVISOR_TOL = 1e-8
# generic points used to pick the period-map candidate
ORACLE_POINTS = ((0.11 + 0.03j, 0.07 - 0.02j), (-0.05 + 0.02j, 0.13 + 0.04j))
ORACLE_H = 1e-4


@dataclass(frozen=True)
class HyperellipticCurve:
    m: complex
    m1: complex
    m2: complex

    @classmethod
    def from_E(cls, E, E1, E2) -> "HyperellipticCurve":
        for name, e in (("E", E), ("E1", E1), ("E2", E2)):
            if abs(e - 1) < DISTINCT_TOL * max(1.0, abs(e)):
                raise DegenerateCurve(f"{name} = 1 puts a branch point at infinity")
        curve = cls((E + 1) / (E - 1), (E1 + 1) / (E1 - 1), (E2 + 1) / (E2 - 1))
        curve.check_distinct()
        return curve

    def branch_points(self) -> dict:
        pts = {"0": 0j, "1": 1 + 0j}
        for name in ("m", "m1", "m2"):
            val = getattr(self, name)
            pts["1/" + name] = complex(1 / val) if val != 0 else complex("inf")
        return pts

    def check_distinct(self):
        pts = self.branch_points()
        bad = []
        for (na, a), (nb, b) in itertools.combinations(pts.items(), 2):
            if abs(a - b) < DISTINCT_TOL * max(1.0, abs(a), abs(b)):
                bad.append(f"{na}={nb}")
        if bad:
            raise DegenerateCurve("coinciding branch points: " + ", ".join(bad))

    def f5(self, x):
        return x * (1 - x) * (1 - self.m * x) * (1 - self.m1 * x) * (1 - self.m2 * x)

    def distance_to_branch(self, x) -> float:
        return min(abs(x - b) for b in self.branch_points().values())


def build_curve(cc: ChainConstants) -> HyperellipticCurve:
    return HyperellipticCurve.from_E(cc.k.E, cc.E1, cc.E2)


@dataclass(frozen=True)
class Normalizations:
    """Scalars relating the weighted x-differentials to dmu, dnu.

    ``plus``  = 2 sqrt(cb+cb1) sqrt((1-E)(1-E1) / ((F+1)(1-E2)))  (weight 1 - m2 x)
    ``minus`` = 2 sqrt(cb-cb1) sqrt((1-E)(1-E2) / ((F-1)(1-E1)))  (weight 1 - m1 x)
    """

    plus: complex
    minus: complex

    @property
    def muhat_norm(self):
        return self.plus

    @property
    def nuhat_norm(self):
        return self.minus


def normalization_constants(cc: ChainConstants) -> Normalizations:
    E, F = cc.k.E, cc.k.F
    E1, E2 = cc.E1, cc.E2
    for val, what in ((F + 1, "F = -1"), (F - 1, "F = 1"), (1 - E1, "E1 = 1"), (1 - E2, "E2 = 1")):
        if abs(val) < DISTINCT_TOL:
            raise DegenerateModuli(what)
    plus = 2 * cmath.sqrt(cc.cb + cc.cb1) * cmath.sqrt((1 - E) * (1 - E1) / ((F + 1) * (1 - E2)))
    minus = 2 * cmath.sqrt(cc.cb - cc.cb1) * cmath.sqrt((1 - E) * (1 - E2) / ((F - 1) * (1 - E1)))
    return Normalizations(plus, minus)


@dataclass(frozen=True)
class PeriodMap:
    """(dU1, dU2)^T = K (du, dv)^T and L = K^{-1}."""

    K: np.ndarray
    L: np.ndarray
    muhat_norm: complex
    nuhat_norm: complex
    flags: dict = field(default_factory=dict)


def period_map(dc: DerivativeConstants, cc: ChainConstants, norms: Normalizations,
               pairing: str = "swapped", sigma: int = 1) -> PeriodMap:
    """Compose (du,dv) -> (dmu,dnu) -> (dmuhat,dnuhat) -> (dU1,dU2).

    dmuhat is the differential with weight (1 - m2 x), dnuhat the one with
    weight (1 - m1 x).  ``pairing="direct"`` sets dmuhat = plus * dmu and
    dnuhat = minus * dnu; ``"swapped"`` sets dmuhat = plus * dnu and
    dnuhat = minus * dmu.  ``sigma`` is the relative sign of the two
    normalizations.
    """
    mu = np.array([-1j * dc.beta / dc.B, -1j * dc.delta / dc.B])
    nu = np.array([1j * dc.alpha / dc.A, 1j * dc.gamma / dc.A])
    if pairing == "direct":
        muhat, nuhat = norms.plus * mu, sigma * norms.minus * nu
    elif pairing == "swapped":
        muhat, nuhat = norms.plus * nu, sigma * norms.minus * mu
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    m1, m2 = cc.m1, cc.m2
    if abs(m1 - m2) < DISTINCT_TOL:
        raise SingularPeriodMap("m1 = m2")
    K = np.array([(m1 * muhat - m2 * nuhat) / (m1 - m2), (muhat - nuhat) / (m1 - m2)])
    det = np.linalg.det(K)
    if abs(det) < 1e-12 * max(np.abs(K).max() ** 2, 1e-300):
        raise SingularPeriodMap(f"det K = {det:.3g}")
    return PeriodMap(K, np.linalg.inv(K), norms.plus, norms.minus, {"pairing": pairing, "sigma": sigma})


# ------------------------------------------------------------ per-tau context

_PQ_CHARS = [Characteristic(*FRAME_CHARS[k]) for k in ("P1", "P2", "S1", "S2")]


@dataclass
class InversionContext:
    """Everything that depends on tau only, computed once."""

    tau: RiemannMatrix
    eps: float
    k: KummerCoefficients
    cc: ChainConstants
    dc: DerivativeConstants
    curve: HyperellipticCurve
    norms: Normalizations
    pmap: PeriodMap | None = None

    def pq(self, u, v):
        vals, _, _ = theta_many(_PQ_CHARS, u, v, self.tau, self.eps)
        P1, P2, S1, S2 = (complex(z) for z in vals)
        scale = max(abs(P1), abs(P2), abs(S1), abs(S2))
        if abs(P1 * P2) < DIVISOR_TOL * scale ** 2:
            raise PoleAtPoint(f"P1 P2 vanishes at ({u}, {v}): theta divisor")
        return S1 / P1, S2 / P2

    def x_pair(self, u, v, ref=None):
        """(x, x', p, q); with ``ref`` the root labels follow the reference pair."""
        p, q = self.pq(u, v)
        x, xp = x_from_pq(p, q, self.k.E)
        if ref is not None and abs(x - ref[0]) + abs(xp - ref[1]) > abs(xp - ref[0]) + abs(x - ref[1]):
            x, xp = xp, x
        return x, xp, p, q


def x_from_pq(p, q, E, dd=None):
    """Roots x, x' as functions of p, q (principal Delta(p)Delta(q) unless given)."""
    if dd is None:
        dd = cmath.sqrt(quartic(E, p) * quartic(E, q))
    num = E * (1 + p * p * q * q) - (p * p + q * q)
    den = (E + 1) * (p * q + 1) ** 2
    return (num - dd) / den, (num + dd) / den


def x_from_fg(p, q, cc: ChainConstants, dd=None):
    """Same roots through f = prod (1 + alpha r)/(1 - alpha r), g likewise with beta.

    sqrt(fg) is taken as +Delta(p)Delta(q) / prod (1 - alpha r)(1 - beta r).
    """
    E = cc.k.E
    a, b = cc.alphaE, cc.betaE
    if dd is None:
        dd = cmath.sqrt(quartic(E, p) * quartic(E, q))
    f = (1 + a * p) * (1 + a * q) / ((1 - a * p) * (1 - a * q))
    g = (1 + b * p) * (1 + b * q) / ((1 - b * p) * (1 - b * q))
    den = (1 - a * p) * (1 - a * q) * (1 - b * p) * (1 - b * q)
    sfg = dd / den
    x = (f + g - 2 * sfg) / (1 + f * g - 2 * sfg)
    xp = (f + g + 2 * sfg) / (1 + f * g + 2 * sfg)
    return x, xp, {"f+g": f + g, "1+fg": 1 + f * g, "sqrt(fg)": sfg, "den": den, "fg": f * g}


def fg_route_residual(p, q, cc: ChainConstants) -> float:
    """x, x' via the f, g factorization against the direct formulas."""
    E = cc.k.E
    dd = cmath.sqrt(quartic(E, p) * quartic(E, q))
    x, xp = x_from_pq(p, q, E, dd)
    xf, xpf, parts = x_from_fg(p, q, cc, dd)
    den = parts["den"]
    pq, ss = p * q, p * p + q * q
    r_sum = abs(parts["f+g"] - 2 * (pq * pq + (2 * E - 2) * pq - ss + 1) / den) / max(abs(parts["f+g"]), 1)
    r_prod = abs(parts["1+fg"] - 2 * (pq * pq + (2 * E + 2) * pq + ss + 1) / den) / max(abs(parts["1+fg"]), 1)
    r_sq = abs(parts["sqrt(fg)"] ** 2 - parts["fg"]) / max(abs(parts["fg"]), 1)
    r_x = max(abs(x - xf), abs(xp - xpf)) / max(abs(x), abs(xp), 1)
    return max(r_sum, r_prod, r_sq, r_x)


def symmetric_forms(p, q, E) -> dict:
    """Closed forms for x + x' and -x x' in p, q."""
    pq, ss = p * q, p * p + q * q
    d2 = (E + 1) * (1 + pq) ** 2
    return {
        "sum": 2 * (E * (1 + pq * pq) - ss) / d2,
        "sum_split": 2 * E / (E + 1) - 2 * (ss + 2 * E * pq) / d2,
        "sum_split_minus": 2 * E / (E + 1) - 2 * (ss - 2 * E * pq) / d2,
        "neg_product": -(E - 1) / (E + 1) + 4 * (E - 1) * pq / d2,
    }


# ------------------------------------------------------------ Abelian sums


def _omegas(ctx: InversionContext, u, v, h):
    """x, x' and their central-difference partials along u and v."""
    x0, xp0, _, _ = ctx.x_pair(u, v)
    d = []
    for du, dv in ((h, 0), (0, h)):
        a = ctx.x_pair(u + du, v + dv, ref=(x0, xp0))
        b = ctx.x_pair(u - du, v - dv, ref=(x0, xp0))
        d.append(((a[0] - b[0]) / (2 * h), (a[1] - b[1]) / (2 * h)))
    return x0, xp0, d


def _abelian_terms(ctx, x0, xp0, d):
    r0 = cmath.sqrt(ctx.curve.f5(x0))
    r1 = cmath.sqrt(ctx.curve.f5(xp0))
    # terms[j] = (dx/r0, dx'/r1, x dx/r0, x' dx'/r1) along direction j
    return [(dx / r0, dxp / r1, x0 * dx / r0, xp0 * dxp / r1) for dx, dxp in d]


def _fit_residual(terms, K, s0, s1):
    worst1 = worst2 = 0.0
    for j, (a, b, c, e) in enumerate(terms):
        lhs1 = s0 * a + s1 * b
        lhs2 = s0 * c + s1 * e
        sc1 = max(abs(a), abs(b), abs(K[0, j]), 1e-300)
        sc2 = max(abs(c), abs(e), abs(K[1, j]), 1e-300)
        worst1 = max(worst1, abs(lhs1 - K[0, j]) / sc1)
        worst2 = max(worst2, abs(lhs2 - K[1, j]) / sc2)
    return worst1, worst2


def _first_residual(terms, K, s0, s1):
    a, b = terms[0][0], terms[0][1]
    return abs(s0 * a + s1 * b - K[0, 0]) / max(abs(a), abs(b), abs(K[0, 0]), 1e-300)


def resolve_period_map(ctx: InversionContext, h: float = ORACLE_H) -> PeriodMap:
    """Pick the pairing and relative sign whose K matches finite differences.

    Each candidate is scored at the oracle points with the best local
    sqrt(f5) sign pair; the lowest total wins.  All scores are kept in
    ``flags["candidates"]``.
    """
    samples = []
    for u, v in ORACLE_POINTS:
        x0, xp0, d = _omegas(ctx, u, v, h)
        samples.append(_abelian_terms(ctx, x0, xp0, d))
    scores = {}
    best = None
    for pairing in ("direct", "swapped"):
        for sigma in (1, -1):
            pm = period_map(ctx.dc, ctx.cc, ctx.norms, pairing, sigma)
            total = 0.0
            for terms in samples:
                total += min(max(_fit_residual(terms, pm.K, s0, s1)) for s0 in (1, -1) for s1 in (1, -1))
            scores[f"{pairing}/{sigma:+d}"] = float(total)
            if best is None or total < best[0]:
                best = (total, pm)
    pm = best[1]
    flags = dict(pm.flags)
    flags["candidates"] = scores
    return PeriodMap(pm.K, pm.L, pm.muhat_norm, pm.nuhat_norm, flags)


def prepare(tau: RiemannMatrix, eps: float = PIPELINE_EPS, resolve: bool = True) -> InversionContext:
    """Build the per-tau context (constants, curve, period map)."""
    k = kummer_for_tau(tau, eps)
    cc = chain_constants(k, compute_nulls(tau, eps))
    curve = build_curve(cc)
    ctx = InversionContext(tau, eps, k, cc, derivative_constants(tau, eps), curve, normalization_constants(cc))
    if resolve:
        ctx.pmap = resolve_period_map(ctx)
    return ctx


# ------------------------------------------------------------ solver


@dataclass(frozen=True)
class InversionSolution:
    x: complex
    xprime: complex
    p22: complex
    p12: complex
    U1: complex
    U2: complex
    u: complex
    v: complex
    p: complex
    q: complex


def solve_inversion(U1, U2, tau: RiemannMatrix, eps: float = PIPELINE_EPS, ctx: InversionContext | None = None) -> InversionSolution:
    """x + x' and -x x' at the point (u, v) = L (U1, U2)."""
    ctx = ctx or prepare(tau, eps)
    u, v = ctx.pmap.L @ np.array([complex(U1), complex(U2)])
    x, xp, p, q = ctx.x_pair(complex(u), complex(v))
    return InversionSolution(x, xp, x + xp, -x * xp, complex(U1), complex(U2), complex(u), complex(v), p, q)


@dataclass(frozen=True)
class DifferentialResidual:
    dU1: float
    dU2: float
    signs: tuple


def differential_residual(u, v, tau: RiemannMatrix, h: float = 1e-5, ctx: InversionContext | None = None) -> DifferentialResidual:
    """Finite-difference check of the two Abelian-differential sums against K.

    The sqrt(f5) signs at x and x' are chosen to minimise the first
    residual (dU1 along u), then reused for the other three.
    """
    if not 1e-6 <= h <= 1e-4:
        raise ValueError("h must lie in [1e-6, 1e-4]")
    ctx = ctx or prepare(tau)
    x0, xp0, d = _omegas(ctx, complex(u), complex(v), h)
    for lab, xv in (("x", x0), ("x'", xp0)):
        dist = ctx.curve.distance_to_branch(xv)
        if dist < BRANCH_TOL:
            raise NearBranchPoint(f"{lab} = {xv} is {dist:.2e} from a branch point")
    terms = _abelian_terms(ctx, x0, xp0, d)
    K = ctx.pmap.K
    s0, s1 = min(itertools.product((1, -1), repeat=2), key=lambda s: _first_residual(terms, K, *s))
    r1, r2 = _fit_residual(terms, K, s0, s1)
    if max(r1, r2) > 1e-2:
        # one more chance: another sign pair may fit all four entries
        alt = min(itertools.product((1, -1), repeat=2), key=lambda s: max(_fit_residual(terms, K, *s)))
        ra = _fit_residual(terms, K, *alt)
        if max(ra) < 1e-2:
            raise BranchInconsistency(
                f"sqrt(f5) signs {(s0, s1)} fit the first entry only; {alt} fits all",
                {"signs": alt},
            )
    return DifferentialResidual(float(r1), float(r2), (s0, s1))
