"""Genus-2 theta series with rational characteristics.

The series is

    theta[a c; b d](x, y; tau) = sum_{m,n} exp(pi i Q(m + a/2, n + c/2)
        + 2 pi i ((m + a/2)(x + b/2) + (n + c/2)(y + d/2)))

with Q(m, n) = tau11 m^2 + tau22 n^2 + 2 tau12 m n.  Sums run over a square
window centred on the peak of the Gaussian envelope, with a radius picked
from an explicit tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateRiemannMatrix,
    NonIntegerShift,
    NotInSiegelDomain,
    WrongSignConvention,
)

DEFAULT_EPS = 1e-12
# below this Im-eigenvalue the radius blows up; evaluation refuses
MIN_LAMBDA = 0.05
_MAX_RADIUS = 400


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(64)
    return Fraction(x)


@dataclass(frozen=True)
class Characteristic:
    """Characteristic [a c; b d], stored as exact rationals.

    Note the field order (a, c, b, d): top row first, as written.
    """

    a: Fraction
    c: Fraction
    b: Fraction
    d: Fraction

    def __post_init__(self):
        for name in ("a", "c", "b", "d"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    @classmethod
    def parse(cls, text: str) -> "Characteristic":
        """Parse ``"a,c,b,d"`` (entries may be fractions like ``1/2``)."""
        parts = [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]
        if len(parts) != 4:
            raise ValueError(f"characteristic needs 4 entries, got {text!r}")
        return cls(*(Fraction(p) for p in parts))

    def as_tuple(self):
        return (self.a, self.c, self.b, self.d)

    @property
    def is_integer(self) -> bool:
        return all(x.denominator == 1 for x in self.as_tuple())

    def parity(self) -> int:
        """(ab + cd) mod 2 for integer characteristics: 1 means odd."""
        if not self.is_integer:
            raise NonIntegerShift("parity is defined here for integer characteristics only")
        return int(self.a * self.b + self.c * self.d) % 2

    def __str__(self):
        return "[{} {}; {} {}]".format(*self.as_tuple())


@dataclass(frozen=True)
class RiemannMatrix:
    tau11: complex
    tau22: complex
    tau12: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.tau11, self.tau12], [self.tau12, self.tau22]], dtype=complex)

    @property
    def imag(self) -> np.ndarray:
        return self.matrix.imag

    @property
    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.imag)[0])

    def doubled(self) -> "RiemannMatrix":
        return RiemannMatrix(2 * self.tau11, 2 * self.tau22, 2 * self.tau12)

    def as_tuple(self):
        return (self.tau11, self.tau22, self.tau12)


@dataclass(frozen=True)
class SeriesTruncation:
    radius: int
    tail_bound: float


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    abs_err: float
    radius: int


def validate_riemann(tau11, tau22, tau12) -> RiemannMatrix:
    """Check the Siegel inequalities and the Im tau12 > 0 convention."""
    t11, t22, t12 = complex(tau11), complex(tau22), complex(tau12)
    if not t11.imag > 0:
        raise NotInSiegelDomain(f"Im tau11 = {t11.imag:g} is not positive")
    if not t22.imag > 0:
        raise NotInSiegelDomain(f"Im tau22 = {t22.imag:g} is not positive")
    det = t11.imag * t22.imag - t12.imag ** 2
    if not det > 0:
        raise NotInSiegelDomain(f"det Im tau = {det:g} is not positive")
    if not t12.imag > 0:
        raise WrongSignConvention(
            f"Im tau12 = {t12.imag:g} must be > 0; replace tau12 by -tau12 (n -> -n)"
        )
    return RiemannMatrix(t11, t22, t12)


def tail_bound(lam: float, radius: int, shift: float = 0.0, deriv: bool = False) -> float:
    """Bound on the terms dropped outside the window of half-width ``radius``.

    Ring j (sup-norm j about the window centre) holds 8j lattice points,
    each at Euclidean distance >= j - 1 from the Gaussian peak when the
    residual offset lies in [-1, 1]^2.  ``shift`` bounds |window centre|,
    which enters the derivative weight 2 pi |n + kappa|.
    """
    total = 0.0
    j = radius + 1
    while True:
        w = 2 * math.pi * (math.sqrt(2) * (j + 1) + shift) if deriv else 1.0
        term = 8 * j * w * math.exp(-math.pi * lam * (j - 1) ** 2)
        total += term
        if term < 1e-30 * max(total, 1e-300) or term == 0.0:
            break
        j += 1
    return total


def _radius_for(lam: float, eps: float, shift: float = 0.0, deriv: bool = False) -> SeriesTruncation:
    r = 1
    while r < _MAX_RADIUS:
        tb = tail_bound(lam, r, shift, deriv)
        if tb < eps:
            return SeriesTruncation(r, tb)
        r += 1
    return SeriesTruncation(r, tail_bound(lam, r, shift, deriv))


def truncation_radius(tau: RiemannMatrix, eps: float) -> SeriesTruncation:
    """Smallest window half-width whose Gaussian tail bound is below ``eps``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return _radius_for(tau.lambda_min, eps)


class _Window:
    """Lattice window for one (a, c) offset at one argument."""

    def __init__(self, kappa, x, y, tau: RiemannMatrix, eps, deriv):
        lam = tau.lambda_min
        if lam < MIN_LAMBDA:
            raise DegenerateRiemannMatrix(
                f"smallest Im-eigenvalue {lam:.3g} < {MIN_LAMBDA}; refusing to sum"
            )
        Y = tau.imag
        yim = np.array([complex(x).imag, complex(y).imag])
        c0 = -np.linalg.solve(Y, yim)
        # |term| = exp(-pi (n - c0)^T Y (n - c0)) * exp(pi c0^T Y c0)
        pref = math.exp(math.pi * float(c0 @ Y @ c0))
        centre = np.round(c0 - np.asarray(kappa, dtype=float))
        shift = float(np.abs(c0).max()) + 1.0
        trunc = _radius_for(lam, eps / pref, shift, deriv)
        self.radius = trunc.radius
        self.abs_err = trunc.tail_bound * pref
        r = np.arange(-self.radius, self.radius + 1)
        self.mm = (centre[0] + r)[:, None] + float(kappa[0])
        self.nn = (centre[1] + r)[None, :] + float(kappa[1])


def _group_by_top(chars: Sequence[Characteristic]):
    groups: dict = {}
    for i, ch in enumerate(chars):
        groups.setdefault((ch.a, ch.c), []).append(i)
    return groups


def theta_many(
    chars: Sequence[Characteristic],
    x: complex,
    y: complex,
    tau: RiemannMatrix,
    eps: float = DEFAULT_EPS,
    partials: bool = False,
):
    """Evaluate several characteristics at one point, sharing the window.

    Returns ``(values, abs_errs, radius)``; with ``partials=True`` also the
    arrays of d/dx and d/dy.
    """
    n = len(chars)
    vals = np.zeros(n, dtype=complex)
    dx = np.zeros(n, dtype=complex)
    dy = np.zeros(n, dtype=complex)
    errs = np.zeros(n)
    radius = 0
    t11, t22, t12 = tau.as_tuple()
    x, y = complex(x), complex(y)
    for (a, c), idx in _group_by_top(chars).items():
        win = _Window((a / 2, c / 2), x, y, tau, eps, partials)
        mm, nn = win.mm, win.nn
        base = 1j * math.pi * (t11 * mm ** 2 + t22 * nn ** 2 + 2 * t12 * mm * nn)
        base = base + 2j * math.pi * (mm * x + nn * y)
        for i in idx:
            ch = chars[i]
            # characteristic bottom row enters only as a real phase
            terms = np.exp(base + 1j * math.pi * (mm * float(ch.b) + nn * float(ch.d)))
            vals[i] = terms.sum()
            if partials:
                dx[i] = (2j * math.pi * mm * terms).sum()
                dy[i] = (2j * math.pi * nn * terms).sum()
            errs[i] = win.abs_err
        radius = max(radius, win.radius)
    if partials:
        return vals, errs, radius, dx, dy
    return vals, errs, radius


def theta(ch: Characteristic, x, y, tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> ThetaValue:
    vals, errs, radius = theta_many([ch], x, y, tau, eps)
    return ThetaValue(complex(vals[0]), float(errs[0]), radius)


def theta_doubled(ch: Characteristic, x, y, tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> ThetaValue:
    """Same series at the doubled moduli 2 tau."""
    return theta(ch, x, y, tau.doubled(), eps)


def theta_partials(ch: Characteristic, x, y, tau: RiemannMatrix, eps: float = DEFAULT_EPS):
    """Term-wise (d/dx, d/dy) of the truncated series."""
    _, _, _, dx, dy = theta_many([ch], x, y, tau, eps, partials=True)
    return complex(dx[0]), complex(dy[0])


def reduce_characteristic(ch: Characteristic):
    """Bring an integer characteristic into [0, 2)^4.

    Shifting a or c by 2 leaves the function unchanged; shifting b by 2
    multiplies by (-1)^a, d by 2 by (-1)^c.  Returns ``(reduced, phase)``
    with theta[ch] = phase * theta[reduced].
    """
    if not ch.is_integer:
        raise NonIntegerShift(f"{ch} has non-integer entries; shift rules need integers")
    a, c, b, d = (int(v) for v in ch.as_tuple())
    kb, br = divmod(b, 2)
    kd, dr = divmod(d, 2)
    sign = (-1) ** ((a * kb + c * kd) % 2)
    return Characteristic(a % 2, c % 2, br, dr), complex(sign)


def characteristics(rows: Iterable[Sequence]) -> list:
    return [Characteristic(*r) for r in rows]
