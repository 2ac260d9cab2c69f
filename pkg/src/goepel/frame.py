"""The 16-function frame P0..S3, its theta-nulls and the duplication formulas."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .theta import DEFAULT_EPS, Characteristic, RiemannMatrix, theta_many

# (a, c, b, d) of each frame entry
FRAME_CHARS = {
    "P0": (0, 0, 1, 1), "P1": (0, 0, 0, 1), "P2": (0, 0, 1, 0), "P3": (0, 0, 0, 0),
    "Q0": (1, 0, 1, 1), "Q1": (1, 0, 0, 1), "Q2": (1, 0, 1, 0), "Q3": (1, 0, 0, 0),
    "R0": (0, 1, 1, 1), "R1": (0, 1, 0, 1), "R2": (0, 1, 1, 0), "R3": (0, 1, 0, 0),
    "S0": (1, 1, 1, 1), "S1": (1, 1, 0, 1), "S2": (1, 1, 1, 0), "S3": (1, 1, 0, 0),
}
FRAME_NAMES = tuple(FRAME_CHARS)
ODD_ENTRIES = ("Q0", "Q2", "R0", "R1", "S1", "S2")

# top rows of the doubled-moduli functions t,u,v,w and T,U,V,W
NULL_TOPS = ((0, 0), (1, 0), (0, 1), (1, 1))

# Hadamard-type matrix; M @ M = 4 I
M = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=float)

# Squares (X3^2, X1^2, X2^2, X0^2) = M @ (n_i * D_i).  Each row lists the null
# paired with T, V, U, W respectively, as indices into (t, u, v, w).
PAIRING = {
    "P": (0, 2, 1, 3),  # tT, vV, uU, wW
    "Q": (1, 3, 0, 2),  # uT, wV, tU, vW
    "R": (2, 0, 3, 1),  # vT, tV, wU, uW
    "S": (3, 1, 2, 0),  # wT, uV, vU, tW
}
# order of the doubled values in the product vector: T, V, U, W
_QUAD_ORDER = (0, 2, 1, 3)
_SQUARE_ORDER = ("3", "1", "2", "0")


@dataclass(frozen=True)
class GoepelFrame:
    P0: complex
    P1: complex
    P2: complex
    P3: complex
    Q0: complex
    Q1: complex
    Q2: complex
    Q3: complex
    R0: complex
    R1: complex
    R2: complex
    R3: complex
    S0: complex
    S1: complex
    S2: complex
    S3: complex
    point: tuple
    tau: RiemannMatrix
    abs_err: float = 0.0

    def as_dict(self):
        return {k: getattr(self, k) for k in FRAME_NAMES}

    def scale(self) -> float:
        return max(abs(getattr(self, k)) for k in FRAME_NAMES)

    def scaled(self, lam: complex) -> "GoepelFrame":
        """Every entry multiplied by ``lam`` (for homogeneity checks)."""
        vals = {k: lam * getattr(self, k) for k in FRAME_NAMES}
        return GoepelFrame(**vals, point=self.point, tau=self.tau, abs_err=self.abs_err)


@dataclass(frozen=True)
class ThetaNulls:
    nt: complex
    nu: complex
    nv: complex
    nw: complex

    def as_tuple(self):
        return (self.nt, self.nu, self.nv, self.nw)

    def scale(self) -> float:
        return max(abs(z) for z in self.as_tuple())


@dataclass(frozen=True)
class DoubledQuad:
    T: complex
    U: complex
    V: complex
    W: complex

    def as_tuple(self):
        return (self.T, self.U, self.V, self.W)


_FRAME_LIST = [Characteristic(*FRAME_CHARS[k]) for k in FRAME_NAMES]
_NULL_LIST = [Characteristic(a, c, 0, 0) for a, c in NULL_TOPS]


def compute_frame(point, tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> GoepelFrame:
    """All 16 frame values at ``point`` in one shared-window pass."""
    u, v = point
    vals, errs, _ = theta_many(_FRAME_LIST, u, v, tau, eps)
    entries = {k: complex(vals[i]) for i, k in enumerate(FRAME_NAMES)}
    return GoepelFrame(**entries, point=(complex(u), complex(v)), tau=tau, abs_err=float(errs.max()))


def frame_partials(point, tau: RiemannMatrix, names=FRAME_NAMES, eps: float = DEFAULT_EPS):
    """Values and term-wise partials of selected frame entries.

    Returns three dicts: values, d/du, d/dv.
    """
    u, v = point
    chars = [Characteristic(*FRAME_CHARS[k]) for k in names]
    vals, _, _, dx, dy = theta_many(chars, u, v, tau, eps, partials=True)
    return (
        {k: complex(vals[i]) for i, k in enumerate(names)},
        {k: complex(dx[i]) for i, k in enumerate(names)},
        {k: complex(dy[i]) for i, k in enumerate(names)},
    )


def compute_nulls(tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> ThetaNulls:
    """t, u, v, w: doubled-moduli values at the origin."""
    vals, _, _ = theta_many(_NULL_LIST, 0, 0, tau.doubled(), eps)
    return ThetaNulls(*(complex(z) for z in vals))


def compute_quad(point, tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> DoubledQuad:
    """T, U, V, W: doubled-moduli values at twice the point."""
    u, v = point
    vals, _, _ = theta_many(_NULL_LIST, 2 * complex(u), 2 * complex(v), tau.doubled(), eps)
    return DoubledQuad(*(complex(z) for z in vals))


def _products(nulls: ThetaNulls, quad: DoubledQuad, family: str) -> np.ndarray:
    n = nulls.as_tuple()
    q = quad.as_tuple()
    return np.array([n[i] * q[j] for i, j in zip(PAIRING[family], _QUAD_ORDER)])


def duplication_forward(nulls: ThetaNulls, quad: DoubledQuad) -> dict:
    """Predicted squares (X3^2, X1^2, X2^2, X0^2) for X in P, Q, R, S."""
    return {fam: M @ _products(nulls, quad, fam) for fam in PAIRING}


def duplication_inverse(squares: np.ndarray) -> np.ndarray:
    """Invert the forward map: (1/4) M applied to a squared 4-vector."""
    return (M @ np.asarray(squares, dtype=complex)) / 4


def frame_squares(frame: GoepelFrame) -> dict:
    """Observed (X3^2, X1^2, X2^2, X0^2) for each family."""
    d = frame.as_dict()
    return {fam: np.array([d[fam + k] ** 2 for k in _SQUARE_ORDER]) for fam in PAIRING}


def duplication_residual(frame: GoepelFrame, nulls: ThetaNulls, quad: DoubledQuad) -> float:
    """Max over the 16 squared equations, normalized by the largest term."""
    pred = duplication_forward(nulls, quad)
    obs = frame_squares(frame)
    worst = 0.0
    for fam in PAIRING:
        terms = _products(nulls, quad, fam)
        scale = max(np.abs(terms).max(), np.abs(obs[fam]).max(), 1e-300)
        worst = max(worst, float(np.abs(obs[fam] - pred[fam]).max() / scale))
    return worst


def product_split(ch1, ch2, u1, u2, v1, v2, tau: RiemannMatrix, eps: float = DEFAULT_EPS) -> complex:
    """Right side of the product formula for theta_ch1(u1+u2, v1+v2) theta_ch2(u1-u2, v1-v2).

    Integer characteristics [a c; b d], [a' c'; b' d'].  The product equals

        sum_{e, f in {0,1}} Th[(a+a')/2 + e, (c+c')/2 + f; b+b', d+d'](2u1, 2v1)
                          * Th[(a-a')/2 + e, (c-c')/2 + f; b-b', d-d'](2u2, 2v2)

    where Th denotes the series at doubled moduli.
    """
    c1 = ch1 if isinstance(ch1, Characteristic) else Characteristic(*ch1)
    c2 = ch2 if isinstance(ch2, Characteristic) else Characteristic(*ch2)
    dbl = tau.doubled()
    left, right = [], []
    for e in (0, 1):
        for f in (0, 1):
            left.append(Characteristic((c1.a + c2.a) / 2 + e, (c1.c + c2.c) / 2 + f, c1.b + c2.b, c1.d + c2.d))
            right.append(Characteristic((c1.a - c2.a) / 2 + e, (c1.c - c2.c) / 2 + f, c1.b - c2.b, c1.d - c2.d))
    lv, _, _ = theta_many(left, 2 * complex(u1), 2 * complex(v1), dbl, eps)
    rv, _, _ = theta_many(right, 2 * complex(u2), 2 * complex(v2), dbl, eps)
    return complex((lv * rv).sum())
