"""Seeded random draws of moduli and points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModuli, GoepelError, NearZeroDenominator
from .theta import RiemannMatrix, validate_riemann


@dataclass(frozen=True)
class SamplerConfig:
    im_diag: tuple = (0.5, 2.0)
    im_offdiag_frac: float = 0.9
    re_range: tuple = (-0.5, 0.5)
    eig_range: tuple = (0.3, 3.0)
    point_re: float = 0.3
    point_im: float = 0.1
    max_tries: int = 200


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, sample index); order of use is irrelevant."""
    return np.random.default_rng([int(seed), int(index)])


def draw_tau(rng: np.random.Generator, cfg: SamplerConfig = SamplerConfig()) -> RiemannMatrix:
    """One period matrix with Im-eigenvalues inside ``cfg.eig_range``."""
    for _ in range(cfg.max_tries):
        a, b = rng.uniform(*cfg.im_diag, size=2)
        c = rng.uniform(0, cfg.im_offdiag_frac * np.sqrt(a * b))
        re = rng.uniform(*cfg.re_range, size=3)
        if c <= 0:
            continue
        eig = np.linalg.eigvalsh(np.array([[a, c], [c, b]]))
        if eig[0] < cfg.eig_range[0] or eig[1] > cfg.eig_range[1]:
            continue
        return validate_riemann(complex(re[0], a), complex(re[1], b), complex(re[2], c))
    raise RuntimeError("tau sampler exhausted its attempts")


def draw_point(rng: np.random.Generator, cfg: SamplerConfig = SamplerConfig()):
    re = rng.uniform(-cfg.point_re, cfg.point_re, size=2)
    im = rng.uniform(-cfg.point_im, cfg.point_im, size=2)
    return complex(re[0], im[0]), complex(re[1], im[1])


def draw_generic_tau(rng: np.random.Generator, build, cfg: SamplerConfig = SamplerConfig()):
    """Draw tau until ``build(tau)`` succeeds; returns ``(tau, build(tau))``.

    Draws where a derived-constant guard trips are discarded.
    """
    for _ in range(cfg.max_tries):
        tau = draw_tau(rng, cfg)
        try:
            return tau, build(tau)
        except (DegenerateModuli, NearZeroDenominator):
            continue
    raise GoepelError("no non-degenerate tau found")
