"""Hypothesis strategies for period matrices and points."""

import numpy as np
from hypothesis import strategies as st

from goepel.sampling import SamplerConfig, draw_generic_tau, draw_point, draw_tau, sample_rng


def _tau_from_seed(seed):
    return draw_tau(sample_rng(seed, 0))


taus = st.integers(0, 2 ** 31 - 1).map(_tau_from_seed)
small = st.floats(-0.4, 0.4, allow_nan=False)
small_complex = st.builds(complex, small, st.floats(-0.15, 0.15, allow_nan=False))
points = st.tuples(small_complex, small_complex)
int_chars = st.tuples(*(st.integers(-3, 3) for _ in range(4)))
unit_chars = st.tuples(*(st.integers(0, 1) for _ in range(4)))


def generic_draw(seed, build):
    """A non-degenerate tau and ``build(tau)`` from one seed."""
    return draw_generic_tau(sample_rng(seed, 0), build)


def point_from_seed(seed, i=1):
    return draw_point(sample_rng(seed, i), SamplerConfig())


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol * max(abs(b), 1.0)


__all__ = ["taus", "points", "small_complex", "int_chars", "unit_chars", "generic_draw",
           "point_from_seed", "rel", "close", "np"]
