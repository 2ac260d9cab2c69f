"""Genus-2 theta functions, the Goepel frame and Jacobi inversion."""

from .abel import InversionSolution, differential_residual, prepare, solve_inversion
from .errors import (
    BranchInconsistency,
    DegenerateModuli,
    GoepelError,
    NotInSiegelDomain,
    PoleAtPoint,
    WrongSignConvention,
)
from .frame import GoepelFrame, compute_frame, compute_nulls
from .kummer import compute_AB, compute_ga_gb, kummer_for_tau
from .theta import Characteristic, RiemannMatrix, theta, theta_doubled, validate_riemann

__version__ = "0.1.0"
