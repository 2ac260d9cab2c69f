"""Exception hierarchy.

Each class maps onto one CLI exit code (see ``cli.EXIT_CODES``).
"""


class GoepelError(Exception):
    """Base class for all library errors."""


class NotInSiegelDomain(GoepelError):
    """Imaginary part of the period matrix is not positive definite."""


class WrongSignConvention(NotInSiegelDomain):
    """Im tau12 <= 0; negate tau12 (rename n -> -n) to use this library."""


class DegenerateRiemannMatrix(NotInSiegelDomain):
    """Smallest Im-eigenvalue too small for a predictable truncation radius."""


class NonIntegerShift(GoepelError):
    """Shift-rule reduction requested for a non-integer characteristic."""


class NearZeroDenominator(GoepelError):
    """A denominator built from theta constants collapsed."""


class PoleAtPoint(GoepelError):
    """Point lies (numerically) on the theta divisor of a denominator."""


class DegenerateModuli(GoepelError):
    """A quotient guard on the derived constants failed."""


class DegenerateCurve(DegenerateModuli):
    """Branch points of the quintic coincide."""


class SingularLocus(GoepelError):
    """An addition-formula or Moebius denominator vanishes."""


class SingularPeriodMap(GoepelError):
    """The period matrix K is numerically singular."""


class BranchInconsistency(GoepelError):
    """A tracked square-root sign produced an O(1) residual."""

    def __init__(self, message, flags=None):
        super().__init__(message)
        self.flags = dict(flags or {})


class NearBranchPoint(GoepelError):
    """x or x' sits too close to a branch point of the quintic."""
