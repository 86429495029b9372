"""Exception types shared across the package.

Errors are split by what the caller can do about them: input problems
(InvalidSymbol, UndersampledGrid), numerical-quality failures
(NonConvergedQuadrature, TailNotNegligible, IdentityBroken), and
resource-limit signals (BudgetExhausted, which still carries the best
report achieved).
"""

from __future__ import annotations


class KCollapseError(Exception):
    """Base class for all package errors."""


class UndersampledGrid(KCollapseError):
    """Grid too coarse to hold the polynomial's spectrum without collision."""


class NonConvergedQuadrature(KCollapseError):
    """Quasi-norm refinement did not stabilize within the doubling budget."""


class OriginEvaluation(KCollapseError):
    """A homogeneous symbol was evaluated at the origin."""


class InvalidSymbol(KCollapseError):
    """Symbol rejected at construction (vanishes on the sphere, bad order)."""


class ExactnessViolated(KCollapseError):
    """Quadrature asked to certify a mean outside its exactness degree."""


class DegenerateNorm(KCollapseError):
    """A ratio against a zero norm was requested."""


class IdentityBroken(KCollapseError):
    """An identity that must hold to near machine precision failed."""


class ApproximationTargetMissed(KCollapseError):
    """Initial approximant misses a caller-supplied error budget."""


class TailNotNegligible(KCollapseError):
    """Truncated lattice/window tail is too large for a trustworthy result."""


class BudgetExhausted(KCollapseError):
    """Search hit its scale limits before certifying.

    Signals a desk-scale resource limit, not a mathematical failure. The
    partially successful report is attached as ``report`` and ``leg`` names
    the first leg ('I1', 'I2', 'J2', 'total') that could not be closed.
    """

    def __init__(self, message: str, report=None, leg: str = ""):
        super().__init__(message)
        self.report = report
        self.leg = leg
