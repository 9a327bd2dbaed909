"""Exception hierarchy shared by all modules.

Every error carries a process exit code so the command line tool can map
failures onto its documented contract: 0 ok, 2 configuration, 3 data,
4 convergence, 5 internal.
"""

from __future__ import annotations


class AsymHedgeError(Exception):
    """Base class for all package errors."""

    exit_code = 5


class ConfigError(AsymHedgeError):
    """A run configuration is inconsistent or references missing fields."""

    exit_code = 2


class ConstraintViolationError(AsymHedgeError):
    """A parameter set violates its feasibility constraints."""

    exit_code = 2


class InvalidInputError(AsymHedgeError):
    """Input data violates a structural invariant (lengths, signs, order)."""

    exit_code = 3


class InsufficientDataError(AsymHedgeError):
    """Too few usable observations to run the requested analysis."""

    exit_code = 3


class RankDeficiencyError(AsymHedgeError):
    """A regressor matrix is rank deficient (for example a constant column)."""

    exit_code = 3


class DegenerateHedgeError(AsymHedgeError):
    """A hedge ratio is undefined because a price series never moves."""

    exit_code = 3


class DegenerateCovarianceError(AsymHedgeError):
    """A covariance needed for inference is singular or nonpositive."""

    exit_code = 3


class InvalidStartError(AsymHedgeError):
    """The objective is not finite at the optimizer's starting point."""

    exit_code = 4


class ConvergenceError(AsymHedgeError):
    """Numerical optimization failed to reach the convergence criteria."""

    exit_code = 4


class NonInvertibleInformationError(AsymHedgeError):
    """The observed information matrix cannot be inverted."""

    exit_code = 4


class NoHedgeNeeded(AsymHedgeError):
    """Signal raised when the hedge ratio is exactly zero.

    This is control flow rather than a failure: a zero ratio means the
    futures position adds no variance reduction, so no strategy applies.
    """

    exit_code = 0
