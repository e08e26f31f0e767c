"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """An input violates a documented precondition (shape, range, symmetry)."""


class InfeasibleError(RuntimeError):
    """The requested design problem has no feasible point.

    For Monte-Carlo harness runs this is an expected outcome (counted as an
    outage), not a bug.
    """


class DegenerateNullSpaceError(RuntimeError):
    """A matrix expected to have a one-dimensional (near-)null space does not."""


class NonConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget before converging."""


class InternalConsistencyError(RuntimeError):
    """A solver produced output that fails its own invariants (a bug, not bad input)."""
