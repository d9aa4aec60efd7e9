"""Exception types shared across the package."""

__all__ = ["SolveError", "RangeError", "InvariantViolation"]


class SolveError(RuntimeError):
    """A numerical routine failed to converge or produce usable output."""


class RangeError(ValueError):
    """An evaluation point left the tabulated or admissible range."""


class InvariantViolation(RuntimeError):
    """A cross-checked mathematical identity failed beyond tolerance."""
