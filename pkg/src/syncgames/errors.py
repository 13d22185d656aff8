"""Exception taxonomy shared by every module; mirrors the CLI exit-code partition."""
from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ToolkitError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class VerificationError(ToolkitError):
    """A certified numerical check failed (CLI exit code 3)."""


class BudgetError(ToolkitError):
    """A size or search budget was exceeded; the answer is undecided (CLI exit code 4)."""


class BoundaryAmbiguityError(ValidationError):
    """An eigenvalue sits too close to a spectral-window boundary; widen or shrink the window."""


class ClusterAmbiguityError(VerificationError):
    """Schmidt coefficients cluster together but the resulting blocks fail the reduction check."""
