"""Exception hierarchy for tutte-atlas."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from tutteatlas.roots import RootSet


class TutteAtlasError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(TutteAtlasError, ValueError):
    """Input violates a precondition (CLI exit status 1)."""


class ComputationError(TutteAtlasError, ArithmeticError):
    """A numeric stage failed (CLI exit status 2)."""


class NotSymmetricError(ValidationError):
    """Bivariate polynomial is not symmetric in x and y."""


class DisconnectedGraphError(ValidationError):
    """Deletion-contraction was asked for a disconnected multigraph."""


class GraphTooLargeError(ValidationError):
    """Multigraph exceeds the configured edge bound."""


class UnsupportedFamilyError(ValidationError):
    """Operation is undefined for this family or size."""


class RealAxisError(ValidationError):
    """Explicit eigenvalue formulas need Im(z) != 0."""


class InvalidRangeError(ValidationError):
    """Parameter outside the range where the construction applies."""


class SymmetricReductionError(ComputationError):
    """Symmetric reduction left a non-zero remainder."""


class EvaluationOverflowError(ComputationError):
    """Floating evaluation produced a non-finite intermediate."""


class ZeroOfPartitionError(ComputationError):
    """f_n(z) vanishes, so the pressure is undefined."""


class NoUniqueDominantError(ComputationError):
    """Pressure limit requested where dominance is degenerate."""


class NoConvergenceError(ComputationError):
    """Root iteration hit its sweep cap."""

    def __init__(self, message: str, partial: RootSet | None = None) -> None:
        super().__init__(message)
        self.partial = partial
