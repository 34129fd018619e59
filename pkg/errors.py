"""
Error types for the Poisson normal form engine.

Every error is a ValueError so callers that only know the generic
convention keep working; the CLI maps ``exit_code`` to the process status.
"""

from typing import Optional


class PnfError(ValueError):
    """Base class for all engine errors."""

    exit_code = 5


class StructuralError(PnfError):
    """Mismatched variable counts, arities or degrees."""

    exit_code = 3


class TruncationLossError(PnfError):
    """An operation would silently drop terms above the truncation order."""


class DomainError(PnfError):
    """An argument lies outside the domain of a partial operation."""


class ParseError(PnfError):
    """Malformed problem, diffeo or report file."""

    exit_code = 2

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ConstructorCheckError(PnfError):
    """Input rejected by a constructor check (H5, Jacobi, rank)."""

    exit_code = 3


class HypothesisError(PnfError):
    """A hypothesis of the requested pipeline does not hold."""

    exit_code = 4


class StageError(PnfError):
    """A pipeline stage failed; ``stage`` names where."""

    exit_code = 5

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


class NonCommutingError(StageError):
    def __init__(self, i: int, j: int, bracket=None):
        self.pair = (i, j)
        self.bracket = bracket
        super().__init__("normalize_family", f"fields {i + 1} and {j + 1} do not commute up to order")


class InconsistentResonanceError(StageError):
    def __init__(self, slot: str):
        super().__init__("normalize_family", f"non-resonant coefficient survived at {slot}")


class NonInvertibleLinearizationError(StageError):
    def __init__(self, message: str):
        super().__init__("reduce_poisson", message)


class ParameterDependentEigenvaluesError(StageError):
    def __init__(self, message: str):
        super().__init__("reduce_poisson", message)


class OrderTwoViolation(HypothesisError):
    """Bracket between phase coordinates has a term of x′-degree below 2."""


class ResonantSupportError(StageError):
    def __init__(self, message: str):
        super().__init__("resonant_support", message)


class CocycleError(StageError):
    def __init__(self, message: str):
        super().__init__("rescale_quadratic_constants", message)


class LambdaRankError(StageError):
    def __init__(self, message: str):
        super().__init__("rescale_quadratic_constants", message)


class SaitoDivisionError(StageError):
    def __init__(self, message: str):
        super().__init__("saito_divide", message)


class IncompatibleSystemError(StageError):
    def __init__(self, message: str):
        super().__init__("frobenius_solve", message)


class StraighteningError(StageError):
    def __init__(self, message: str):
        super().__init__("straighten_field", message)


class RankConditionError(HypothesisError):
    """P^(p+1) does not vanish up to order."""


class UnexpectedNormalFormError(StageError):
    """The output misses a shape its hypotheses force, e.g. 𝓛 when n ≤ p + 1."""

    def __init__(self, stage: str, message: str):
        super().__init__(stage, message)
