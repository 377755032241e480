"""Exception hierarchy for model validation, analysis and oracle failures.

Every error carries a stable ``code`` and a ``details`` dict so the CLI can
emit a machine-readable error document on stderr.
"""
from __future__ import annotations
from typing import Any, Dict, Optional

__all__ = [
    "KernelTailError",
    "ModelValidationError",
    "NonStochasticError",
    "NegativeEntryError",
    "WrongShapeError",
    "UnknownFamilyError",
    "DegenerateCovarianceError",
    "AnalysisError",
    "UnstableModelError",
    "SingularKernelError",
    "XShapedWalkError",
    "GenusZeroError",
    "OrderingViolatedError",
    "OnCutError",
    "PoleOfBranchError",
    "MultipleZerosError",
    "DegenerateExponentError",
    "OracleRequiredError",
    "NoConvergenceError",
    "RecursionPoleError",
    "OracleError",
    "NotConvergedError",
    "TruncationSuspectError",
    "OutsideConvergenceError",
    "WindowTooNoisyError",
    "NoOracleError",
]


class KernelTailError(Exception):
    """Base class for all toolkit errors."""

    code = "kernel_tail_error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


# Validation (exit code 2)

class ModelValidationError(KernelTailError, ValueError):
    code = "validation_error"


class NonStochasticError(ModelValidationError):
    code = "non_stochastic"

    def __init__(self, kernel: str, deviation: float):
        super().__init__(
            f"Kernel '{kernel}' does not sum to 1 (deviation {deviation:.3e})",
            kernel=kernel,
            deviation=deviation,
        )


class NegativeEntryError(ModelValidationError):
    code = "negative_entry"


class WrongShapeError(ModelValidationError):
    code = "wrong_shape"


class UnknownFamilyError(ModelValidationError):
    code = "unknown_family"


class DegenerateCovarianceError(ModelValidationError):
    code = "degenerate_covariance"


# Analysis (exit code 3)

class AnalysisError(KernelTailError):
    code = "analysis_error"


class UnstableModelError(AnalysisError):
    code = "unstable"


class SingularKernelError(AnalysisError):
    code = "singular_kernel"


class XShapedWalkError(AnalysisError):
    code = "x_shaped_walk"


class GenusZeroError(AnalysisError):
    code = "genus_zero"


class OrderingViolatedError(AnalysisError):
    code = "ordering_violated"


class OnCutError(AnalysisError):
    code = "on_cut"


class PoleOfBranchError(AnalysisError):
    """Raised when a(x) = 0; ``finite_root`` holds the remaining finite branch value."""

    code = "pole_of_branch"

    def __init__(self, message: str, finite_root: Optional[complex] = None, **details: Any):
        super().__init__(message, **details)
        self.finite_root = finite_root


class MultipleZerosError(AnalysisError):
    code = "multiple_zeros"


class DegenerateExponentError(AnalysisError):
    code = "degenerate_exponent"


class OracleRequiredError(AnalysisError):
    code = "oracle_required"


class NoConvergenceError(AnalysisError):
    code = "no_convergence"


class RecursionPoleError(AnalysisError):
    code = "recursion_pole"


# Oracle

class OracleError(KernelTailError):
    code = "oracle_error"


class NotConvergedError(OracleError):
    code = "not_converged"


class TruncationSuspectError(OracleError):
    """Raised when too much mass sits on the truncation frontier; ``solution`` is still usable."""

    code = "truncation_suspect"

    def __init__(self, message: str, solution: Any = None, **details: Any):
        super().__init__(message, **details)
        self.solution = solution


class OutsideConvergenceError(OracleError):
    code = "outside_convergence"


class WindowTooNoisyError(OracleError):
    code = "window_too_noisy"


class NoOracleError(OracleError):
    code = "no_oracle"
