from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Type

from models.report_models import AnalysisOptions, SingularityReport
from models.singularity_models import TailForm
from models.spec_models import StabilityVerdict
from utils.exceptions import UnknownFamilyError


class BasePipeline(ABC):
    """Abstract base class for the per-family analysis pipelines."""

    family: str = ""
    spec_type: Type = object

    def __init__(self, options: Optional[AnalysisOptions] = None):
        """Initialize the pipeline with per-run options (defaults from Settings)."""
        self.options = options or AnalysisOptions()

    @abstractmethod
    def analyze(self, spec, **kwargs) -> SingularityReport:
        """
        Locate and classify the dominant singularity of a model.

        Args:
            spec: Validated model of this pipeline's family
            **kwargs: Extra inputs specific to the family (e.g. a truncated solution)

        Returns:
            SingularityReport with branch points, pole candidates, case and tail forms
        """
        pass

    @abstractmethod
    def dump_kernel(self, spec) -> Dict[str, Any]:
        """
        Kernel polynomials and branch points of a model, JSON-ready.

        Args:
            spec: Validated model of this pipeline's family

        Returns:
            Dict of coefficient lists, symbolic forms and branch points
        """
        pass

    def validate_input(self, spec) -> bool:
        """Check that the spec belongs to this pipeline's family."""
        if not isinstance(spec, self.spec_type):
            raise UnknownFamilyError(
                f"{type(self).__name__} cannot analyze {type(spec).__name__}", family=getattr(spec, "family", None)
            )
        return True

    def search_kwargs(self) -> Dict[str, Any]:
        """Zero-search tolerances shared by every pole search."""
        return {
            "grid": self.options.zero_search_grid,
            "rtol": self.options.bisection_rtol,
            "eps_eq": self.options.eps_eq,
        }

    @staticmethod
    def stability_warnings(verdict: StabilityVerdict) -> List[str]:
        warnings = []
        if verdict.stable is None:
            warnings.append(f"stability indeterminate: {verdict.reason}")
        elif verdict.stable is False:
            warnings.append(f"stability test failed ({verdict.reason}); proceeding on the asserted stability")
        if not verdict.verified:
            warnings.append("stability verdict is an advisory drift test")
        return warnings

    def build_report(
        self,
        spec,
        stability: StabilityVerdict,
        branch_points: Dict[str, Any],
        pole_candidates: Dict[str, Any],
        case: Dict[str, Any],
        tail_forms: Dict[str, TailForm],
        classification: Optional[Dict[str, Any]] = None,
        warnings: Optional[List[str]] = None,
        assumptions: Optional[List[str]] = None,
    ) -> SingularityReport:
        return SingularityReport(
            family=self.family,
            inputs=spec.to_model_dict(),
            options=self.options.model_dump(),
            stability=stability.model_dump(),
            classification=classification or {},
            branch_points=branch_points,
            pole_candidates=pole_candidates,
            case=case,
            tail_forms=tail_forms,
            warnings=warnings or [],
            assumptions=assumptions or [],
        )
