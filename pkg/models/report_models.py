from pydantic import BaseModel, ConfigDict, Field
from typing import Any, Dict, List, Optional, Tuple

from config.settings import Settings
from models.oracle_models import TailFit
from models.singularity_models import TailForm


class AnalysisOptions(BaseModel):
    """Per-run tolerances, defaulting to Settings; echoed into every report."""
    model_config = ConfigDict(frozen=True)

    eps_eq: float = Field(default_factory=lambda: Settings.EPS_EQ)
    truncation: int = Field(default_factory=lambda: Settings.ORACLE_TRUNCATION)
    oracle_method: str = Field(default_factory=lambda: Settings.ORACLE_METHOD)
    fit_window: Tuple[float, float] = Field(default_factory=lambda: Settings.FIT_WINDOW)
    verify: bool = False
    cross_check: bool = False
    zero_search_grid: int = Field(default_factory=lambda: Settings.ZERO_SEARCH_GRID)
    bisection_rtol: float = Field(default_factory=lambda: Settings.BISECTION_RTOL)
    consistency_tol: float = Field(default_factory=lambda: Settings.CONSISTENCY_TOL)
    richardson_depth: int = Field(default_factory=lambda: Settings.RICHARDSON_DEPTH)
    verify_theta_tol: float = Field(default_factory=lambda: Settings.VERIFY_THETA_TOL)
    verify_alpha_tol: float = Field(default_factory=lambda: Settings.VERIFY_ALPHA_TOL)
    verify_constant_rtol: float = Field(default_factory=lambda: Settings.VERIFY_CONSTANT_RTOL)


class OracleComparison(BaseModel):
    """Prediction vs truncated-chain ground truth for the boundary sequence."""
    model_config = ConfigDict(frozen=True)

    truncation: int
    method: str
    residual: float
    mass_at_edge: float
    fit: TailFit
    predicted_rate: float
    predicted_power: float
    predicted_constant: Optional[float] = None
    constant_source: str = Field(description="report | fit")
    constant_ratio: Optional[float] = Field(
        default=None, description="pi_{n,0} / predicted, extrapolated in 1/n from the end of the fit window"
    )
    constant_ratio_band: Optional[float] = Field(default=None, description="Richardson spread of constant_ratio")
    theta_pass: bool
    alpha_pass: bool
    constant_pass: Optional[bool] = None
    passed: bool


class SingularityReport(BaseModel):
    """Machine-readable result of one analysis."""
    model_config = ConfigDict(frozen=True)

    family: str
    inputs: Dict[str, Any] = Field(description="Echo of the validated model file")
    options: Dict[str, Any] = Field(description="Effective tolerances")
    stability: Dict[str, Any]
    classification: Dict[str, Any] = Field(default_factory=dict)
    branch_points: Dict[str, Any]
    pole_candidates: Dict[str, Any]
    case: Dict[str, Any]
    tail_forms: Dict[str, TailForm]
    oracle: Optional[OracleComparison] = None
    warnings: List[str] = Field(default_factory=list)
    assumptions: List[str] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def primary_tail(self) -> TailForm:
        return next(iter(self.tail_forms.values()))
