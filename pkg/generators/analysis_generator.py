from typing import Any, Dict, List, Optional, Tuple, Union
import logging
import math

from config.settings import Settings
from models.oracle_models import TruncatedSolution
from models.report_models import AnalysisOptions, OracleComparison, SingularityReport
from models.spec_models import FluidSpec, SrbmSpec, WalkSpec
from pipelines.fluid_pipeline import FluidPipeline
from pipelines.srbm_pipeline import SrbmPipeline
from pipelines.walk_pipeline import WalkPipeline
from processors.oracle import boundary_sequence, default_window, fit_tail, solve_truncated
from tools.asymptotics import observed_constant_ratio
from utils.exceptions import KernelTailError, TruncationSuspectError
from utils.validators import ModelValidator

logger = logging.getLogger(__name__)

AnySpec = Union[WalkSpec, SrbmSpec, FluidSpec]

TOOL_NAME = "kernel-tail"
TOOL_VERSION = "0.1.0"


class AnalysisGenerator:
    """Main orchestrator: validate a model, run its family's pipeline, optionally verify."""

    def __init__(self, options: Optional[AnalysisOptions] = None):
        """
        Initialize the analysis generator.

        Args:
            options: Per-run tolerances (optional, defaults from Settings)
        """
        # Validate configuration
        Settings.validate_config()
        self.options = options or AnalysisOptions()
        self.validator = ModelValidator()

        self.pipelines = {
            "rwqp": WalkPipeline(self.options),
            "srbm": SrbmPipeline(self.options),
            "fluid": FluidPipeline(self.options),
        }

    def load_model(self, raw: Union[Dict[str, Any], AnySpec]) -> AnySpec:
        if isinstance(raw, (WalkSpec, SrbmSpec, FluidSpec)):
            return raw
        return self.validator.validate_model(raw)

    def solve_oracle(self, spec: WalkSpec) -> Tuple[TruncatedSolution, List[str]]:
        """Truncated-chain solution; a suspect truncation is kept with a warning."""
        warnings: List[str] = []
        try:
            ts = solve_truncated(spec, self.options.truncation, self.options.oracle_method)
        except TruncationSuspectError as e:
            warnings.append(f"oracle: {e.message}")
            ts = e.solution
        return ts, warnings

    def compare(self, report: SingularityReport, ts: TruncatedSolution) -> OracleComparison:
        """Fit the oracle's boundary sequence and test it against the predicted tail.

        Raises:
            WindowTooNoisyError: the fit window is too short or holds bad values
        """
        form = report.tail_forms["pi_n0"]
        seq = boundary_sequence(ts)
        window = default_window(ts, self.options.fit_window)
        fit = fit_tail(seq, window, index_offset=form.index_offset)

        theta_pass = abs(fit.theta_hat - form.rate) <= self.options.verify_theta_tol
        alpha_pass = abs(fit.alpha_hat - form.power) <= self.options.verify_alpha_tol
        constant_ratio: Optional[float] = None
        constant_band: Optional[float] = None
        constant_pass: Optional[bool] = None
        if form.constant is not None:
            constant_ratio, band = observed_constant_ratio(seq, form, fit.window[1])
            constant_band = band if math.isfinite(band) else None
            constant_pass = abs(constant_ratio - 1.0) <= self.options.verify_constant_rtol
        passed = theta_pass and alpha_pass and constant_pass is not False
        logger.info(f"verification: theta {theta_pass}, alpha {alpha_pass}, constant {constant_pass}")
        return OracleComparison(
            truncation=ts.N,
            method=ts.method,
            residual=ts.residual,
            mass_at_edge=ts.mass_at_edge,
            fit=fit,
            predicted_rate=form.rate,
            predicted_power=form.power,
            predicted_constant=form.constant,
            constant_source="report" if form.constant is not None else "fit",
            constant_ratio=constant_ratio,
            constant_ratio_band=constant_band,
            theta_pass=theta_pass,
            alpha_pass=alpha_pass,
            constant_pass=constant_pass,
            passed=passed,
        )

    def run(self, raw: Union[Dict[str, Any], AnySpec]) -> Tuple[SingularityReport, Optional[TruncatedSolution]]:
        """
        Analyze one model.

        Args:
            raw: Parsed model file or an already validated spec

        Returns:
            (report, truncated solution or None when no oracle was run)
        """
        spec = self.load_model(raw)
        pipeline = self.pipelines[spec.family]
        warnings: List[str] = []
        ts: Optional[TruncatedSolution] = None

        try:
            if self.options.verify and isinstance(spec, WalkSpec):
                ts, oracle_warnings = self.solve_oracle(spec)
                warnings.extend(oracle_warnings)
            elif self.options.verify:
                warnings.append(f"no truncated-chain oracle for family '{spec.family}'; verification skipped")

            report = pipeline.analyze(spec, ts=ts)
            oracle = self.compare(report, ts) if ts is not None else None
        except (KernelTailError, ValueError):
            raise
        except Exception as e:
            raise RuntimeError(f"Analysis failed: {type(e).__name__}: {str(e)}") from e

        report = report.model_copy(update={
            "oracle": oracle,
            "warnings": report.warnings + warnings,
            "metadata": self._metadata(spec, pipeline),
        })
        for w in report.warnings:
            logger.warning(w)
        return report, ts

    def analyze(self, raw: Union[Dict[str, Any], AnySpec]) -> SingularityReport:
        return self.run(raw)[0]

    def dump_kernel(self, raw: Union[Dict[str, Any], AnySpec]) -> Dict[str, Any]:
        spec = self.load_model(raw)
        return {
            "family": spec.family,
            "inputs": spec.to_model_dict(),
            "kernel": self.pipelines[spec.family].dump_kernel(spec),
        }

    def _metadata(self, spec: AnySpec, pipeline) -> Dict[str, Any]:
        return {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "pipeline": type(pipeline).__name__,
            "name": spec.name,
        }
