from typing import Any, Dict, List, Optional
import logging

from models.kernel_models import BranchPoints, KernelSystem
from models.oracle_models import TruncatedSolution
from models.report_models import SingularityReport
from models.singularity_models import CaseLabel, TailForm
from models.spec_models import WalkSpec
from pipelines.base_pipeline import BasePipeline
from processors.model_processor import check_stability, classify_walk, mean_drift, two_demand_parameters
from tools.asymptotics import constant_numeric, constants_2demand, singular_behavior, tauberian_map
from tools.kernel import branch_points, build_kernel, dump_kernel
from tools.singularity import classify, cross_check_x_star, pole_candidates
from utils.exceptions import AnalysisError, NoConvergenceError, OracleError, OracleRequiredError, XShapedWalkError

logger = logging.getLogger(__name__)


class WalkPipeline(BasePipeline):
    """Kernel-method pipeline for random walks in the quarter plane."""

    family = "rwqp"
    spec_type = WalkSpec

    def analyze(self, spec: WalkSpec, ts: Optional[TruncatedSolution] = None, **kwargs) -> SingularityReport:
        """
        Dominant singularity of pi1(x) and the tail of pi_{n,0}.

        Args:
            spec: Validated walk
            ts: Truncated solution, used for constants that need P2 or pi2 values

        Returns:
            SingularityReport with the tail form under the key "pi_n0"
        """
        self.validate_input(spec)
        warnings: List[str] = []

        classification = classify_walk(spec)
        if classification.x_shaped:
            raise XShapedWalkError("X-shaped walks are outside the scope of the kernel analysis")
        warnings.extend(classification.warnings)

        stability = check_stability(spec)
        warnings.extend(self.stability_warnings(stability))
        drift = mean_drift(spec)

        ks = build_kernel(spec)
        bp = branch_points(ks)
        if not bp.ordering_verified:
            warnings.append("zero interior drift component: branch-point ordering not strictly checked")

        search = dict(self.search_kwargs(), consistency_tol=self.options.consistency_tol)
        pc = pole_candidates(ks, bp, **search)
        if pc.rejected_x_tilde1 is not None:
            warnings.append(f"x~1 = {pc.rejected_x_tilde1} rejected by the Y0 consistency filter")
        label = classify(pc, self.options.eps_eq)
        warnings.extend(n for n in label.notes if n.startswith("near-degenerate"))
        logger.info(f"walk classified: Case {label.case_id}, x_dom = {label.x_dom}")

        form = self._tail_form(spec, ks, bp, label, ts, warnings)

        pole_block: Dict[str, Any] = pc.model_dump()
        if self.options.cross_check:
            check = cross_check_x_star(ks, bp, pc.x_star)
            pole_block["resultant_cross_check"] = check
            if not check["agrees"]:
                warnings.append("resultant cross-check disagrees with the grid search for x*")

        classification_block = classification.model_dump()
        classification_block["drift"] = drift.model_dump()
        return self.build_report(
            spec,
            stability,
            branch_points=bp.model_dump(),
            pole_candidates=pole_block,
            case=label.model_dump(),
            tail_forms={"pi_n0": form},
            classification=classification_block,
            warnings=warnings,
            assumptions=["stationarity of the walk is taken from the drift test or the user's assertion"],
        )

    def _tail_form(
        self,
        spec: WalkSpec,
        ks: KernelSystem,
        bp: BranchPoints,
        label: CaseLabel,
        ts: Optional[TruncatedSolution],
        warnings: List[str],
    ) -> TailForm:
        sb = singular_behavior(label.case_id)
        if two_demand_parameters(spec) is not None:
            shape = tauberian_map(sb, label.x_dom, index_offset=0)
            try:
                value, provenance = constants_2demand(spec, label.case_id, bp, ts)
            except OracleRequiredError as e:
                warnings.append(f"constant unavailable: {e.message}; rerun with --verify")
                return shape
            except OracleError as e:
                warnings.append(f"constant unavailable: {e.message}")
                return shape
            return shape.model_copy(update={"constant": value, "provenance": provenance, "note": "2-demand constant, theta^m indexing"})

        if ts is None:
            return tauberian_map(sb, label.x_dom)
        try:
            g, band = constant_numeric(ks, bp, label, ts, depth=self.options.richardson_depth)
        except (NoConvergenceError, OracleError) as e:
            warnings.append(f"constant unavailable: {e.message}")
            return tauberian_map(sb, label.x_dom)
        sb = singular_behavior(label.case_id, g=g)
        return tauberian_map(sb, label.x_dom, provenance="numeric_estimate", error_band=band)

    def dump_kernel(self, spec: WalkSpec) -> Dict[str, Any]:
        self.validate_input(spec)
        ks = build_kernel(spec)
        try:
            bp = branch_points(ks)
        except AnalysisError as e:
            logger.warning(f"branch points unavailable: {e}")
            bp = None
        return dump_kernel(ks, bp)
