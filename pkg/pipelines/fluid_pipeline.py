from typing import Any, Dict, List
import logging
import math

from models.report_models import SingularityReport
from models.spec_models import FluidSpec
from pipelines.base_pipeline import BasePipeline
from processors.model_processor import check_stability
from tools.fluid import (
    find_alpha_star,
    fluid_branch_points,
    fluid_classify,
    fluid_dump,
    fluid_kernel,
    mm1_constants,
)

logger = logging.getLogger(__name__)


class FluidPipeline(BasePipeline):
    """Kernel-method pipeline for M/M/c-driven fluid queues."""

    family = "fluid"
    spec_type = FluidSpec

    def analyze(self, spec: FluidSpec, **kwargs) -> SingularityReport:
        """
        Dominant singularity alpha_dom in the buffer direction and z_dom in the queue direction.

        Returns:
            SingularityReport with tail forms "density", "boundary" and "marginal"
        """
        self.validate_input(spec)
        stability = check_stability(spec)
        warnings: List[str] = []
        assumptions: List[str] = []

        fk = fluid_kernel(spec)
        alpha1, alpha2 = fluid_branch_points(fk)
        alpha_star, k = find_alpha_star(
            fk, grid=self.options.zero_search_grid, rtol=self.options.bisection_rtol, eps_eq=self.options.eps_eq,
        )
        label, forms, notes = fluid_classify(spec, alpha_star, k, self.options.eps_eq)
        warnings.extend(n for n in notes if n.startswith("near-degenerate"))
        if k > 1:
            warnings.append(f"alpha* is a zero of order {k}")

        pole_block: Dict[str, Any] = {
            "alpha_star": alpha_star,
            "multiplicity": k,
            "provenance": {"alpha_star": "numeric_estimate", "alpha1": "closed_form"},
        }
        if spec.c == 1:
            mm1_root = spec.mu / (spec.r + 1.0) - spec.lam
            pole_block["closed_form_alpha_star"] = mm1_root
            if label.case_id in (1, 2):
                constants = mm1_constants(fk, label.case_id, label.x_dom)
                pole_block["mm1_constants"] = constants
                if constants["numerator"] == 0:
                    warnings.append("boundary transform numerator vanishes at the dominant singularity")
        else:
            assumptions.append("numerator of the boundary transform assumed nonzero at alpha_dom (c >= 2)")
            assumptions.append("boundary constants k_n and Pi_i(0), i <= c-2, do not enter the singularity analysis")
        if math.isinf(alpha_star):
            assumptions.append("no zero of H1^(alpha, Z0(alpha)) in (0, alpha1]")
        logger.info(f"fluid classified: Case {label.case_id}, alpha_dom = {label.x_dom}")

        return self.build_report(
            spec,
            stability,
            branch_points={"alpha": [alpha1, alpha2], "cut_abscissa": fk.cut_abscissa, "z_dom": fk.z_dom},
            pole_candidates=pole_block,
            case=label.model_dump(),
            tail_forms=forms,
            warnings=warnings,
            assumptions=assumptions,
        )

    def dump_kernel(self, spec: FluidSpec) -> Dict[str, Any]:
        self.validate_input(spec)
        return fluid_dump(fluid_kernel(spec))
