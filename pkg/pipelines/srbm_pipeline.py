from typing import Any, Dict, List
import logging
import math

import numpy as np

from models.report_models import SingularityReport
from models.spec_models import SrbmSpec
from pipelines.base_pipeline import BasePipeline
from processors.model_processor import check_stability
from tools.srbm import (
    closed_form_x_star,
    srbm_branch_points,
    srbm_classify,
    srbm_dump,
    srbm_kernel,
    srbm_mirror_branch_points,
    srbm_poles,
    y0_is_min_modulus,
)

logger = logging.getLogger(__name__)


class SrbmPipeline(BasePipeline):
    """Kernel-method pipeline for reflected Brownian motion in the quadrant."""

    family = "srbm"
    spec_type = SrbmSpec

    def analyze(self, spec: SrbmSpec, **kwargs) -> SingularityReport:
        """
        Decay rate tau1 and the tail of the boundary measure V2(x, inf).

        Returns:
            SingularityReport with the tail form under the key "V2"
        """
        self.validate_input(spec)
        stability = check_stability(spec)
        warnings: List[str] = []

        sk = srbm_kernel(spec)
        x1, x2 = srbm_branch_points(sk)
        y1, y2 = srbm_mirror_branch_points(sk)
        samples = np.linspace(x1, x2, 65)[1:-1]
        if not y0_is_min_modulus(sk, samples):
            warnings.append("Y- does not have the smaller modulus on every sample of (x1, x2)")

        search = dict(self.search_kwargs(), consistency_tol=self.options.consistency_tol)
        pc = srbm_poles(sk, **search)
        if pc.rejected_x_tilde1 is not None:
            warnings.append(f"x~ = {pc.rejected_x_tilde1} rejected by the Y0 consistency filter")

        pole_block: Dict[str, Any] = pc.model_dump()
        closed = closed_form_x_star(sk)
        pole_block["closed_form_x_star"] = closed
        found = pc.x_star if math.isfinite(pc.x_star) else None
        if (closed is None) != (found is None) or (
            closed is not None and abs(closed - found) > 1e-8 * max(1.0, abs(closed))
        ):
            warnings.append(f"closed-form x* ({closed}) disagrees with the grid search ({found})")

        label, form, notes = srbm_classify(spec, pc, self.options.eps_eq)
        warnings.extend(n for n in label.notes if n.startswith("near-degenerate"))
        logger.info(f"srbm classified: Case {label.case_id}, tau1 = {label.x_dom}")

        return self.build_report(
            spec,
            stability,
            branch_points={"x": [x1, x2], "y": [y1, y2]},
            pole_candidates=pole_block,
            case=label.model_dump(),
            tail_forms={"V2": form},
            classification={"notes": notes},
            warnings=warnings,
            assumptions=[
                "boundedness condition of the continuous Tauberian theorem is assumed, not verified",
                "pole candidates are searched on the real axis only; complex poles are not treated",
            ],
        )

    def dump_kernel(self, spec: SrbmSpec) -> Dict[str, Any]:
        self.validate_input(spec)
        return srbm_dump(srbm_kernel(spec))
