from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Literal, Optional

import math

Provenance = Literal["closed_form", "numeric_estimate", "unavailable"]


class PoleCandidates(BaseModel):
    """Competing singularity candidates on the positive real axis.

    For the SRBM the branch point field holds x2 and the search interval is (0, x2].
    """
    model_config = ConfigDict(frozen=True)

    x_star: float = Field(description="Zero of the boundary kernel along Y0, or +inf")
    y_tilde: Optional[float] = Field(default=None, description="Mirror zero along X0, if any")
    x_tilde1: float = Field(description="X1(y_tilde) when consistent with Y0, else +inf")
    branch_point: float = Field(description="Branch point bounding the search interval")
    rejected_x_tilde1: Optional[float] = Field(
        default=None, description="X1(y_tilde) discarded by the Y0 consistency filter"
    )
    provenance: Dict[str, str] = Field(default_factory=dict)


class CaseLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_id: int = Field(description="1-4 for walks and SRBM, 1-3 for fluid queues")
    x_dom: float = Field(description="Dominant singularity")
    coincidence: bool = Field(default=False, description="A pole coincides with the branch point")
    near_degenerate: bool = Field(default=False)
    notes: List[str] = Field(default_factory=list)


class SingularBehavior(BaseModel):
    """(1 - x/x_dom)^alpha f(x) -> g; with ``derivative`` the statement is for f'."""
    model_config = ConfigDict(frozen=True)

    alpha: float
    derivative: bool = False
    g: Optional[float] = None


class TailForm(BaseModel):
    """Predicted tail c * n^power * rate^(n - index_offset), or c * x^power * exp(-rate x).

    ``variable`` is "n" for sequences (rate is the geometric ratio theta) and "x"
    for continuous tails (rate is the exponential decay tau).
    """
    model_config = ConfigDict(frozen=True)

    variable: Literal["n", "x"] = "n"
    rate: float
    power: float
    constant: Optional[float] = None
    provenance: Provenance = "unavailable"
    error_band: Optional[float] = None
    index_offset: int = Field(default=1, description="Sequence forms only")
    note: Optional[str] = None

    def predict(self, n: float) -> float:
        if self.constant is None:
            raise ValueError("Tail form has no constant")
        if self.variable == "x":
            return self.constant * n ** self.power * math.exp(-self.rate * n)
        return self.constant * n ** self.power * self.rate ** (n - self.index_offset)

    def with_offset(self, index_offset: int) -> "TailForm":
        """Same tail written against rate^(n - index_offset)."""
        if self.variable != "n" or index_offset == self.index_offset:
            return self
        update = {"index_offset": index_offset}
        scale = self.rate ** (index_offset - self.index_offset)
        if self.constant is not None:
            update["constant"] = self.constant * scale
        if self.error_band is not None:
            update["error_band"] = self.error_band * scale
        return self.model_copy(update=update)
