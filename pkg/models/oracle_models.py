from pydantic import BaseModel, ConfigDict, Field
from typing import Optional, Tuple

import numpy as np


class TruncatedSolution(BaseModel):
    """Stationary vector of the walk restricted to the box {0..N}^2.

    ``pi[m, n]`` is the probability of state (m, n). With the ``qbd`` method the
    horizontal direction is not truncated, so ``beyond_mass`` holds the probability
    of levels m > N and ``pi.sum() + beyond_mass == 1``.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int
    method: str
    pi: np.ndarray
    residual: float = Field(description="l1 norm of the balance-equation defect")
    mass_at_edge: float = Field(description="Probability on the truncation frontier")
    beyond_mass: float = Field(default=0.0)
    x_truncated: bool = Field(default=True, description="False when levels beyond N are solved exactly")

    @property
    def pi00(self) -> float:
        return float(self.pi[0, 0])


class TailFit(BaseModel):
    """Regression of a boundary sequence against c * n^alpha * theta^(n - index_offset)."""
    model_config = ConfigDict(frozen=True)

    theta_hat: float
    alpha_hat: float
    c_hat: float
    window: Tuple[int, int]
    index_offset: int = 1
    r_squared: float
    theta_joint: float = Field(description="theta from a joint fit of log-values on (1, log n, n)")
    theta_halves: Tuple[float, float] = Field(description="theta on the two disjoint half windows")
    alpha_halves: Tuple[float, float]
    accepted: bool = Field(description="Half-window fits agree within the configured tolerances")
    note: Optional[str] = None
