from pydantic import BaseModel, ConfigDict, Field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np

# Offsets (i_min, j_min) mapping a jump (i, j) to the array cell [i - i_min][j - j_min]
KERNEL_OFFSETS: Dict[str, Tuple[int, int]] = {
    "interior": (-1, -1),
    "hwall": (-1, 0),
    "vwall": (0, -1),
    "origin": (0, 0),
}

KERNEL_SHAPES: Dict[str, Tuple[int, int]] = {
    "interior": (3, 3),
    "hwall": (3, 2),
    "vwall": (2, 3),
    "origin": (2, 2),
}

Matrix = Tuple[Tuple[float, ...], ...]


class WalkSpec(BaseModel):
    """Transition law of a random walk in the quarter plane.

    Each kernel is stored row-major with row index i - i_min and column
    index j - j_min (see KERNEL_OFFSETS).
    """
    model_config = ConfigDict(frozen=True)

    family: Literal["rwqp"] = "rwqp"
    interior: Matrix = Field(description="p_{i,j}, i,j in {-1,0,1} (3x3)")
    hwall: Matrix = Field(description="p1_{i,j} on the horizontal axis, i in {-1,0,1}, j in {0,1} (3x2)")
    vwall: Matrix = Field(description="p2_{i,j} on the vertical axis, i in {0,1}, j in {-1,0,1} (2x3)")
    origin: Matrix = Field(description="p0_{i,j} at the origin, i,j in {0,1} (2x2)")
    assume_stable: bool = Field(default=False, description="User assertion that the walk is positive recurrent")
    name: Optional[str] = Field(default=None, description="Free-form label echoed into reports")

    def kernel(self, which: str) -> np.ndarray:
        return np.asarray(getattr(self, which), dtype=float)

    def prob(self, which: str, i: int, j: int) -> float:
        """Probability of jump (i, j) in the named kernel (0 outside its support)."""
        i_min, j_min = KERNEL_OFFSETS[which]
        rows, cols = KERNEL_SHAPES[which]
        r, c = i - i_min, j - j_min
        if 0 <= r < rows and 0 <= c < cols:
            return float(getattr(self, which)[r][c])
        return 0.0

    def jumps(self, which: str) -> List[Tuple[int, int, float]]:
        """Nonzero (i, j, p) triples of the named kernel."""
        i_min, j_min = KERNEL_OFFSETS[which]
        out = []
        for r, row in enumerate(getattr(self, which)):
            for c, p in enumerate(row):
                if p > 0:
                    out.append((r + i_min, c + j_min, float(p)))
        return out

    def to_model_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "family": self.family,
            "interior": [list(row) for row in self.interior],
            "hwall": [list(row) for row in self.hwall],
            "vwall": [list(row) for row in self.vwall],
            "origin": [list(row) for row in self.origin],
        }
        if self.assume_stable:
            data["assume_stable"] = True
        if self.name:
            data["name"] = self.name
        return data


class DriftVector(BaseModel):
    """Mean interior increment of the walk."""
    model_config = ConfigDict(frozen=True)

    Mx: float = Field(description="Mean horizontal interior increment")
    My: float = Field(description="Mean vertical interior increment")
    light_tailed: bool = Field(description="True when M != 0")


class WalkClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    nonsingular: bool
    genus: int = Field(description="0 if D1 has a repeated root, else 1")
    x_shaped: bool
    irreducible: bool = Field(default=True, description="False when a bilinear factorization was detected")
    warnings: List[str] = Field(default_factory=list)


class SrbmSpec(BaseModel):
    """Semimartingale reflected Brownian motion Z = X + RY in the quadrant."""
    model_config = ConfigDict(frozen=True)

    family: Literal["srbm"] = "srbm"
    mu: Tuple[float, float] = Field(description="Drift vector")
    sigma: Tuple[Tuple[float, float], Tuple[float, float]] = Field(description="Covariance matrix")
    R: Tuple[Tuple[float, float], Tuple[float, float]] = Field(description="Reflection matrix")
    name: Optional[str] = None

    @property
    def sigma11(self) -> float:
        return self.sigma[0][0]

    @property
    def sigma12(self) -> float:
        return self.sigma[0][1]

    @property
    def sigma22(self) -> float:
        return self.sigma[1][1]

    def to_model_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "family": self.family,
            "mu": list(self.mu),
            "sigma": [list(row) for row in self.sigma],
            "R": [list(row) for row in self.R],
        }
        if self.name:
            data["name"] = self.name
        return data


class FluidSpec(BaseModel):
    """Fluid queue driven by an M/M/c queue.

    Net fluid rates are i - c while fewer than c servers are busy and r otherwise.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    family: Literal["fluid"] = "fluid"
    lam: float = Field(alias="lambda", description="Arrival rate")
    mu: float = Field(description="Per-server service rate")
    c: int = Field(description="Number of servers")
    r: float = Field(description="Net fill rate when at least c customers are present")
    name: Optional[str] = None

    def net_rate(self, i: int) -> float:
        return float(i - self.c) if i < self.c else self.r

    def to_model_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "family": self.family,
            "lambda": self.lam,
            "mu": self.mu,
            "c": self.c,
            "r": self.r,
        }
        if self.name:
            data["name"] = self.name
        return data


class StabilityVerdict(BaseModel):
    """Outcome of the stability test for one model."""
    model_config = ConfigDict(frozen=True)

    family: str
    stable: Optional[bool] = Field(description="None when the check is indeterminate")
    verified: bool = Field(description="False for the advisory drift test of the discrete walk")
    reason: str
    details: Dict[str, float] = Field(default_factory=dict)
