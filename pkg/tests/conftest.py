import os
import sys

import pytest

# Add the repository root to Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.spec_models import KERNEL_OFFSETS, KERNEL_SHAPES  # noqa: E402
from processors.model_processor import two_demand_walk  # noqa: E402


def clamped_walk_dict(interior, name=None):
    """Model document whose boundary kernels fold blocked jumps back onto the wall."""
    raw = {"family": "rwqp", "interior": [list(row) for row in interior]}
    for which in ("hwall", "vwall", "origin"):
        i_min, j_min = KERNEL_OFFSETS[which]
        rows, cols = KERNEL_SHAPES[which]
        grid = [[0.0] * cols for _ in range(rows)]
        for r in range(3):
            for c in range(3):
                i, j = r - 1, c - 1
                if which in ("vwall", "origin"):
                    i = max(i, 0)
                if which in ("hwall", "origin"):
                    j = max(j, 0)
                grid[i - i_min][j - j_min] += interior[r][c]
        raw[which] = grid
    if name:
        raw["name"] = name
    return raw


def product_form_dict(q=(0.5, 0.2, 0.3), s=(0.6, 0.1, 0.3)):
    """Two independent reflected birth-death chains; pi_{m,n} = (1-rho1) rho1^m (1-rho2) rho2^n."""
    interior = [[q[i] * s[j] for j in range(3)] for i in range(3)]
    return clamped_walk_dict(interior, name="product form")


@pytest.fixture
def case1_walk():
    return two_demand_walk(0.2, 0.3, 0.5, name="2-demand case 1")


@pytest.fixture
def case2_walk():
    return two_demand_walk(0.2, 0.4, 0.4, name="2-demand case 2")


@pytest.fixture
def case3_walk():
    return two_demand_walk(0.2, 0.5, 0.3, name="2-demand case 3")


@pytest.fixture
def product_walk_raw():
    return product_form_dict()


@pytest.fixture
def srbm_raw():
    return {
        "family": "srbm",
        "mu": [-1.0, -1.0],
        "sigma": [[1.0, 0.0], [0.0, 1.0]],
        "R": [[1.0, 0.0], [0.0, 1.0]],
        "name": "independent SRBM",
    }


@pytest.fixture
def fluid_raw():
    return {"family": "fluid", "lambda": 1.0, "mu": 4.0, "c": 1, "r": 2.0, "name": "M/M/1 fluid"}
