from pydantic import BaseModel, ConfigDict, Field
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P

Matrix = Tuple[Tuple[float, ...], ...]


def _column(matrix: Matrix, k: int) -> np.ndarray:
    return np.array([row[k] for row in matrix], dtype=float)


class KernelSystem(BaseModel):
    """Kernel h(x,y) = xy(sum p_{i,j} x^i y^j - 1) of a quarter-plane walk.

    Bivariate polynomials are stored as coefficient grids ``C[k][l]`` of x^k y^l,
    which is the layout numpy's ``polyval2d`` expects.
    """
    model_config = ConfigDict(frozen=True)

    h: Matrix = Field(description="Coefficients of h, 3x3")
    h1: Matrix = Field(description="Coefficients of h1(x,y) = x(sum p1 x^i y^j - 1), 3x2")
    h2: Matrix = Field(description="Coefficients of h2(x,y) = y(sum p2 x^i y^j - 1), 2x3")
    h0: Matrix = Field(description="Coefficients of h0(x,y) = sum p0 x^i y^j - 1, 2x2")

    # y-direction quadratic: h = a(x) y^2 + b(x) y + c(x)
    @property
    def a(self) -> np.ndarray:
        return _column(self.h, 2)

    @property
    def b(self) -> np.ndarray:
        return _column(self.h, 1)

    @property
    def c(self) -> np.ndarray:
        return _column(self.h, 0)

    # x-direction quadratic: h = a~(y) x^2 + b~(y) x + c~(y)
    @property
    def a_tilde(self) -> np.ndarray:
        return np.array(self.h[2], dtype=float)

    @property
    def b_tilde(self) -> np.ndarray:
        return np.array(self.h[1], dtype=float)

    @property
    def c_tilde(self) -> np.ndarray:
        return np.array(self.h[0], dtype=float)

    @property
    def d1(self) -> np.ndarray:
        return P.polysub(P.polymul(self.b, self.b), 4.0 * P.polymul(self.a, self.c))

    @property
    def d2(self) -> np.ndarray:
        return P.polysub(P.polymul(self.b_tilde, self.b_tilde), 4.0 * P.polymul(self.a_tilde, self.c_tilde))

    def h_value(self, x, y):
        return P.polyval2d(x, y, np.asarray(self.h))

    def h1_value(self, x, y):
        return P.polyval2d(x, y, np.asarray(self.h1))

    def h2_value(self, x, y):
        return P.polyval2d(x, y, np.asarray(self.h2))

    def h0_value(self, x, y):
        return P.polyval2d(x, y, np.asarray(self.h0))

    @property
    def h2_vanishes(self) -> bool:
        return not np.any(np.asarray(self.h2))


class BranchPoints(BaseModel):
    """Real branch points of the walk in both directions.

    ``x4``/``y4`` may be +/-inf when the discriminant has degree 3.
    """
    model_config = ConfigDict(frozen=True)

    x: Tuple[float, float, float, float] = Field(description="x1, x2, x3, x4")
    y: Tuple[float, float, float, float] = Field(description="y1, y2, y3, y4")
    x_simple: Tuple[bool, bool, bool, bool] = Field(description="Multiplicity-one flags for x1..x4")
    y_simple: Tuple[bool, bool, bool, bool] = Field(description="Multiplicity-one flags for y1..y4")
    degree_x: int = Field(description="Degree of D1")
    degree_y: int = Field(description="Degree of D2")
    ordering_verified: bool = Field(default=True, description="Strict ordering |x1| < x2 < 1 < x3 < |x4| checked")

    @property
    def x3(self) -> float:
        return self.x[2]

    @property
    def y3(self) -> float:
        return self.y[2]


class SrbmKernel(BaseModel):
    """gamma(x,y) = a y^2 + b(x) y + c(x) with linear boundary forms gamma1, gamma2."""
    model_config = ConfigDict(frozen=True)

    mu: Tuple[float, float]
    sigma: Tuple[Tuple[float, float], Tuple[float, float]]
    R: Tuple[Tuple[float, float], Tuple[float, float]]

    @property
    def a(self) -> float:
        return self.sigma[1][1] / 2.0

    @property
    def b(self) -> np.ndarray:
        return np.array([self.mu[1], self.sigma[0][1]])

    @property
    def c(self) -> np.ndarray:
        return np.array([0.0, self.mu[0], self.sigma[0][0] / 2.0])

    @property
    def a_tilde(self) -> float:
        return self.sigma[0][0] / 2.0

    @property
    def b_tilde(self) -> np.ndarray:
        return np.array([self.mu[0], self.sigma[0][1]])

    @property
    def c_tilde(self) -> np.ndarray:
        return np.array([0.0, self.mu[1], self.sigma[1][1] / 2.0])

    @property
    def d1(self) -> np.ndarray:
        return P.polysub(P.polymul(self.b, self.b), 4.0 * self.a * self.c)

    @property
    def d2(self) -> np.ndarray:
        return P.polysub(P.polymul(self.b_tilde, self.b_tilde), 4.0 * self.a_tilde * self.c_tilde)

    def gamma(self, x, y):
        return self.a * y * y + P.polyval(x, self.b) * y + P.polyval(x, self.c)

    def gamma1(self, x, y):
        return self.R[0][0] * x + self.R[1][0] * y

    def gamma2(self, x, y):
        return self.R[0][1] * x + self.R[1][1] * y


class FluidKernel(BaseModel):
    """H(alpha,z) = -lam z^2 + (-alpha r + lam + c mu) z - c mu and its boundary kernels."""
    model_config = ConfigDict(frozen=True)

    lam: float
    mu: float
    c: int
    r: float

    @property
    def a(self) -> float:
        return -self.lam

    @property
    def d(self) -> float:
        return -self.c * self.mu

    @property
    def cut_abscissa(self) -> float:
        """Re(alpha) at which the Z0 assignment switches from Z+ to Z-."""
        return (self.lam + self.c * self.mu) / self.r

    @property
    def z_dom(self) -> float:
        return self.c * self.mu / self.lam

    def b(self, alpha):
        return -alpha * self.r + self.lam + self.c * self.mu

    def delta(self, alpha):
        return self.b(alpha) ** 2 - 4.0 * self.a * self.d

    def H(self, alpha, z):
        return self.a * z * z + self.b(alpha) * z + self.d

    def alpha_of_z(self, z):
        return (-self.lam * z * z + (self.lam + self.c * self.mu) * z - self.c * self.mu) / (z * self.r)

    def H2(self, z):
        return self.lam * z * z - self.lam * z - self.c * self.mu * z + self.c * self.mu

    def H1(self, alpha, z):
        return (self.mu - alpha * self.r - alpha) * z ** self.c - self.c * self.mu * z ** (self.c - 1)

    def H0(self, z):
        return self.mu * z ** self.c - self.c * self.mu * z ** (self.c - 1)
