from typing import Any, Dict, List, Union
import math

from config.settings import Settings
from models.spec_models import KERNEL_SHAPES, FluidSpec, SrbmSpec, WalkSpec
from utils.exceptions import (
    DegenerateCovarianceError,
    ModelValidationError,
    NegativeEntryError,
    NonStochasticError,
    UnknownFamilyError,
    WrongShapeError,
)

AnySpec = Union[WalkSpec, SrbmSpec, FluidSpec]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise WrongShapeError(f"{where}: expected a number, got {value!r}", where=where)
    value = float(value)
    if not math.isfinite(value):
        raise ModelValidationError(f"{where}: value must be finite", where=where)
    return value


def _matrix(raw: Any, shape, where: str) -> List[List[float]]:
    rows, cols = shape
    if not isinstance(raw, (list, tuple)) or len(raw) != rows:
        raise WrongShapeError(f"{where}: expected {rows}x{cols} array", where=where, expected=[rows, cols])
    out = []
    for r, row in enumerate(raw):
        if not isinstance(row, (list, tuple)) or len(row) != cols:
            raise WrongShapeError(f"{where}: expected {rows}x{cols} array", where=where, expected=[rows, cols])
        out.append([_number(v, f"{where}[{r}][{k}]") for k, v in enumerate(row)])
    return out


class ModelValidator:
    """Validation of raw model documents into immutable specs."""

    @staticmethod
    def validate_walk(raw: Dict[str, Any]) -> WalkSpec:
        """Validate the four transition kernels of a quarter-plane walk.

        Raises:
            WrongShapeError: a kernel is missing or has the wrong dimensions
            NegativeEntryError: an entry lies outside [0, 1]
            NonStochasticError: a kernel does not sum to 1 within KERNEL_SUM_TOL
        """
        kernels = {}
        for name, shape in KERNEL_SHAPES.items():
            if name not in raw:
                raise WrongShapeError(f"Missing kernel '{name}'", where=name)
            matrix = _matrix(raw[name], shape, name)
            for r, row in enumerate(matrix):
                for k, p in enumerate(row):
                    if p < 0.0 or p > 1.0:
                        raise NegativeEntryError(
                            f"{name}[{r}][{k}] = {p} is outside [0, 1]", kernel=name, row=r, column=k, value=p
                        )
            deviation = math.fsum(p for row in matrix for p in row) - 1.0
            if abs(deviation) > Settings.KERNEL_SUM_TOL:
                raise NonStochasticError(name, deviation)
            kernels[name] = matrix
        return WalkSpec(
            **kernels,
            assume_stable=bool(raw.get("assume_stable", False)),
            name=raw.get("name"),
        )

    @staticmethod
    def validate_srbm(raw: Dict[str, Any]) -> SrbmSpec:
        """Validate drift, covariance and reflection matrix of an SRBM."""
        for key in ("mu", "sigma", "R"):
            if key not in raw:
                raise WrongShapeError(f"Missing field '{key}'", where=key)
        mu = raw["mu"]
        if not isinstance(mu, (list, tuple)) or len(mu) != 2:
            raise WrongShapeError("mu: expected a 2-vector", where="mu")
        mu = [_number(v, f"mu[{k}]") for k, v in enumerate(mu)]
        sigma = _matrix(raw["sigma"], (2, 2), "sigma")
        R = _matrix(raw["R"], (2, 2), "R")

        scale = max(abs(sigma[0][1]), abs(sigma[1][0]), 1.0)
        if abs(sigma[0][1] - sigma[1][0]) > 1e-12 * scale:
            raise DegenerateCovarianceError("sigma must be symmetric", sigma=sigma)
        det = sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[1][0]
        if sigma[0][0] <= 0 or det <= 0:
            raise DegenerateCovarianceError("sigma must be positive definite", determinant=det)
        return SrbmSpec(mu=mu, sigma=sigma, R=R, name=raw.get("name"))

    @staticmethod
    def validate_fluid(raw: Dict[str, Any]) -> FluidSpec:
        """Validate the rates of an M/M/c-driven fluid queue."""
        for key in ("lambda", "mu", "c", "r"):
            if key not in raw:
                raise WrongShapeError(f"Missing field '{key}'", where=key)
        lam = _number(raw["lambda"], "lambda")
        mu = _number(raw["mu"], "mu")
        r = _number(raw["r"], "r")
        c = raw["c"]
        if isinstance(c, bool) or not isinstance(c, (int, float)) or float(c) != int(c) or int(c) < 1:
            raise ModelValidationError(f"c must be an integer >= 1, got {c!r}", where="c")
        for name, value in (("lambda", lam), ("mu", mu), ("r", r)):
            if value <= 0:
                raise ModelValidationError(f"{name} must be positive, got {value}", where=name)
        return FluidSpec(lam=lam, mu=mu, c=int(c), r=r, name=raw.get("name"))

    @staticmethod
    def validate_model(raw: Dict[str, Any]) -> AnySpec:
        """Dispatch on the ``family`` field of a model document."""
        if not isinstance(raw, dict):
            raise WrongShapeError("Model document must be a JSON object")
        family = raw.get("family")
        if family not in Settings.SUPPORTED_FAMILIES:
            raise UnknownFamilyError(
                f"Invalid family: {family}. Available families: {Settings.SUPPORTED_FAMILIES}", family=family
            )
        if family == "rwqp":
            return ModelValidator.validate_walk(raw)
        if family == "srbm":
            return ModelValidator.validate_srbm(raw)
        return ModelValidator.validate_fluid(raw)
