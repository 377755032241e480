import os
from typing import Any, Dict
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ["1", "true", "yes"]


class Settings:
    """Configuration settings for the tail asymptotics toolkit."""

    # Supported model families
    SUPPORTED_FAMILIES = ["rwqp", "srbm", "fluid"]

    # Classification
    EPS_EQ = float(os.getenv("KERNELTAIL_EPS_EQ", "1e-9"))
    # Warn when a comparison is within this many EPS_EQ of a case boundary
    NEAR_DEGENERATE_FACTOR = float(os.getenv("KERNELTAIL_NEAR_DEGENERATE_FACTOR", "10"))

    # Model validation
    KERNEL_SUM_TOL = float(os.getenv("KERNELTAIL_KERNEL_SUM_TOL", "1e-12"))
    DRIFT_ZERO_TOL = float(os.getenv("KERNELTAIL_DRIFT_ZERO_TOL", "1e-14"))
    IRREDUCIBILITY_TOL = float(os.getenv("KERNELTAIL_IRREDUCIBILITY_TOL", "1e-10"))

    # Polynomial roots and branches
    ROOT_IMAG_TOL = float(os.getenv("KERNELTAIL_ROOT_IMAG_TOL", "1e-9"))
    GENUS_SEPARATION_TOL = float(os.getenv("KERNELTAIL_GENUS_SEPARATION_TOL", "1e-8"))
    NEWTON_POLISH_STEPS = int(os.getenv("KERNELTAIL_NEWTON_POLISH_STEPS", "2"))
    CUT_DISTANCE_TOL = float(os.getenv("KERNELTAIL_CUT_DISTANCE_TOL", "1e-12"))
    VIETA_RTOL = float(os.getenv("KERNELTAIL_VIETA_RTOL", "1e-10"))

    # Zero search
    ZERO_SEARCH_GRID = int(os.getenv("KERNELTAIL_ZERO_SEARCH_GRID", "10000"))
    BISECTION_RTOL = float(os.getenv("KERNELTAIL_BISECTION_RTOL", "1e-12"))
    CONSISTENCY_TOL = float(os.getenv("KERNELTAIL_CONSISTENCY_TOL", "1e-8"))

    # Numeric constant estimation
    RICHARDSON_START = int(os.getenv("KERNELTAIL_RICHARDSON_START", "3"))
    RICHARDSON_DEPTH = int(os.getenv("KERNELTAIL_RICHARDSON_DEPTH", "4"))
    RICHARDSON_MAX_SPREAD = float(os.getenv("KERNELTAIL_RICHARDSON_MAX_SPREAD", "0.10"))

    # Oracle
    ORACLE_TRUNCATION = int(os.getenv("KERNELTAIL_ORACLE_TRUNCATION", "400"))
    ORACLE_MIN_TRUNCATION = int(os.getenv("KERNELTAIL_ORACLE_MIN_TRUNCATION", "50"))
    # auto | gth | qbd | power
    ORACLE_METHOD = os.getenv("KERNELTAIL_ORACLE_METHOD", "auto")
    # Largest box (states) handled by dense GTH elimination in auto mode
    GTH_MAX_STATES = int(os.getenv("KERNELTAIL_GTH_MAX_STATES", "2601"))
    ORACLE_RESIDUAL_TOL = float(os.getenv("KERNELTAIL_ORACLE_RESIDUAL_TOL", "1e-12"))
    ORACLE_EDGE_MASS_TOL = float(os.getenv("KERNELTAIL_ORACLE_EDGE_MASS_TOL", "1e-8"))
    ORACLE_LR_TOL = float(os.getenv("KERNELTAIL_ORACLE_LR_TOL", "1e-14"))
    ORACLE_LR_MAX_ITER = int(os.getenv("KERNELTAIL_ORACLE_LR_MAX_ITER", "200"))
    ORACLE_POWER_MAX_ITER = int(os.getenv("KERNELTAIL_ORACLE_POWER_MAX_ITER", "20000"))
    ORACLE_POWER_ATTEMPTS = int(os.getenv("KERNELTAIL_ORACLE_POWER_ATTEMPTS", "3"))
    ORACLE_AITKEN_EVERY = int(os.getenv("KERNELTAIL_ORACLE_AITKEN_EVERY", "50"))

    # Tail regression
    FIT_WINDOW = (
        float(os.getenv("KERNELTAIL_FIT_WINDOW_LOW", "0.5")),
        float(os.getenv("KERNELTAIL_FIT_WINDOW_HIGH", "0.8")),
    )
    FIT_TRUNCATION_BOUND = float(os.getenv("KERNELTAIL_FIT_TRUNCATION_BOUND", "1e-3"))
    FIT_MIN_POINTS = int(os.getenv("KERNELTAIL_FIT_MIN_POINTS", "8"))
    FIT_THETA_AGREEMENT = float(os.getenv("KERNELTAIL_FIT_THETA_AGREEMENT", "1e-3"))
    FIT_ALPHA_AGREEMENT = float(os.getenv("KERNELTAIL_FIT_ALPHA_AGREEMENT", "0.15"))

    # Verification (prediction vs oracle)
    VERIFY_THETA_TOL = float(os.getenv("KERNELTAIL_VERIFY_THETA_TOL", "1e-3"))
    VERIFY_ALPHA_TOL = float(os.getenv("KERNELTAIL_VERIFY_ALPHA_TOL", "0.2"))
    VERIFY_CONSTANT_RTOL = float(os.getenv("KERNELTAIL_VERIFY_CONSTANT_RTOL", "0.05"))
    VERIFY_RATIO_DEPTH = int(os.getenv("KERNELTAIL_VERIFY_RATIO_DEPTH", "3"))

    # Output
    LOG_LEVEL = os.getenv("KERNELTAIL_LOG_LEVEL", "WARNING")
    SHOW_PROGRESS = _env_bool("KERNELTAIL_SHOW_PROGRESS", "false")

    @classmethod
    def validate_config(cls):
        """Validate that the configured tolerances are usable."""
        positive = {
            "EPS_EQ": cls.EPS_EQ,
            "KERNEL_SUM_TOL": cls.KERNEL_SUM_TOL,
            "BISECTION_RTOL": cls.BISECTION_RTOL,
            "ORACLE_RESIDUAL_TOL": cls.ORACLE_RESIDUAL_TOL,
            "RICHARDSON_MAX_SPREAD": cls.RICHARDSON_MAX_SPREAD,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        low, high = cls.FIT_WINDOW
        if not 0 < low < high < 1:
            raise ValueError(f"FIT_WINDOW must satisfy 0 < low < high < 1, got {cls.FIT_WINDOW}")
        if cls.ORACLE_TRUNCATION < cls.ORACLE_MIN_TRUNCATION:
            raise ValueError(f"ORACLE_TRUNCATION must be at least {cls.ORACLE_MIN_TRUNCATION}")
        if cls.ORACLE_METHOD not in ["auto", "gth", "qbd", "power"]:
            raise ValueError(f"Unknown ORACLE_METHOD: {cls.ORACLE_METHOD}")
        if cls.ZERO_SEARCH_GRID < 10 or cls.RICHARDSON_DEPTH < 2:
            raise ValueError("ZERO_SEARCH_GRID must be >= 10 and RICHARDSON_DEPTH >= 2")
        if cls.VERIFY_RATIO_DEPTH < 1:
            raise ValueError("VERIFY_RATIO_DEPTH must be >= 1")
        return True

    @classmethod
    def as_dict(cls) -> Dict[str, Any]:
        """Snapshot of every upper-case setting, used to echo tolerances into reports."""
        return {
            name: getattr(cls, name)
            for name in dir(cls)
            if name.isupper() and not name.startswith("_")
        }
