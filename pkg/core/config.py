from dotenv import load_dotenv
import os

load_dotenv()


def _int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw else default


def _float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw else default


class Grid:
    L_MAX: int = _int("VSF_L_MAX", 8)
    N_R: int = _int("VSF_N_R", 32)
    R_MAX: float = _float("VSF_R_MAX", 8.0)


class Tolerance:
    # relative tolerance for identity residuals and the L^-2 gauge condition
    TOL: float = _float("VSF_TOL", 1e-9)
    # fields above DECAY_TOL * peak at R_max are reported as support leaks
    DECAY_TOL: float = _float("VSF_DECAY_TOL", 1e-12)
    # built sources with more than EDGE_TOL of their norm next to R_max are under-resolved
    EDGE_TOL: float = _float("VSF_EDGE_TOL", 1e-8)
    FIT_DEGREE: int = _int("VSF_FIT_DEGREE", 3)
    FIT_POINTS: int = _int("VSF_FIT_POINTS", 8)


class Verify:
    SEED: int = _int("VSF_SEED", 42)
    N_TRIALS: int = _int("VSF_N_TRIALS", 20)


class Logging:
    LEVEL: str = os.getenv("VSF_LOG_LEVEL", "INFO")


class Config:
    grid: Grid = Grid()
    tolerance: Tolerance = Tolerance()
    verify: Verify = Verify()
    logging: Logging = Logging()


config = Config()
