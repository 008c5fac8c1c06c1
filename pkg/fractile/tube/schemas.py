from pydantic import BaseModel


class SSlope(BaseModel):
    slope: float
    intercept: float
    eps_lo: float
    eps_hi: float
    expected: float
    oscillation: float | None = None


class SMonteCarloRun(BaseModel):
    n_samples: int
    seed: int
    max_unresolved_fraction: float


class STubeSummary(BaseModel):
    """Сводка ``tube``, сопровождающая CSV."""

    system: str
    path: str
    points: int
    eps_min: float
    eps_max: float
    total_area: float
    min_generator_inradius: float
    D: float  # noqa: N815
    approximate: bool
    slope: SSlope | None = None
    slope_error: str | None = None
    monte_carlo: SMonteCarloRun | None = None
