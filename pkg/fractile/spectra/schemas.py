from pydantic import BaseModel


class SLattice(BaseModel):
    is_lattice: bool
    base: float | None = None
    exponents: list[int] | None = None
    period: float | None = None


class SWindow(BaseModel):
    re_min: float
    re_max: float
    im_max: float


class SPole(BaseModel):
    re: float
    im: float
    order: int
    residue_re: float | None = None
    residue_im: float | None = None
    cancelled: bool = False
    is_real_dimension: bool = False
    lattice_line: int | None = None
    lattice_index: int | None = None
    contour_gap: float | None = None


class SComplexNumber(BaseModel):
    re: float
    im: float


class SUnresolved(BaseModel):
    re: float
    im: float
    count: int


class SSpectrumReport(BaseModel):
    """Отчёт ``dims``."""

    system: str
    kind: str
    D: float  # noqa: N815
    lattice: SLattice
    method: str
    window: SWindow
    poles: list[SPole]
    cancelled: list[SPole]
    zeros_of_numerator: list[SComplexNumber]
    unresolved: list[SUnresolved]
    tolerances: dict[str, float]


class SZetaValue(BaseModel):
    s: SComplexNumber
    zeta_s: SComplexNumber | None = None
    zeta_g: SComplexNumber | None = None
    zeta_g_terms: list[SComplexNumber] | None = None
    near_pole: bool = False


class SZetaEvaluation(BaseModel):
    """Отчёт ``zeta-eval``."""

    system: str
    D: float  # noqa: N815
    values: list[SZetaValue]
