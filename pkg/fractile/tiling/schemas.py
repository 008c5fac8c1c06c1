from pydantic import BaseModel

from fractile.ifs.schemas import SValidationReport, Vector2


class SGenerator(BaseModel):
    q: int
    area: float
    perimeter: float
    inradius: float
    incenter: Vector2
    is_convex: bool
    cells: int


class STile(BaseModel):
    word: list[int]
    q: int
    level: int
    inradius: float | None = None
    scale: float | None = None


class SStructureReport(BaseModel):
    """Отчёт ``verify_structure``."""

    k_max: int
    propagation_gaps: list[float]
    recursion_gaps: list[float]
    completeness_gap: float
    subselfaffine_gap: float
    component_counts: list[int]
    expected_counts: list[int]
    tile_counts: list[int]
    tolerance: float
    counts_match: bool
    ok: bool


class STilingReport(BaseModel):
    """Отчёт ``tiles``: генераторы, плитки и проверка структуры."""

    validation: SValidationReport
    hull_vertices: list[Vector2]
    generators: list[SGenerator]
    total_tile_area: float
    approximate: bool
    tiles: list[STile]
    structure: SStructureReport | None = None
