from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Vector2 = tuple[float, float]


class SSimilarityMap(BaseModel):
    """Подобие ``r·R(θ)·S + a``.

    Attributes
        ratio (float): Коэффициент подобия.
        rotation_deg (float): Угол поворота в градусах (против часовой).
        reflect (bool): Отражение относительно оси x перед поворотом.
        translation (Vector2): Сдвиг.

    """

    model_config = ConfigDict(extra="forbid")

    type: Literal["similarity"]
    ratio: float = Field(gt=0)
    rotation_deg: float = 0.0
    reflect: bool = False
    translation: Vector2 = (0.0, 0.0)


class SAffineMap(BaseModel):
    """Аффинное отображение с явной матрицей."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["affine"]
    matrix: tuple[Vector2, Vector2]
    translation: Vector2 = (0.0, 0.0)


SMapEntry = Annotated[SSimilarityMap | SAffineMap, Field(discriminator="type")]


class SKochFamily(BaseModel):
    """Сокращённая запись системы семейства Коха параметром ``ξ = (re, im)``."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["koch"]
    xi: Vector2


class SSystemConfig(BaseModel):
    """Конфиг системы.

    Ровно одно из ``maps``, ``family`` или ``ratios``; ``ratios`` допустим
    только вместе с ``geometry_unsupported``.
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    dimension: int = 2
    description: str | None = None
    maps: list[SMapEntry] | None = None
    family: SKochFamily | None = None
    geometry_unsupported: bool = False
    ratios: list[float] | None = None

    @model_validator(mode="after")
    def check_shape(self) -> "SSystemConfig":
        given = [x is not None for x in (self.maps, self.family, self.ratios)]
        if sum(given) != 1:
            raise ValueError("нужно ровно одно из полей maps, family, ratios")
        if self.ratios is not None:
            if not self.geometry_unsupported:
                raise ValueError("ratios допустимы только с geometry_unsupported=true")
            if any(not 0 < r < 1 for r in self.ratios):
                raise ValueError("коэффициенты должны лежать в (0, 1)")
        elif self.dimension != 2:
            raise ValueError(f"поддерживается только dimension=2, получено {self.dimension}")
        return self


# =========================
# Отчёты
# =========================


class SOverlapPair(BaseModel):
    j: int
    l: int  # noqa: E741
    overlap_area: float


class SValidationReport(BaseModel):
    """Отчёт ``validate``."""

    system: str
    maps: int
    is_self_similar: bool
    contraction_ok: bool
    tileset_ok: bool
    offending_pairs: list[SOverlapPair]
    nontrivial_ok: bool
    residual_area: float
    hull_area: float
    admissible: bool


class SHullEstimate(BaseModel):
    """Отчёт ``hull``."""

    system: str
    vertices: list[Vector2]
    area: float
    sample_depth: int
    stabilization_gap: float
    tolerance: float
    stabilized: bool
