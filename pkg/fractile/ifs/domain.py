from dataclasses import dataclass, field

from fractile.app_error.base_error import (
    NoStabilizationError,
    NotContractiveError,
    TooFewMapsError,
)
from fractile.geom2d.domain import AffineMap2, ConvexPoly

Word = tuple[int, ...]
"""Слово над алфавитом ``{1..J}``; пустое слово соответствует тождеству."""


@dataclass(frozen=True, eq=False)
class IfsSystem:
    """Самоаффинная система ``{φ_j}``.

    Attributes
        name (str): Имя системы.
        maps (tuple[AffineMap2, ...]): Отображения, ``J ≥ 2``.

    Raises
        TooFewMapsError: Меньше двух отображений.
        NotContractiveError: Какое-то отображение не сжимающее.

    """

    name: str
    maps: tuple[AffineMap2, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise TooFewMapsError(len(self.maps))
        for index, f in enumerate(self.maps, start=1):
            if not f.spectral_bound < 1.0:
                raise NotContractiveError(index, f.spectral_bound)

    @property
    def size(self) -> int:
        """Число отображений ``J``."""
        return len(self.maps)

    @property
    def is_self_similar(self) -> bool:
        return all(f.is_similarity for f in self.maps)

    @property
    def ratios(self) -> tuple[float, ...] | None:
        """Коэффициенты подобия ``r_j`` (только для самоподобных систем)."""
        if not self.is_self_similar:
            return None
        return tuple(float(f.ratio) for f in self.maps)

    @property
    def contraction_bound(self) -> float:
        """``λ = max_j`` спектральной нормы."""
        return max(f.spectral_bound for f in self.maps)

    @property
    def det_sum(self) -> float:
        """``Σ_j |det φ_j|``; для подобий равно ``Σ r_j²``."""
        return sum(abs(f.det) for f in self.maps)


@dataclass(frozen=True, eq=False)
class HullEstimate:
    """Оценка выпуклой оболочки аттрактора.

    Attributes
        hull (ConvexPoly): Оболочка.
        sample_depth (int): Глубина, на которой оболочка совпала со следующей.
        stabilization_gap (float): Хаусдорфово расстояние между двумя последними оболочками.
        tolerance (float): Порог стабилизации.

    """

    hull: ConvexPoly
    sample_depth: int
    stabilization_gap: float
    tolerance: float

    @property
    def stabilized(self) -> bool:
        return self.stabilization_gap <= self.tolerance

    def require_stable(self) -> "HullEstimate":
        """Возвращает себя или бросает ``NoStabilizationError``."""
        if not self.stabilized:
            raise NoStabilizationError(self.sample_depth, self.stabilization_gap, self.tolerance)
        return self


@dataclass(frozen=True)
class OverlapPair:
    """Пара образов оболочки с пересечением положительной площади."""

    j: int
    l: int  # noqa: E741
    overlap_area: float


@dataclass(frozen=True)
class ValidationReport:
    """Результат проверки допустимости системы.

    Attributes
        contraction_ok (bool): Все отображения сжимающие.
        tileset_ok (bool): Образы оболочки пересекаются только по границе.
        offending_pairs (tuple[OverlapPair, ...]): Пары с положительным пересечением.
        nontrivial_ok (bool): ``C ⊄ Φ(C)``.
        residual_area (float): ``area(C) − area(∪ φ_j(C))``.
        hull_area (float): Площадь оболочки.
        area_tolerance (float): Порог площади.

    """

    contraction_ok: bool
    tileset_ok: bool
    offending_pairs: tuple[OverlapPair, ...]
    nontrivial_ok: bool
    residual_area: float
    hull_area: float
    area_tolerance: float = field(default=0.0)

    @property
    def admissible(self) -> bool:
        return self.contraction_ok and self.tileset_ok and self.nontrivial_ok
