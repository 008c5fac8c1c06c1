import math
from dataclasses import dataclass, field

from fractile.geom2d.domain import AffineMap2, CellSet, Component, ConvexPoly, GeomTolerance
from fractile.ifs.domain import IfsSystem, ValidationReport, Word


@dataclass(frozen=True, eq=False)
class TilingSpec:
    """Самоаффинное замощение ``({φ_j}, {G_q})``.

    Attributes
        system (IfsSystem): Система.
        hull (ConvexPoly): Оболочка ``C``.
        generators (tuple[Component, ...]): Генераторы ``G_q``, ``q = 1..Q``.
        validation (ValidationReport): Отчёт проверки системы.

    """

    system: IfsSystem
    hull: ConvexPoly
    generators: tuple[Component, ...]
    validation: ValidationReport

    @property
    def size(self) -> int:
        """Число генераторов ``Q``."""
        return len(self.generators)

    @property
    def generator_inradii(self) -> tuple[float, ...]:
        return tuple(g.inradius for g in self.generators)

    @property
    def generator_areas(self) -> tuple[float, ...]:
        return tuple(g.area for g in self.generators)

    @property
    def tolerance(self) -> GeomTolerance:
        return GeomTolerance.for_diameter(self.hull.diameter)

    @property
    def total_tile_area(self) -> float:
        """``S = Σ_q area(G_q) / (1 − Σ_j |det φ_j|)``."""
        return math.fsum(self.generator_areas) / (1.0 - self.system.det_sum)

    @property
    def is_approximate(self) -> bool:
        """Есть невыпуклые генераторы (их трубка оценивается выборкой)."""
        return any(not g.is_convex for g in self.generators)


@dataclass(frozen=True, eq=False)
class TileHandle:
    """Плитка ``φ_w(G_q)``.

    Attributes
        word (Word): Слово ``w``.
        q (int): Номер генератора (с 1).
        map (AffineMap2 | None): ``φ_w``; ``None`` во внутреннем перечислении.
        scale (float | None): Коэффициент подобия ``ρ_w`` (только для подобий).
        inradius (float | None): ``g_q·ρ_w``.

    """

    word: Word
    q: int
    map: AffineMap2 | None
    scale: float | None = None
    inradius: float | None = None

    @property
    def level(self) -> int:
        """Уровень ``|w| + 1``: плитка лежит в ``T_{|w|+1}``."""
        return len(self.word) + 1


@dataclass(frozen=True, eq=False)
class Tileset:
    """``T_k = closure(C_{k−1} ∖ C_k)``."""

    k: int
    cells: CellSet

    @property
    def area(self) -> float:
        return self.cells.area


@dataclass(frozen=True)
class StructureReport:
    """Расхождения площадей в структурных проверках (относительно ``area(C)``).

    Attributes
        k_max (int): Глубина проверки.
        propagation_gaps (tuple[float, ...]): ``area(Φ(T_k) Δ T_{k+1})`` для ``k < k_max``.
        recursion_gaps (tuple[float, ...]): ``|area(T_k) − (Σ|det|)^{k−1}·Σ area(G_q)|``.
        completeness_gap (float): ``|area(C) − Σ area(T_k) − area(C_{k_max})|``.
        subselfaffine_gap (float): Наибольшее расхождение коэффициентов ``φ_{jw}`` и ``φ_j∘φ_w``.
        component_counts (tuple[int, ...]): Число компонент ``T_k``.
        expected_counts (tuple[int, ...]): ``Q·J^{k−1}``.
        tile_counts (tuple[int, ...]): Число плиток уровня ``k``.
        tolerance (float): Относительный допуск.

    """

    k_max: int
    propagation_gaps: tuple[float, ...]
    recursion_gaps: tuple[float, ...]
    completeness_gap: float
    subselfaffine_gap: float
    component_counts: tuple[int, ...]
    expected_counts: tuple[int, ...]
    tile_counts: tuple[int, ...]
    tolerance: float = field(default=1e-7)

    @property
    def max_gap(self) -> float:
        return max((*self.propagation_gaps, *self.recursion_gaps, self.completeness_gap), default=0.0)

    @property
    def counts_match(self) -> bool:
        """Геометрические компоненты ``T_k`` совпадают с числом плиток ``Q·J^{k−1}``."""
        return self.component_counts == self.expected_counts

    @property
    def ok(self) -> bool:
        return self.max_gap <= self.tolerance and self.subselfaffine_gap <= 1e-12
