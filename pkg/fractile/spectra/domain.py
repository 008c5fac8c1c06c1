import cmath
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np


class ZetaKind(StrEnum):
    SCALING = "scaling"
    GEOMETRIC = "geometric"


class MeasureKind(StrEnum):
    SCALING = "scaling"
    GEOMETRIC = "geometric"
    GEOMETRIC_TOTAL = "geometric_total"


@dataclass(frozen=True, eq=False)
class ZetaModel:
    """Рациональная по ``r_j^s`` и ``g_q^s`` модель дзета-функций.

    Attributes
        name (str): Имя системы.
        ratios (tuple[float, ...]): Коэффициенты подобия ``r_j``.
        generator_inradii (tuple[float, ...]): Радиусы ``g_q``; пусто для чистой ``ζ_s``.

    """

    name: str
    ratios: tuple[float, ...]
    generator_inradii: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        object.__setattr__(
            self, "generator_inradii", tuple(float(g) for g in self.generator_inradii)
        )
        if not self.ratios:
            raise ValueError("Нужен хотя бы один коэффициент подобия")
        if any(not 0 < r < 1 for r in self.ratios):
            raise ValueError(f"Коэффициенты должны лежать в (0, 1): {self.ratios}")
        if any(not g > 0 for g in self.generator_inradii):
            raise ValueError(f"Радиусы генераторов должны быть > 0: {self.generator_inradii}")

    @property
    def kind(self) -> ZetaKind:
        return ZetaKind.GEOMETRIC if self.generator_inradii else ZetaKind.SCALING

    @property
    def log_ratios(self) -> np.ndarray:
        return np.log(np.asarray(self.ratios))

    def scaling_sum(self, s: complex) -> complex:
        """``f(s) = Σ_j r_j^s``."""
        return complex(np.sum(np.exp(s * self.log_ratios)))

    def scaling_sum_derivative(self, s: complex) -> complex:
        """``f'(s) = Σ_j r_j^s·ln r_j``."""
        logs = self.log_ratios
        return complex(np.sum(logs * np.exp(s * logs)))

    def numerator(self, s: complex) -> complex:
        """``h(s) = Σ_q g_q^s`` (единица для чистой ``ζ_s``)."""
        if not self.generator_inradii:
            return 1.0 + 0j
        return complex(sum(cmath.exp(s * math.log(g)) for g in self.generator_inradii))

    def numerator_scale(self, sigma: float) -> float:
        """``Σ_q g_q^σ``: масштаб для порога сокращения полюсов."""
        return math.fsum(g**sigma for g in self.generator_inradii) if self.generator_inradii else 1.0


@dataclass(frozen=True)
class Atom:
    """Атом меры: точка ``x`` и целый вес."""

    location: float
    weight: int


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Конечная атомарная мера.

    Attributes
        atoms (tuple[Atom, ...]): Атомы по возрастанию положения.
        truncation (float): Порог ``r_min`` (или ``ρ_min``).
        kind (MeasureKind): Вид меры.
        generator (int | None): Номер генератора для ``MeasureKind.GEOMETRIC``.
        min_excluded_length (int): Длина самого короткого не вошедшего слова.

    """

    atoms: tuple[Atom, ...]
    truncation: float
    kind: MeasureKind
    generator: int | None = None
    min_excluded_length: int = 0

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def total_weight(self) -> int:
        return sum(a.weight for a in self.atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms


@dataclass(frozen=True)
class LatticeStructure:
    """Решётчатость набора ``r_j``.

    Attributes
        is_lattice (bool): Все ``r_j`` целые степени одного ``r``.
        base (float | None): База ``r``.
        exponents (tuple[int, ...] | None): Показатели ``k_j``.
        period (float | None): Период ``2π/ln(1/r)``.

    """

    is_lattice: bool
    base: float | None = None
    exponents: tuple[int, ...] | None = None
    period: float | None = None


@dataclass(frozen=True)
class SearchWindow:
    """Прямоугольник ``Re s ∈ [re_min, re_max]``, ``|Im s| ≤ im_max``."""

    re_min: float
    re_max: float
    im_max: float

    def __post_init__(self) -> None:
        if not (self.re_min < self.re_max and self.im_max > 0):
            raise ValueError(f"Некорректное окно: {self}")

    def contains(self, s: complex, slack: float = 0.0) -> bool:
        return (
            self.re_min - slack <= s.real <= self.re_max + slack
            and abs(s.imag) <= self.im_max + slack
        )


@dataclass(frozen=True)
class ResidueCheck:
    """Сверка вычета с контурным интегралом.

    Attributes
        omega (complex): Полюс.
        closed_form (complex): ``1/Σ r_j^ω ln(1/r_j)``.
        contour (complex): Трапеции на окружности.
        relative_gap (float): Относительное расхождение.
        order (int): Оценка порядка полюса (0, если полюса нет).
        agrees (bool): Расхождение в пределах допуска.

    """

    omega: complex
    closed_form: complex
    contour: complex
    relative_gap: float
    order: int
    agrees: bool


@dataclass(frozen=True)
class ComplexDim:
    """Комплексная размерность (полюс ``ζ_s`` или ``ζ_g``).

    Attributes
        omega (complex): Положение.
        residue (complex | None): Вычет ``ζ_s`` (для простых полюсов).
        order (int): Порядок полюса.
        is_real_dimension (bool): ``ω = D``.
        lattice_line (int | None): Номер корня многочлена (решётчатый случай).
        lattice_index (int | None): Номер ``n`` на вертикальной прямой.
        cancelled (bool): Сокращён нулём числителя ``h``.
        check (ResidueCheck | None): Контурная проверка вычета.

    """

    omega: complex
    residue: complex | None
    order: int = 1
    is_real_dimension: bool = False
    lattice_line: int | None = None
    lattice_index: int | None = None
    cancelled: bool = False
    check: ResidueCheck | None = None


@dataclass(frozen=True)
class UnresolvedCell:
    center: complex
    count: int


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Итог поиска комплексных размерностей."""

    model: ZetaModel
    dimension: float
    lattice: LatticeStructure
    window: SearchWindow
    method: str
    poles: tuple[ComplexDim, ...]
    cancelled: tuple[ComplexDim, ...] = ()
    numerator_zeros: tuple[complex, ...] = ()
    unresolved: tuple[UnresolvedCell, ...] = field(default=())
