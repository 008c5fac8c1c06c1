from dataclasses import dataclass
from enum import StrEnum


class TubePath(StrEnum):
    """Способ точного вычисления ``V(ε)``."""

    TILES = "tiles"
    MEASURE = "measure"


@dataclass(frozen=True)
class TubePoint:
    """Значение ``V(ε)``.

    Attributes
        eps (float): ``ε``.
        value (float): ``V(ε)``.
        head_tiles (int): Число плиток с радиусом ``≥ ε`` (посчитанных явно).
        tail_mass (float): Площадь остальных плиток (закрытая форма).
        approximate (bool): Есть невыпуклые генераторы с выборочной ``v_ε``.

    """

    eps: float
    value: float
    head_tiles: int
    tail_mass: float
    approximate: bool = False


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Оценка ``V(ε)`` выборкой.

    Attributes
        estimate (float): ``area(C)·доля попаданий``.
        std_error (float): Биномиальная стандартная ошибка.
        n_samples (int): Объём выборки.
        seed (int): Зерно.
        unresolved_fraction (float): Доля точек, не классифицированных до
            предельной глубины или попавших на границу с погрешностью.

    """

    eps: float
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    unresolved_fraction: float = 0.0


@dataclass(frozen=True)
class TubeCurve:
    """Кривая ``V(ε)`` на геометрической сетке (``ε`` по убыванию).

    Attributes
        points (tuple[TubePoint, ...]): Значения.
        path (TubePath): Способ точного вычисления.
        total_area (float): ``S = Σ_q area(G_q) / (1 − Σ_j r_j²)``.
        min_generator_inradius (float): ``min_q g_q``.
        monte_carlo (tuple[MonteCarloEstimate, ...] | None): Оценки выборкой.

    """

    points: tuple[TubePoint, ...]
    path: TubePath
    total_area: float
    min_generator_inradius: float
    monte_carlo: tuple[MonteCarloEstimate, ...] | None = None

    @property
    def eps_grid(self) -> tuple[float, ...]:
        return tuple(p.eps for p in self.points)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(p.value for p in self.points)

    @property
    def approximate(self) -> bool:
        return any(p.approximate for p in self.points)


@dataclass(frozen=True)
class SlopeEstimate:
    """Наклон ``log V`` от ``log ε`` на нижней декаде сетки.

    Attributes
        slope (float): Наклон (ожидается ``2 − D``).
        intercept (float): Свободный член.
        eps_lo (float): Нижняя граница окна подгонки.
        eps_hi (float): Верхняя граница окна подгонки.
        oscillation (float | None): Размах ``log(V·ε^{D−2})`` на одном периоде
            (только для решётчатых систем).

    """

    slope: float
    intercept: float
    eps_lo: float
    eps_hi: float
    oscillation: float | None = None
