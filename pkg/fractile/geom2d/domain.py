import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from fractile.core.config import settings_fractile
from fractile.geom2d.enums import MapKind

# Порог строгой выпуклости относительно квадрата собственного диаметра.
# Очистка вершин (services._clean_ring) работает с более грубым порогом,
# поэтому любой очищенный контур его проходит.
_CONVEX_EPS = 1e-13


@dataclass(frozen=True, slots=True)
class Point2:
    """Точка плоскости.

    Attributes
        x (float): Абсцисса.
        y (float): Ордината.

    """

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Координаты точки должны быть конечны: ({self.x}, {self.y})")

    @classmethod
    def from_array(cls, value: Sequence[float] | np.ndarray) -> "Point2":
        return cls(float(value[0]), float(value[1]))

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def to_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def as_points_array(points: Sequence[Point2] | np.ndarray) -> np.ndarray:
    """Приводит набор точек к массиву формы ``(n, 2)``."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.array(
            [p.to_tuple() if isinstance(p, Point2) else tuple(p) for p in points],
            dtype=float,
        )
    return arr.reshape(-1, 2)


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeomTolerance:
    """Абсолютные допуски для одной задачи.

    Attributes
        geom (float): Допуск длины.
        area (float): Допуск площади.

    """

    geom: float
    area: float

    @classmethod
    def for_diameter(cls, diameter: float) -> "GeomTolerance":
        """Допуски, отнесённые к диаметру оболочки."""
        tol = settings_fractile.tolerances
        scale = max(float(diameter), np.finfo(float).tiny)
        return cls(geom=tol.geom_rel * scale, area=tol.area_rel * scale * scale)

    @property
    def point(self) -> float:
        """Расстояние, на котором две вершины считаются совпавшими."""
        return self.geom * 1e-3


@dataclass(frozen=True, eq=False)
class AffineMap2:
    """Аффинное отображение ``x ↦ linear·x + translation``.

    Условие сжатия здесь не проверяется: тождественное отображение (пустое
    слово) и сопряжённые масштабом отображения тоже должны представляться.
    Сжатие проверяет загрузчик системы.

    Attributes
        linear (np.ndarray): Матрица 2×2.
        translation (np.ndarray): Вектор сдвига.
        kind (MapKind): Подобие или общее аффинное.
        ratio (float | None): Коэффициент подобия (только для подобий).

    """

    linear: np.ndarray
    translation: np.ndarray
    kind: MapKind = MapKind.GENERAL_AFFINE
    ratio: float | None = None

    def __post_init__(self) -> None:
        linear = np.asarray(self.linear, dtype=float)
        translation = np.asarray(self.translation, dtype=float).reshape(-1)
        if linear.shape != (2, 2) or translation.shape != (2,):
            raise ValueError("Ожидается матрица 2×2 и вектор длины 2")
        if not (np.all(np.isfinite(linear)) and np.all(np.isfinite(translation))):
            raise ValueError("Коэффициенты отображения должны быть конечны")
        object.__setattr__(self, "linear", _frozen(linear))
        object.__setattr__(self, "translation", _frozen(translation))
        if self.kind is MapKind.SIMILARITY:
            ratio = self.ratio
            if ratio is None or not ratio > 0:
                raise ValueError(f"Коэффициент подобия должен быть > 0: {ratio}")
            gram = linear.T @ linear
            gap = float(np.max(np.abs(gram - ratio * ratio * np.eye(2))))
            limit = settings_fractile.tolerances.similarity_check * max(1.0, ratio**2)
            if gap > limit:
                raise ValueError(
                    f"Матрица не равна r·A с ортогональной A: отклонение {gap:.3e}"
                )
            object.__setattr__(self, "ratio", float(ratio))
        elif self.ratio is not None:
            raise ValueError("ratio задаётся только для подобий")

    # ----- конструкторы -----

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(np.eye(2), np.zeros(2), MapKind.SIMILARITY, 1.0)

    @classmethod
    def similarity(
        cls,
        ratio: float,
        rotation_deg: float = 0.0,
        reflect: bool = False,
        translation: Sequence[float] = (0.0, 0.0),
    ) -> "AffineMap2":
        """Подобие ``r·R(θ)·S + a``, где ``S`` отражение относительно оси x."""
        theta = math.radians(rotation_deg)
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        if reflect:
            rot = rot @ np.diag([1.0, -1.0])
        return cls(ratio * rot, np.asarray(translation, dtype=float), MapKind.SIMILARITY, ratio)

    @classmethod
    def affine(cls, matrix: Sequence[Sequence[float]], translation: Sequence[float]) -> "AffineMap2":
        return cls(np.asarray(matrix, dtype=float), np.asarray(translation, dtype=float))

    # ----- свойства -----

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.linear, compute_uv=False)

    @property
    def spectral_bound(self) -> float:
        """Наибольшее сингулярное число линейной части."""
        return float(self.singular_values[0])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    @property
    def is_similarity(self) -> bool:
        return self.kind is MapKind.SIMILARITY

    @property
    def orthogonal_part(self) -> np.ndarray | None:
        if self.ratio is None:
            return None
        return self.linear / self.ratio

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Применяет отображение к массиву точек ``(..., 2)``."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.translation

    def apply_point(self, point: Point2) -> Point2:
        return Point2.from_array(self(point.to_array()))

    def max_coefficient_gap(self, other: "AffineMap2") -> float:
        """Максимум модуля разности коэффициентов двух отображений."""
        return float(
            max(
                np.max(np.abs(self.linear - other.linear)),
                np.max(np.abs(self.translation - other.translation)),
            )
        )


@dataclass(frozen=True, eq=False)
class ConvexPoly:
    """Строго выпуклый многоугольник с обходом против часовой стрелки.

    Attributes
        vertices (np.ndarray): Вершины, массив ``(n, 2)``.

    """

    vertices: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("Многоугольник должен иметь не меньше 3 вершин")
        if not np.all(np.isfinite(v)):
            raise ValueError("Вершины многоугольника должны быть конечны")
        object.__setattr__(self, "vertices", _frozen(v))

        diam = self.diameter
        if diam <= 0:
            raise ValueError("Вырожденный многоугольник")
        edges = np.roll(v, -1, axis=0) - v
        if float(np.min(np.hypot(edges[:, 0], edges[:, 1]))) <= _CONVEX_EPS * diam:
            raise ValueError("Совпадающие вершины многоугольника")
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        if float(np.min(cross)) <= _CONVEX_EPS * diam * diam:
            raise ValueError("Многоугольник не строго выпуклый или обход по часовой")

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    @cached_property
    def area(self) -> float:
        v = self.vertices - self.vertices[0]
        x, y = v[:, 0], v[:, 1]
        return 0.5 * math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)

    @cached_property
    def perimeter(self) -> float:
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        return math.fsum(np.hypot(edges[:, 0], edges[:, 1]))

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))

    @cached_property
    def bbox(self) -> np.ndarray:
        """Охватывающий прямоугольник ``[xmin, ymin, xmax, ymax]``."""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return np.concatenate([lo, hi])

    @cached_property
    def halfplanes(self) -> tuple[np.ndarray, np.ndarray]:
        """Внешние единичные нормали рёбер и смещения: ``n·x ≤ c`` внутри."""
        v = self.vertices
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return normals, offsets

    @property
    def points(self) -> list[Point2]:
        return [Point2.from_array(row) for row in self.vertices]

    def edges(self) -> np.ndarray:
        """Рёбра как отрезки, массив ``(n, 2, 2)``."""
        v = self.vertices
        return np.stack([v, np.roll(v, -1, axis=0)], axis=1)


@dataclass(frozen=True, eq=False)
class CellSet:
    """Конечное объединение выпуклых ячеек с попарно непересекающимися внутренностями.

    Attributes
        cells (tuple[ConvexPoly, ...]): Ячейки.

    """

    cells: tuple[ConvexPoly, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[ConvexPoly]:
        return iter(self.cells)

    def __getitem__(self, index: int) -> ConvexPoly:
        return self.cells[index]

    @cached_property
    def area(self) -> float:
        return math.fsum(c.area for c in self.cells)

    @cached_property
    def bboxes(self) -> np.ndarray:
        if not self.cells:
            return np.zeros((0, 4))
        return np.stack([c.bbox for c in self.cells])

    @cached_property
    def bbox(self) -> np.ndarray | None:
        if not self.cells:
            return None
        b = self.bboxes
        return np.array([b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max()])

    @property
    def is_empty(self) -> bool:
        return not self.cells


@dataclass(frozen=True, eq=False)
class Component:
    """Связная (по рёбрам) компонента набора ячеек.

    Attributes
        cells (CellSet): Ячейки компоненты.
        area (float): Площадь.
        perimeter (float): Длина внешней границы.
        inradius (float): Радиус наибольшего вписанного круга.
        incenter (Point2): Центр этого круга.
        is_convex (bool): Объединение ячеек выпукло.
        outline (ConvexPoly | None): Выпуклый контур для выпуклых компонент.

    """

    cells: CellSet
    area: float
    perimeter: float
    inradius: float
    incenter: Point2
    is_convex: bool
    outline: ConvexPoly | None = field(default=None)

    @property
    def cell_count(self) -> int:
        return len(self.cells)
