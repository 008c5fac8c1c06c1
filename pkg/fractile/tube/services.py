"""Объём внутренней трубки замощения ``V(ε) = ⟨η_g, v_ε⟩``.

Плитки с радиусом ``≥ ε`` считаются явно (трубка плитки это трубка
генератора, растянутая подобием); остальные плитки целиком лежат в своей
трубке, и их суммарная площадь берётся в замкнутой форме.
"""

import math
from collections import defaultdict
from functools import lru_cache

import numpy as np
from loguru import logger

from fractile.app_error.base_error import (
    DivergentTailError,
    InsufficientRangeError,
    NotSelfSimilarError,
)
from fractile.core.config import settings_fractile
from fractile.geom2d.domain import Component
from fractile.geom2d.services import (
    boundary_segments,
    contains_any,
    distance_to_segments,
    inner_tube_area,
)
from fractile.spectra.domain import ZetaModel
from fractile.spectra.measures import geometric_measure, geometric_model
from fractile.spectra.zeta import detect_lattice, real_dimension
from fractile.tiling.domain import TilingSpec
from fractile.tiling.services import tiles_down_to
from fractile.tube.domain import (
    SlopeEstimate,
    TubeCurve,
    TubePath,
    TubePoint,
)
from fractile.tube.monte_carlo import monte_carlo_tube

_REQUIRED_DECADES = 2.0


# =========================
# Трубка генератора
# =========================


@lru_cache(maxsize=64)
def _sampled_distances(component: Component, n_samples: int, seed: int) -> np.ndarray:
    """Отсортированные расстояния до границы для равномерной выборки в компоненте."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    segments = boundary_segments(component)
    box = component.cells.bbox
    kept: list[np.ndarray] = []
    total = 0
    while total < n_samples:
        pts = rng.uniform(box[:2], box[2:], size=(n_samples, 2))
        pts = pts[contains_any(component.cells, pts)]
        kept.append(pts)
        total += len(pts)
    pts = np.concatenate(kept)[:n_samples]
    return np.sort(distance_to_segments(pts, segments))


def v_eps_generator(spec: TilingSpec, q: int, eps: float) -> float:
    """Площадь ``{x ∈ G_q : dist(x, ∂G_q) < eps}``.

    Для выпуклого генератора вычисляется эрозией точно; для невыпуклого
    оценивается долей выборки (фиксированное зерно).
    """
    if eps < 0:
        raise ValueError(f"eps должен быть ≥ 0: {eps}")
    generator = spec.generators[q - 1]
    if eps == 0:
        return 0.0
    if eps >= generator.inradius:
        return generator.area
    if generator.is_convex and generator.outline is not None:
        return inner_tube_area(generator.outline, eps)

    tube = settings_fractile.tube
    distances = _sampled_distances(generator, tube.generator_samples, tube.seed)
    fraction = np.searchsorted(distances, eps, side="left") / len(distances)
    return generator.area * float(fraction)


# =========================
# Точный объём
# =========================


def _require_tube(spec: TilingSpec) -> None:
    system = spec.system
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "объём трубки")
    square_sum = math.fsum(r * r for r in system.ratios or ())
    if square_sum >= 1.0:
        raise DivergentTailError(square_sum)


def _assemble(
    spec: TilingSpec, eps: float, counts: dict[tuple[int, float], int]
) -> TubePoint:
    """Сумма по группам плиток ``(q, ρ)`` с кратностями."""
    areas = spec.generator_areas
    tube_parts: list[float] = []
    area_parts: list[float] = []
    for (q, rho), count in sorted(counts.items()):
        scale = count * rho * rho
        tube_parts.append(scale * v_eps_generator(spec, q, eps / rho))
        area_parts.append(scale * areas[q - 1])
    head_area = math.fsum(area_parts)
    tail = max(spec.total_tile_area - head_area, 0.0)
    return TubePoint(
        eps=eps,
        value=math.fsum([*tube_parts, tail]),
        head_tiles=sum(counts.values()),
        tail_mass=tail,
        approximate=spec.is_approximate,
    )


def tube_volume(spec: TilingSpec, eps: float) -> TubePoint:
    """``V(ε)`` через перебор плиток ``tiles_down_to(ε)``.

    Raises
        NotSelfSimilarError: Система аффинная.
        DivergentTailError: ``Σ r_j² ≥ 1``.

    """
    if not eps > 0:
        raise ValueError(f"eps должен быть > 0: {eps}")
    _require_tube(spec)
    counts: dict[tuple[int, float], int] = defaultdict(int)
    for tile in tiles_down_to(spec, eps, with_maps=False):
        counts[(tile.q, tile.scale)] += 1
    return _assemble(spec, eps, counts)


def tube_volume_from_measure(
    spec: TilingSpec, eps: float, model: ZetaModel | None = None
) -> TubePoint:
    """``V(ε)`` через атомы геометрической меры с ``g_q·r_w ≥ ε``.

    Тот же результат, что ``tube_volume``, но совпадающие масштабы уже
    слиты в веса, поэтому работает при очень малых ``ε``.
    """
    if not eps > 0:
        raise ValueError(f"eps должен быть > 0: {eps}")
    _require_tube(spec)
    model = model or geometric_model(spec)
    counts: dict[tuple[int, float], int] = defaultdict(int)
    for q, g in enumerate(model.generator_inradii, start=1):
        if g < eps:
            continue
        for atom in geometric_measure(model, eps, generator=q).atoms:
            counts[(q, 1.0 / (atom.location * g))] += atom.weight
    return _assemble(spec, eps, counts)


def eps_grid(eps_min: float, eps_max: float, points_per_decade: int) -> np.ndarray:
    """Геометрическая сетка по убыванию; ``round(ppd·декады) + 1`` точек."""
    if not 0 < eps_min <= eps_max:
        raise ValueError(f"Нужно 0 < eps_min ≤ eps_max: {eps_min}, {eps_max}")
    if points_per_decade < 1:
        raise ValueError(f"points_per_decade должен быть ≥ 1: {points_per_decade}")
    n = round(points_per_decade * math.log10(eps_max / eps_min)) + 1
    if n == 1:
        return np.array([eps_max])
    return np.geomspace(eps_max, eps_min, n)


def tube_curve(
    spec: TilingSpec,
    eps_max: float,
    eps_min: float,
    points_per_decade: int | None = None,
    path: TubePath | str = TubePath.MEASURE,
    mc_samples: int | None = None,
    seed: int | None = None,
) -> TubeCurve:
    """``V(ε)`` на сетке; при ``mc_samples`` добавляет оценки выборкой.

    Raises
        NotSelfSimilarError: Система аффинная.
        DivergentTailError: ``Σ r_j² ≥ 1``.

    """
    path = TubePath(path)
    ppd = points_per_decade or settings_fractile.tube.points_per_decade
    grid = eps_grid(eps_min, eps_max, ppd)
    _require_tube(spec)
    model = geometric_model(spec)
    if path is TubePath.MEASURE:
        points = tuple(tube_volume_from_measure(spec, float(e), model) for e in grid)
    else:
        points = tuple(tube_volume(spec, float(e)) for e in grid)

    estimates = None
    if mc_samples:
        estimates = tuple(monte_carlo_tube(spec, float(e), mc_samples, seed) for e in grid)

    curve = TubeCurve(
        points=points,
        path=path,
        total_area=spec.total_tile_area,
        min_generator_inradius=min(spec.generator_inradii),
        monte_carlo=estimates,
    )
    if curve.approximate:
        logger.warning("Кривая {} приближённая: невыпуклые генераторы", spec.system.name)
    logger.info(
        "Кривая V(ε) {}: {} точек, ε ∈ [{:.3g}, {:.3g}], путь {}",
        spec.system.name,
        len(points),
        eps_min,
        eps_max,
        path.value,
    )
    return curve


# =========================
# Асимптотика
# =========================


def asymptotic_slope(curve: TubeCurve, model: ZetaModel | None = None) -> SlopeEstimate:
    """Наклон ``log V`` от ``log ε`` по нижней декаде сетки.

    Для решётчатой модели дополнительно считается размах
    ``log(V·ε^{D−2})`` на одном мультипликативном периоде ``[ε_min, ε_min/r]``.

    Raises
        InsufficientRangeError: Меньше двух декад ниже ``min_q g_q``.

    """
    eps = np.asarray(curve.eps_grid)
    values = np.asarray(curve.values)
    eps_min = float(eps.min())
    decades = math.log10(curve.min_generator_inradius / eps_min)
    if decades < _REQUIRED_DECADES:
        raise InsufficientRangeError(decades, _REQUIRED_DECADES)

    eps_hi = eps_min * 10.0 * (1 + 1e-12)
    window = (eps <= eps_hi) & (values > 0)
    slope, intercept = np.polyfit(np.log(eps[window]), np.log(values[window]), 1)

    oscillation = None
    if model is not None:
        lattice = detect_lattice(model)
        if lattice.is_lattice and lattice.base is not None:
            d = real_dimension(model)
            period = (eps >= eps_min * (1 - 1e-12)) & (eps <= eps_min / lattice.base * (1 + 1e-12))
            normalized = np.log(values[period] * eps[period] ** (d - 2.0))
            oscillation = float(normalized.max() - normalized.min())
    return SlopeEstimate(
        slope=float(slope),
        intercept=float(intercept),
        eps_lo=eps_min,
        eps_hi=float(eps[window].max()),
        oscillation=oscillation,
    )
