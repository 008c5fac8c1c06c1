"""Построение самоаффинного замощения и перебор плиток."""

import heapq
import math
from collections.abc import Iterator

import numpy as np
from loguru import logger

from fractile.app_error.base_error import (
    NotAdmissibleError,
    NotSelfSimilarError,
    TooManyComponentsError,
)
from fractile.core.config import settings_fractile
from fractile.geom2d.domain import AffineMap2, CellSet, ConvexPoly, GeomTolerance
from fractile.geom2d.services import (
    apply_poly,
    bbox_hits,
    components,
    compose,
    count_components,
    overlap_area,
    subtract_all,
)
from fractile.ifs.domain import IfsSystem, Word
from fractile.ifs.services import (
    check_budget,
    estimate_hull,
    hull_images,
    map_of_word,
    validate,
    words,
)
from fractile.tiling.domain import StructureReport, TileHandle, Tileset, TilingSpec

# Запас на округление при сравнении радиуса плитки с порогом.
_RADIUS_SLACK = 1.0 - 1e-12


# =========================
# Построение
# =========================


def build_tiling(system: IfsSystem, hull: ConvexPoly | None = None) -> TilingSpec:
    """Генераторы ``G_q``: связные компоненты ``C ∖ Φ(C)``.

    Args:
        system (IfsSystem): Система.
        hull (ConvexPoly | None): Оболочка; если не задана, оценивается.

    Returns
        TilingSpec: Замощение.

    Raises
        NotAdmissibleError: Система не прошла проверку.
        TooManyComponentsError: Генераторов больше лимита.

    """
    if hull is None:
        hull = estimate_hull(system).hull
    report = validate(system, hull)
    if not report.admissible:
        raise NotAdmissibleError(system.name, report.tileset_ok, report.nontrivial_ok)

    tol = GeomTolerance.for_diameter(hull.diameter)
    residual = subtract_all(CellSet((hull,)), hull_images(system, hull), tol)
    limit = settings_fractile.budget.max_components
    count = count_components(residual, tol)
    if count > limit:
        raise TooManyComponentsError(count, limit)

    generators = tuple(components(residual, tol))
    spec = TilingSpec(system=system, hull=hull, generators=generators, validation=report)

    expected = hull.area * (1.0 - system.det_sum)
    gap = abs(math.fsum(spec.generator_areas) - expected)
    if gap > 1e-8 * hull.area:
        logger.warning(
            "Площадь генераторов {} расходится с area(C) − area(Φ(C)) на {:.3e}",
            system.name,
            gap,
        )
    if spec.is_approximate:
        logger.warning(
            "У системы {} есть невыпуклые генераторы: трубка будет оценена выборкой",
            system.name,
        )
    logger.success(
        "Замощение {} построено: Q={}, площади генераторов {}",
        system.name,
        spec.size,
        [f"{a:.6g}" for a in spec.generator_areas],
    )
    return spec


def hull_iterates(
    system: IfsSystem, k: int, hull: ConvexPoly | None = None
) -> list[CellSet]:
    """Итерации ``C_0 = {C}``, ``C_m = {φ_w(C) : |w| = m}`` для ``m ≤ k``.

    Многоугольники ``C_m`` идут в лексикографическом порядке слов.

    Raises
        BudgetExceededError: ``J^k`` больше лимита.

    """
    if k < 0:
        raise ValueError(f"Глубина должна быть ≥ 0: {k}")
    check_budget("многоугольники C_k", system.size**k)
    if hull is None:
        hull = estimate_hull(system).hull

    levels = [CellSet((hull,))]
    for _ in range(k):
        prev = levels[-1]
        levels.append(CellSet(tuple(apply_poly(f, p) for f in system.maps for p in prev)))
    return levels


def _tileset_between(
    k: int, parents: CellSet, children: CellSet, tol: GeomTolerance
) -> Tileset:
    child_boxes = children.bboxes
    cells: list[ConvexPoly] = []
    for parent in parents:
        hits = np.flatnonzero(bbox_hits(child_boxes, parent.bbox, tol.geom))
        rest = subtract_all(CellSet((parent,)), (children[int(i)] for i in hits), tol)
        cells.extend(rest.cells)
    return Tileset(k=k, cells=CellSet(tuple(cells)))


def tileset(spec: TilingSpec, k: int) -> Tileset:
    """``T_k = closure(C_{k−1} ∖ C_k)``.

    Raises
        BudgetExceededError: ``J^k`` больше лимита.

    """
    if k < 1:
        raise ValueError(f"Номер tileset должен быть ≥ 1: {k}")
    levels = hull_iterates(spec.system, k, spec.hull)
    result = _tileset_between(k, levels[k - 1], levels[k], spec.tolerance)
    logger.debug("T_{}: {} ячеек, площадь {:.6g}", k, len(result.cells), result.area)
    return result


# =========================
# Плитки
# =========================


def tile_polygons(spec: TilingSpec, tile: TileHandle) -> CellSet:
    """Ячейки плитки ``φ_w(G_q)``."""
    f = tile.map if tile.map is not None else map_of_word(spec.system, tile.word)
    generator = spec.generators[tile.q - 1]
    return CellSet(tuple(apply_poly(f, cell) for cell in generator.cells))


def tiles_down_to(
    spec: TilingSpec, r_min: float, with_maps: bool = True
) -> Iterator[TileHandle]:
    """Плитки с радиусом ``g_q·ρ_w ≥ r_min`` по невозрастанию радиуса.

    Перебор «лучший-первый» по дереву слов: узел ``w`` хранит верхнюю
    оценку ``max_q g_q·ρ_w`` для всех потомков и раскрывается, только если
    она не меньше порога. Равные радиусы упорядочены по слову, затем по ``q``.

    Args:
        spec (TilingSpec): Замощение самоподобной системы.
        r_min (float): Порог радиуса, ``> 0``.
        with_maps (bool): Вычислять ``φ_w`` для каждой плитки.

    Raises
        NotSelfSimilarError: Система аффинная.
        BudgetExceededError: Раскрыто узлов больше лимита.

    """
    if not r_min > 0:
        raise ValueError(f"r_min должен быть > 0: {r_min}")
    system = spec.system
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "перебор плиток по радиусу")
    return _frontier(spec, r_min, with_maps)


def _frontier(spec: TilingSpec, r_min: float, with_maps: bool) -> Iterator[TileHandle]:
    ratios = spec.system.ratios or ()
    maps = spec.system.maps
    inradii = spec.generator_inradii
    g_max = max(inradii)
    threshold = r_min * _RADIUS_SLACK
    limit = settings_fractile.budget.budget

    # (−оценка, слово, q, масштаб, отображение); q = 0 у узла, q ≥ 1 у плитки.
    root: Word = ()
    heap: list[tuple[float, Word, int, float, AffineMap2 | None]] = []
    if g_max >= threshold:
        heap.append((-g_max, root, 0, 1.0, AffineMap2.identity() if with_maps else None))
    expanded = 0
    while heap:
        neg_radius, word, q, scale, f = heapq.heappop(heap)
        if q:
            yield TileHandle(word=word, q=q, map=f, scale=scale, inradius=-neg_radius)
            continue

        expanded += 1
        check_budget("узлы перебора плиток", expanded, limit)
        for idx, g in enumerate(inradii, start=1):
            radius = g * scale
            if radius >= threshold:
                heapq.heappush(heap, (-radius, word, idx, scale, f))
        for j, (r, phi) in enumerate(zip(ratios, maps, strict=True), start=1):
            child_scale = scale * r
            bound = g_max * child_scale
            if bound >= threshold:
                child_map = compose(f, phi) if f is not None else None
                heapq.heappush(heap, (-bound, (*word, j), 0, child_scale, child_map))


def tiles_by_level(spec: TilingSpec, depth: int) -> Iterator[TileHandle]:
    """Все плитки уровней ``1..depth`` по уровням, внутри уровня по словам и ``q``.

    Работает и для аффинных систем; для подобий заполняет масштаб и радиус.

    Raises
        BudgetExceededError: Слов больше лимита.

    """
    if depth < 0:
        raise ValueError(f"Глубина должна быть ≥ 0: {depth}")
    system = spec.system
    check_budget("плитки по уровням", sum(system.size**m for m in range(depth)))
    inradii = spec.generator_inradii
    for m in range(depth):
        for word in words(system, m):
            f = map_of_word(system, word)
            scale = f.ratio if system.is_self_similar else None
            for q, g in enumerate(inradii, start=1):
                yield TileHandle(
                    word=word,
                    q=q,
                    map=f,
                    scale=scale,
                    inradius=g * scale if scale is not None else None,
                )


def select_tiles(
    spec: TilingSpec, depth: int | None = None, r_min: float | None = None
) -> list[TileHandle]:
    """Плитки до уровня ``depth`` или радиуса ``r_min`` (ровно одно из двух).

    Порядок всегда по уровню, слову и ``q``.
    """
    if (depth is None) == (r_min is None):
        raise ValueError("Нужно задать ровно одно из depth и r_min")
    if depth is not None:
        return list(tiles_by_level(spec, depth))
    return sorted(tiles_down_to(spec, r_min), key=lambda t: (t.level, t.word, t.q))


# =========================
# Структура
# =========================


def _image_cells(system: IfsSystem, cells: CellSet) -> CellSet:
    return CellSet(tuple(apply_poly(f, c) for f in system.maps for c in cells))


def _symmetric_difference(a: CellSet, b: CellSet, tol: GeomTolerance) -> float:
    common = overlap_area(a, b, tol)
    return max(math.fsum([a.area, b.area, -2.0 * common]), 0.0)


def _subselfaffine_gap(system: IfsSystem, k_max: int) -> float:
    gap = 0.0
    for m in range(max(k_max - 1, 0)):
        for word in words(system, m):
            inner = map_of_word(system, word)
            for j, phi in enumerate(system.maps, start=1):
                direct = map_of_word(system, (j, *word))
                gap = max(gap, direct.max_coefficient_gap(compose(phi, inner)))
    return gap


def verify_structure(spec: TilingSpec, k_max: int = 4) -> StructureReport:
    """Площадные проверки структуры замощения до уровня ``k_max``.

    Проверяются: ``Φ(T_k) = T_{k+1}`` (площадь симметрической разности),
    рекурсия ``area(T_k) = (Σ|det φ_j|)^{k−1}·Σ area(G_q)``, полнота
    ``area(C) = Σ area(T_k) + area(C_{k_max})`` и совпадение коэффициентов
    ``φ_{jw}`` и ``φ_j∘φ_w``. Все расхождения делятся на ``area(C)``.

    Returns
        StructureReport: Отчёт; нарушения не бросают исключений.

    Raises
        BudgetExceededError: ``k_max`` больше лимита глубины.

    """
    if k_max < 1:
        raise ValueError(f"k_max должен быть ≥ 1: {k_max}")
    check_budget("глубина проверки структуры", k_max, settings_fractile.budget.max_structure_depth)
    system = spec.system
    tol = spec.tolerance
    hull_area = spec.hull.area
    levels = hull_iterates(system, k_max, spec.hull)
    tilesets = [
        _tileset_between(k, levels[k - 1], levels[k], tol) for k in range(1, k_max + 1)
    ]

    propagation = tuple(
        _symmetric_difference(_image_cells(system, t.cells), nxt.cells, tol) / hull_area
        for t, nxt in zip(tilesets, tilesets[1:], strict=False)
    )
    base = math.fsum(spec.generator_areas)
    recursion = tuple(
        abs(t.area - system.det_sum ** (t.k - 1) * base) / hull_area for t in tilesets
    )
    completeness = (
        abs(math.fsum([hull_area, *(-t.area for t in tilesets), -levels[k_max].area]))
        / hull_area
    )

    counts = tuple(count_components(t.cells, tol) for t in tilesets)
    expected = tuple(spec.size * system.size ** (k - 1) for k in range(1, k_max + 1))
    tile_counts = [0] * k_max
    for tile in tiles_by_level(spec, k_max):
        tile_counts[tile.level - 1] += 1

    report = StructureReport(
        k_max=k_max,
        propagation_gaps=propagation,
        recursion_gaps=recursion,
        completeness_gap=completeness,
        subselfaffine_gap=_subselfaffine_gap(system, k_max),
        component_counts=counts,
        expected_counts=expected,
        tile_counts=tuple(tile_counts),
        tolerance=settings_fractile.tolerances.structure_rel,
    )
    if report.ok:
        logger.info(
            "Структура {} подтверждена до k={}: max расхождение {:.3e}",
            system.name,
            k_max,
            report.max_gap,
        )
    else:
        logger.warning(
            "Структура {} не подтверждена: max расхождение {:.3e}, subselfaffine {:.3e}",
            system.name,
            report.max_gap,
            report.subselfaffine_gap,
        )
    return report

