"""Планарная выпуклая геометрия с явными допусками.

Все проверки «внутренности» (пересечение образов, смежность ячеек)
сформулированы как пороги площади и длины, а не как предикаты на границе.
"""

import math
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from functools import cmp_to_key

import numpy as np
from loguru import logger
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from fractile.app_error.base_error import DegenerateHullError, DegenerateImageError
from fractile.geom2d.domain import (
    AffineMap2,
    CellSet,
    Component,
    ConvexPoly,
    GeomTolerance,
    Point2,
    as_points_array,
)
from fractile.geom2d.enums import MapKind

# Направления локального поиска центра вписанного круга (шаг 22.5°).
_SEARCH_DIRECTIONS = np.array(
    [(math.cos(a), math.sin(a)) for a in np.linspace(0.0, 2 * math.pi, 16, endpoint=False)]
)
_OPPOSITE_NORMAL_EPS = 1e-9


# =========================
# Отображения
# =========================


def compose(f: AffineMap2, g: AffineMap2) -> AffineMap2:
    """Композиция ``f∘g``.

    Подобие сохраняется, коэффициенты перемножаются.

    Args:
        f (AffineMap2): Внешнее отображение.
        g (AffineMap2): Внутреннее отображение.

    Returns
        AffineMap2: ``x ↦ f(g(x))``.

    """
    linear = f.linear @ g.linear
    translation = f.linear @ g.translation + f.translation
    if f.kind is MapKind.SIMILARITY and g.kind is MapKind.SIMILARITY:
        return AffineMap2(linear, translation, MapKind.SIMILARITY, f.ratio * g.ratio)
    return AffineMap2(linear, translation)


def apply_poly(f: AffineMap2, p: ConvexPoly) -> ConvexPoly:
    """Образ многоугольника; при ``det < 0`` обход разворачивается.

    Raises
        DegenerateImageError: Образ нарушает инварианты многоугольника.

    """
    pts = f(p.vertices)
    if f.det < 0:
        pts = pts[::-1]
    try:
        return ConvexPoly(pts)
    except ValueError as exc:
        raise DegenerateImageError(
            f"Вырожденный образ многоугольника из {len(p)} вершин", cause=exc
        ) from exc


# =========================
# Построение многоугольников
# =========================


def _clean_ring(
    points: Iterable[np.ndarray], tol: GeomTolerance, turn_eps: float
) -> np.ndarray | None:
    """Удаляет совпавшие и почти коллинеарные вершины контура.

    Вершина удаляется, если ориентированная площадь поворота в ней
    (векторное произведение соседних рёбер) не больше ``turn_eps``.
    """
    ring: list[np.ndarray] = []
    for pt in points:
        if ring and math.hypot(*(pt - ring[-1])) <= tol.point:
            continue
        ring.append(np.asarray(pt, dtype=float))
    while len(ring) > 1 and math.hypot(*(ring[0] - ring[-1])) <= tol.point:
        ring.pop()

    changed = True
    while changed and len(ring) >= 3:
        changed = False
        m = len(ring)
        for i in range(m):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % m]
            e1 = b - a
            e2 = c - b
            if e1[0] * e2[1] - e1[1] * e2[0] <= turn_eps:
                del ring[i]
                changed = True
                break
    if len(ring) < 3:
        return None
    return np.array(ring)


def _make_poly(points: Iterable[np.ndarray], tol: GeomTolerance) -> ConvexPoly | None:
    ring = _clean_ring(points, tol, turn_eps=tol.area)
    if ring is None:
        return None
    try:
        poly = ConvexPoly(ring)
    except ValueError as exc:
        logger.debug("Отброшен численно вырожденный контур: {}", exc)
        return None
    if poly.area <= tol.area:
        return None
    return poly


def convex_hull(
    points: Sequence[Point2] | np.ndarray, tol: GeomTolerance | None = None
) -> ConvexPoly:
    """Минимальный выпуклый многоугольник, содержащий все точки.

    Точки на рёбрах (в пределах ``tol.geom``) в вершины не попадают.

    Raises
        DegenerateHullError: Точки коллинеарны или совпадают.

    """
    pts = as_points_array(points)
    if len(pts) < 3:
        raise DegenerateHullError(len(pts))
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHullError(len(pts)) from exc

    ring = pts[hull.vertices]
    extent = np.ptp(ring, axis=0)
    diameter = float(math.hypot(*extent))
    tol = tol or GeomTolerance.for_diameter(diameter)
    cleaned = _clean_ring(ring, tol, turn_eps=tol.geom * diameter)
    if cleaned is None:
        raise DegenerateHullError(len(pts))
    try:
        poly = ConvexPoly(cleaned)
    except ValueError as exc:
        raise DegenerateHullError(len(pts)) from exc
    if poly.area <= tol.area:
        raise DegenerateHullError(len(pts))
    return poly


# =========================
# Отсечение
# =========================


def bbox_hits(boxes: np.ndarray, box: np.ndarray, eps: float) -> np.ndarray:
    return (
        (boxes[:, 0] <= box[2] + eps)
        & (boxes[:, 2] >= box[0] - eps)
        & (boxes[:, 1] <= box[3] + eps)
        & (boxes[:, 3] >= box[1] - eps)
    )


def clip_halfplane(
    p: ConvexPoly,
    normal: Sequence[float] | np.ndarray,
    offset: float,
    tol: GeomTolerance | None = None,
) -> ConvexPoly | None:
    """Пересечение ``p ∩ {x : n·x ≤ c}`` (Сазерленд–Ходжман для одной прямой).

    Вершины на расстоянии не больше ``tol.geom`` от прямой считаются
    лежащими на ней.

    Returns
        ConvexPoly | None: Результат или ``None``, если площадь не больше ``tol.area``.

    """
    tol = tol or GeomTolerance.for_diameter(p.diameter)
    n = np.asarray(normal, dtype=float)
    v = p.vertices
    d = v @ n - offset
    d = np.where(np.abs(d) <= tol.geom, 0.0, d)
    if np.all(d <= 0):
        return p
    if np.all(d >= 0):
        return None

    out: list[np.ndarray] = []
    m = len(v)
    for i in range(m):
        j = (i + 1) % m
        if d[i] <= 0:
            out.append(v[i])
        if d[i] * d[j] < 0:
            t = d[i] / (d[i] - d[j])
            out.append(v[i] + t * (v[j] - v[i]))
    return _make_poly(out, tol)


def intersect(
    p: ConvexPoly, q: ConvexPoly, tol: GeomTolerance | None = None
) -> ConvexPoly | None:
    """Пересечение выпуклых многоугольников последовательным отсечением."""
    tol = tol or GeomTolerance.for_diameter(max(p.diameter, q.diameter))
    if not bbox_hits(p.bbox[None, :], q.bbox, tol.geom)[0]:
        return None
    result: ConvexPoly | None = p
    normals, offsets = q.halfplanes
    for n, c in zip(normals, offsets, strict=True):
        result = clip_halfplane(result, n, c, tol)
        if result is None:
            return None
    return result


def _subtract_cell(
    cell: ConvexPoly, normals: np.ndarray, offsets: np.ndarray, tol: GeomTolerance
) -> list[ConvexPoly]:
    pieces: list[ConvexPoly] = []
    rest: ConvexPoly | None = cell
    for n, c in zip(normals, offsets, strict=True):
        outside = clip_halfplane(rest, -n, -c, tol)
        if outside is not None:
            pieces.append(outside)
        rest = clip_halfplane(rest, n, c, tol)
        if rest is None:
            break
    return pieces


def subtract(
    region: CellSet, p: ConvexPoly, tol: GeomTolerance | None = None
) -> CellSet:
    """Разность ``region ∖ p`` в виде выпуклых ячеек.

    Каждая задетая ячейка режется рёбрами ``p``; куски внутри ``p``
    отбрасываются.
    """
    if region.is_empty:
        return region
    if tol is None:
        box = region.bbox
        tol = GeomTolerance.for_diameter(
            max(p.diameter, math.hypot(box[2] - box[0], box[3] - box[1]))
        )
    hits = bbox_hits(region.bboxes, p.bbox, tol.geom)
    if not hits.any():
        return region

    normals, offsets = p.halfplanes
    out: list[ConvexPoly] = []
    for cell, hit in zip(region.cells, hits, strict=True):
        if hit:
            out.extend(_subtract_cell(cell, normals, offsets, tol))
        else:
            out.append(cell)
    return CellSet(tuple(out))


def overlap_area(a: CellSet, b: CellSet, tol: GeomTolerance | None = None) -> float:
    """Площадь ``a ∩ b`` для наборов ячеек с попарно непересекающимися внутренностями."""
    if a.is_empty or b.is_empty:
        return 0.0
    if tol is None:
        box = np.concatenate([a.bbox[None, :], b.bbox[None, :]])
        tol = GeomTolerance.for_diameter(
            math.hypot(box[:, 2].max() - box[:, 0].min(), box[:, 3].max() - box[:, 1].min())
        )
    parts: list[float] = []
    b_boxes = b.bboxes
    for cell in a:
        for idx in np.flatnonzero(bbox_hits(b_boxes, cell.bbox, tol.geom)):
            common = intersect(cell, b[int(idx)], tol)
            if common is not None:
                parts.append(common.area)
    return math.fsum(parts)


def subtract_all(
    region: CellSet, polys: Iterable[ConvexPoly], tol: GeomTolerance | None = None
) -> CellSet:
    """Последовательно вычитает многоугольники из набора ячеек."""
    for poly in polys:
        region = subtract(region, poly, tol)
        if region.is_empty:
            break
    return region


# =========================
# Точки и расстояния
# =========================


def contains(
    poly: ConvexPoly, points: np.ndarray, tol: float = 0.0
) -> np.ndarray:
    """Векторная проверка ``n·x ≤ c + tol`` для всех рёбер."""
    pts = as_points_array(points)
    normals, offsets = poly.halfplanes
    return np.all(pts @ normals.T - offsets <= tol, axis=1)


def contains_any(cells: CellSet, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    pts = as_points_array(points)
    inside = np.zeros(len(pts), dtype=bool)
    for cell in cells:
        inside |= contains(cell, pts, tol)
    return inside


def distance_to_segments(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Расстояние от каждой точки до ближайшего отрезка.

    Args:
        points (np.ndarray): Точки ``(k, 2)``.
        segments (np.ndarray): Отрезки ``(m, 2, 2)``.

    Returns
        np.ndarray: Массив ``(k,)``.

    """
    pts = as_points_array(points)
    a = segments[:, 0, :]
    ab = segments[:, 1, :] - a
    length2 = np.einsum("ij,ij->i", ab, ab)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("kmi,mi->km", ap, ab) / length2, 0.0, 1.0)
    diff = ap - t[..., None] * ab[None, :, :]
    return np.sqrt(np.min(np.einsum("kmi,kmi->km", diff, diff), axis=1))


def hausdorff(p: ConvexPoly, q: ConvexPoly) -> float:
    """Хаусдорфово расстояние между выпуклыми многоугольниками.

    Для выпуклых множеств максимум расстояния достигается в вершине.
    """

    def directed(a: ConvexPoly, b: ConvexPoly) -> float:
        d = distance_to_segments(a.vertices, b.edges())
        d[contains(b, a.vertices)] = 0.0
        return float(d.max())

    return max(directed(p, q), directed(q, p))


# =========================
# Компоненты
# =========================


def _candidate_pairs(boxes: np.ndarray, eps: float) -> Iterator[tuple[int, int]]:
    """Пары ячеек с пересекающимися охватывающими прямоугольниками."""
    order = np.argsort(boxes[:, 0], kind="stable")
    xs = boxes[order, 0]
    for pos, i in enumerate(order):
        hi = int(np.searchsorted(xs, boxes[i, 2] + eps, side="right"))
        cand = order[pos + 1 : hi]
        if cand.size == 0:
            continue
        ok = (boxes[cand, 1] <= boxes[i, 3] + eps) & (boxes[cand, 3] >= boxes[i, 1] - eps)
        for j in cand[ok]:
            yield (int(min(i, j)), int(max(i, j)))


def shared_edges(
    a: ConvexPoly, b: ConvexPoly, tol: GeomTolerance
) -> list[tuple[int, int, np.ndarray]]:
    """Общие отрезки границ двух ячеек.

    Returns
        list[tuple[int, int, np.ndarray]]: ``(ребро a, ребро b, отрезок 2×2)``
        для всех общих кусков длиннее ``tol.geom``.

    """
    na, ca = a.halfplanes
    nb, cb = b.halfplanes
    opposite = (na @ nb.T < -1.0 + _OPPOSITE_NORMAL_EPS) & (
        np.abs(ca[:, None] + cb[None, :]) <= tol.geom
    )
    result = []
    ma, mb = len(a), len(b)
    for i, j in np.argwhere(opposite):
        direction = np.array([-na[i, 1], na[i, 0]])
        sa = a.vertices[[i, (i + 1) % ma]] @ direction
        sb = b.vertices[[j, (j + 1) % mb]] @ direction
        lo = max(sa.min(), sb.min())
        hi = min(sa.max(), sb.max())
        if hi - lo > tol.geom:
            start = a.vertices[i]
            base = float(start @ direction)
            seg = np.stack([start + (lo - base) * direction, start + (hi - base) * direction])
            result.append((int(i), int(j), seg))
    return result


def boundary_segments(cells: CellSet | Component, tol: GeomTolerance | None = None) -> np.ndarray:
    """Внешняя граница объединения ячеек (общие рёбра исключены).

    Returns
        np.ndarray: Отрезки ``(m, 2, 2)``.

    """
    cellset = cells.cells if isinstance(cells, Component) else cells
    tol = tol or _cells_tolerance(cellset)

    covered: dict[tuple[int, int], list[np.ndarray]] = defaultdict(list)
    for i, j in _candidate_pairs(cellset.bboxes, tol.geom):
        for ea, eb, seg in shared_edges(cellset[i], cellset[j], tol):
            covered[(i, ea)].append(seg)
            covered[(j, eb)].append(seg)

    segments: list[np.ndarray] = []
    for idx, cell in enumerate(cellset):
        for e, edge in enumerate(cell.edges()):
            start, end = edge
            length = float(math.hypot(*(end - start)))
            direction = (end - start) / length
            gaps = sorted(
                (
                    tuple(sorted(float((pt - start) @ direction) for pt in seg))
                    for seg in covered.get((idx, e), [])
                ),
            )
            cursor = 0.0
            for lo, hi in gaps:
                if lo - cursor > tol.geom:
                    segments.append(np.stack([start + cursor * direction, start + lo * direction]))
                cursor = max(cursor, hi)
            if length - cursor > tol.geom:
                segments.append(np.stack([start + cursor * direction, end]))
    if not segments:
        return np.zeros((0, 2, 2))
    return np.stack(segments)


def _component_order(tol: GeomTolerance):  # noqa: ANN202
    def compare(a: Component, b: Component) -> int:
        scale = max(a.area, b.area)
        if abs(a.area - b.area) > 1e-9 * scale + tol.area:
            return -1 if a.area > b.area else 1
        for u, v in ((a.incenter.x, b.incenter.x), (a.incenter.y, b.incenter.y)):
            if abs(u - v) > tol.geom:
                return -1 if u < v else 1
        return 0

    return cmp_to_key(compare)


def _build_component(cells: CellSet, shared_length: float, tol: GeomTolerance) -> Component:
    area = cells.area
    perimeter = math.fsum(c.perimeter for c in cells) - 2.0 * shared_length
    outline: ConvexPoly | None = None
    if len(cells) == 1:
        outline = cells[0]
    else:
        verts = np.concatenate([c.vertices for c in cells])
        try:
            hull = convex_hull(verts, tol)
        except DegenerateHullError:
            hull = None
        if hull is not None and abs(hull.area - area) <= max(
            4.0 * tol.area * len(cells), 1e-9 * area
        ):
            outline = hull

    if outline is not None:
        radius, center = inradius_convex(outline)
    else:
        radius, center = _inradius_union(cells, tol, accuracy=tol.geom)
    return Component(
        cells=cells,
        area=area,
        perimeter=perimeter,
        inradius=radius,
        incenter=center,
        is_convex=outline is not None,
        outline=outline,
    )


def _group_cells(
    cells: CellSet, tol: GeomTolerance
) -> tuple[dict[int, list[int]], dict[int, float]]:
    """Union-find по общим рёбрам длиннее ``tol.geom``.

    Returns
        tuple: Группы индексов по корню и суммарная длина общих рёбер в группе.

    """
    n = len(cells)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    shared: dict[tuple[int, int], float] = {}
    for i, j in _candidate_pairs(cells.bboxes, tol.geom):
        length = math.fsum(
            float(math.hypot(*(seg[1] - seg[0]))) for _, _, seg in shared_edges(cells[i], cells[j], tol)
        )
        if length > tol.geom:
            shared[(i, j)] = length
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = defaultdict(list)
    for i in range(n):
        groups[find(i)].append(i)
    shared_by_root: dict[int, float] = defaultdict(float)
    for (i, _), length in shared.items():
        shared_by_root[find(i)] += length
    return groups, shared_by_root


def _cells_tolerance(cells: CellSet) -> GeomTolerance:
    box = cells.bbox
    return GeomTolerance.for_diameter(math.hypot(box[2] - box[0], box[3] - box[1]))


def count_components(cells: CellSet, tol: GeomTolerance | None = None) -> int:
    """Число связных по рёбрам компонент без вычисления их метрик."""
    if cells.is_empty:
        return 0
    groups, _ = _group_cells(cells, tol or _cells_tolerance(cells))
    return len(groups)


def components(cells: CellSet, tol: GeomTolerance | None = None) -> list[Component]:
    """Разбиение ячеек на связные по рёбрам компоненты.

    Компоненты упорядочены по убыванию площади, затем по центру вписанного
    круга (x, потом y); этот порядок задаёт индекс генератора.
    """
    if cells.is_empty:
        return []
    tol = tol or _cells_tolerance(cells)
    groups, shared_by_root = _group_cells(cells, tol)
    result = [
        _build_component(CellSet(tuple(cells[i] for i in members)), shared_by_root[root], tol)
        for root, members in groups.items()
    ]
    result.sort(key=_component_order(tol))
    logger.debug("Найдено компонент: {} (ячеек {})", len(result), len(cells))
    return result


# =========================
# Вписанный круг
# =========================


def inradius_convex(p: ConvexPoly) -> tuple[float, Point2]:
    """Центр Чебышёва: ``max ρ`` при ``n_e·x + ρ ≤ c_e`` для всех рёбер.

    Линейная программа решается в системе координат с началом в среднем
    вершин; затем решение уточняется точным решением системы активных
    ограничений.

    Returns
        tuple[float, Point2]: Радиус и центр.

    """
    origin = p.vertices.mean(axis=0)
    normals, offsets = p.halfplanes
    offsets = offsets - normals @ origin
    a_ub = np.column_stack([normals, np.ones(len(normals))])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:
        raise DegenerateImageError(f"Центр Чебышёва не найден: {res.message}")
    x = np.asarray(res.x, dtype=float)

    diam = p.diameter
    active = offsets - a_ub @ x <= 1e-7 * diam
    if int(active.sum()) >= 3:
        polished, *_ = np.linalg.lstsq(a_ub[active], offsets[active], rcond=None)
        if (
            np.all(offsets - a_ub @ polished >= -1e-12 * diam)
            and polished[2] >= x[2] - 1e-9 * diam
        ):
            x = polished
    return float(x[2]), Point2(float(x[0] + origin[0]), float(x[1] + origin[1]))


def _inradius_union(
    cells: CellSet, tol: GeomTolerance, accuracy: float
) -> tuple[float, Point2]:
    """Наибольший вписанный круг объединения ячеек.

    Сетка кандидатов плюс центры Чебышёва ячеек, затем локальный поиск по
    16 направлениям с делением шага пополам до ``accuracy``.
    """
    segments = boundary_segments(cells, tol)
    box = cells.bbox
    diameter = math.hypot(box[2] - box[0], box[3] - box[1])
    step = diameter / 64.0

    xs = np.arange(box[0] + step / 2, box[2], step)
    ys = np.arange(box[1] + step / 2, box[3], step)
    grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    grid = grid[contains_any(cells, grid)]
    centers = np.array([inradius_convex(c)[1].to_tuple() for c in cells])
    candidates = np.concatenate([centers, grid]) if len(grid) else centers
    dist = distance_to_segments(candidates, segments)

    best_r, best_x = -1.0, candidates[0]
    for idx in np.argsort(-dist, kind="stable")[:8]:
        x = candidates[idx].copy()
        r = float(dist[idx])
        h = step
        while h > accuracy:
            trial = x + h * _SEARCH_DIRECTIONS
            inside = contains_any(cells, trial, tol.geom)
            if inside.any():
                d = distance_to_segments(trial[inside], segments)
                k = int(np.argmax(d))
                if d[k] > r:
                    x, r = trial[inside][k], float(d[k])
                    continue
            h /= 2.0
        if r > best_r:
            best_r, best_x = r, x
    return best_r, Point2.from_array(best_x)


def inradius_component(c: Component, tol: float | None = None) -> float:
    """Радиус наибольшего вписанного круга компоненты.

    Args:
        c (Component): Компонента.
        tol (float | None): Точность для невыпуклого случая.

    Returns
        float: Радиус.

    """
    if c.is_convex and c.outline is not None:
        return inradius_convex(c.outline)[0]
    geom_tol = _cells_tolerance(c.cells)
    return _inradius_union(c.cells, geom_tol, accuracy=tol or geom_tol.geom)[0]


# =========================
# Эрозия
# =========================


def erode(p: ConvexPoly, eps: float, tol: GeomTolerance | None = None) -> ConvexPoly | None:
    """Внутреннее параллельное тело ``{x ∈ p : dist(x, ∂p) ≥ eps}``.

    Returns
        ConvexPoly | None: ``None``, если ``eps`` не меньше радиуса вписанного круга.

    """
    if eps < 0:
        raise ValueError(f"eps должен быть ≥ 0: {eps}")
    if eps == 0:
        return p
    tol = tol or GeomTolerance.for_diameter(p.diameter)
    result: ConvexPoly | None = p
    normals, offsets = p.halfplanes
    for n, c in zip(normals, offsets, strict=True):
        result = clip_halfplane(result, n, c - eps, tol)
        if result is None:
            return None
    return result


def inner_tube_area(p: ConvexPoly, eps: float, tol: GeomTolerance | None = None) -> float:
    """Площадь ``{x ∈ p : dist(x, ∂p) < eps}``."""
    if eps <= 0:
        return 0.0
    core = erode(p, eps, tol)
    if core is None:
        return p.area
    return max(p.area - core.area, 0.0)
