import math

import numpy as np
import pytest

from fractile.app_error.base_error import DegenerateHullError
from fractile.geom2d.domain import AffineMap2, CellSet, ConvexPoly, Point2
from fractile.geom2d.enums import MapKind
from fractile.geom2d.services import (
    apply_poly,
    boundary_segments,
    clip_halfplane,
    components,
    compose,
    contains,
    contains_any,
    convex_hull,
    count_components,
    distance_to_segments,
    erode,
    hausdorff,
    inner_tube_area,
    inradius_component,
    inradius_convex,
    intersect,
    overlap_area,
    subtract,
    subtract_all,
)

pytestmark = pytest.mark.geom2d

SQRT3 = math.sqrt(3.0)


def square(x0: float = 0.0, y0: float = 0.0, side: float = 1.0) -> ConvexPoly:
    return ConvexPoly(
        np.array([[x0, y0], [x0 + side, y0], [x0 + side, y0 + side], [x0, y0 + side]])
    )


def unit_triangle() -> ConvexPoly:
    return ConvexPoly(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2]]))


# =========================
# Многоугольники и отображения
# =========================


def test_convex_poly_metrics():
    p = square(side=2.0)

    assert p.area == pytest.approx(4.0)
    assert p.perimeter == pytest.approx(8.0)
    assert p.diameter == pytest.approx(2.0 * math.sqrt(2.0))
    assert list(p.bbox) == [0.0, 0.0, 2.0, 2.0]


@pytest.mark.parametrize(
    "vertices",
    [
        [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],  # по часовой
        [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],  # коллинеарные
        [[0.0, 0.0], [1.0, 0.0]],
    ],
)
def test_convex_poly_rejects_bad_rings(vertices):
    with pytest.raises(ValueError):
        ConvexPoly(np.array(vertices))


def test_similarity_rotation_and_ratio():
    f = AffineMap2.similarity(0.5, rotation_deg=90.0, translation=(1.0, 0.0))

    assert f.is_similarity
    assert f.ratio == 0.5
    assert f(np.array([1.0, 0.0])) == pytest.approx([1.0, 0.5])
    assert f.apply_point(Point2(0.0, 0.0)) == Point2(1.0, 0.0)


def test_similarity_check_rejects_non_conformal_matrix():
    with pytest.raises(ValueError):
        AffineMap2(np.diag([0.5, 0.3]), np.zeros(2), MapKind.SIMILARITY, 0.5)


def test_compose_applies_inner_first():
    f = AffineMap2.similarity(0.5, translation=(1.0, 0.0))
    g = AffineMap2.similarity(0.25, rotation_deg=180.0, translation=(0.0, 2.0))
    pts = np.array([[0.3, -0.7], [2.0, 5.0]])

    fg = compose(f, g)

    assert fg.ratio == pytest.approx(0.125)
    assert fg.kind is MapKind.SIMILARITY
    assert fg(pts) == pytest.approx(f(g(pts)))


def test_compose_with_affine_is_affine():
    f = AffineMap2.affine([[0.5, 0.1], [0.0, 0.3]], (0.0, 0.0))

    assert compose(f, AffineMap2.identity()).kind is MapKind.GENERAL_AFFINE


def test_apply_poly_reflection_keeps_orientation():
    reflect = AffineMap2.similarity(0.5, reflect=True)

    image = apply_poly(reflect, unit_triangle())

    assert image.area == pytest.approx(unit_triangle().area / 4.0)


# =========================
# Оболочка и отсечение
# =========================


def test_convex_hull_drops_interior_and_edge_points():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.5, 0.0]], dtype=float)

    hull = convex_hull(pts)

    assert len(hull) == 4
    assert hull.area == pytest.approx(1.0)


def test_convex_hull_collinear_points():
    with pytest.raises(DegenerateHullError):
        convex_hull(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]))


def test_clip_halfplane_cases():
    p = square()

    half = clip_halfplane(p, (1.0, 0.0), 0.5)

    assert half is not None
    assert half.area == pytest.approx(0.5)
    assert clip_halfplane(p, (1.0, 0.0), 2.0) is p
    assert clip_halfplane(p, (1.0, 0.0), -1.0) is None


def test_intersect_overlapping_and_touching():
    common = intersect(square(), square(0.5, 0.5))

    assert common is not None
    assert common.area == pytest.approx(0.25)
    assert intersect(square(), square(1.0, 0.0)) is None


def test_subtract_corner_triangles_leaves_middle_triangle():
    t = unit_triangle()
    shifts = [(0.0, 0.0), (0.5, 0.0), (0.25, SQRT3 / 4)]
    corners = [apply_poly(AffineMap2.similarity(0.5, translation=a), t) for a in shifts]

    rest = subtract_all(CellSet((t,)), corners)
    parts = components(rest)

    assert rest.area == pytest.approx(SQRT3 / 16)
    assert len(parts) == 1
    assert parts[0].is_convex
    assert parts[0].inradius == pytest.approx(SQRT3 / 12)
    assert parts[0].perimeter == pytest.approx(1.5)


def test_subtract_hole_is_one_nonconvex_component():
    ring = subtract(CellSet((square(side=3.0),)), square(1.0, 1.0))

    parts = components(ring)

    assert ring.area == pytest.approx(8.0)
    assert len(parts) == 1
    assert not parts[0].is_convex
    assert parts[0].perimeter == pytest.approx(16.0)


def test_overlap_area_between_cell_sets():
    a = CellSet((square(), square(1.0, 0.0)))
    b = CellSet((square(0.5, 0.0, side=1.0),))

    assert overlap_area(a, b) == pytest.approx(1.0)
    assert overlap_area(a, CellSet()) == 0.0


# =========================
# Точки и расстояния
# =========================


def test_contains_and_contains_any():
    pts = np.array([[0.5, 0.5], [1.5, 0.5], [3.0, 3.0]])
    cells = CellSet((square(), square(1.0, 0.0)))

    assert list(contains(square(), pts)) == [True, False, False]
    assert list(contains_any(cells, pts)) == [True, True, False]


def test_distance_to_segments():
    segs = square().edges()

    d = distance_to_segments(np.array([[0.5, 0.5], [0.5, 0.1], [2.0, 0.5]]), segs)

    assert d == pytest.approx([0.5, 0.1, 1.0])


def test_hausdorff_nested_squares():
    assert hausdorff(square(), square(side=2.0)) == pytest.approx(math.sqrt(2.0))
    assert hausdorff(square(), square()) == pytest.approx(0.0, abs=1e-15)


def test_boundary_segments_excludes_shared_edge():
    cells = CellSet((square(), square(1.0, 0.0)))

    segs = boundary_segments(cells)
    total = sum(math.hypot(*(s[1] - s[0])) for s in segs)

    assert total == pytest.approx(6.0)


# =========================
# Компоненты
# =========================


def test_count_components_edge_adjacency():
    touching = CellSet((square(), square(1.0, 0.0)))
    corner_only = CellSet((square(), square(1.0, 1.0)))

    assert count_components(touching) == 1
    assert count_components(corner_only) == 2
    assert count_components(CellSet()) == 0


def test_components_sorted_by_area():
    cells = CellSet((square(side=0.5), square(3.0, 0.0, side=1.0)))

    parts = components(cells)

    assert [p.area for p in parts] == pytest.approx([1.0, 0.25])


def test_merged_squares_are_convex_rectangle():
    parts = components(CellSet((square(), square(1.0, 0.0))))

    assert len(parts) == 1
    assert parts[0].is_convex
    assert parts[0].inradius == pytest.approx(0.5)


# =========================
# Вписанный круг и эрозия
# =========================


def test_inradius_convex_square():
    radius, center = inradius_convex(square(side=2.0))

    assert radius == pytest.approx(1.0)
    assert center.to_tuple() == pytest.approx((1.0, 1.0))


def test_inradius_equilateral_triangle():
    radius, _ = inradius_convex(unit_triangle())

    assert radius == pytest.approx(SQRT3 / 6, rel=1e-12)


def test_inradius_l_shape():
    l_shape = CellSet((square(), square(1.0, 0.0), square(0.0, 1.0)))
    (part,) = components(l_shape)

    assert not part.is_convex
    # Круг касается сторон x=0, y=0 и входящего угла (1, 1).
    assert inradius_component(part) == pytest.approx(2.0 - math.sqrt(2.0), rel=1e-5)


def test_erode_square():
    core = erode(square(), 0.25)

    assert core is not None
    assert core.area == pytest.approx(0.25)
    assert erode(square(), 0.5) is None
    assert erode(square(), 0.0) is not None


def test_erosion_semigroup():
    t = unit_triangle()
    a, b = 0.05, 0.08

    twice = erode(erode(t, a), b)
    once = erode(t, a + b)

    assert twice is not None and once is not None
    assert hausdorff(twice, once) == pytest.approx(0.0, abs=1e-12)


def test_inner_tube_area_triangle():
    t = unit_triangle()
    g = SQRT3 / 6

    # Эрозия на половину радиуса даёт подобный треугольник с площадью в 4 раза меньше.
    assert inner_tube_area(t, g / 2) == pytest.approx(0.75 * t.area, rel=1e-12)
    assert inner_tube_area(t, g) == pytest.approx(t.area)
    assert inner_tube_area(t, 0.0) == 0.0


# =========================
# Случайные многоугольники
# =========================


def random_poly(rng: np.random.Generator) -> ConvexPoly:
    """Вершины на окружности; соседние углы отличаются на (0.6, 1.4)·2π/n."""
    n = int(rng.integers(3, 9))
    angles = 2.0 * math.pi * (np.arange(n) + 0.4 * rng.random(n)) / n
    center = rng.uniform(-1.0, 1.0, size=2)
    radius = rng.uniform(0.5, 2.0)
    return ConvexPoly(center + radius * np.column_stack([np.cos(angles), np.sin(angles)]))


def random_map(rng: np.random.Generator) -> AffineMap2:
    while True:
        f = AffineMap2.affine(rng.uniform(-0.6, 0.6, size=(2, 2)), rng.uniform(-1.0, 1.0, size=2))
        if abs(f.det) >= 0.02 and f.spectral_bound < 1.0:
            return f


def test_affine_image_scales_area_by_det():
    rng = np.random.Generator(np.random.Philox(key=11))

    for _ in range(1000):
        p, f = random_poly(rng), random_map(rng)

        image = apply_poly(f, p)

        assert image.area > 0
        assert image.area == pytest.approx(abs(f.det) * p.area, rel=1e-11)


def test_intersection_and_difference_partition_area():
    rng = np.random.Generator(np.random.Philox(key=12))

    for _ in range(300):
        p, q = random_poly(rng), random_poly(rng)

        common = intersect(p, q)
        rest = subtract(CellSet((p,)), q)

        inside = common.area if common is not None else 0.0
        assert inside + rest.area == pytest.approx(p.area, abs=1e-8)


def test_halfplane_and_complement_partition_area():
    rng = np.random.Generator(np.random.Philox(key=13))

    for _ in range(300):
        p = random_poly(rng)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        normal = np.array([math.cos(phi), math.sin(phi)])
        offset = float(normal @ p.vertices.mean(axis=0)) + rng.uniform(-1.0, 1.0)

        halves = [clip_halfplane(p, normal, offset), clip_halfplane(p, -normal, -offset)]

        total = sum(h.area for h in halves if h is not None)
        assert total == pytest.approx(p.area, abs=1e-8)


def test_chebyshev_center_is_feasible_and_optimal():
    rng = np.random.Generator(np.random.Philox(key=14))

    for _ in range(100):
        p = random_poly(rng)
        normals, offsets = p.halfplanes
        slack_tol = 1e-9 * p.diameter

        radius, center = inradius_convex(p)

        slack = offsets - normals @ center.to_array()
        assert radius > 0
        assert np.all(slack >= radius - slack_tol)
        assert float(slack.min()) == pytest.approx(radius, abs=slack_tol)

        lo, hi = p.bbox[:2], p.bbox[2:]
        samples = rng.uniform(lo, hi, size=(5000, 2))
        samples = samples[contains(p, samples)]
        depth = np.min(offsets[None, :] - samples @ normals.T, axis=1)
        assert float(depth.max()) <= radius + slack_tol
