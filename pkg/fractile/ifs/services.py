import cmath
import itertools
import math
from collections.abc import Iterator
from functools import reduce
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import ValidationError

from fractile.app_error.base_error import (
    BudgetExceededError,
    DegenerateHullError,
    GeometryUnsupportedError,
    InadmissibleParameterError,
    NotSelfSimilarError,
    ParseError,
)
from fractile.core.config import settings_fractile
from fractile.geom2d.domain import AffineMap2, CellSet, ConvexPoly, GeomTolerance, Point2
from fractile.geom2d.services import (
    apply_poly,
    compose,
    convex_hull,
    hausdorff,
    intersect,
    subtract_all,
)
from fractile.ifs.domain import HullEstimate, IfsSystem, OverlapPair, ValidationReport, Word
from fractile.ifs.schemas import SAffineMap, SSimilarityMap, SSystemConfig
from fractile.spectra.domain import ZetaModel

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"


# =========================
# Загрузка
# =========================


def _parse_config(config_text: str | bytes) -> SSystemConfig:
    try:
        return SSystemConfig.model_validate_json(config_text)
    except ValidationError as exc:
        first = exc.errors()[0] if exc.errors() else {}
        detail = f"{'.'.join(str(x) for x in first.get('loc', ()))}: {first.get('msg', exc)}"
        raise ParseError(detail, cause=exc) from exc


def _build_map(entry: SSimilarityMap | SAffineMap, index: int) -> AffineMap2:
    try:
        if isinstance(entry, SSimilarityMap):
            return AffineMap2.similarity(
                entry.ratio, entry.rotation_deg, entry.reflect, entry.translation
            )
        return AffineMap2.affine(entry.matrix, entry.translation)
    except ValueError as exc:
        raise ParseError(f"maps.{index}: {exc}", cause=exc) from exc


def load_system(config_text: str | bytes) -> IfsSystem:
    """Разбирает конфиг и строит проверенную систему.

    Args:
        config_text (str | bytes): JSON конфиг.

    Returns
        IfsSystem: Система.

    Raises
        ParseError: Конфиг не разбирается.
        GeometryUnsupportedError: Конфиг содержит только коэффициенты.
        TooFewMapsError: Меньше двух отображений.
        NotContractiveError: Отображение не сжимающее.
        InadmissibleParameterError: Параметр семейства Коха вне круга.

    """
    config = _parse_config(config_text)
    if config.geometry_unsupported:
        raise GeometryUnsupportedError(config.name)
    if config.family is not None:
        xi = complex(*config.family.xi)
        return koch_family(xi, name=config.name)

    maps = tuple(_build_map(entry, i) for i, entry in enumerate(config.maps or []))
    system = IfsSystem(name=config.name, maps=maps)
    logger.debug(
        "Загружена система {}: J={}, самоподобна={}",
        system.name,
        system.size,
        system.is_self_similar,
    )
    return system


def load_zeta_model(config_text: str | bytes) -> ZetaModel:
    """Модель ``ζ_s`` из конфига: подходит и конфиг только с коэффициентами.

    Raises
        NotSelfSimilarError: Система аффинная.

    """
    config = _parse_config(config_text)
    if config.ratios is not None:
        return ZetaModel(name=config.name, ratios=tuple(config.ratios))
    system = load_system(config_text)
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "дзета-функция")
    return ZetaModel(name=system.name, ratios=system.ratios)


def bundled_config_path(name: str) -> Path:
    """Путь к встроенному конфигу по имени (без расширения)."""
    return CONFIGS_DIR / f"{name}.json"


def bundled_names() -> list[str]:
    return sorted(p.stem for p in CONFIGS_DIR.glob("*.json"))


def load_bundled(name: str) -> IfsSystem:
    return load_system(bundled_config_path(name).read_bytes())


# =========================
# Семейство Коха
# =========================


def koch_family(xi: complex, name: str = "koch") -> IfsSystem:
    """Система ``φ_1(z) = ξ·z̄``, ``φ_2(z) = (1−ξ)(z̄ − 1) + 1``.

    Сопряжение записано как отражение относительно оси x, после которого
    идёт поворот на ``arg ξ`` (соответственно ``arg(1−ξ)``).

    Raises
        InadmissibleParameterError: ``|ξ|² + |1−ξ|² ≥ 1``.

    """
    xi = complex(xi)
    if abs(xi) ** 2 + abs(1 - xi) ** 2 >= 1.0:
        raise InadmissibleParameterError(xi)
    eta = 1 - xi
    phi1 = AffineMap2.similarity(abs(xi), math.degrees(cmath.phase(xi)), True, (0.0, 0.0))
    phi2 = AffineMap2.similarity(
        abs(eta), math.degrees(cmath.phase(eta)), True, (xi.real, xi.imag)
    )
    return IfsSystem(name=name, maps=(phi1, phi2))


def scaled_system(system: IfsSystem, t: float) -> IfsSystem:
    """Сопряжение каждого отображения растяжением ``x ↦ t·x``."""
    if not t > 0:
        raise ValueError(f"Масштаб должен быть > 0: {t}")
    maps = tuple(
        AffineMap2(f.linear, t * f.translation, f.kind, f.ratio) for f in system.maps
    )
    return IfsSystem(name=f"{system.name}*{t:g}", maps=maps)


# =========================
# Слова
# =========================


def fixed_point(f: AffineMap2) -> Point2:
    """Единственная неподвижная точка сжатия: ``(I − A)x = a``."""
    x = np.linalg.solve(np.eye(2) - f.linear, f.translation)
    return Point2.from_array(x)


def words(system: IfsSystem, k: int) -> Iterator[Word]:
    """Все ``J^k`` слов длины ``k`` в лексикографическом порядке."""
    if k < 0:
        raise ValueError(f"Длина слова должна быть ≥ 0: {k}")
    return itertools.product(range(1, system.size + 1), repeat=k)


def map_of_word(system: IfsSystem, word: Word) -> AffineMap2:
    """``φ_w = φ_{w_1}∘…∘φ_{w_k}``; пустое слово даёт тождество."""
    return reduce(
        compose, (system.maps[letter - 1] for letter in word), AffineMap2.identity()
    )


def check_budget(what: str, requested: int, limit: int | None = None) -> None:
    limit = settings_fractile.budget.budget if limit is None else limit
    if requested > limit:
        raise BudgetExceededError(what, requested, limit)


def sample_attractor(system: IfsSystem, depth: int) -> np.ndarray:
    """Точки ``φ_w(x*)`` для ``|w| = depth`` плюс неподвижные точки всех отображений.

    ``x*`` это неподвижная точка ``φ_1``. Порядок точек лексикографический
    по словам, неподвижные точки идут в конце.

    Returns
        np.ndarray: Массив ``(J^depth + J, 2)``.

    Raises
        BudgetExceededError: ``J^depth`` больше лимита.

    """
    if depth < 0:
        raise ValueError(f"Глубина должна быть ≥ 0: {depth}")
    check_budget("точки аттрактора", system.size**depth)
    fixed = np.array([fixed_point(f).to_tuple() for f in system.maps])
    pts = fixed[:1]
    for _ in range(depth):
        pts = np.concatenate([f(pts) for f in system.maps])
    return np.concatenate([pts, fixed])


# =========================
# Оболочка
# =========================


def _initial_hull(system: IfsSystem) -> tuple[ConvexPoly, int]:
    depth = 2
    while True:
        try:
            return convex_hull(sample_attractor(system, depth)), depth
        except DegenerateHullError:
            if system.size ** (depth + 1) > settings_fractile.budget.budget:
                raise
            depth += 1


def estimate_hull(
    system: IfsSystem,
    tau_rel: float | None = None,
    max_iterations: int | None = None,
) -> HullEstimate:
    """Оболочка аттрактора по выборкам растущей глубины.

    Оболочка выборки глубины ``m+1`` равна оболочке образов вершин
    оболочки глубины ``m`` и неподвижных точек, поэтому каждый шаг
    работает только с вершинами. Остановка, когда хаусдорфово расстояние
    между соседними оболочками не больше ``tau_rel·diam``.

    Returns
        HullEstimate: Оценка; при исчерпании лимита итераций помечена
        как нестабилизированная.

    """
    tau_rel = settings_fractile.tolerances.hull_rel if tau_rel is None else tau_rel
    max_iterations = max_iterations or settings_fractile.budget.max_hull_iterations
    fixed = np.array([fixed_point(f).to_tuple() for f in system.maps])

    hull, depth = _initial_hull(system)
    gap = math.inf
    tolerance = tau_rel * hull.diameter
    for _ in range(max_iterations):
        images = np.concatenate([f(hull.vertices) for f in system.maps] + [fixed])
        nxt = convex_hull(images)
        gap = hausdorff(hull, nxt)
        tolerance = tau_rel * nxt.diameter
        if gap <= tolerance:
            logger.debug(
                "Оболочка {} стабилизировалась: глубина {}, {} вершин, зазор {:.3e}",
                system.name,
                depth,
                len(hull),
                gap,
            )
            return HullEstimate(hull, depth, gap, tolerance)
        hull, depth = nxt, depth + 1

    logger.warning(
        "Оболочка {} не стабилизировалась за {} итераций: зазор {:.3e}",
        system.name,
        max_iterations,
        gap,
    )
    return HullEstimate(hull, depth, gap, tolerance)


# =========================
# Допустимость
# =========================


def hull_images(system: IfsSystem, hull: ConvexPoly) -> list[ConvexPoly]:
    return [apply_poly(f, hull) for f in system.maps]


def validate(system: IfsSystem, hull: ConvexPoly | None = None) -> ValidationReport:
    """Проверка условия tileset и нетривиальности.

    Args:
        system (IfsSystem): Система.
        hull (ConvexPoly | None): Оболочка; если не задана, оценивается.

    Returns
        ValidationReport: Отчёт.

    """
    if hull is None:
        hull = estimate_hull(system).hull
    tol = GeomTolerance.for_diameter(hull.diameter)
    images = hull_images(system, hull)

    pairs: list[OverlapPair] = []
    for (j, a), (l, b) in itertools.combinations(enumerate(images, start=1), 2):
        common = intersect(a, b, tol)
        area = common.area if common is not None else 0.0
        if area > tol.area:
            pairs.append(OverlapPair(j=j, l=l, overlap_area=area))

    residual = subtract_all(CellSet((hull,)), images, tol).area
    report = ValidationReport(
        contraction_ok=all(f.spectral_bound < 1 for f in system.maps),
        tileset_ok=not pairs,
        offending_pairs=tuple(pairs),
        nontrivial_ok=residual > tol.area,
        residual_area=residual,
        hull_area=hull.area,
        area_tolerance=tol.area,
    )
    if report.admissible:
        logger.info("Система {} допустима: остаток площади {:.6g}", system.name, residual)
    else:
        logger.warning(
            "Система {} недопустима: tileset_ok={}, nontrivial_ok={}",
            system.name,
            report.tileset_ok,
            report.nontrivial_ok,
        )
    return report
