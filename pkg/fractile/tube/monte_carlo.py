"""Независимая оценка ``V(ε)`` выборкой точек в оболочке.

Точка спускается по дереву слов: на узле ``w`` она переводится в
координаты ``C`` отображением ``φ_w^{-1}``; если она попала в генератор,
расстояние до границы плитки равно ``ρ_w·dist(y, ∂G_q)``, иначе
выбирается ``j`` с ``y ∈ φ_j(C)`` и спуск продолжается.
"""

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from fractile.app_error.base_error import DepthCapError, NotSelfSimilarError
from fractile.core.config import settings_fractile
from fractile.geom2d.domain import CellSet, ConvexPoly
from fractile.geom2d.services import (
    apply_poly,
    boundary_segments,
    contains,
    contains_any,
    distance_to_segments,
)
from fractile.tiling.domain import TilingSpec
from fractile.tube.domain import MonteCarloEstimate

MIN_SAMPLES = 10_000
# Доля точек, упёршихся в предельную глубину, после которой оценка не выдаётся.
_MAX_CAPPED_FRACTION = 1e-3


@dataclass(frozen=True, eq=False)
class _Descent:
    images: tuple[ConvexPoly, ...]
    inverse_linear: np.ndarray
    translations: np.ndarray
    ratios: np.ndarray
    generators: tuple[tuple[CellSet, np.ndarray], ...]
    max_inradius: float
    tol: float

    @classmethod
    def build(cls, spec: TilingSpec) -> "_Descent":
        maps = spec.system.maps
        return cls(
            images=tuple(apply_poly(f, spec.hull) for f in maps),
            inverse_linear=np.stack([np.linalg.inv(f.linear) for f in maps]),
            translations=np.stack([f.translation for f in maps]),
            ratios=np.array(spec.system.ratios),
            generators=tuple((g.cells, boundary_segments(g)) for g in spec.generators),
            max_inradius=max(spec.generator_inradii),
            tol=spec.tolerance.geom,
        )

    def classify(
        self, points: np.ndarray, eps: float, max_depth: int
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Попадания в трубку, точки на границах и точки на предельной глубине."""
        n = len(points)
        y = points.copy()
        rho = np.ones(n)
        hits = np.zeros(n, dtype=bool)
        lost = np.zeros(n, dtype=bool)
        active = np.arange(n)

        for _ in range(max_depth + 1):
            if active.size == 0:
                break
            # В φ_w(C) с ρ_w·max g_q < ε каждая плитка уже целиком в своей трубке.
            small = rho[active] * self.max_inradius < eps
            hits[active[small]] = True
            active = active[~small]

            ya = y[active]
            ra = rho[active]
            placed = np.zeros(len(active), dtype=bool)
            for cells, segments in self.generators:
                inside = ~placed & contains_any(cells, ya, self.tol)
                if inside.any():
                    dist = distance_to_segments(ya[inside], segments) * ra[inside]
                    hits[active[inside]] = dist < eps
                    placed |= inside

            moved = np.zeros(len(active), dtype=bool)
            for j, image in enumerate(self.images):
                cand = ~placed & ~moved & contains(image, ya, self.tol)
                if cand.any():
                    ya[cand] = (ya[cand] - self.translations[j]) @ self.inverse_linear[j].T
                    ra[cand] *= self.ratios[j]
                    moved |= cand

            lost[active[~placed & ~moved]] = True
            y[active] = ya
            rho[active] = ra
            active = active[moved]

        capped = np.zeros(n, dtype=bool)
        capped[active] = True
        return hits, lost, capped


def _sample_hull(spec: TilingSpec, n_samples: int, seed: int, batch: int) -> np.ndarray:
    """Равномерные точки в оболочке отбором из охватывающего прямоугольника.

    Пачка ``i`` берётся из потока ``Philox(seed).jumped(i)``.
    """
    hull = spec.hull
    box = hull.bbox
    kept: list[np.ndarray] = []
    total = 0
    index = 0
    while total < n_samples:
        rng = np.random.Generator(np.random.Philox(key=seed).jumped(index))
        pts = rng.uniform(box[:2], box[2:], size=(batch, 2))
        pts = pts[contains(hull, pts)]
        kept.append(pts)
        total += len(pts)
        index += 1
    return np.concatenate(kept)[:n_samples]


def monte_carlo_tube(
    spec: TilingSpec,
    eps: float,
    n_samples: int,
    seed: int | None = None,
) -> MonteCarloEstimate:
    """Оценка ``V(ε) = area(C)·P(точка в трубке своей плитки)``.

    Args:
        spec (TilingSpec): Замощение самоподобной системы.
        eps (float): ``ε > 0``.
        n_samples (int): Объём выборки, не меньше 10^4.
        seed (int | None): Зерно; по умолчанию из настроек.

    Returns
        MonteCarloEstimate: Оценка и биномиальная ошибка.

    Raises
        NotSelfSimilarError: Система аффинная.
        DepthCapError: Слишком много точек не классифицировано до предельной глубины.

    """
    if not eps > 0:
        raise ValueError(f"eps должен быть > 0: {eps}")
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"Нужно не меньше {MIN_SAMPLES} точек: {n_samples}")
    if not spec.system.is_self_similar:
        raise NotSelfSimilarError(spec.system.name, "оценка трубки выборкой")
    settings = settings_fractile.tube
    seed = settings.seed if seed is None else seed

    descent = _Descent.build(spec)
    points = _sample_hull(spec, n_samples, seed, settings.mc_batch)
    hit_count = lost_count = capped_count = 0
    for start in range(0, n_samples, settings.mc_batch):
        hits, lost, capped = descent.classify(
            points[start : start + settings.mc_batch], eps, settings.max_depth
        )
        hit_count += int(hits.sum())
        lost_count += int(lost.sum())
        capped_count += int(capped.sum())

    if capped_count > _MAX_CAPPED_FRACTION * n_samples:
        raise DepthCapError(settings.max_depth)
    area = spec.hull.area
    p = hit_count / n_samples
    estimate = MonteCarloEstimate(
        eps=eps,
        estimate=area * p,
        std_error=area * math.sqrt(p * (1.0 - p) / n_samples),
        n_samples=n_samples,
        seed=seed,
        unresolved_fraction=(lost_count + capped_count) / n_samples,
    )
    logger.debug(
        "MC {} ε={:.3g}: {:.6g} ± {:.2g}, не классифицировано {:.2e}",
        spec.system.name,
        eps,
        estimate.estimate,
        estimate.std_error,
        estimate.unresolved_fraction,
    )
    return estimate
