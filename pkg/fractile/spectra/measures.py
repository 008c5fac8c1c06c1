"""Атомарные меры масштабов и их преобразование Меллина."""

import math
from collections.abc import Iterator

import numpy as np
from loguru import logger

from fractile.app_error.base_error import BudgetExceededError, NotSelfSimilarError
from fractile.core.config import settings_fractile
from fractile.ifs.domain import IfsSystem
from fractile.spectra.domain import Atom, AtomicMeasure, MeasureKind, ZetaModel
from fractile.tiling.domain import TilingSpec

# Запас на округление при сравнении r_w с порогом.
_THRESHOLD_SLACK = 1.0 - 1e-12


# =========================
# Модели
# =========================


def scaling_model(system: IfsSystem) -> ZetaModel:
    """Модель ``ζ_s`` самоподобной системы.

    Raises
        NotSelfSimilarError: Система аффинная.

    """
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "дзета-функция")
    return ZetaModel(name=system.name, ratios=system.ratios)


def geometric_model(spec: TilingSpec) -> ZetaModel:
    """Модель ``ζ_g``: коэффициенты системы и радиусы генераторов."""
    system = spec.system
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "геометрическая дзета-функция")
    return ZetaModel(
        name=system.name, ratios=system.ratios, generator_inradii=spec.generator_inradii
    )


# =========================
# Меры
# =========================


def _ratio_groups(ratios: tuple[float, ...]) -> list[tuple[float, int]]:
    """Различные коэффициенты (с точностью ``merge_rel``) и их кратности."""
    merge_rel = settings_fractile.tolerances.merge_rel
    groups: list[tuple[float, int]] = []
    for r in sorted(ratios, reverse=True):
        if groups and abs(groups[-1][0] - r) <= merge_rel * groups[-1][0]:
            groups[-1] = (groups[-1][0], groups[-1][1] + 1)
        else:
            groups.append((r, 1))
    return groups


def _count_vectors(
    groups: list[tuple[float, int]], threshold: float
) -> Iterator[tuple[float, int]]:
    """Произведения ``r_w ≥ threshold`` и число слов с таким набором букв.

    Слова с одинаковым числом вхождений каждого коэффициента дают одно
    произведение; их число это мультиномиальный коэффициент, умноженный
    на кратности.
    """
    m = len(groups)

    def walk(i: int, product: float, length: int, weight: int) -> Iterator[tuple[float, int]]:
        if i == m:
            yield product, weight
            return
        r, mult = groups[i]
        n, p = 0, product
        while p >= threshold:
            yield from walk(i + 1, p, length + n, weight * math.comb(length + n, n) * mult**n)
            n += 1
            p *= r

    yield from walk(0, 1.0, 0, 1)


def _shortest_excluded(ratios: tuple[float, ...], r_min: float) -> int:
    """Длина самого короткого слова с ``r_w < r_min``."""
    smallest = min(ratios)
    threshold = r_min * _THRESHOLD_SLACK
    m, p = 0, 1.0
    while p >= threshold:
        m += 1
        p *= smallest
    return m


def _merge_atoms(raw: list[tuple[float, int]]) -> tuple[Atom, ...]:
    merge_rel = settings_fractile.tolerances.merge_rel
    atoms: list[Atom] = []
    for x, w in sorted(raw):
        if atoms and x - atoms[-1].location <= merge_rel * atoms[-1].location:
            atoms[-1] = Atom(atoms[-1].location, atoms[-1].weight + w)
        else:
            atoms.append(Atom(x, w))
    return tuple(atoms)


def _scaling_atoms(model: ZetaModel, r_min: float) -> list[tuple[float, int]]:
    limit = settings_fractile.budget.max_atoms
    raw: list[tuple[float, int]] = []
    for product, weight in _count_vectors(_ratio_groups(model.ratios), r_min * _THRESHOLD_SLACK):
        raw.append((1.0 / product, weight))
        if len(raw) > limit:
            raise BudgetExceededError("атомы меры", len(raw), limit)
    return raw


def scaling_measure(model: ZetaModel, r_min: float) -> AtomicMeasure:
    """Мера ``η_s``: атом ``1/r_w`` для каждого слова с ``r_w ≥ r_min``.

    Совпадающие положения сливаются с точностью ``merge_rel``, веса
    остаются целыми.

    Raises
        BudgetExceededError: Атомов больше лимита.

    """
    if not 0 < r_min < 1:
        raise ValueError(f"r_min должен лежать в (0, 1): {r_min}")
    atoms = _merge_atoms(_scaling_atoms(model, r_min))
    measure = AtomicMeasure(
        atoms=atoms,
        truncation=r_min,
        kind=MeasureKind.SCALING,
        min_excluded_length=_shortest_excluded(model.ratios, r_min),
    )
    logger.debug(
        "η_s {}: {} атомов, суммарный вес {}", model.name, len(measure), measure.total_weight
    )
    return measure


def geometric_measure(
    model: ZetaModel, rho_min: float, generator: int | None = None
) -> AtomicMeasure:
    """Мера ``η_g``: атомы ``1/(g_q·r_w)`` для ``g_q·r_w ≥ rho_min``.

    Атомы разных генераторов не сливаются.

    Args:
        model (ZetaModel): Геометрическая модель.
        rho_min (float): Порог радиуса плитки, ``> 0``.
        generator (int | None): Только генератор ``q`` (с 1); иначе все.

    Raises
        BudgetExceededError: Атомов больше лимита.

    """
    if not rho_min > 0:
        raise ValueError(f"rho_min должен быть > 0: {rho_min}")
    if not model.generator_inradii:
        raise ValueError("Модель не содержит радиусов генераторов")
    inradii = model.generator_inradii
    indices = range(1, len(inradii) + 1) if generator is None else (generator,)

    atoms: list[Atom] = []
    excluded: list[int] = []
    for q in indices:
        g = inradii[q - 1]
        r_min = rho_min / g
        excluded.append(_shortest_excluded(model.ratios, r_min))
        if r_min * _THRESHOLD_SLACK > 1.0:
            continue
        atoms.extend(
            Atom(a.location / g, a.weight) for a in _merge_atoms(_scaling_atoms(model, r_min))
        )
    atoms.sort(key=lambda a: a.location)
    limit = settings_fractile.budget.max_atoms
    if len(atoms) > limit:
        raise BudgetExceededError("атомы меры", len(atoms), limit)

    return AtomicMeasure(
        atoms=tuple(atoms),
        truncation=rho_min,
        kind=MeasureKind.GEOMETRIC if generator is not None else MeasureKind.GEOMETRIC_TOTAL,
        generator=generator,
        min_excluded_length=min(excluded),
    )


# =========================
# Преобразование Меллина
# =========================


def mellin(measure: AtomicMeasure, s: complex) -> complex:
    """``Σ weight·x^{−s}`` с компенсированным суммированием по убыванию веса."""
    if measure.is_empty:
        return 0j
    ordered = sorted(measure.atoms, key=lambda a: (-a.weight, a.location))
    locations = np.array([a.location for a in ordered])
    weights = np.array([float(a.weight) for a in ordered])
    terms = weights * np.exp(-complex(s) * np.log(locations))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def mellin_tail_bound(model: ZetaModel, measure: AtomicMeasure, sigma: float) -> float:
    """Оценка отброшенной части ``ζ`` при ``Re s = sigma``.

    Для ``η_s``: ``S^m/(1−S)``, где ``S = Σ r_j^σ`` и ``m`` длина самого
    короткого отброшенного слова. Для ``η_g`` то же для каждого генератора
    с множителем ``g_q^σ``. Если ``S ≥ 1``, оценки нет (``inf``).
    """
    total = math.fsum(r**sigma for r in model.ratios)
    if total >= 1.0:
        return math.inf
    if measure.kind is MeasureKind.SCALING:
        return total ** measure.min_excluded_length / (1.0 - total)

    inradii = model.generator_inradii
    indices = range(1, len(inradii) + 1) if measure.generator is None else (measure.generator,)
    parts = []
    for q in indices:
        g = inradii[q - 1]
        m = _shortest_excluded(model.ratios, measure.truncation / g)
        parts.append(g**sigma * total**m / (1.0 - total))
    return math.fsum(parts)
