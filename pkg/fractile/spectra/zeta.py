"""Дзета-функции масштабов и геометрическая, размерность и решётчатость."""

import math
from fractions import Fraction
from functools import reduce

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from fractile.app_error.base_error import NearPoleError
from fractile.spectra.domain import LatticeStructure, ZetaModel

_POLE_GUARD = 1e-14
_LATTICE_MAX_EXPONENT = 64
_LATTICE_RESIDUAL = 1e-10


def zeta_s(model: ZetaModel, s: complex) -> complex:
    """``ζ_s(s) = 1 / (1 − Σ_j r_j^s)``.

    Raises
        NearPoleError: ``|1 − Σ r_j^s| ≤ 1e−14``.

    """
    s = complex(s)
    denominator = 1.0 - model.scaling_sum(s)
    if abs(denominator) <= _POLE_GUARD:
        raise NearPoleError(s, abs(denominator))
    return 1.0 / denominator


def zeta_g(model: ZetaModel, s: complex) -> complex:
    """``ζ_g(s) = h(s)·ζ_s(s)``, ``h(s) = Σ_q g_q^s``."""
    return model.numerator(s) * zeta_s(model, s)


def zeta_g_terms(model: ZetaModel, s: complex) -> tuple[complex, ...]:
    """Слагаемые ``ζ_{g,q}(s) = g_q^s·ζ_s(s)``."""
    base = zeta_s(model, s)
    return tuple(complex(np.exp(complex(s) * math.log(g))) * base for g in model.generator_inradii)


def real_dimension(model: ZetaModel) -> float:
    """Единственный корень ``D > 0`` уравнения ``Σ_j r_j^D = 1``.

    ``f(s) = Σ r_j^s`` строго убывает и ``f(0) = J``. Если ``J = 1``,
    корень ``D = 0``; иначе правая граница удваивается до ``f < 1``,
    затем Брент и одна поправка Ньютона, если она уменьшает невязку.
    """

    def excess(s: float) -> float:
        return math.fsum(r**s for r in model.ratios) - 1.0

    if excess(0.0) <= 0.0:
        return 0.0
    hi = 1.0
    while excess(hi) >= 0.0:
        hi *= 2.0
    root = float(brentq(excess, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))

    slope = model.scaling_sum_derivative(root).real
    if slope != 0.0:
        polished = root - excess(root) / slope
        if abs(excess(polished)) < abs(excess(root)):
            root = polished
    logger.debug("D({}) = {:.15g}", model.name, root)
    return root


def detect_lattice(model: ZetaModel) -> LatticeStructure:
    """Поиск базы ``r`` с ``r_j = r^{k_j}``, ``k_j ≤ 64``.

    Отношения ``ln r_j / ln r_1`` приближаются дробями со знаменателем не
    больше 64; общая база получается через НОК знаменателей и НОД
    числителей.
    """
    logs = [math.log(1.0 / r) for r in model.ratios]
    anchor = logs[0]
    fractions: list[Fraction] = []
    for value in logs:
        ratio = value / anchor
        frac = Fraction(ratio).limit_denominator(_LATTICE_MAX_EXPONENT)
        if frac <= 0 or abs(ratio - float(frac)) > _LATTICE_RESIDUAL * max(1.0, ratio):
            return LatticeStructure(is_lattice=False)
        fractions.append(frac)

    common = reduce(math.lcm, (f.denominator for f in fractions), 1)
    numerators = [f.numerator * (common // f.denominator) for f in fractions]
    divisor = reduce(math.gcd, numerators)
    exponents = tuple(n // divisor for n in numerators)
    if max(exponents) > _LATTICE_MAX_EXPONENT:
        return LatticeStructure(is_lattice=False)

    base_log = anchor * divisor / common
    base = math.exp(-base_log)
    if any(abs(r - base**k) > _LATTICE_RESIDUAL for r, k in zip(model.ratios, exponents, strict=True)):
        return LatticeStructure(is_lattice=False)
    return LatticeStructure(
        is_lattice=True,
        base=base,
        exponents=exponents,
        period=2.0 * math.pi / base_log,
    )
