"""Поиск комплексных размерностей и проверка вычетов.

Полюса ``ζ_s`` это нули ``F(s) = Σ_j r_j^s − 1``. В решётчатом случае
``z = r^s`` сводит задачу к корням многочлена; в общем случае нули
ищутся принципом аргумента на прямоугольниках с подразбиением.
"""

import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from loguru import logger

from fractile.app_error.base_error import (
    NotLatticeError,
    NotSimpleError,
    UnresolvedClusterError,
    WindowTooLargeError,
)
from fractile.core.config import settings_fractile
from fractile.spectra.domain import (
    ComplexDim,
    LatticeStructure,
    ResidueCheck,
    SearchWindow,
    SpectrumReport,
    UnresolvedCell,
    ZetaKind,
    ZetaModel,
)
from fractile.spectra.zeta import detect_lattice, real_dimension

# Доли, в которых режется прямоугольник; несимметричны, чтобы линия
# разреза не попадала на вещественную ось и на решётчатые прямые.
_SPLIT_FRACTIONS = (0.5137, 0.4789, 0.5521, 0.4417)
_MAX_PHASE_STEP = math.pi / 4
_MAX_BOUNDARY_SAMPLES = 1 << 16
_DEDUP_REL = 1e-9


class SearchMethod(StrEnum):
    AUTO = "auto"
    LATTICE = "lattice"
    ARGUMENT = "argument"


@dataclass(frozen=True, eq=False)
class _ExpSum:
    """``F(s) = c + Σ_k a_k·exp(λ_k·s)`` с вещественными ``a_k``, ``λ_k``."""

    constant: float
    coefficients: np.ndarray
    exponents: np.ndarray

    def __call__(self, s: np.ndarray | complex) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        return self.constant + np.exp(np.multiply.outer(s, self.exponents)) @ self.coefficients

    def derivative(self, s: np.ndarray | complex) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        return np.exp(np.multiply.outer(s, self.exponents)) @ (self.coefficients * self.exponents)

    def scale(self, sigma: float) -> float:
        """Масштаб слагаемых при ``Re s = sigma`` для относительных допусков."""
        return abs(self.constant) + float(np.sum(np.abs(self.coefficients) * np.exp(self.exponents * sigma)))

    @property
    def frequency(self) -> float:
        return float(np.max(np.abs(self.exponents)))


def _pole_equation(model: ZetaModel) -> _ExpSum:
    return _ExpSum(-1.0, np.ones(len(model.ratios)), model.log_ratios)


def _numerator_equation(model: ZetaModel) -> _ExpSum:
    return _ExpSum(
        0.0, np.ones(len(model.generator_inradii)), np.log(np.asarray(model.generator_inradii))
    )


# =========================
# Принцип аргумента
# =========================


@dataclass(frozen=True)
class _Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def center(self) -> complex:
        return complex((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    @property
    def longest_side(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, s: complex, slack: float) -> bool:
        return (
            self.x0 - slack <= s.real <= self.x1 + slack
            and self.y0 - slack <= s.imag <= self.y1 + slack
        )

    def split(self, fraction: float) -> tuple["_Rect", "_Rect"]:
        if self.x1 - self.x0 >= self.y1 - self.y0:
            x = self.x0 + fraction * (self.x1 - self.x0)
            return _Rect(self.x0, x, self.y0, self.y1), _Rect(x, self.x1, self.y0, self.y1)
        y = self.y0 + fraction * (self.y1 - self.y0)
        return _Rect(self.x0, self.x1, self.y0, y), _Rect(self.x0, self.x1, y, self.y1)

    def boundary(self, step: float) -> np.ndarray:
        """Замкнутый обход против часовой стрелки с шагом не больше ``step``."""
        corners = [
            complex(self.x0, self.y0),
            complex(self.x1, self.y0),
            complex(self.x1, self.y1),
            complex(self.x0, self.y1),
        ]
        parts = []
        for a, b in zip(corners, corners[1:] + corners[:1], strict=True):
            n = max(4, math.ceil(abs(b - a) / step))
            parts.append(a + (b - a) * np.arange(n) / n)
        path = np.concatenate(parts)
        return np.append(path, path[0])


def _winding(func: _ExpSum, rect: _Rect) -> int | None:
    """Число нулей внутри ``rect``; ``None``, если ноль лежит на границе."""
    step = min(rect.longest_side / 16, 0.25 / max(func.frequency, 1e-12))
    while True:
        path = rect.boundary(step)
        values = func(path)
        magnitude = np.abs(values)
        floor = 1e-10 * max(func.scale(rect.x0), func.scale(rect.x1))
        if np.min(magnitude) <= floor:
            return None
        phase = np.angle(values[1:] / values[:-1])
        if np.max(np.abs(phase)) <= _MAX_PHASE_STEP or len(path) > _MAX_BOUNDARY_SAMPLES:
            return int(round(float(np.sum(phase)) / (2 * math.pi)))
        step /= 2


def _newton(func: _ExpSum, start: complex, tol: float, max_iter: int = 60) -> complex | None:
    s = complex(start)
    for _ in range(max_iter):
        slope = complex(func.derivative(s))
        if slope == 0:
            return None
        step = complex(func(s)) / slope
        s -= step
        if not (math.isfinite(s.real) and math.isfinite(s.imag)):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(s)):
            break
    if abs(complex(func(s))) <= tol * func.scale(s.real):
        return s
    return None


def _split_cell(func: _ExpSum, rect: _Rect, count: int) -> list[tuple[_Rect, int]] | None:
    for fraction in _SPLIT_FRACTIONS:
        left, right = rect.split(fraction)
        a, b = _winding(func, left), _winding(func, right)
        if a is not None and b is not None and a + b == count:
            return [(left, a), (right, b)]
    return None


def _argument_zeros(
    func: _ExpSum, window: SearchWindow
) -> tuple[list[complex], list[UnresolvedCell]]:
    """Нули ``func`` в окне подразбиением до ``min_cell_side``."""
    spectra = settings_fractile.spectra
    root_rect = _Rect(window.re_min, window.re_max, -window.im_max, window.im_max)
    count = None
    for grow in (0.0, 1e-7, 3e-7, 1e-6):
        pad = grow * max(1.0, root_rect.longest_side)
        rect = _Rect(root_rect.x0 - pad, root_rect.x1 + pad, root_rect.y0 - pad, root_rect.y1 + pad)
        count = _winding(func, rect)
        if count is not None:
            break
    if count is None:
        return [], [UnresolvedCell(root_rect.center, -1)]

    zeros: list[complex] = []
    unresolved: list[UnresolvedCell] = []
    stack = [(rect, count)]
    while stack:
        cell, n = stack.pop()
        if n <= 0:
            continue
        if n == 1:
            z = _newton(func, cell.center, spectra.newton_tol)
            if z is not None and cell.contains(z, 1e-9 * max(1.0, abs(z))):
                zeros.append(z)
                continue
        if cell.longest_side <= spectra.min_cell_side:
            unresolved.append(UnresolvedCell(cell.center, n))
            continue
        children = _split_cell(func, cell, n)
        if children is None:
            unresolved.append(UnresolvedCell(cell.center, n))
            continue
        stack.extend(children)
    return zeros, unresolved


# =========================
# Решётчатый случай
# =========================


def _lattice_zeros(
    model: ZetaModel, lattice: LatticeStructure, window: SearchWindow
) -> list[tuple[complex, int, int]]:
    """Полюса ``(ω, номер корня, n)`` из корней ``Σ_j z^{k_j} − 1``."""
    exponents = lattice.exponents or ()
    degree = max(exponents)
    coefficients = np.zeros(degree + 1)
    for k in exponents:
        coefficients[degree - k] += 1.0
    coefficients[degree] -= 1.0
    roots = sorted(np.roots(coefficients), key=lambda z: (abs(z), np.angle(z)))

    func = _pole_equation(model)
    tol = settings_fractile.spectra.newton_tol
    log_base = math.log(lattice.base)
    period = lattice.period
    found = []
    for line, z in enumerate(roots):
        s0 = complex(math.log(abs(z)), float(np.angle(z))) / log_base
        if not window.re_min - 1e-9 <= s0.real <= window.re_max + 1e-9:
            continue
        n_lo = math.ceil((-window.im_max - s0.imag) / period - 1e-12)
        n_hi = math.floor((window.im_max - s0.imag) / period + 1e-12)
        for n in range(n_lo, n_hi + 1):
            start = complex(s0.real, s0.imag + n * period)
            polished = _newton(func, start, tol)
            omega = polished if polished is not None else start
            found.append((omega, line, n))
    return found


# =========================
# Вычеты
# =========================


def _contour_moments(model: ZetaModel, omega: complex) -> tuple[np.ndarray, float]:
    """Моменты ``c_k = (1/2πi)∮ ζ_s(s)(s−ω)^k ds`` для ``k = 0..3``.

    ``c_k`` равен коэффициенту Лорана ``a_{−k−1}``. Возвращает моменты и
    максимум ``|ζ_s|`` на контуре.
    """
    spectra = settings_fractile.spectra
    radius = spectra.contour_radius
    theta = 2 * math.pi * np.arange(spectra.contour_nodes) / spectra.contour_nodes
    ds = radius * np.exp(1j * theta)
    # ζ_s = 1/(1 − f) = −1/F
    values = -1.0 / _pole_equation(model)(omega + ds)
    moments = np.array([np.mean(values * ds ** (k + 1)) for k in range(4)])
    return moments, float(np.max(np.abs(values)))


def _residue_report(model: ZetaModel, omega: complex) -> ResidueCheck:
    spectra = settings_fractile.spectra
    radius = spectra.contour_radius
    moments, peak = _contour_moments(model, omega)
    order = 0
    for k, c in enumerate(moments):
        if abs(c) > 1e-6 * peak * radius ** (k + 1):
            order = k + 1

    closed_form = -1.0 / model.scaling_sum_derivative(omega)
    contour = complex(moments[0])
    gap = abs(contour - closed_form) / abs(closed_form)
    return ResidueCheck(
        omega=omega,
        closed_form=closed_form,
        contour=contour,
        relative_gap=gap,
        order=order,
        agrees=order == 1 and gap <= spectra.residue_rel,
    )


def residue_check(model: ZetaModel, omega: complex) -> ResidueCheck:
    """Сравнение ``1/Σ r_j^ω ln(1/r_j)`` с контурным интегралом ``ζ_s``.

    Raises
        NotSimpleError: ``ω`` не простой полюс (порядок 0 или больше 1).

    """
    report = _residue_report(model, complex(omega))
    if report.order != 1:
        raise NotSimpleError(complex(omega), report.order)
    if not report.agrees:
        logger.warning(
            "Вычет в ω={} расходится с контурным: {:.3e}", omega, report.relative_gap
        )
    return report


# =========================
# Комплексные размерности
# =========================


def default_window(model: ZetaModel, im_max: float | None = None) -> SearchWindow:
    spectra = settings_fractile.spectra
    d = real_dimension(model)
    return SearchWindow(
        re_min=d - spectra.window_re_below,
        re_max=d + spectra.window_re_above,
        im_max=spectra.window_im if im_max is None else im_max,
    )


def _dedup(values: list[complex]) -> list[complex]:
    result: list[complex] = []
    for z in sorted(values, key=lambda v: (v.real, v.imag)):
        if not any(abs(z - u) <= _DEDUP_REL * max(1.0, abs(z)) for u in result):
            result.append(z)
    return result


def _with_conjugates(values: list[complex]) -> list[complex]:
    extra = [z.conjugate() for z in values if abs(z.imag) > _DEDUP_REL * max(1.0, abs(z))]
    return _dedup([*values, *extra])


def _pole_key(dim: ComplexDim) -> tuple[float, float]:
    return (-round(dim.omega.real, 9), dim.omega.imag)


def complex_dimensions(
    model: ZetaModel,
    window: SearchWindow | None = None,
    method: SearchMethod | str = SearchMethod.AUTO,
    strict: bool = False,
) -> SpectrumReport:
    """Полюса ``ζ_s`` (``ζ_g`` для геометрической модели) в окне.

    Для геометрической модели полюса, где ``|h(ω)| ≤ cancel_rel·Σ g_q^{Re ω}``,
    переносятся в ``cancelled``; нули ``h`` ищутся отдельно. Каждый полюс
    сверяется с контурным интегралом.

    Args:
        model (ZetaModel): Модель.
        window (SearchWindow | None): Окно; по умолчанию ``[D−6, D+1] × [−40, 40]``.
        method (SearchMethod | str): ``auto``, ``lattice`` или ``argument``.
        strict (bool): Бросать ``UnresolvedClusterError`` вместо отчёта.

    Returns
        SpectrumReport: Полюса по убыванию ``Re``, затем по возрастанию ``Im``.

    Raises
        WindowTooLargeError: Окно выше лимита.
        NotLatticeError: ``lattice`` для нерешётчатой модели.
        UnresolvedClusterError: При ``strict`` и неразрешённом кластере.

    """
    method = SearchMethod(method)
    window = window or default_window(model)
    limit = settings_fractile.budget.max_window_height
    if window.im_max > limit:
        raise WindowTooLargeError(window.im_max, limit)

    dimension = real_dimension(model)
    lattice = detect_lattice(model)
    if method is SearchMethod.AUTO:
        method = SearchMethod.LATTICE if lattice.is_lattice else SearchMethod.ARGUMENT
    if method is SearchMethod.LATTICE and not lattice.is_lattice:
        raise NotLatticeError(model.name)

    unresolved: list[UnresolvedCell] = []
    placed: dict[complex, tuple[int | None, int | None]] = {}
    if method is SearchMethod.LATTICE:
        for omega, line, n in _lattice_zeros(model, lattice, window):
            placed[omega] = (line, n)
    else:
        zeros, cells = _argument_zeros(_pole_equation(model), window)
        unresolved.extend(cells)
        for omega in _with_conjugates(zeros):
            if window.contains(omega, 1e-9):
                placed[omega] = (None, None)

    spectra = settings_fractile.spectra
    poles: list[ComplexDim] = []
    cancelled: list[ComplexDim] = []
    for omega, (line, n) in placed.items():
        check = _residue_report(model, omega)
        if check.order != 1:
            logger.warning("Полюс ω={} не простой: порядок {}", omega, check.order)
        is_cancelled = model.kind is ZetaKind.GEOMETRIC and abs(
            model.numerator(omega)
        ) <= spectra.cancel_rel * model.numerator_scale(omega.real)
        dim = ComplexDim(
            omega=omega,
            residue=check.closed_form if check.order == 1 else None,
            order=max(check.order, 1),
            is_real_dimension=abs(omega - dimension) <= 1e-9 * max(1.0, dimension),
            lattice_line=line,
            lattice_index=n,
            cancelled=is_cancelled,
            check=check,
        )
        (cancelled if is_cancelled else poles).append(dim)

    numerator_zeros: list[complex] = []
    if model.kind is ZetaKind.GEOMETRIC and len(model.generator_inradii) > 1:
        zeros, cells = _argument_zeros(_numerator_equation(model), window)
        unresolved.extend(cells)
        numerator_zeros = sorted(
            (z for z in _with_conjugates(zeros) if window.contains(z, 1e-9)),
            key=lambda z: (-round(z.real, 9), z.imag),
        )

    if unresolved:
        logger.warning(
            "Неразрешённые кластеры нулей для {}: {}", model.name, len(unresolved)
        )
        if strict:
            cell = unresolved[0]
            raise UnresolvedClusterError(cell.center, cell.count)

    report = SpectrumReport(
        model=model,
        dimension=dimension,
        lattice=lattice,
        window=window,
        method=method.value,
        poles=tuple(sorted(poles, key=_pole_key)),
        cancelled=tuple(sorted(cancelled, key=_pole_key)),
        numerator_zeros=tuple(numerator_zeros),
        unresolved=tuple(unresolved),
    )
    logger.info(
        "Комплексные размерности {} ({}): {} полюсов, {} сокращено, D={:.12g}",
        model.name,
        report.method,
        len(report.poles),
        len(report.cancelled),
        dimension,
    )
    return report
