class AppError(Exception):
    """Базовое приложение-ориентированное исключение.

    Args:
        message (str): Описание ошибки.
        cause (Exception | None): Исходное исключение.

    """

    def __init__(self, message: str, *, cause: Exception | None = None) -> None:
        super().__init__(message)
        self.cause = cause

    def __str__(self) -> str:
        """Строковое представление об ошибке."""
        base = super().__str__()
        if self.cause:
            return f"{base} (cause: {self.cause})"
        return base


class InputError(AppError):
    """Базовое исключение некорректного входа (код выхода 2)."""

    pass


class DomainError(AppError):
    """Базовое исключение нарушения математических условий (код выхода 1)."""

    pass


class BudgetError(AppError):
    """Базовое исключение превышения лимитов перебора (код выхода 3)."""

    pass


# =========================
# Вход
# =========================


class ParseError(InputError):
    """Конфиг системы не разбирается."""

    def __init__(self, detail: str, *, cause: Exception | None = None) -> None:
        super().__init__(f"Некорректный конфиг системы: {detail}", cause=cause)
        self.detail = detail


class NotContractiveError(InputError):
    """Отображение не является сжатием.

    Args:
        index (int): Номер отображения (с 1).
        spectral_bound (float): Наибольшее сингулярное число.

    """

    def __init__(self, index: int, spectral_bound: float) -> None:
        super().__init__(
            f"Отображение {index} не сжимающее: спектральная норма "
            f"{spectral_bound:.6g} ≥ 1"
        )
        self.index = index
        self.spectral_bound = spectral_bound


class TooFewMapsError(InputError):
    """В системе меньше двух отображений."""

    def __init__(self, count: int) -> None:
        super().__init__(f"Нужно не меньше 2 отображений, получено {count}")
        self.count = count


class GeometryUnsupportedError(InputError):
    """Конфиг описывает только коэффициенты сжатия (геометрия не поддерживается)."""

    def __init__(self, name: str) -> None:
        super().__init__(
            f"Система {name} задана только коэффициентами сжатия, геометрия недоступна"
        )
        self.name = name


# =========================
# Геометрия
# =========================


class DegenerateImageError(DomainError):
    """Образ многоугольника вырожден (численный сбой)."""

    pass


class DegenerateHullError(DomainError):
    """Точки коллинеарны: размерность оболочки меньше 2."""

    def __init__(self, count: int) -> None:
        super().__init__(
            f"Выпуклая оболочка {count} точек вырождена (размерность < 2)"
        )
        self.count = count


class NoStabilizationError(DomainError):
    """Оболочка не стабилизировалась за отведённое число итераций."""

    def __init__(self, depth: int, gap: float, tau: float) -> None:
        super().__init__(
            f"Оболочка не стабилизировалась на глубине {depth}: "
            f"зазор {gap:.3e} > {tau:.3e}"
        )
        self.depth = depth
        self.gap = gap
        self.tau = tau


# =========================
# Система и замощение
# =========================


class InadmissibleParameterError(DomainError):
    """Параметр семейства Коха вне допустимого круга."""

    def __init__(self, xi: complex) -> None:
        value = abs(xi) ** 2 + abs(1 - xi) ** 2
        super().__init__(
            f"Параметр ξ={xi} недопустим: |ξ|²+|1−ξ|² = {value:.6g} ≥ 1"
        )
        self.xi = xi


class NotAdmissibleError(DomainError):
    """Система не проходит условие tileset или нетривиальности.

    Args:
        name (str): Имя системы.
        tileset_ok (bool): Выполнено ли условие tileset.
        nontrivial_ok (bool): Выполнено ли условие нетривиальности.

    """

    def __init__(self, name: str, tileset_ok: bool, nontrivial_ok: bool) -> None:
        super().__init__(
            f"Система {name} недопустима: tileset_ok={tileset_ok}, "
            f"nontrivial_ok={nontrivial_ok}"
        )
        self.name = name
        self.tileset_ok = tileset_ok
        self.nontrivial_ok = nontrivial_ok


class NotSelfSimilarError(DomainError):
    """Операция требует самоподобной системы."""

    def __init__(self, name: str, operation: str) -> None:
        super().__init__(
            f"Система {name} не самоподобна: {operation} определено только "
            f"для подобий"
        )
        self.name = name
        self.operation = operation


# =========================
# Спектры
# =========================


class NearPoleError(DomainError):
    """Точка слишком близка к полюсу дзета-функции."""

    def __init__(self, s: complex, gap: float) -> None:
        super().__init__(f"s={s} рядом с полюсом: |1 − Σ r_j^s| = {gap:.3e}")
        self.s = s
        self.gap = gap


class NotSimpleError(DomainError):
    """Полюс не простой (контурный момент не обнуляется)."""

    def __init__(self, omega: complex, order: int) -> None:
        super().__init__(f"Полюс ω={omega} не простой, оценка порядка {order}")
        self.omega = omega
        self.order = order


class NotLatticeError(DomainError):
    """Решётчатый метод запрошен для нерешётчатого набора коэффициентов."""

    def __init__(self, name: str) -> None:
        super().__init__(f"Коэффициенты системы {name} не решётчатые")
        self.name = name


class UnresolvedClusterError(DomainError):
    """Ячейка минимального размера содержит несколько нулей."""

    def __init__(self, center: complex, count: int) -> None:
        super().__init__(
            f"Кластер из {count} нулей около {center} не разрешён при "
            f"минимальном подразбиении"
        )
        self.center = center
        self.count = count


# =========================
# Трубка
# =========================


class DivergentTailError(DomainError):
    """Сумма площадей плиток расходится: Σ r_j² ≥ 1."""

    def __init__(self, square_sum: float) -> None:
        super().__init__(f"Хвост расходится: Σ r_j² = {square_sum:.12g} ≥ 1")
        self.square_sum = square_sum


class InsufficientRangeError(DomainError):
    """Кривая трубки не покрывает нужный диапазон ε."""

    def __init__(self, decades: float, required: float) -> None:
        super().__init__(
            f"Недостаточный диапазон: {decades:.2f} декад ниже min g_q, "
            f"нужно {required:.2f}"
        )
        self.decades = decades
        self.required = required


class DepthCapError(DomainError):
    """Спуск по дереву слов превысил допустимую глубину."""

    def __init__(self, depth: int) -> None:
        super().__init__(f"Спуск по дереву слов превысил глубину {depth}")
        self.depth = depth


# =========================
# Лимиты
# =========================


class BudgetExceededError(BudgetError):
    """Перебор превышает лимит.

    Args:
        what (str): Что перебирается.
        requested (int): Запрошенный объём.
        limit (int): Лимит.

    """

    def __init__(self, what: str, requested: int, limit: int) -> None:
        super().__init__(f"Лимит превышен ({what}): {requested} > {limit}")
        self.what = what
        self.requested = requested
        self.limit = limit


class TooManyComponentsError(BudgetError):
    """Слишком много генераторов."""

    def __init__(self, count: int, limit: int) -> None:
        super().__init__(f"Генераторов {count}, лимит {limit}")
        self.count = count
        self.limit = limit


class WindowTooLargeError(BudgetError):
    """Окно поиска полюсов больше допустимого."""

    def __init__(self, height: float, limit: float) -> None:
        super().__init__(f"Окно |Im s| ≤ {height} больше лимита {limit}")
        self.height = height
        self.limit = limit
