from collections.abc import Callable
from typing import cast

from loguru import logger

from fractile.app_error.base_error import (
    AppError,
    BudgetError,
    BudgetExceededError,
    DomainError,
    InputError,
    NotAdmissibleError,
    ParseError,
)
from fractile.cli.enums import ExitCode
from fractile.cli.schemas import RunConfig

ErrorHandler = Callable[[RunConfig | None, AppError], ExitCode]


def _command(cfg: RunConfig | None) -> str:
    return cfg.command.value if cfg is not None else "-"


def input_error_handler(cfg: RunConfig | None, exc: AppError) -> ExitCode:
    """Обрабатывает некорректный вход.

    Конфиг не разбирается, отображение не сжимающее или конфиг не содержит
    геометрии. Возвращает код 2.

    Args:
        cfg (RunConfig | None): Параметры запуска (нет, если не разобраны).
        exc (InputError): Исключение.

    Returns
        ExitCode: ``ExitCode.INPUT``.

    """
    exc = cast(InputError, exc)
    if isinstance(exc, ParseError):
        logger.error("ParseError: команда={}, поле={}", _command(cfg), exc.detail)
    else:
        logger.error("{}: команда={}, ошибка={}", type(exc).__name__, _command(cfg), str(exc))
    return ExitCode.INPUT


def domain_error_handler(cfg: RunConfig | None, exc: AppError) -> ExitCode:
    """Обрабатывает нарушение математических условий, код 1."""
    exc = cast(DomainError, exc)
    if isinstance(exc, NotAdmissibleError):
        logger.error(
            "NotAdmissibleError: система={}, tileset_ok={}, nontrivial_ok={}",
            exc.name,
            exc.tileset_ok,
            exc.nontrivial_ok,
        )
    else:
        logger.error("{}: команда={}, ошибка={}", type(exc).__name__, _command(cfg), str(exc))
    return ExitCode.DOMAIN


def budget_error_handler(cfg: RunConfig | None, exc: AppError) -> ExitCode:
    """Обрабатывает превышение лимитов перебора.

    Returns
        ExitCode: ``ExitCode.BUDGET``.

    """
    exc = cast(BudgetError, exc)
    if isinstance(exc, BudgetExceededError):
        logger.error(
            "BudgetExceededError: {} требует {}, лимит {} (FRACTILE_BUDGET или --budget)",
            exc.what,
            exc.requested,
            exc.limit,
        )
    else:
        logger.error("{}: команда={}, ошибка={}", type(exc).__name__, _command(cfg), str(exc))
    return ExitCode.BUDGET


EXCEPTION_HANDLERS: dict[type[AppError], ErrorHandler] = {
    InputError: input_error_handler,
    DomainError: domain_error_handler,
    BudgetError: budget_error_handler,
}


def handle_error(cfg: RunConfig | None, exc: AppError) -> ExitCode:
    """Находит обработчик по ближайшему базовому классу исключения."""
    for klass in type(exc).__mro__:
        handler = EXCEPTION_HANDLERS.get(klass)
        if handler is not None:
            return handler(cfg, exc)
    logger.exception("Необработанная ошибка приложения: {}", str(exc))
    return ExitCode.DOMAIN
