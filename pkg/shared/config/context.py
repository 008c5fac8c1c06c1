from contextvars import ContextVar
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from loguru import Record
else:
    Record = dict  # fallback для runtime


@dataclass
class LogRunContext:
    """Контекст запуска для логирования.

    Attributes
        system (str | None): Имя системы из конфига (например, "gasket").
        command (str | None): Подкоманда CLI (validate, tiles, dims...).

    """

    system: str | None = None
    command: str | None = None


log_context: ContextVar[LogRunContext | None] = ContextVar(
    "log_context",
    default=None,
)


def patch_record(record: "Record") -> None:
    """Патчит запись логгера, добавляя данные запуска из контекста.

    Функция используется в настройке loguru (через ``logger.configure`` и
    ``patcher``) для автоматического добавления данных в поле ``record["extra"]``.

    Если контекст отсутствует, остаются значения по умолчанию.

    Args:
        record (Record): Запись лога, формируемая loguru.

    """
    ctx = log_context.get()

    if ctx:
        record["extra"]["system"] = ctx.system or "-"
        record["extra"]["command"] = ctx.command or "-"
