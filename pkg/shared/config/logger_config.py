import sys
from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from loguru import logger

from shared.config.context import patch_record

RecordFilter = Callable[[Mapping[str, Any]], bool]

_ROTATION = "1 day"
_RETENTION = "30 days"


class LoggerConfig:
    """Настройка loguru для CLI и библиотеки.

    Консоль пишется в stderr: stdout занят отчётами (JSON, CSV, SVG), которые
    должны совпадать побайтно между запусками. Файлы в ``log_dir`` включаются
    флагом ``log_to_file``: ``fractile.log`` без предупреждений и ``errors.log``
    от ``logger_error_file`` и выше.

    Args:
        log_dir (Path): Каталог файлов логов.
        logger_level_stdout (str, optional): Уровень консоли. Defaults to "INFO".
        logger_level_file (str, optional): Уровень ``fractile.log``. Defaults to "INFO".
        logger_error_file (str, optional): Уровень ``errors.log``. Defaults to "WARNING".
        log_to_file (bool, optional): Подключать ли файлы. Defaults to False.
        extra_defaults (dict[str, Any] | None, optional): Поля ``extra`` вне запуска CLI.

    """

    def __init__(
        self,
        log_dir: Path,
        logger_level_stdout: str = "INFO",
        logger_level_file: str = "INFO",
        logger_error_file: str = "WARNING",
        log_to_file: bool = False,
        extra_defaults: dict[str, Any] | None = None,
    ) -> None:
        self.log_dir = log_dir
        self.logger_level_stdout = logger_level_stdout
        self.logger_level_file = logger_level_file
        self.logger_error_file = logger_error_file
        self.log_to_file = log_to_file
        self.extra_defaults = extra_defaults or {"system": "-", "command": "-"}
        # Подробные трейсбеки с переменными только в отладке.
        self.diagnose = logger_level_stdout == "DEBUG"

        logger.remove()
        logger.configure(extra=self.extra_defaults, patcher=patch_record)
        logger.add(
            sys.stderr,
            level=self.logger_level_stdout,
            format=self._get_format(),
            catch=True,
            diagnose=self.diagnose,
        )
        if self.log_to_file:
            self.log_dir.mkdir(parents=True, exist_ok=True, mode=0o755)
            for name, level, record_filter in self._file_sinks():
                self._add_file_sink(name, level, record_filter)

    @staticmethod
    def _below_warning(record: Mapping[str, Any]) -> bool:
        return int(record["level"].no) < int(logger.level("WARNING").no)

    def _file_sinks(self) -> list[tuple[str, str, RecordFilter | None]]:
        return [
            ("fractile.log", self.logger_level_file, self._below_warning),
            ("errors.log", self.logger_error_file, None),
        ]

    def _add_file_sink(self, name: str, level: str, record_filter: RecordFilter | None) -> None:
        logger.add(
            str(self.log_dir / name),
            level=level,
            format=self._get_format(),
            rotation=_ROTATION,
            retention=_RETENTION,
            catch=True,
            backtrace=True,
            diagnose=self.diagnose,
            filter=record_filter,
        )

    @staticmethod
    def _get_format() -> str:
        """Формат строки: время, уровень, место вызова, система и подкоманда запуска.

        Returns
            str: Формат для loguru.

        """
        return (
            "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
            "<level>{level:<8}</level> | "
            "<magenta>{extra[system]:<16}</magenta> "
            "<blue>{extra[command]:<9}</blue> | "
            "<cyan>{name}</cyan>:<cyan>{function}</cyan>:{line} - "
            "<level>{message}</level>"
        )
