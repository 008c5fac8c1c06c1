import os
import tomllib
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from loguru import logger
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent.parent.parent

_STAGE_FILES = {"prod": "app_config.toml"}
_DEVELOP_FILE = "app_config.develop.toml"
_LOCAL_FILE = "app_config.local.toml"


def deep_merge(a: dict[str, Any], b: dict[str, Any]) -> dict[str, Any]:
    """Объединяет секции конфигов, ``b`` важнее ``a``.

    Вложенные таблицы сливаются рекурсивно, остальные значения из ``b``
    заменяют значения из ``a`` целиком. Входные словари не меняются.

    Args:
        a (dict[str, Any]): Базовый конфиг.
        b (dict[str, Any]): Переопределения.

    Returns
        dict[str, Any]: Новый словарь.

    """
    merged = dict(a)
    for key, value in b.items():
        current = merged.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            merged[key] = deep_merge(current, value)
        else:
            merged[key] = value
    return merged


def _read_toml(path: Path) -> dict[str, Any]:
    if not path.is_file():
        return {}
    with path.open("rb") as fh:
        return tomllib.load(fh)


def load_toml_config(base_dir: Path = BASE_DIR) -> dict[str, Any]:
    """Секции настроек из TOML файлов каталога ``base_dir``.

    ``STAGE=prod`` (по умолчанию) берёт ``app_config.toml``, любая другая
    стадия ``app_config.develop.toml``; поверх ложится ``app_config.local.toml``.
    Все файлы необязательны: установленный пакет работает на значениях по
    умолчанию. Перед выбором стадии читаются ``.env`` и ``.env.local``.

    Raises
        tomllib.TOMLDecodeError: Один из файлов не разбирается.

    """
    load_dotenv(base_dir / ".env")
    load_dotenv(base_dir / ".env.local", override=True)

    stage = os.getenv("STAGE", "prod")
    stage_file = _STAGE_FILES.get(stage, _DEVELOP_FILE)
    logger.debug("Настройки fractile: стадия {}, каталог {}", stage, base_dir)
    return deep_merge(_read_toml(base_dir / stage_file), _read_toml(base_dir / _LOCAL_FILE))


class SettingsCommon(BaseSettings):
    """Общий источник переменных окружения: ``.env``, затем ``.env.local``."""

    model_config = SettingsConfigDict(
        env_file=[str(BASE_DIR / ".env"), str(BASE_DIR / ".env.local")],
        env_file_encoding="utf-8",
        extra="ignore",
    )


class SettingsApp(SettingsCommon):
    """Секция ``[core]``: стадия и логирование.

    Attributes
        stage (str): prod, develop или local.
        base_dir (Path): Корень репозитория.
        logger_level_stdout (str): Уровень консоли (stderr).
        logger_level_file (str): Уровень ``fractile.log``.
        logger_error_file (str): Уровень ``errors.log``.
        log_to_file (bool): Писать ли файлы в ``logs/``.

    """

    stage: str = "prod"
    base_dir: Path = BASE_DIR
    logger_level_stdout: str = "INFO"
    logger_level_file: str = "INFO"
    logger_error_file: str = "WARNING"
    log_to_file: bool = False
