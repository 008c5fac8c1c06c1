from unittest.mock import MagicMock

import pytest
from loguru import logger as real_logger

from fractile.ifs.domain import IfsSystem
from fractile.ifs.services import load_bundled
from fractile.tiling.domain import TilingSpec
from fractile.tiling.services import build_tiling

# Модули, которые пишут в лог в ходе расчётов.
_LOGGING_MODULES = (
    "fractile.ifs.services",
    "fractile.tiling.services",
    "fractile.spectra.poles",
    "fractile.tube.services",
    "fractile.tube.monte_carlo",
    "fractile.cli.commands",
    "fractile.cli.handlers",
)


@pytest.fixture
def fake_logger(monkeypatch: pytest.MonkeyPatch) -> MagicMock:
    """Создаёт мок логгера и подменяет его в модулях расчёта.

    Используется для перехвата логирования в тестах, чтобы:
    - не было реального вывода
    - можно было проверять вызовы логгера

    Args:
        monkeypatch (pytest.MonkeyPatch): Инструмент pytest для подмены объектов.

    Returns
        MagicMock: Замоканный логгер.

    """
    logger = MagicMock(spec=real_logger)

    # loguru использует bind(), возвращаем тот же объект для цепочек вызовов
    logger.bind.return_value = logger

    for module in _LOGGING_MODULES:
        monkeypatch.setattr(f"{module}.logger", logger)

    return logger


# =========================
# Встроенные системы
# =========================


@pytest.fixture(scope="session")
def gasket() -> IfsSystem:
    return load_bundled("gasket")


@pytest.fixture(scope="session")
def koch() -> IfsSystem:
    return load_bundled("koch_standard")


@pytest.fixture(scope="session")
def pentagasket() -> IfsSystem:
    return load_bundled("pentagasket")


@pytest.fixture(scope="session")
def carpet() -> IfsSystem:
    return load_bundled("carpet")


@pytest.fixture(scope="session")
def gasket_spec(gasket: IfsSystem) -> TilingSpec:
    """Замощение треугольника Серпинского (строится один раз на сессию)."""
    return build_tiling(gasket)


@pytest.fixture(scope="session")
def koch_spec(koch: IfsSystem) -> TilingSpec:
    return build_tiling(koch)


@pytest.fixture(scope="session")
def pentagasket_spec(pentagasket: IfsSystem) -> TilingSpec:
    return build_tiling(pentagasket)


@pytest.fixture(scope="session")
def carpet_spec(carpet: IfsSystem) -> TilingSpec:
    return build_tiling(carpet)
