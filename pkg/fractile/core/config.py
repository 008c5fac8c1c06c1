from pprint import pprint

from loguru import logger
from pydantic import BaseModel, Field
from pydantic_settings import SettingsConfigDict

from shared.config.app_config import (
    BASE_DIR,
    SettingsApp,
    SettingsCommon,
    load_toml_config,
)
from shared.config.logger_config import LoggerConfig

__all__ = ["logger", "settings_fractile", "SettingsFractile"]


class ToleranceSettings(BaseModel):
    """Численные допуски геометрии и спектров.

    Attributes
        geom_rel (float): Допуск длины, относительно диаметра оболочки.
        area_rel (float): Допуск площади, относительно квадрата диаметра.
        hull_rel (float): Критерий стабилизации оболочки (Хаусдорф), относительно диаметра.
        similarity_check (float): Допуск проверки ``linear = r·A`` для подобий.
        merge_rel (float): Относительный допуск слияния атомов меры.
        structure_rel (float): Допуск проверок структурных теорем (относительно площади).

    """

    geom_rel: float = 1e-9
    area_rel: float = 1e-12
    hull_rel: float = 1e-9
    similarity_check: float = 1e-12
    merge_rel: float = 1e-12
    structure_rel: float = 1e-7


class BudgetSettings(SettingsCommon):
    """Ограничения перебора.

    ``budget`` читается из переменной окружения ``FRACTILE_BUDGET``.

    Attributes
        budget (int): Максимальное число слов / точек в одном переборе.
        max_components (int): Максимальное число генераторов Q.
        max_hull_iterations (int): Максимальная глубина уточнения оболочки.
        max_window_height (float): Максимальная высота окна поиска полюсов.
        max_atoms (int): Максимальное число атомов в мере.
        max_structure_depth (int): Максимальный k для проверки структуры.

    """

    budget: int = 4_000_000
    max_components: int = 10_000
    max_hull_iterations: int = 200
    max_window_height: float = 1000.0
    max_atoms: int = 2_000_000
    max_structure_depth: int = 5

    model_config = SettingsConfigDict(env_prefix="FRACTILE_")


class SpectraSettings(BaseModel):
    """Настройки поиска комплексных размерностей.

    Attributes
        window_im (float): Высота окна по умолчанию |Im s| ≤ T.
        window_re_below (float): Насколько ниже D начинается окно по умолчанию.
        window_re_above (float): Насколько выше D заканчивается окно по умолчанию.
        contour_radius (float): Радиус контура проверки вычетов.
        contour_nodes (int): Число узлов трапеций на контуре.
        residue_rel (float): Допуск совпадения вычетов.
        min_cell_side (float): Минимальная сторона прямоугольника подразбиения.
        newton_tol (float): Допуск ньютоновского уточнения |Σ r^ω − 1|.
        cancel_rel (float): Порог сокращения полюса нулём числителя.

    """

    window_im: float = 40.0
    window_re_below: float = 6.0
    window_re_above: float = 1.0
    contour_radius: float = 1e-3
    contour_nodes: int = 64
    residue_rel: float = 1e-6
    min_cell_side: float = 1e-4
    newton_tol: float = 1e-12
    cancel_rel: float = 1e-10


class TubeSettings(BaseModel):
    """Настройки объёма трубки.

    Attributes
        seed (int): Зерно генератора Монте-Карло по умолчанию.
        generator_samples (int): Объём выборки для невыпуклых генераторов.
        points_per_decade (int): Точек на декаду по умолчанию.
        mc_batch (int): Размер пачки точек Монте-Карло.
        max_depth (int): Максимальная глубина спуска по дереву слов.

    """

    seed: int = 0x5EED
    generator_samples: int = 400_000
    points_per_decade: int = 16
    mc_batch: int = 200_000
    max_depth: int = 64


class SettingsFractile(SettingsCommon):
    """Конфигурация fractile.

    Агрегирует настройки ядра (логирование) и подсистем.

    Attributes
        core (SettingsApp): Основные настройки приложения.
        tolerances (ToleranceSettings): Допуски.
        budget (BudgetSettings): Ограничения перебора.
        spectra (SpectraSettings): Поиск полюсов.
        tube (TubeSettings): Объём трубки и Монте-Карло.

    """

    core: SettingsApp = Field(default_factory=SettingsApp)
    tolerances: ToleranceSettings = Field(default_factory=ToleranceSettings)
    budget: BudgetSettings = Field(default_factory=BudgetSettings)
    spectra: SpectraSettings = Field(default_factory=SpectraSettings)
    tube: TubeSettings = Field(default_factory=TubeSettings)


toml_loader = load_toml_config()
settings_fractile = SettingsFractile(**toml_loader)

LoggerConfig(
    log_dir=BASE_DIR / "logs",
    logger_level_stdout=settings_fractile.core.logger_level_stdout,
    logger_level_file=settings_fractile.core.logger_level_file,
    logger_error_file=settings_fractile.core.logger_error_file,
    log_to_file=settings_fractile.core.log_to_file,
)

if __name__ == "__main__":
    pprint(settings_fractile.model_dump())
