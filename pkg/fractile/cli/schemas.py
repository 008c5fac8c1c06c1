from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fractile.cli.enums import Command
from fractile.spectra.poles import SearchMethod
from fractile.tube.domain import TubePath


class RunConfig(BaseModel):
    """Параметры одного запуска CLI.

    Не заданные допуски и лимиты берутся из настроек; итоговые значения
    попадают в блок ``metadata`` каждого вывода.

    Attributes
        system (str): Путь к JSON конфигу или имя встроенного конфига.
        command (Command): Подкоманда.
        out (Path | None): Файл вывода; без него отчёт пишется в stdout.
        tol_geom (float | None): Переопределение ``tolerances.geom_rel``.
        budget (int | None): Переопределение ``budget.budget``.
        seed (int | None): Зерно Монте-Карло.

    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    system: str
    command: Command
    out: Path | None = None
    tol_geom: float | None = Field(default=None, gt=0)
    budget: int | None = Field(default=None, gt=0)
    seed: int | None = Field(default=None, ge=0)

    depth: int | None = Field(default=None, ge=0)
    r_min: float | None = Field(default=None, gt=0)
    k_max: int | None = Field(default=None, ge=1)

    window_re: tuple[float, float] | None = None
    window_im: float | None = Field(default=None, gt=0)
    method: SearchMethod = SearchMethod.AUTO
    s_values: list[tuple[float, float]] = Field(default_factory=list)

    eps_min: float = Field(default=1e-8, gt=0)
    eps_max: float = Field(default=1.0, gt=0)
    ppd: int | None = Field(default=None, ge=1)
    path: TubePath = TubePath.MEASURE
    mc: bool = False
    samples: int = Field(default=1_000_000, ge=10_000)

    @model_validator(mode="after")
    def check_ranges(self) -> "RunConfig":
        if self.depth is not None and self.r_min is not None:
            raise ValueError("depth и r_min взаимоисключающие")
        if self.window_re is not None and not self.window_re[0] < self.window_re[1]:
            raise ValueError(f"window_re: нужно re_min < re_max, получено {self.window_re}")
        if self.eps_min > self.eps_max:
            raise ValueError(f"eps_min {self.eps_min} > eps_max {self.eps_max}")
        return self

    @property
    def tiles_depth(self) -> int | None:
        """Глубина для ``tiles``/``render``: по умолчанию 3, если не задан ``r_min``."""
        if self.depth is None and self.r_min is None:
            return 3
        return self.depth


class SMetadata(BaseModel):
    """Блок воспроизводимости, прикладываемый к каждому выводу."""

    tool: str = "fractile"
    version: str
    command: str
    system: str
    seed: int | None = None
    tolerances: dict[str, float]
    spectra: dict[str, float]
    budget: dict[str, float]
    options: dict[str, Any]


class SEnvelope(BaseModel):
    metadata: SMetadata
    report: dict[str, Any]
