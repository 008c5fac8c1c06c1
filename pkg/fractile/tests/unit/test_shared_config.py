import pytest

from fractile.core.config import BudgetSettings, SettingsFractile
from shared.config.app_config import deep_merge, load_toml_config
from shared.config.context import LogRunContext, log_context, patch_record
from shared.config.logger_config import LoggerConfig

pytestmark = pytest.mark.config


# =========================
# deep_merge
# =========================


def test_deep_merge_overrides_nested_values():
    base = {"tolerances": {"geom_rel": 1e-9, "area_rel": 1e-12}, "tube": {"seed": 1}}
    override = {"tolerances": {"geom_rel": 1e-6}}

    result = deep_merge(base, override)

    assert result == {"tolerances": {"geom_rel": 1e-6, "area_rel": 1e-12}, "tube": {"seed": 1}}
    assert base["tolerances"]["geom_rel"] == 1e-9


def test_deep_merge_replaces_non_dict_values():
    assert deep_merge({"a": {"b": 1}}, {"a": [1, 2]}) == {"a": [1, 2]}


# =========================
# load_toml_config
# =========================


def test_load_toml_config_prod_and_local(tmp_path, monkeypatch):
    (tmp_path / "app_config.toml").write_text('[tube]\nseed = 7\npoints_per_decade = 4\n')
    (tmp_path / "app_config.local.toml").write_text("[tube]\nseed = 9\n")
    monkeypatch.setenv("STAGE", "prod")

    config = load_toml_config(tmp_path)

    assert config == {"tube": {"seed": 9, "points_per_decade": 4}}


def test_load_toml_config_develop_stage(tmp_path, monkeypatch):
    (tmp_path / "app_config.toml").write_text("[tube]\nseed = 1\n")
    (tmp_path / "app_config.develop.toml").write_text("[tube]\nseed = 2\n")
    monkeypatch.setenv("STAGE", "develop")

    assert load_toml_config(tmp_path) == {"tube": {"seed": 2}}


def test_load_toml_config_missing_files(tmp_path, monkeypatch):
    monkeypatch.setenv("STAGE", "prod")

    assert load_toml_config(tmp_path) == {}


# =========================
# Настройки fractile
# =========================


def test_settings_from_toml_sections():
    settings = SettingsFractile(**{"tolerances": {"geom_rel": 1e-7}, "tube": {"seed": 3}})

    assert settings.tolerances.geom_rel == 1e-7
    assert settings.tolerances.area_rel == 1e-12
    assert settings.tube.seed == 3
    assert settings.spectra.contour_radius == 1e-3


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("FRACTILE_BUDGET", "1234")

    assert BudgetSettings().budget == 1234


# =========================
# Логирование
# =========================


def test_patch_record_uses_context():
    record = {"extra": {"system": "-", "command": "-"}}
    token = log_context.set(LogRunContext(system="gasket", command="dims"))
    try:
        patch_record(record)
    finally:
        log_context.reset(token)

    assert record["extra"] == {"system": "gasket", "command": "dims"}


def test_patch_record_without_context_keeps_defaults():
    record = {"extra": {"system": "-", "command": "-"}}

    patch_record(record)

    assert record["extra"] == {"system": "-", "command": "-"}


def test_logger_config_without_files(tmp_path):
    log_dir = tmp_path / "logs"

    config = LoggerConfig(log_dir=log_dir, logger_level_stdout="WARNING", log_to_file=False)

    assert not log_dir.exists()
    assert "{extra[system]" in config._get_format()


def test_logger_config_creates_log_dir(tmp_path):
    log_dir = tmp_path / "logs"

    LoggerConfig(log_dir=log_dir, log_to_file=True)

    assert log_dir.is_dir()
    # Возвращаем консольную конфигурацию без файлов.
    LoggerConfig(log_dir=log_dir, log_to_file=False)
