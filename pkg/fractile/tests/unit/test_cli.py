import csv
import math

import orjson
import pytest

from fractile.app_error.base_error import (
    BudgetExceededError,
    NotSelfSimilarError,
    ParseError,
    WindowTooLargeError,
)
from fractile.cli.commands import read_system_config, run_overrides
from fractile.cli.enums import Command, ExitCode
from fractile.cli.handlers import handle_error
from fractile.cli.main import main
from fractile.cli.schemas import RunConfig
from fractile.core.config import settings_fractile
from fractile.tube.export import CSV_HEADER

pytestmark = pytest.mark.cli


def run_json(capsys, argv):
    code = main(argv)
    return code, orjson.loads(capsys.readouterr().out)


# =========================
# Коды выхода
# =========================


def test_validate_admissible(capsys, fake_logger):
    code, doc = run_json(capsys, ["validate", "gasket"])

    assert code == ExitCode.OK
    assert doc["metadata"]["tool"] == "fractile"
    assert doc["metadata"]["command"] == "validate"
    assert doc["metadata"]["system"] == "gasket"
    assert doc["report"]["admissible"]


def test_validate_counterexample_is_domain_error(capsys, fake_logger):
    code, doc = run_json(capsys, ["validate", "tileset_counterexample"])

    assert code == ExitCode.DOMAIN
    assert not doc["report"]["admissible"]
    fake_logger.warning.assert_called()


def test_malformed_config_file(tmp_path, fake_logger):
    path = tmp_path / "broken.json"
    path.write_text("{not json")

    assert main(["validate", str(path)]) == ExitCode.INPUT
    fake_logger.error.assert_called()


def test_missing_config(tmp_path, fake_logger):
    assert main(["hull", str(tmp_path / "nope.json")]) == ExitCode.INPUT


def test_affine_system_has_no_dimensions(fake_logger):
    assert main(["dims", "harmonic_gasket"]) == ExitCode.DOMAIN


def test_budget_exceeded(fake_logger):
    code = main(["tiles", "gasket", "--depth", "12", "--budget", "1000"])

    assert code == ExitCode.BUDGET
    assert settings_fractile.budget.budget != 1000


def test_depth_and_r_min_are_exclusive(capsys):
    with pytest.raises(SystemExit) as info:
        main(["tiles", "gasket", "--depth", "2", "--r-min", "0.01"])

    assert info.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["tube", "gasket", "--eps-min", "1", "--eps-max", "0.1"],
        ["tube", "gasket", "--mc", "--samples", "100"],
        ["dims", "gasket", "--window-re", "1", "0"],
        ["validate", "gasket", "--budget", "0"],
    ],
)
def test_inconsistent_flags(argv, fake_logger):
    assert main(argv) == ExitCode.INPUT


# =========================
# Отчёты
# =========================


def test_hull_report(capsys, fake_logger):
    code, doc = run_json(capsys, ["hull", "carpet"])

    assert code == ExitCode.OK
    assert len(doc["report"]["vertices"]) == 4


def test_tiles_manifest_to_stdout(capsys, fake_logger):
    code, doc = run_json(capsys, ["tiles", "gasket", "--k-max", "2"])

    assert code == ExitCode.OK
    # По умолчанию три уровня: 1 + 3 + 9.
    assert len(doc["report"]["tiles"]) == 13
    assert doc["report"]["structure"]["ok"]
    assert doc["metadata"]["options"]["k_max"] == 2
    assert "out" not in doc["metadata"]["options"]


def test_tiles_with_out_writes_svg_and_manifest(tmp_path, fake_logger):
    out = tmp_path / "gasket.svg"

    assert main(["tiles", "gasket", "--depth", "2", "--out", str(out)]) == ExitCode.OK

    svg = out.read_text(encoding="utf-8")
    assert svg.count('class="tile"') == 4
    assert "<metadata>" in svg
    manifest = orjson.loads((tmp_path / "gasket.manifest.json").read_bytes())
    assert len(manifest["report"]["tiles"]) == 4


def test_outputs_are_byte_identical(tmp_path, fake_logger):
    first = tmp_path / "a" / "koch.svg"
    second = tmp_path / "b" / "koch.svg"

    for out in (first, second):
        assert main(["tiles", "koch_standard", "--depth", "3", "--out", str(out)]) == ExitCode.OK

    assert first.read_bytes() == second.read_bytes()
    assert (first.parent / "koch.manifest.json").read_bytes() == (
        second.parent / "koch.manifest.json"
    ).read_bytes()


def test_render_to_stdout(capsys, fake_logger):
    assert main(["render", "gasket", "--depth", "1"]) == ExitCode.OK

    svg = capsys.readouterr().out
    assert svg.count('class="tile"') == 1


def test_dims_gasket(capsys, fake_logger):
    code, doc = run_json(capsys, ["dims", "gasket"])

    report = doc["report"]
    assert code == ExitCode.OK
    assert report["D"] == pytest.approx(math.log(3) / math.log(2), rel=1e-12)
    assert report["lattice"]["is_lattice"]
    assert len(report["poles"]) == 9
    assert report["unresolved"] == []


def test_dims_ratios_only_config(capsys, fake_logger):
    code, doc = run_json(capsys, ["dims", "menger_ratios_only", "--window-im", "10"])

    assert code == ExitCode.OK
    assert doc["report"]["D"] == pytest.approx(math.log(20) / math.log(3), rel=1e-12)


def test_zeta_eval_defaults_to_d_plus_one(capsys, fake_logger):
    code, doc = run_json(capsys, ["zeta-eval", "gasket"])

    report = doc["report"]
    (value,) = report["values"]
    assert code == ExitCode.OK
    assert value["s"]["re"] == pytest.approx(report["D"] + 1.0)
    assert value["s"]["im"] == 0.0
    assert len(value["zeta_g_terms"]) == 1


def test_zeta_eval_at_pole_is_flagged(capsys, fake_logger):
    d = math.log(3) / math.log(2)

    code, doc = run_json(capsys, ["zeta-eval", "gasket", "--at", f"{d!r}", "--at", "2,1"])

    first, second = doc["report"]["values"]
    assert code == ExitCode.OK
    assert first["near_pole"]
    assert first["zeta_s"] is None
    assert not second["near_pole"]


def test_tube_csv_and_summary(tmp_path, fake_logger):
    out = tmp_path / "tube.csv"
    argv = ["tube", "gasket", "--eps-min", "1e-4", "--eps-max", "1", "--ppd", "16"]

    code = main([*argv, "--out", str(out)])

    assert code == ExitCode.OK
    with out.open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == tuple(CSV_HEADER)
    assert len(rows) == 1 + 65
    summary = orjson.loads((tmp_path / "tube.summary.json").read_bytes())
    assert summary["report"]["points"] == 65
    assert summary["report"]["slope"] is not None


def test_tube_short_range_reports_slope_error(tmp_path, fake_logger):
    out = tmp_path / "tube.csv"

    code = main(["tube", "gasket", "--eps-min", "0.01", "--ppd", "4", "--out", str(out)])

    summary = orjson.loads((tmp_path / "tube.summary.json").read_bytes())
    assert code == ExitCode.OK
    assert summary["report"]["slope"] is None
    assert summary["report"]["slope_error"]


def test_tube_seed_in_metadata(tmp_path, fake_logger):
    out = tmp_path / "tube.csv"
    argv = ["tube", "gasket", "--eps-min", "0.01", "--eps-max", "0.1", "--ppd", "1", "--mc"]

    code = main([*argv, "--samples", "10000", "--seed", "0x10", "--out", str(out)])

    summary = orjson.loads((tmp_path / "tube.summary.json").read_bytes())
    assert code == ExitCode.OK
    assert summary["metadata"]["seed"] == 16
    assert summary["report"]["monte_carlo"]["seed"] == 16


# =========================
# Вспомогательные функции
# =========================


def test_read_system_config_by_name_and_path(tmp_path):
    path = tmp_path / "own.json"
    path.write_bytes(read_system_config("gasket"))

    assert read_system_config("gasket.json") == read_system_config("gasket")
    assert read_system_config(str(path)) == read_system_config("gasket")
    with pytest.raises(ParseError):
        read_system_config("no_such_system")


def test_run_overrides_restores_settings():
    tolerances = settings_fractile.tolerances
    budget = settings_fractile.budget
    saved = (tolerances.geom_rel, budget.budget)
    cfg = RunConfig(system="gasket", command=Command.VALIDATE, tol_geom=1e-6, budget=77)

    with run_overrides(cfg):
        assert tolerances.geom_rel == 1e-6
        assert budget.budget == 77

    assert (tolerances.geom_rel, budget.budget) == saved


@pytest.mark.parametrize(
    ("exc", "code"),
    [
        (ParseError("maps: field required"), ExitCode.INPUT),
        (NotSelfSimilarError("shear", "тест"), ExitCode.DOMAIN),
        (BudgetExceededError("слова", 10, 5), ExitCode.BUDGET),
        (WindowTooLargeError(5000.0, 1000.0), ExitCode.BUDGET),
    ],
)
def test_handle_error_maps_families(exc, code, fake_logger):
    assert handle_error(None, exc) == code
    fake_logger.error.assert_called_once()


def test_run_config_defaults():
    cfg = RunConfig(system="gasket", command=Command.TILES)

    assert cfg.tiles_depth == 3
    assert RunConfig(system="gasket", command=Command.TILES, r_min=0.01).tiles_depth is None


def test_tube_default_range_reaches_asymptotic_regime():
    cfg = RunConfig(system="gasket", command=Command.TUBE)

    assert cfg.eps_max == 1.0
    assert cfg.eps_min == 1e-8
