import argparse
from collections.abc import Sequence
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from fractile import __version__
from fractile.app_error.base_error import AppError, ParseError
from fractile.cli.commands import COMMANDS, run_overrides
from fractile.cli.enums import Command
from fractile.cli.handlers import handle_error
from fractile.cli.schemas import RunConfig
from fractile.spectra.poles import SearchMethod
from fractile.tube.domain import TubePath
from shared.config.context import LogRunContext, log_context


def _int_auto(text: str) -> int:
    """Целое в любой записи Python: ``24301`` или ``0x5EED``."""
    return int(text, 0)


def _complex_point(text: str) -> tuple[float, float]:
    """``re`` или ``re,im``."""
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 1:
        return parts[0], 0.0
    if len(parts) == 2:
        return parts[0], parts[1]
    raise argparse.ArgumentTypeError(f"ожидается re или re,im: {text}")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("system", help="путь к JSON конфигу или имя встроенного (gasket, carpet, ...)")
    common.add_argument("--out", type=Path, help="файл вывода (по умолчанию stdout)")
    common.add_argument("--tol-geom", type=float, help="относительный допуск длины")
    common.add_argument("--budget", type=int, help="лимит перебора слов (иначе FRACTILE_BUDGET)")
    common.add_argument("--seed", type=_int_auto, help="зерно Монте-Карло")
    return common


def _add_tile_selection(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--depth", type=int, help="уровни плиток 1..depth (по умолчанию 3)")
    group.add_argument("--r-min", type=float, help="плитки с радиусом ≥ r_min")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractile",
        description="Самоаффинные замощения: допустимость, плитки, комплексные размерности, трубки.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common_parser()

    sub.add_parser(Command.VALIDATE.value, parents=[common], help="проверка допустимости")
    sub.add_parser(Command.HULL.value, parents=[common], help="выпуклая оболочка аттрактора")

    tiles = sub.add_parser(Command.TILES.value, parents=[common], help="манифест плиток и SVG")
    _add_tile_selection(tiles)
    tiles.add_argument("--k-max", type=int, help="проверить структуру замощения до уровня k")

    render = sub.add_parser(Command.RENDER.value, parents=[common], help="только SVG")
    _add_tile_selection(render)

    dims = sub.add_parser(Command.DIMS.value, parents=[common], help="комплексные размерности")
    dims.add_argument("--window-re", type=float, nargs=2, metavar=("RE_MIN", "RE_MAX"))
    dims.add_argument("--window-im", type=float, metavar="T", help="|Im s| ≤ T")
    dims.add_argument("--method", choices=[m.value for m in SearchMethod])

    zeta = sub.add_parser(Command.ZETA_EVAL.value, parents=[common], help="значения ζ_s, ζ_g")
    zeta.add_argument(
        "--at", dest="s_values", type=_complex_point, action="append", help="точка re[,im]"
    )

    tube = sub.add_parser(Command.TUBE.value, parents=[common], help="кривая V(ε) в CSV")
    tube.add_argument("--eps-min", type=float)
    tube.add_argument("--eps-max", type=float)
    tube.add_argument("--ppd", type=int, help="точек на декаду")
    tube.add_argument("--path", choices=[p.value for p in TubePath])
    tube.add_argument("--mc", action="store_true", default=None, help="добавить оценки выборкой")
    tube.add_argument("--samples", type=int, help="объём выборки Монте-Карло")
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Собирает ``RunConfig`` из разобранных аргументов.

    Raises
        ParseError: Значения флагов несовместимы.

    """
    values = {k: v for k, v in vars(args).items() if v is not None}
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        first = exc.errors()[0] if exc.errors() else {}
        detail = f"{'.'.join(str(x) for x in first.get('loc', ()))}: {first.get('msg', exc)}"
        raise ParseError(detail, cause=exc) from exc


def main(argv: Sequence[str] | None = None) -> int:
    """Точка входа ``fractile``.

    Returns
        int: 0 успех, 1 нарушено условие, 2 некорректный вход, 3 превышен лимит.

    """
    args = build_parser().parse_args(argv)
    try:
        cfg = run_config_from_args(args)
    except ParseError as exc:
        return int(handle_error(None, exc))

    token = log_context.set(LogRunContext(system=Path(cfg.system).stem, command=cfg.command.value))
    try:
        logger.debug("Запуск {} для {}", cfg.command.value, cfg.system)
        with run_overrides(cfg):
            return int(COMMANDS[cfg.command](cfg))
    except AppError as exc:
        return int(handle_error(cfg, exc))
    finally:
        log_context.reset(token)
