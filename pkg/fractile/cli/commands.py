"""Подкоманды CLI: загрузка конфига, запуск конвейера и запись отчётов.

Каждая команда возвращает код выхода; исключения приложения
перехватываются в ``main`` и переводятся в коды обработчиками.
"""

import io
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path

import orjson
from loguru import logger
from pydantic import BaseModel

from fractile import __version__
from fractile.app_error.base_error import (
    GeometryUnsupportedError,
    InsufficientRangeError,
    NearPoleError,
    NotSelfSimilarError,
    ParseError,
)
from fractile.cli.enums import Command, ExitCode
from fractile.cli.schemas import RunConfig, SEnvelope, SMetadata
from fractile.core.config import settings_fractile
from fractile.ifs.domain import IfsSystem
from fractile.ifs.mapper import IfsMapper
from fractile.ifs.services import (
    bundled_config_path,
    bundled_names,
    estimate_hull,
    load_system,
    load_zeta_model,
    validate,
)
from fractile.spectra.domain import SearchWindow, ZetaKind, ZetaModel
from fractile.spectra.mapper import SpectraMapper
from fractile.spectra.measures import geometric_model
from fractile.spectra.poles import complex_dimensions, default_window
from fractile.spectra.schemas import SZetaEvaluation, SZetaValue
from fractile.spectra.zeta import real_dimension, zeta_g, zeta_g_terms, zeta_s
from fractile.tiling.domain import TilingSpec
from fractile.tiling.mapper import TilingMapper
from fractile.tiling.services import build_tiling, select_tiles, verify_structure
from fractile.tiling.svg import render_svg
from fractile.tube.export import write_curve_csv
from fractile.tube.mapper import TubeMapper
from fractile.tube.services import asymptotic_slope, tube_curve

CommandHandler = Callable[[RunConfig], ExitCode]

_JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE


# =========================
# Ввод и вывод
# =========================


def read_system_config(source: str) -> bytes:
    """Байты конфига по пути к файлу или имени встроенного конфига.

    Raises
        ParseError: Нет ни файла, ни встроенного конфига с таким именем.

    """
    path = Path(source)
    if path.is_file():
        return path.read_bytes()
    name = source.removesuffix(".json")
    if name in bundled_names():
        return bundled_config_path(name).read_bytes()
    raise ParseError(f"конфиг не найден: {source}")


@contextmanager
def run_overrides(cfg: RunConfig) -> Iterator[None]:
    """Временно применяет ``--tol-geom`` и ``--budget`` к настройкам."""
    tolerances = settings_fractile.tolerances
    budget = settings_fractile.budget
    saved = (tolerances.geom_rel, budget.budget)
    if cfg.tol_geom is not None:
        tolerances.geom_rel = cfg.tol_geom
    if cfg.budget is not None:
        budget.budget = cfg.budget
    try:
        yield
    finally:
        tolerances.geom_rel, budget.budget = saved


def build_metadata(cfg: RunConfig, system_name: str) -> SMetadata:
    tube = settings_fractile.tube
    return SMetadata(
        version=__version__,
        command=cfg.command.value,
        system=system_name,
        seed=tube.seed if cfg.seed is None else cfg.seed,
        tolerances=settings_fractile.tolerances.model_dump(),
        spectra=settings_fractile.spectra.model_dump(),
        budget=settings_fractile.budget.model_dump(),
        options=cfg.model_dump(mode="json", exclude={"system", "command", "out"}),
    )


def dump_json(document: BaseModel) -> bytes:
    """JSON с сортированными ключами и отступом 2: одинаковые данные дают одинаковые байты."""
    return orjson.dumps(document.model_dump(mode="json"), option=_JSON_OPTIONS)


def _envelope(cfg: RunConfig, system_name: str, report: BaseModel) -> bytes:
    return dump_json(
        SEnvelope(metadata=build_metadata(cfg, system_name), report=report.model_dump(mode="json"))
    )


def _emit(data: bytes | str, target: Path | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if target is None:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)
    logger.info("Записан {} ({} байт)", target, len(data))


def _sidecar(out: Path, tag: str) -> Path:
    return out.with_name(f"{out.stem}.{tag}.json")


def _load_system(cfg: RunConfig) -> IfsSystem:
    return load_system(read_system_config(cfg.system))


def _self_similar_tiling(cfg: RunConfig, operation: str) -> TilingSpec:
    system = _load_system(cfg)
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, operation)
    return build_tiling(system)


def _zeta_model(cfg: RunConfig) -> ZetaModel:
    """Геометрическая модель замощения или модель по коэффициентам для конфигов без геометрии."""
    text = read_system_config(cfg.system)
    try:
        system = load_system(text)
    except GeometryUnsupportedError:
        return load_zeta_model(text)
    if not system.is_self_similar:
        raise NotSelfSimilarError(system.name, "дзета-функция")
    return geometric_model(build_tiling(system))


# =========================
# Команды
# =========================


def cmd_validate(cfg: RunConfig) -> ExitCode:
    """Код 0, только если выполнены условия tileset и нетривиальности."""
    system = _load_system(cfg)
    hull = estimate_hull(system).require_stable().hull
    report = validate(system, hull)
    _emit(_envelope(cfg, system.name, IfsMapper.validation_to_schema(system, report)), cfg.out)
    if not report.admissible:
        for pair in report.offending_pairs:
            logger.warning(
                "Образы {} и {} пересекаются по площади {:.6g}", pair.j, pair.l, pair.overlap_area
            )
        return ExitCode.DOMAIN
    return ExitCode.OK


def cmd_hull(cfg: RunConfig) -> ExitCode:
    system = _load_system(cfg)
    estimate = estimate_hull(system)
    _emit(_envelope(cfg, system.name, IfsMapper.hull_to_schema(system, estimate)), cfg.out)
    return ExitCode.OK if estimate.stabilized else ExitCode.DOMAIN


def cmd_tiles(cfg: RunConfig) -> ExitCode:
    """Манифест плиток (JSON) и, при ``--out``, рисунок SVG.

    С ``--out`` рисунок пишется в указанный файл, манифест рядом в
    ``<имя>.manifest.json``; без него манифест идёт в stdout.
    """
    spec = build_tiling(_load_system(cfg))
    tiles = select_tiles(spec, cfg.tiles_depth, cfg.r_min)
    structure = verify_structure(spec, cfg.k_max) if cfg.k_max else None
    manifest = _envelope(cfg, spec.system.name, TilingMapper.tiling_to_schema(spec, tiles, structure))

    if cfg.out is None:
        _emit(manifest, None)
    else:
        metadata = dump_json(build_metadata(cfg, spec.system.name)).decode("utf-8")
        svg = render_svg(spec, depth=cfg.tiles_depth, r_min=cfg.r_min, metadata=metadata)
        _emit(svg, cfg.out)
        _emit(manifest, _sidecar(cfg.out, "manifest"))
    logger.success("Замощение {}: {} плиток", spec.system.name, len(tiles))

    if structure is not None and not structure.ok:
        logger.warning("Проверка структуры {} не пройдена", spec.system.name)
        return ExitCode.DOMAIN
    return ExitCode.OK


def cmd_render(cfg: RunConfig) -> ExitCode:
    spec = build_tiling(_load_system(cfg))
    metadata = dump_json(build_metadata(cfg, spec.system.name)).decode("utf-8")
    _emit(render_svg(spec, depth=cfg.tiles_depth, r_min=cfg.r_min, metadata=metadata), cfg.out)
    return ExitCode.OK


def cmd_dims(cfg: RunConfig) -> ExitCode:
    model = _zeta_model(cfg)
    if cfg.window_re is not None:
        window = SearchWindow(
            re_min=cfg.window_re[0],
            re_max=cfg.window_re[1],
            im_max=cfg.window_im or settings_fractile.spectra.window_im,
        )
    else:
        window = default_window(model, cfg.window_im)
    report = complex_dimensions(model, window, cfg.method)
    _emit(_envelope(cfg, model.name, SpectraMapper.spectrum_to_schema(report)), cfg.out)
    logger.success(
        "Размерности {}: D={:.10f}, полюсов {}", model.name, report.dimension, len(report.poles)
    )
    return ExitCode.OK


def _zeta_value(model: ZetaModel, s: complex) -> SZetaValue:
    point = SpectraMapper.complex_to_schema(s)
    try:
        value_s = zeta_s(model, s)
    except NearPoleError as exc:
        logger.warning("{}", str(exc))
        return SZetaValue(s=point, near_pole=True)
    if model.kind is not ZetaKind.GEOMETRIC:
        return SZetaValue(s=point, zeta_s=SpectraMapper.complex_to_schema(value_s))
    return SZetaValue(
        s=point,
        zeta_s=SpectraMapper.complex_to_schema(value_s),
        zeta_g=SpectraMapper.complex_to_schema(zeta_g(model, s)),
        zeta_g_terms=[SpectraMapper.complex_to_schema(t) for t in zeta_g_terms(model, s)],
    )


def cmd_zeta_eval(cfg: RunConfig) -> ExitCode:
    """``ζ_s`` и ``ζ_g`` в точках ``--at``; по умолчанию в ``s = D + 1``."""
    model = _zeta_model(cfg)
    dimension = real_dimension(model)
    points = [complex(re, im) for re, im in cfg.s_values] or [complex(dimension + 1.0)]
    report = SZetaEvaluation(
        system=model.name,
        D=dimension,
        values=[_zeta_value(model, s) for s in points],
    )
    _emit(_envelope(cfg, model.name, report), cfg.out)
    return ExitCode.OK


def cmd_tube(cfg: RunConfig) -> ExitCode:
    """Кривая ``V(ε)`` в CSV и сводка с наклоном.

    С ``--out`` сводка пишется рядом в ``<имя>.summary.json``.
    """
    spec = _self_similar_tiling(cfg, "объём трубки")
    curve = tube_curve(
        spec,
        cfg.eps_max,
        cfg.eps_min,
        points_per_decade=cfg.ppd,
        path=cfg.path,
        mc_samples=cfg.samples if cfg.mc else None,
        seed=cfg.seed,
    )
    model = geometric_model(spec)
    dimension = real_dimension(model)
    slope = None
    slope_error = None
    try:
        slope = asymptotic_slope(curve, model)
    except InsufficientRangeError as exc:
        slope_error = str(exc)
        logger.warning("Наклон не оценён: {}", slope_error)
    summary = TubeMapper.curve_to_schema(spec.system.name, curve, dimension, slope, slope_error)

    buffer = io.StringIO()
    write_curve_csv(curve, buffer)
    _emit(buffer.getvalue(), cfg.out)
    if cfg.out is not None:
        _emit(_envelope(cfg, spec.system.name, summary), _sidecar(cfg.out, "summary"))
    if slope is not None:
        logger.success(
            "Трубка {}: наклон {:.4f}, ожидается {:.4f}",
            spec.system.name,
            slope.slope,
            2.0 - dimension,
        )
    return ExitCode.OK


COMMANDS: dict[Command, CommandHandler] = {
    Command.VALIDATE: cmd_validate,
    Command.HULL: cmd_hull,
    Command.TILES: cmd_tiles,
    Command.RENDER: cmd_render,
    Command.DIMS: cmd_dims,
    Command.ZETA_EVAL: cmd_zeta_eval,
    Command.TUBE: cmd_tube,
}
