"""SVG-рисунок замощения: оболочка и плитки, окрашенные по уровню."""

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np
from loguru import logger

from fractile.tiling.domain import TilingSpec
from fractile.tiling.services import select_tiles, tile_polygons

_PADDING = 0.05


@dataclass(frozen=True)
class SvgStyle:
    """Оформление рисунка.

    Attributes
        palette (tuple[str, ...]): Цвета уровней (по кругу).
        hull_stroke (str): Цвет контура оболочки.
        tile_stroke (str): Цвет контура плиток.
        stroke_width (float): Толщина линий в долях диаметра оболочки.
        width_px (int): Ширина рисунка в пикселях.

    """

    palette: tuple[str, ...] = field(
        default=("#1f4e79", "#2e75b6", "#9dc3e6", "#f4b183", "#c55a11", "#7f6000")
    )
    hull_stroke: str = "#000000"
    tile_stroke: str = "#202020"
    stroke_width: float = 0.002
    width_px: int = 800

    def color(self, level: int) -> str:
        return self.palette[(level - 1) % len(self.palette)]


def _num(value: float) -> str:
    return f"{value:.10g}"


def _points_attr(vertices: np.ndarray) -> str:
    # Ось y в SVG направлена вниз.
    return " ".join(f"{_num(x)},{_num(-y)}" for x, y in vertices)


def render_svg(
    spec: TilingSpec,
    depth: int | None = None,
    r_min: float | None = None,
    style: SvgStyle | None = None,
    metadata: str | None = None,
) -> str:
    """Рисует оболочку и плитки до уровня ``depth`` или радиуса ``r_min``.

    Плитки группируются по одной ``<g>`` на плитку в порядке уровня, слова
    и ``q``; при ``depth = 0`` рисуется только оболочка. Окно просмотра это
    охватывающий прямоугольник оболочки с полями 5%.
    ``metadata`` (обычно JSON) кладётся в элемент ``<metadata>``.

    Returns
        str: Документ SVG 1.1.

    Raises
        BudgetExceededError: Плиток больше лимита.

    """
    style = style or SvgStyle()
    hull = spec.hull
    xmin, ymin, xmax, ymax = hull.bbox
    pad = _PADDING * max(xmax - xmin, ymax - ymin)
    width = xmax - xmin + 2 * pad
    height = ymax - ymin + 2 * pad
    stroke = style.stroke_width * hull.diameter
    height_px = max(1, round(style.width_px * height / width))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{style.width_px}" height="{height_px}" '
            f'viewBox="{_num(xmin - pad)} {_num(-ymax - pad)} {_num(width)} {_num(height)}">'
        ),
        f"  <title>{spec.system.name}</title>",
    ]
    if metadata is not None:
        lines.append(f"  <metadata>{escape(metadata)}</metadata>")

    count = 0
    for tile in select_tiles(spec, depth, r_min):
        word = "".join(str(j) for j in tile.word) or "-"
        lines.append(
            f'  <g class="tile" data-level="{tile.level}" data-word="{word}" '
            f'data-q="{tile.q}" fill="{style.color(tile.level)}" '
            f'stroke="{style.tile_stroke}" stroke-width="{_num(stroke / 2)}">'
        )
        for cell in tile_polygons(spec, tile):
            lines.append(f'    <polygon points="{_points_attr(cell.vertices)}" />')
        lines.append("  </g>")
        count += 1

    lines.append(
        f'  <polygon class="hull" points="{_points_attr(hull.vertices)}" fill="none" '
        f'stroke="{style.hull_stroke}" stroke-width="{_num(stroke)}" />'
    )
    lines.append("</svg>")
    logger.debug("SVG {}: {} плиток", spec.system.name, count)
    return "\n".join(lines) + "\n"
