import csv
from collections.abc import Iterator
from typing import TextIO

from fractile.tube.domain import TubeCurve

CSV_HEADER = ("eps", "V_exact", "V_mc", "mc_stderr", "head_tiles", "tail_mass")


def _num(value: float) -> str:
    return format(value, ".17g")


def curve_rows(curve: TubeCurve) -> Iterator[list[str]]:
    """Строки CSV в порядке сетки; колонки Монте-Карло пустые без оценок."""
    estimates = curve.monte_carlo or (None,) * len(curve.points)
    for point, mc in zip(curve.points, estimates, strict=True):
        yield [
            _num(point.eps),
            _num(point.value),
            _num(mc.estimate) if mc is not None else "",
            _num(mc.std_error) if mc is not None else "",
            str(point.head_tiles),
            _num(point.tail_mass),
        ]


def write_curve_csv(curve: TubeCurve, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(curve_rows(curve))
