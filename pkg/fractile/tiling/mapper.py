from collections.abc import Iterable

from fractile.ifs.mapper import IfsMapper
from fractile.tiling.domain import StructureReport, TileHandle, TilingSpec
from fractile.tiling.schemas import SGenerator, SStructureReport, STile, STilingReport


class TilingMapper:
    """Преобразование замощения и плиток в схемы отчётов."""

    @staticmethod
    def tile_to_schema(tile: TileHandle) -> STile:
        return STile(
            word=list(tile.word),
            q=tile.q,
            level=tile.level,
            inradius=tile.inradius,
            scale=tile.scale,
        )

    @staticmethod
    def structure_to_schema(report: StructureReport) -> SStructureReport:
        return SStructureReport(
            k_max=report.k_max,
            propagation_gaps=list(report.propagation_gaps),
            recursion_gaps=list(report.recursion_gaps),
            completeness_gap=report.completeness_gap,
            subselfaffine_gap=report.subselfaffine_gap,
            component_counts=list(report.component_counts),
            expected_counts=list(report.expected_counts),
            tile_counts=list(report.tile_counts),
            tolerance=report.tolerance,
            counts_match=report.counts_match,
            ok=report.ok,
        )

    @staticmethod
    def tiling_to_schema(
        spec: TilingSpec,
        tiles: Iterable[TileHandle],
        structure: StructureReport | None = None,
    ) -> STilingReport:
        return STilingReport(
            validation=IfsMapper.validation_to_schema(spec.system, spec.validation),
            hull_vertices=[tuple(map(float, v)) for v in spec.hull.vertices],
            generators=[
                SGenerator(
                    q=q,
                    area=g.area,
                    perimeter=g.perimeter,
                    inradius=g.inradius,
                    incenter=g.incenter.to_tuple(),
                    is_convex=g.is_convex,
                    cells=g.cell_count,
                )
                for q, g in enumerate(spec.generators, start=1)
            ],
            total_tile_area=spec.total_tile_area,
            approximate=spec.is_approximate,
            tiles=[TilingMapper.tile_to_schema(t) for t in tiles],
            structure=(
                TilingMapper.structure_to_schema(structure) if structure is not None else None
            ),
        )
