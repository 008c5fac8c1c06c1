from fractile.ifs.domain import HullEstimate, IfsSystem, ValidationReport
from fractile.ifs.schemas import SHullEstimate, SOverlapPair, SValidationReport


class IfsMapper:
    """Преобразование доменных объектов системы в схемы отчётов."""

    @staticmethod
    def validation_to_schema(system: IfsSystem, report: ValidationReport) -> SValidationReport:
        return SValidationReport(
            system=system.name,
            maps=system.size,
            is_self_similar=system.is_self_similar,
            contraction_ok=report.contraction_ok,
            tileset_ok=report.tileset_ok,
            offending_pairs=[
                SOverlapPair(j=p.j, l=p.l, overlap_area=p.overlap_area)
                for p in report.offending_pairs
            ],
            nontrivial_ok=report.nontrivial_ok,
            residual_area=report.residual_area,
            hull_area=report.hull_area,
            admissible=report.admissible,
        )

    @staticmethod
    def hull_to_schema(system: IfsSystem, estimate: HullEstimate) -> SHullEstimate:
        return SHullEstimate(
            system=system.name,
            vertices=[tuple(map(float, v)) for v in estimate.hull.vertices],
            area=estimate.hull.area,
            sample_depth=estimate.sample_depth,
            stabilization_gap=estimate.stabilization_gap,
            tolerance=estimate.tolerance,
            stabilized=estimate.stabilized,
        )
