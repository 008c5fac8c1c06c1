from fractile.tube.domain import SlopeEstimate, TubeCurve
from fractile.tube.schemas import SMonteCarloRun, SSlope, STubeSummary


class TubeMapper:
    """Преобразование кривой ``V(ε)`` в сводку."""

    @staticmethod
    def slope_to_schema(estimate: SlopeEstimate, dimension: float) -> SSlope:
        return SSlope(
            slope=estimate.slope,
            intercept=estimate.intercept,
            eps_lo=estimate.eps_lo,
            eps_hi=estimate.eps_hi,
            expected=2.0 - dimension,
            oscillation=estimate.oscillation,
        )

    @staticmethod
    def curve_to_schema(
        name: str,
        curve: TubeCurve,
        dimension: float,
        slope: SlopeEstimate | None = None,
        slope_error: str | None = None,
    ) -> STubeSummary:
        monte_carlo = None
        if curve.monte_carlo:
            first = curve.monte_carlo[0]
            monte_carlo = SMonteCarloRun(
                n_samples=first.n_samples,
                seed=first.seed,
                max_unresolved_fraction=max(m.unresolved_fraction for m in curve.monte_carlo),
            )
        return STubeSummary(
            system=name,
            path=curve.path.value,
            points=len(curve.points),
            eps_min=min(curve.eps_grid),
            eps_max=max(curve.eps_grid),
            total_area=curve.total_area,
            min_generator_inradius=curve.min_generator_inradius,
            D=dimension,
            approximate=curve.approximate,
            slope=TubeMapper.slope_to_schema(slope, dimension) if slope is not None else None,
            slope_error=slope_error,
            monte_carlo=monte_carlo,
        )
