from fractile.core.config import settings_fractile
from fractile.spectra.domain import ComplexDim, SpectrumReport
from fractile.spectra.schemas import (
    SComplexNumber,
    SLattice,
    SPole,
    SSpectrumReport,
    SUnresolved,
    SWindow,
)


class SpectraMapper:
    """Преобразование результатов поиска полюсов в схемы отчётов."""

    @staticmethod
    def complex_to_schema(value: complex) -> SComplexNumber:
        return SComplexNumber(re=value.real, im=value.imag)

    @staticmethod
    def pole_to_schema(dim: ComplexDim) -> SPole:
        return SPole(
            re=dim.omega.real,
            im=dim.omega.imag,
            order=dim.order,
            residue_re=dim.residue.real if dim.residue is not None else None,
            residue_im=dim.residue.imag if dim.residue is not None else None,
            cancelled=dim.cancelled,
            is_real_dimension=dim.is_real_dimension,
            lattice_line=dim.lattice_line,
            lattice_index=dim.lattice_index,
            contour_gap=dim.check.relative_gap if dim.check is not None else None,
        )

    @staticmethod
    def spectrum_to_schema(report: SpectrumReport) -> SSpectrumReport:
        spectra = settings_fractile.spectra
        lattice = report.lattice
        return SSpectrumReport(
            system=report.model.name,
            kind=report.model.kind.value,
            D=report.dimension,
            lattice=SLattice(
                is_lattice=lattice.is_lattice,
                base=lattice.base,
                exponents=list(lattice.exponents) if lattice.exponents else None,
                period=lattice.period,
            ),
            method=report.method,
            window=SWindow(
                re_min=report.window.re_min,
                re_max=report.window.re_max,
                im_max=report.window.im_max,
            ),
            poles=[SpectraMapper.pole_to_schema(p) for p in report.poles],
            cancelled=[SpectraMapper.pole_to_schema(p) for p in report.cancelled],
            zeros_of_numerator=[SpectraMapper.complex_to_schema(z) for z in report.numerator_zeros],
            unresolved=[
                SUnresolved(re=c.center.real, im=c.center.imag, count=c.count)
                for c in report.unresolved
            ],
            tolerances={
                "newton_tol": spectra.newton_tol,
                "residue_rel": spectra.residue_rel,
                "contour_radius": spectra.contour_radius,
                "min_cell_side": spectra.min_cell_side,
                "cancel_rel": spectra.cancel_rel,
            },
        )
