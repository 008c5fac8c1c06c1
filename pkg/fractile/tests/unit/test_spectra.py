import math

import numpy as np
import pytest

from fractile.app_error.base_error import (
    NearPoleError,
    NotLatticeError,
    NotSelfSimilarError,
    NotSimpleError,
    WindowTooLargeError,
)
from fractile.ifs.services import bundled_config_path, load_bundled, load_system, load_zeta_model
from fractile.spectra.domain import MeasureKind, SearchWindow, ZetaKind, ZetaModel
from fractile.spectra.mapper import SpectraMapper
from fractile.spectra.measures import (
    geometric_measure,
    geometric_model,
    mellin,
    mellin_tail_bound,
    scaling_measure,
    scaling_model,
)
from fractile.spectra.poles import (
    SearchMethod,
    complex_dimensions,
    default_window,
    residue_check,
)
from fractile.spectra.zeta import (
    detect_lattice,
    real_dimension,
    zeta_g,
    zeta_g_terms,
    zeta_s,
)

pytestmark = pytest.mark.spectra

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

HALF_QUARTER = ZetaModel(name="half_quarter", ratios=(0.5, 0.25))

LATTICE_MODELS = [
    "gasket",
    "koch_standard",
    "pentagasket",
    "carpet",
    "menger_ratios_only",
    "half_quarter",
]
SCALING_MODELS = [*LATTICE_MODELS, "koch_nonlattice"]


def model_by_name(name: str) -> ZetaModel:
    if name == "half_quarter":
        return HALF_QUARTER
    if name == "menger_ratios_only":
        return load_zeta_model(bundled_config_path(name).read_bytes())
    return scaling_model(load_bundled(name))


def search_height(name: str) -> float:
    # Поиск по принципу аргумента дороже, окно ниже.
    return 30.0 if name in LATTICE_MODELS else 10.0


# =========================
# Размерность и ζ_s
# =========================


@pytest.mark.parametrize(
    ("name", "dimension"),
    [
        ("gasket", math.log(3) / math.log(2)),
        ("koch_standard", math.log(4) / math.log(3)),
        ("pentagasket", math.log(5) / (2 * math.log(GOLDEN))),
        ("carpet", math.log(8) / math.log(3)),
    ],
)
def test_real_dimension_of_bundled_systems(name, dimension):
    model = scaling_model(load_bundled(name))

    assert real_dimension(model) == pytest.approx(dimension, rel=1e-12)


def test_real_dimension_ratios_only():
    model = load_zeta_model(bundled_config_path("menger_ratios_only").read_bytes())

    assert real_dimension(model) == pytest.approx(math.log(20) / math.log(3), rel=1e-12)


def test_real_dimension_golden_ratio():
    # 1/2 + 1/4 в степени D равно 1 при 2^{−D} = 1/φ.
    expected = math.log(GOLDEN) / math.log(2)

    assert real_dimension(HALF_QUARTER) == pytest.approx(expected, rel=1e-12)


def test_real_dimension_single_map():
    assert real_dimension(ZetaModel(name="one", ratios=(0.5,))) == 0.0


def test_zeta_s_values():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))

    assert zeta_s(model, 2.0) == pytest.approx(4.0)
    assert zeta_s(model, complex(2.0, 1.0)) == pytest.approx(
        1.0 / (1.0 - 3.0 * 2.0 ** complex(-2.0, -1.0))
    )


def test_zeta_s_near_pole():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))

    with pytest.raises(NearPoleError):
        zeta_s(model, real_dimension(model))


def test_zeta_g_is_numerator_times_zeta_s(gasket_spec):
    model = geometric_model(gasket_spec)
    g = gasket_spec.generator_inradii[0]
    s = complex(2.5, 0.7)

    assert model.kind is ZetaKind.GEOMETRIC
    assert zeta_g(model, s) == pytest.approx(g**s * zeta_s(model, s))
    assert zeta_g_terms(model, s) == pytest.approx((zeta_g(model, s),))


def test_scaling_model_requires_similarities():
    text = """
    {"name": "shear", "maps": [
        {"type": "affine", "matrix": [[0.5, 0.1], [0.0, 0.4]]},
        {"type": "affine", "matrix": [[0.5, 0.0], [0.0, 0.4]], "translation": [0.5, 0.0]}
    ]}
    """

    with pytest.raises(NotSelfSimilarError):
        scaling_model(load_system(text))


@pytest.mark.parametrize("ratios", [(), (0.5, 1.0), (0.0, 0.5)])
def test_zeta_model_rejects_bad_ratios(ratios):
    with pytest.raises(ValueError):
        ZetaModel(name="x", ratios=ratios)


# =========================
# Решётчатость
# =========================


def test_detect_lattice_gasket():
    lattice = detect_lattice(ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5)))

    assert lattice.is_lattice
    assert lattice.base == pytest.approx(0.5)
    assert lattice.exponents == (1, 1, 1)
    assert lattice.period == pytest.approx(2 * math.pi / math.log(2))


def test_detect_lattice_mixed_exponents():
    lattice = detect_lattice(ZetaModel(name="x", ratios=(0.25, 0.125)))

    assert lattice.is_lattice
    assert lattice.base == pytest.approx(0.5)
    assert lattice.exponents == (2, 3)


def test_detect_lattice_nonlattice(koch):
    nonlattice = scaling_model(load_bundled("koch_nonlattice"))

    assert not detect_lattice(nonlattice).is_lattice
    assert detect_lattice(scaling_model(koch)).is_lattice


# =========================
# Меры и преобразование Меллина
# =========================


def test_scaling_measure_gasket():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))

    measure = scaling_measure(model, 0.125)

    assert [a.location for a in measure.atoms] == pytest.approx([1.0, 2.0, 4.0, 8.0])
    assert [a.weight for a in measure.atoms] == [1, 3, 9, 27]
    assert measure.kind is MeasureKind.SCALING
    assert measure.min_excluded_length == 4


def test_scaling_measure_merges_equal_products():
    measure = scaling_measure(HALF_QUARTER, 0.25)

    # Слова 11 и 2 дают одно произведение 1/4.
    assert [(a.location, a.weight) for a in measure.atoms] == [(1.0, 1), (2.0, 1), (4.0, 2)]


def test_mellin_tail_bound_is_exact_for_equal_ratios():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))
    measure = scaling_measure(model, 0.125)

    partial = mellin(measure, 2.0)
    bound = mellin_tail_bound(model, measure, 2.0)

    assert partial == pytest.approx(2.734375)
    assert bound == pytest.approx(zeta_s(model, 2.0).real - partial.real)


def test_mellin_converges_to_zeta_s():
    s = complex(1.5, 3.0)
    measure = scaling_measure(HALF_QUARTER, 1e-6)

    gap = abs(mellin(measure, s) - zeta_s(HALF_QUARTER, s))

    assert gap <= mellin_tail_bound(HALF_QUARTER, measure, s.real) * (1 + 1e-9)


def test_mellin_tail_bound_diverges_left_of_dimension():
    measure = scaling_measure(HALF_QUARTER, 0.01)

    assert mellin_tail_bound(HALF_QUARTER, measure, 0.5) == math.inf


def test_scaling_measure_rejects_bad_threshold():
    with pytest.raises(ValueError):
        scaling_measure(HALF_QUARTER, 1.5)


def test_geometric_measure_gasket(gasket_spec):
    model = geometric_model(gasket_spec)
    g = model.generator_inradii[0]

    measure = geometric_measure(model, g / 4)

    assert measure.kind is MeasureKind.GEOMETRIC_TOTAL
    assert [a.weight for a in measure.atoms] == [1, 3, 9]
    assert measure.atoms[0].location == pytest.approx(1.0 / g)
    s = complex(3.0, 1.0)
    gap = abs(mellin(measure, s) - zeta_g(model, s))
    assert gap <= mellin_tail_bound(model, measure, 3.0) * (1 + 1e-9)


def test_geometric_measure_single_generator(pentagasket_spec):
    model = geometric_model(pentagasket_spec)
    rho = model.generator_inradii[1] / 2

    only_second = geometric_measure(model, rho, generator=2)
    total = geometric_measure(model, rho)

    assert only_second.kind is MeasureKind.GEOMETRIC
    assert only_second.generator == 2
    assert only_second.total_weight < total.total_weight


def test_geometric_measure_needs_inradii():
    with pytest.raises(ValueError):
        geometric_measure(HALF_QUARTER, 0.1)


def test_geometric_measure_atom_locations(gasket_spec):
    model = geometric_model(gasket_spec)
    g = model.generator_inradii[0]

    measure = geometric_measure(model, g / 2)

    assert [a.location for a in measure.atoms] == pytest.approx([1.0 / g, 2.0 / g])
    assert [a.weight for a in measure.atoms] == [1, 3]
    assert measure.min_excluded_length == 2


def random_points_right_of(dimension: float, seed: int, count: int = 20) -> list[complex]:
    rng = np.random.Generator(np.random.Philox(key=seed))
    re = rng.uniform(dimension + 0.2, dimension + 2.2, size=count)
    im = rng.uniform(-30.0, 30.0, size=count)
    return [complex(x, y) for x, y in zip(re, im, strict=True)]


@pytest.mark.parametrize("name", SCALING_MODELS)
def test_scaling_measure_matches_zeta_s(name):
    model = model_by_name(name)
    measure = scaling_measure(model, 1e-5)

    for s in random_points_right_of(real_dimension(model), seed=21):
        gap = abs(mellin(measure, s) - zeta_s(model, s))
        assert gap <= mellin_tail_bound(model, measure, s.real) * (1 + 1e-9) + 1e-10


@pytest.mark.parametrize("fixture", ["gasket_spec", "koch_spec", "pentagasket_spec", "carpet_spec"])
def test_geometric_measure_matches_zeta_g(request, fixture):
    model = geometric_model(request.getfixturevalue(fixture))
    measure = geometric_measure(model, min(model.generator_inradii) * 1e-4)

    for s in random_points_right_of(real_dimension(model), seed=22):
        gap = abs(mellin(measure, s) - zeta_g(model, s))
        assert gap <= mellin_tail_bound(model, measure, s.real) * (1 + 1e-9) + 1e-10


# =========================
# Вычеты
# =========================


def test_residue_check_gasket_dimension():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))

    check = residue_check(model, real_dimension(model))

    assert check.order == 1
    assert check.agrees
    assert check.closed_form == pytest.approx(1.0 / math.log(2))


def test_residue_check_not_a_pole():
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))

    with pytest.raises(NotSimpleError):
        residue_check(model, complex(0.3, 0.1))


# =========================
# Комплексные размерности
# =========================


def test_gasket_dimensions_on_lattice_line(fake_logger):
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))
    window = default_window(model, 40.0)

    report = complex_dimensions(model, window)

    d = math.log(3) / math.log(2)
    period = 2 * math.pi / math.log(2)
    assert report.method == SearchMethod.LATTICE.value
    assert len(report.poles) == 9
    for pole in report.poles:
        assert pole.omega.real == pytest.approx(d)
        assert pole.residue == pytest.approx(1.0 / math.log(2))
        assert pole.check.agrees
    assert sorted(p.lattice_index for p in report.poles) == list(range(-4, 5))
    assert [p.omega.imag for p in report.poles] == pytest.approx(
        [n * period for n in range(-4, 5)], abs=1e-9
    )
    assert sum(p.is_real_dimension for p in report.poles) == 1


def test_half_quarter_has_two_lattice_lines(fake_logger):
    report = complex_dimensions(HALF_QUARTER, default_window(HALF_QUARTER, 30.0))

    assert len(report.poles) == 13
    lines = {p.lattice_line for p in report.poles}
    assert len(lines) == 2
    # Прямые Re s = D и Re s = −D.
    d = report.dimension
    assert {round(p.omega.real, 9) for p in report.poles} == {round(d, 9), round(-d, 9)}
    assert report.poles[0].omega.real == pytest.approx(d)


def test_argument_method_agrees_with_lattice(fake_logger):
    window = SearchWindow(re_min=-1.0, re_max=1.7, im_max=20.0)

    lattice = complex_dimensions(HALF_QUARTER, window, SearchMethod.LATTICE)
    argument = complex_dimensions(HALF_QUARTER, window, SearchMethod.ARGUMENT)

    assert not argument.unresolved
    assert len(argument.poles) == len(lattice.poles)
    for a, b in zip(argument.poles, lattice.poles, strict=True):
        assert a.omega == pytest.approx(b.omega, abs=1e-9)


def test_nonlattice_dimensions(fake_logger):
    model = scaling_model(load_bundled("koch_nonlattice"))
    window = default_window(model, 15.0)

    report = complex_dimensions(model, window)

    assert report.method == SearchMethod.ARGUMENT.value
    assert not report.lattice.is_lattice
    assert report.poles[0].is_real_dimension
    for pole in report.poles:
        assert abs(model.scaling_sum(pole.omega) - 1.0) <= 1e-10
        assert pole.omega.real <= report.dimension + 1e-9
    imag = sorted(p.omega.imag for p in report.poles)
    assert imag == pytest.approx(sorted(-x for x in imag), abs=1e-9)


def test_lattice_method_on_nonlattice_model():
    model = scaling_model(load_bundled("koch_nonlattice"))

    with pytest.raises(NotLatticeError):
        complex_dimensions(model, method="lattice")


def test_window_height_limit():
    window = SearchWindow(re_min=0.0, re_max=2.0, im_max=5000.0)

    with pytest.raises(WindowTooLargeError):
        complex_dimensions(HALF_QUARTER, window)


def test_geometric_model_poles_match_scaling(gasket_spec, fake_logger):
    model = geometric_model(gasket_spec)

    report = complex_dimensions(model, default_window(model, 20.0))

    assert report.model.kind is ZetaKind.GEOMETRIC
    assert len(report.poles) == 5
    assert report.cancelled == ()
    assert report.numerator_zeros == ()


def test_spectrum_schema(fake_logger):
    model = ZetaModel(name="gasket", ratios=(0.5, 0.5, 0.5))
    report = complex_dimensions(model, default_window(model, 10.0))

    schema = SpectraMapper.spectrum_to_schema(report)

    assert schema.system == "gasket"
    assert schema.kind == "scaling"
    assert schema.lattice.exponents == [1, 1, 1]
    assert len(schema.poles) == 3
    assert schema.poles[0].residue_re == pytest.approx(1.0 / math.log(2))
    assert schema.D == pytest.approx(math.log(3) / math.log(2))


# =========================
# Свойства полюсов
# =========================


@pytest.mark.parametrize("name", SCALING_MODELS)
def test_dimension_is_the_only_real_pole(name, fake_logger):
    model = model_by_name(name)
    window = default_window(model, search_height(name))
    sigma = np.linspace(window.re_min, window.re_max, 1001)

    values = np.array([model.scaling_sum(x).real - 1.0 for x in sigma])
    report = complex_dimensions(model, window)

    assert np.count_nonzero(np.diff(np.sign(values)) != 0) == 1
    real_poles = [p for p in report.poles if abs(p.omega.imag) <= 1e-9]
    assert len(real_poles) == 1
    assert real_poles[0].is_real_dimension
    assert real_poles[0].omega.real == pytest.approx(report.dimension, abs=1e-9)


@pytest.mark.parametrize("name", LATTICE_MODELS)
def test_lattice_poles_repeat_with_period(name, fake_logger):
    model = model_by_name(name)
    height = 30.0

    report = complex_dimensions(model, default_window(model, height))

    period = report.lattice.period
    omegas = np.array([p.omega for p in report.poles])
    shifted = [
        p.omega + 1j * period for p in report.poles if p.omega.imag + period <= height - 1e-6
    ]
    assert shifted
    for omega in shifted:
        assert float(np.min(np.abs(omegas - omega))) <= 1e-8
        assert abs(model.scaling_sum(omega) - 1.0) <= 1e-9


@pytest.mark.parametrize("name", SCALING_MODELS)
def test_every_pole_solves_pole_equation(name, fake_logger):
    model = model_by_name(name)

    report = complex_dimensions(model, default_window(model, search_height(name)))

    assert report.poles
    for pole in report.poles:
        assert abs(model.scaling_sum(pole.omega) - 1.0) <= 1e-9
