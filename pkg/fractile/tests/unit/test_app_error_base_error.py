import pytest

from fractile.app_error.base_error import (
    AppError,
    BudgetError,
    BudgetExceededError,
    DepthCapError,
    DivergentTailError,
    DomainError,
    GeometryUnsupportedError,
    InputError,
    NearPoleError,
    NotAdmissibleError,
    NotContractiveError,
    NotSelfSimilarError,
    ParseError,
    TooFewMapsError,
    TooManyComponentsError,
    WindowTooLargeError,
)

# =========================
# AppError
# =========================


def test_app_error_str_without_cause():
    err = AppError("base error")

    assert str(err) == "base error"


def test_app_error_str_with_cause():
    cause = ValueError("boom")
    err = AppError("wrapped", cause=cause)

    assert str(err) == "wrapped (cause: boom)"
    assert err.cause is cause


# =========================
# Семейства ошибок
# =========================


@pytest.mark.parametrize(
    ("exc", "family"),
    [
        (ParseError("maps.0: field required"), InputError),
        (NotContractiveError(2, 1.5), InputError),
        (TooFewMapsError(1), InputError),
        (GeometryUnsupportedError("menger"), InputError),
        (NotAdmissibleError("x", False, True), DomainError),
        (NotSelfSimilarError("harmonic_gasket", "объём трубки"), DomainError),
        (NearPoleError(1 + 0j, 1e-16), DomainError),
        (DivergentTailError(1.0), DomainError),
        (DepthCapError(64), DomainError),
        (BudgetExceededError("слова", 10, 5), BudgetError),
        (TooManyComponentsError(20_000, 10_000), BudgetError),
        (WindowTooLargeError(2000.0, 1000.0), BudgetError),
    ],
)
def test_error_families(exc, family):
    assert isinstance(exc, family)
    assert isinstance(exc, AppError)


def test_parse_error_keeps_detail_and_cause():
    cause = ValueError("bad json")
    err = ParseError("maps", cause=cause)

    assert err.detail == "maps"
    assert str(err) == "Некорректный конфиг системы: maps (cause: bad json)"


def test_not_contractive_error_message():
    err = NotContractiveError(3, 1.25)

    assert err.index == 3
    assert err.spectral_bound == 1.25
    assert "Отображение 3 не сжимающее" in str(err)


def test_budget_exceeded_error_attributes():
    err = BudgetExceededError("узлы перебора плиток", 11, 10)

    assert (err.what, err.requested, err.limit) == ("узлы перебора плиток", 11, 10)
    assert str(err) == "Лимит превышен (узлы перебора плиток): 11 > 10"


def test_not_admissible_error_flags():
    err = NotAdmissibleError("tileset_counterexample", tileset_ok=False, nontrivial_ok=True)

    assert err.tileset_ok is False
    assert err.nontrivial_ok is True
    assert "tileset_ok=False" in str(err)
