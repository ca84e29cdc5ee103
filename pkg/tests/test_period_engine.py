"""Tests für Periodenentscheidung, Zertifikate und Sweep."""
from fractions import Fraction
import math

import pytest

from cyclewalk.errors import InternalCheckError, SpecError
from cyclewalk.period_engine import (
    NonIntegerCoefficient,
    PeriodResult,
    coprime_certificate,
    decide_period,
    float_shadow_corroborates_infinite,
    fourth_power_check,
    period_by_power,
    rescaled_square_claim,
    square_certificate,
    sweep,
)
from cyclewalk.libs.exact_arith import RationalPolynomial
from cyclewalk.walk_builder import WalkSpec
import cyclewalk.period_engine as period_engine
import cyclewalk.spectral_engine as spectral_engine


def spec(family="M", L=3, N=3):
    return WalkSpec(family=family, states=L, vertices=N)


def test_m33_is_periodic_with_certificate():
    result = decide_period(spec("M", 3, 3))
    assert result.is_finite
    assert result.T == 6
    assert result.confirmed_by_power
    assert result.certificate_kind == "cyclotomic"
    assert result.certificate_detail == "{1:3;2:2;3:2}"


def test_f33_has_period_four():
    result = decide_period(spec("F", 3, 3))
    assert result.is_finite
    assert result.T == 4
    assert result.factors.is_complete()


@pytest.mark.parametrize("family", ["M", "F"])
def test_coprime_walk_has_non_integer_x1(family):
    result = decide_period(spec(family, 3, 2))
    assert result.verdict == "infinite"
    assert result.certificate == NonIntegerCoefficient(degree=1, value=Fraction(2, 3))
    assert result.certificate_kind == "non_integer_coeff"
    assert result.certificate_detail == "deg=1 val=2/3"


@pytest.mark.parametrize("L", [3, 5])
@pytest.mark.parametrize("family", ["M", "F"])
def test_period_table_small(family, L):
    for N in range(2, 8):
        result = decide_period(spec(family, L, N))
        if N == L:
            assert result.T == (2 * L if family == "M" else 4)
        else:
            assert result.verdict == "infinite"


@pytest.mark.slow
@pytest.mark.parametrize("family", ["M", "F"])
def test_period_table_diagonal_up_to_nine(family):
    for L in (7, 9):
        result = decide_period(spec(family, L, L))
        assert result.T == (2 * L if family == "M" else 4)
        assert result.confirmed_by_power


def test_power_check_finds_exact_period():
    s = spec("M", 3, 3)
    assert period_by_power(s, 6) == 6
    assert period_by_power(s, 5) is None
    assert period_by_power(spec("F", 5, 5), 4) == 4
    assert period_by_power(spec("M", 3, 2), 50) is None


def test_power_check_disagreement_is_internal_error(monkeypatch):
    monkeypatch.setattr(period_engine, "period_by_power", lambda s, t: None)
    with pytest.raises(InternalCheckError):
        decide_period(spec("M", 3, 3))


def test_decide_period_cross_checks_direct_determinant(monkeypatch):
    calls = []
    original = spectral_engine.direct_charpoly

    def counting(s):
        calls.append(s.label)
        return original(s)

    monkeypatch.setattr(spectral_engine, "direct_charpoly", counting)
    assert decide_period(spec("F", 3, 4)).T == 4
    assert calls == ["F,3,4"]


def test_decide_period_fails_on_wrong_direct_determinant(monkeypatch):
    monkeypatch.setattr(spectral_engine, "direct_charpoly",
                        lambda s: RationalPolynomial.x_power_minus_one(s.dimension))
    with pytest.raises(InternalCheckError):
        decide_period(spec("M", 3, 2))


def test_budget_skips_power_check(monkeypatch, caplog):
    monkeypatch.setattr(period_engine, "POWER_CHECK_BUDGET", 0)
    result = decide_period(spec("M", 3, 3))
    assert result.T == 6
    assert result.confirmed_by_power is False
    assert "unconfirmed-by-power" in caplog.text


def test_result_dict_round_trip():
    for s in (spec("M", 3, 3), spec("F", 3, 4)):
        result = decide_period(s)
        assert PeriodResult.from_dict(result.to_dict()) == result


@pytest.mark.parametrize("family", ["M", "F"])
@pytest.mark.parametrize("L", [3, 5, 7])
def test_coprime_certificates_are_non_integral(family, L):
    for N in range(2, 10):
        value = coprime_certificate(spec(family, L, N))
        if math.gcd(N, L) != 1:
            assert value is None
        else:
            assert value.denominator != 1


def test_coprime_certificate_values():
    assert coprime_certificate(spec("M", 3, 2)) == Fraction(2, 3)
    assert coprime_certificate(spec("M", 3, 4)) == Fraction(4, 3)
    assert coprime_certificate(spec("F", 3, 2)) == Fraction(2, 3)


@pytest.mark.parametrize("family", ["M", "F"])
def test_square_certificate_for_l_squared(family):
    cert = square_certificate(spec(family, 3, 9))
    assert cert.non_integral
    assert cert.to_dict()["degree"] == 3
    with pytest.raises(SpecError):
        square_certificate(spec(family, 3, 4))


@pytest.mark.parametrize("L", [3, 5, 7])
def test_f_sector_fourth_power_is_identity(L):
    assert fourth_power_check(spec("F", L, L))


def test_fourth_power_needs_f_diagonal():
    with pytest.raises(SpecError):
        fourth_power_check(spec("M", 3, 3))
    with pytest.raises(SpecError):
        fourth_power_check(spec("F", 3, 4))


def test_rescaled_square_entries_for_l3():
    for k in (1, 2):
        report = rescaled_square_claim(spec("F", 3, 3), k)
        assert report.diagonal_holds
        assert report.offdiagonal_holds
    with pytest.raises(SpecError):
        rescaled_square_claim(spec("F", 3, 3), 0)


def test_float_shadow():
    assert float_shadow_corroborates_infinite(spec("M", 3, 2), n_max=100)
    assert not float_shadow_corroborates_infinite(spec("M", 3, 3), n_max=100)


def test_sweep_grid_is_sorted_and_complete():
    specs = [spec(f, 3, N) for f in ("F", "M") for N in range(8, 1, -1)]
    cells = sweep(specs, jobs=1)
    assert len(cells) == 14
    assert [c.spec.sort_key() for c in cells] == sorted(s.sort_key() for s in specs)
    finite = [c.spec.label for c in cells if c.result.is_finite]
    assert finite == ["F,3,3", "M,3,3"]


def test_sweep_is_independent_of_worker_count():
    specs = [spec("M", 3, N) for N in range(2, 6)] + [spec("F", 5, 5)]
    sequential = [c.result for c in sweep(specs, jobs=1)]
    parallel = [c.result for c in sweep(specs, jobs=3)]
    assert parallel == sequential
