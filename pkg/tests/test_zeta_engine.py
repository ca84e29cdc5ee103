"""Tests für Walk-Zeta, Kurokawa-Form und die absolute Zeta-Funktion."""
from fractions import Fraction
import math

import mpmath
import pytest

from cyclewalk.errors import ArithmeticDomainError, SpecError
from cyclewalk.libs.exact_arith import ONE, X, RationalFunction, RationalPolynomial
from cyclewalk.walk_builder import WalkSpec
from cyclewalk.zeta_engine import (
    KurokawaForm,
    absolute_zeta_descriptor,
    direct_zeta_denominator,
    eval_multiple_hurwitz,
    eval_Zf_mellin,
    lattice_counts,
    recognize_kurokawa,
    walk_zeta,
    walk_zeta_closed_form,
)
import cyclewalk.zeta_engine as zeta_engine


def spec(family="M", L=3, N=3):
    return WalkSpec(family=family, states=L, vertices=N)


# ============================================================================
# Walk-Zeta
# ============================================================================

@pytest.mark.parametrize("L", [3, 5])
def test_walk_zeta_matches_closed_form(L):
    zeta = walk_zeta(spec("M", L, L))
    assert zeta.as_rational_function() == walk_zeta_closed_form(L)
    assert zeta.denominator.coeff(0) == 1


@pytest.mark.parametrize("family, L, N", [("M", 3, 2), ("F", 3, 4), ("F", 5, 3)])
def test_reversal_matches_direct_determinant(family, L, N):
    s = spec(family, L, N)
    assert walk_zeta(s, verify_direct=False).denominator == direct_zeta_denominator(s)


def test_closed_form_rejects_even_states():
    with pytest.raises(SpecError):
        walk_zeta_closed_form(4)


# ============================================================================
# Kurokawa-Form
# ============================================================================

def test_l3_kurokawa_parameters():
    form = recognize_kurokawa(walk_zeta_closed_form(3))
    assert form == KurokawaForm(sign=-1, l=0, m_list=(1,), n_list=(2, 2, 3, 3))
    assert form.theorem_conformant


@pytest.mark.parametrize("L", [5, 7])
def test_kurokawa_parameters_for_larger_l(L):
    form = recognize_kurokawa(walk_zeta_closed_form(L))
    assert form.sign == -1
    assert form.m_list == (1,) * (L - 2)
    assert form.n_list == (2,) * (L - 1) + (L,) * (L - 1)


def test_recognition_of_monomial_factor():
    # x·(x² - 1)/(x - 1) = x^{2/2}·(x² - 1)/(x - 1)
    r = RationalFunction(RationalPolynomial([0, -1, 0, 1]), RationalPolynomial([-1, 1]))
    form = recognize_kurokawa(r)
    assert form == KurokawaForm(sign=1, l=2, m_list=(2,), n_list=(1,))
    assert form.expand() == r


def test_recognition_uses_divisor_inversion():
    # Φ_6 = (x^6 - 1)(x - 1) / ((x^3 - 1)(x^2 - 1))
    r = RationalFunction(RationalPolynomial([1, -1, 1]), ONE)
    form = recognize_kurokawa(r)
    assert sorted(form.m_list) == [1, 6]
    assert sorted(form.n_list) == [2, 3]
    assert form.expand() == r


def test_recognition_failures():
    assert recognize_kurokawa(RationalFunction(ONE, RationalPolynomial([-1, -1, 1]))) is None
    assert recognize_kurokawa(RationalFunction(RationalPolynomial([2]), X - 1)) is None
    assert recognize_kurokawa(RationalFunction(RationalPolynomial(), X - 1)) is None
    with pytest.raises(ArithmeticDomainError):
        recognize_kurokawa(RationalFunction(ONE, RationalPolynomial([1, Fraction(1, 2)])))


def test_form_validation():
    with pytest.raises(SpecError):
        KurokawaForm(sign=2, l=0, m_list=(), n_list=(1,))
    with pytest.raises(SpecError):
        KurokawaForm(sign=1, l=1, m_list=(), n_list=(1,))
    with pytest.raises(SpecError):
        KurokawaForm(sign=1, l=0, m_list=(0,), n_list=(1,))


# ============================================================================
# Deskriptor
# ============================================================================

def test_l3_descriptor():
    desc = absolute_zeta_descriptor(KurokawaForm(sign=-1, l=0, m_list=(1,), n_list=(2, 2, 3, 3)))
    assert desc.omega == (2, 2, 3, 3)
    assert desc.deg_f == -9
    assert (desc.D, desc.C) == (-9, -1)
    assert [(t.subset_size, t.multiplicity, t.sign, t.offset) for t in desc.terms] == [(0, 1, -1, 9), (1, 1, 1, 10)]
    assert desc.signed_multiplicity_sum() == 0
    assert desc.factor_lists_consistent()
    assert "ζ_4(w, s+9, (2,2,3,3))" in desc.render_text()


@pytest.mark.parametrize("L", [5, 7, 9])
def test_descriptor_multiplicities_are_binomial(L):
    desc = absolute_zeta_descriptor(recognize_kurokawa(walk_zeta_closed_form(L)))
    assert desc.deg_f == -L * L
    assert desc.D == -L * L and desc.C == -1
    assert [t.multiplicity for t in desc.terms] == [math.comb(L - 2, i) for i in range(L - 1)]
    assert all(t.offset == L * L + t.subset_size for t in desc.terms)


def test_descriptor_limits():
    with pytest.raises(SpecError):
        absolute_zeta_descriptor(KurokawaForm(sign=1, l=0, m_list=(1,), n_list=()))
    with pytest.raises(SpecError):
        absolute_zeta_descriptor(KurokawaForm(sign=1, l=0, m_list=(1,) * 21, n_list=(1,)))


# ============================================================================
# Numerik
# ============================================================================

def test_lattice_counts():
    assert list(lattice_counts([1, 1], 4)) == [1, 2, 3, 4, 5]
    assert list(lattice_counts([2, 3], 7)) == [1, 0, 1, 1, 1, 1, 2, 1]


def test_hurwitz_reproduces_riemann_values():
    assert abs(eval_multiple_hurwitz(2, 1, [1], 1e-4) - math.pi ** 2 / 6) < 1e-4
    assert abs(eval_multiple_hurwitz(4, 1, [1], 1e-8) - math.pi ** 4 / 90) < 1e-8
    # ζ_2(w, 1, (1,1)) = ζ(w - 1)
    assert abs(eval_multiple_hurwitz(5, 1, [1, 1], 1e-8) - math.pi ** 4 / 90) < 1e-8
    assert abs(eval_multiple_hurwitz(3, 0.5, [1], 1e-8) - float(mpmath.zeta(3, 0.5))) < 1e-8


@pytest.mark.parametrize("w, x, omega, tol", [(1, 1, [1], 1e-4), (3, 0, [1], 1e-4), (3, 1, [0], 1e-4), (3, 1, [1], 0)])
def test_hurwitz_preconditions(w, x, omega, tol):
    with pytest.raises(SpecError):
        eval_multiple_hurwitz(w, x, omega, tol)


def test_hurwitz_radius_is_capped_near_convergence_edge():
    with pytest.raises(ArithmeticDomainError):
        eval_multiple_hurwitz(1.001, 1, [1], 1e-12)


def test_hurwitz_radius_cap_comes_from_config(monkeypatch):
    monkeypatch.setattr(zeta_engine, "HURWITZ_MAX_RADIUS", 128)
    with pytest.raises(ArithmeticDomainError):
        eval_multiple_hurwitz(2, 1, [1], 1e-4)
    assert abs(eval_multiple_hurwitz(6, 1, [1], 1e-4) - math.pi ** 6 / 945) < 1e-4


def test_mellin_of_simple_pole_is_hurwitz():
    form = KurokawaForm(sign=1, l=0, m_list=(), n_list=(1,))
    value = eval_Zf_mellin(form, 3.0, 2.0, 1e-6)
    assert abs(value - float(mpmath.zeta(3, 3))) < 1e-6


def test_mellin_matches_subset_series_for_l3():
    form = recognize_kurokawa(walk_zeta_closed_form(3))
    desc = absolute_zeta_descriptor(form)
    for w, s in ((6.0, 1.0), (6.0, -8.0)):
        mellin = eval_Zf_mellin(form, w, s, 1e-4)
        series = desc.subset_series(w, s, 1e-4)
        assert abs(mellin - series) < 2e-4


def test_mellin_preconditions():
    form = KurokawaForm(sign=-1, l=0, m_list=(1,), n_list=(2, 2, 3, 3))
    with pytest.raises(SpecError):
        eval_Zf_mellin(form, 3.0, 1.0, 1e-4)
    with pytest.raises(SpecError):
        eval_Zf_mellin(form, 6.0, -9.0, 1e-4)
