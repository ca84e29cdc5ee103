"""Tests für Sektorpolynome, f_N und die Koeffizientenformeln."""
from fractions import Fraction
import logging
import pickle

import pytest
import sympy

from cyclewalk.errors import InternalCheckError
from cyclewalk.libs.cyclotomic import CyclotomicElement, cyclotomic_polynomial, root_power
from cyclewalk.libs.exact_arith import RationalPolynomial, poly_divrem, poly_mul
from cyclewalk.spectral_engine import (
    CycloPolynomial,
    check_coefficient_formulas,
    conjugate_symmetry_holds,
    direct_charpoly,
    full_charpoly,
    roots_on_unit_circle,
    sector_charpoly,
)
from cyclewalk.walk_builder import WalkSpec, evolution_matrix


def spec(family="M", L=3, N=3):
    return WalkSpec(family=family, states=L, vertices=N)


@pytest.mark.parametrize("L", [3, 5, 7])
def test_m_sectors_for_n_equal_l(L):
    s = spec("M", L, L)
    x_minus, x_plus = RationalPolynomial([-1, 1]), RationalPolynomial([1, 1])
    assert sector_charpoly(s, 0).to_rational() == poly_mul(x_minus, x_plus ** (L - 1))
    for k in range(1, L):
        assert sector_charpoly(s, k).to_rational() == RationalPolynomial.x_power_minus_one(L)


def test_f_zero_sectors():
    assert sector_charpoly(spec("F", 3, 2), 0).to_rational() == RationalPolynomial([1, -1, -1, 1])
    assert sector_charpoly(spec("F", 5, 2), 0).to_rational() == RationalPolynomial([-1, 1, 2, -2, -1, 1])


def test_m33_product_factorises_into_cyclotomics():
    bundle = full_charpoly(spec("M", 3, 3))
    expected = poly_mul(poly_mul(cyclotomic_polynomial(1) ** 3, cyclotomic_polynomial(2) ** 2),
                        cyclotomic_polynomial(3) ** 2)
    assert bundle.product == expected
    assert bundle.direct_checked
    assert len(bundle.sectors) == 3


def test_m32_product_has_rational_x1_coefficient():
    bundle = full_charpoly(spec("M", 3, 2))
    assert bundle.product.coeff(1) == Fraction(2, 3)
    assert bundle.product.coeff(0) == 1


@pytest.mark.parametrize("family", ["M", "F"])
@pytest.mark.parametrize("L, N", [(3, 2), (3, 4), (3, 6), (5, 3), (5, 4)])
def test_sector_product_equals_direct_determinant(family, L, N):
    s = spec(family, L, N)
    bundle = full_charpoly(s, verify_direct=False)
    assert bundle.product == direct_charpoly(s)
    assert bundle.product.is_monic()
    assert bundle.product.degree == L * N


@pytest.mark.parametrize("family", ["M", "F"])
def test_conjugate_sectors_and_unit_circle(family):
    bundle = full_charpoly(spec(family, 5, 4), verify_direct=False)
    assert conjugate_symmetry_holds(bundle)
    assert bundle.sectors[1] == bundle.sectors[3].conjugate()
    assert roots_on_unit_circle(bundle)


def test_parallel_sectors_match_sequential():
    s = spec("F", 5, 6)
    sequential = full_charpoly(s, verify_direct=False, jobs=1)
    parallel = full_charpoly(s, verify_direct=False, jobs=2)
    assert parallel.sectors == sequential.sectors
    assert parallel.product == sequential.product


@pytest.mark.parametrize("family", ["M", "F"])
@pytest.mark.parametrize("L", [3, 5, 7])
@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_coefficient_formulas_hold(family, L, N):
    s = spec(family, L, N)
    for k in range(N):
        poly = sector_charpoly(s, k)
        report = check_coefficient_formulas(s, k, poly)
        assert report.passed
        assert all(c.scale(L).is_integral() for c in poly.coeffs)


def test_printed_f_variants_are_reported_not_raised(caplog):
    with caplog.at_level(logging.WARNING):
        report = check_coefficient_formulas(spec("F", 3, 3), 0)
    assert report.passed
    degrees = {c.degree for c in report.discrepancies}
    assert degrees == {1}
    assert report.to_dict()["passed"] is True


def test_cyclo_polynomial_guards():
    with pytest.raises(InternalCheckError):
        CycloPolynomial(5, [root_power(4, 1)])
    with pytest.raises(InternalCheckError):
        CycloPolynomial(5, [root_power(5, 1), CyclotomicElement.one(5)]).to_rational()


def test_cyclo_polynomial_survives_pickling():
    poly = sector_charpoly(spec("M", 5, 7), 2)
    assert pickle.loads(pickle.dumps(poly)) == poly
    assert poly.is_monic() and poly.degree == 5


@pytest.mark.parametrize("family, L, N", [("M", 3, 2), ("F", 3, 3), ("M", 5, 2)])
def test_direct_charpoly_matches_sympy(family, L, N):
    u = evolution_matrix(spec(family, L, N))
    matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in u.entries])
    expected = [Fraction(int(c.p), int(c.q)) for c in matrix.charpoly().all_coeffs()[::-1]]
    assert list(direct_charpoly(spec(family, L, N)).coeffs) == expected


def _grid(max_dim=60):
    for family in ("M", "F"):
        for L in range(3, max_dim // 2 + 1, 2):
            yield family, L, [N for N in range(2, max_dim // L + 1)]


@pytest.mark.slow
def test_product_identity_on_full_grid():
    bad = []
    for family, L, vertices in _grid():
        for N in vertices:
            s = spec(family, L, N)
            if full_charpoly(s, verify_direct=False).product != direct_charpoly(s):
                bad.append(s.label)
    assert bad == []


@pytest.mark.slow
def test_divisibility_along_divisor_pairs():
    pairs = 0
    for family, L, vertices in _grid():
        products = {N: full_charpoly(spec(family, L, N), verify_direct=False).product for N in vertices}
        for n2, p2 in products.items():
            for n1, p1 in products.items():
                if n1 < n2 and n2 % n1 == 0:
                    _, rem = poly_divrem(p2, p1)
                    assert rem.is_zero(), f"f_{n1} teilt f_{n2} nicht ({family}, L={L})"
                    pairs += 1
    # 50 Teilerpaare je Familie
    assert pairs == 100


def test_divisibility_small():
    f2 = full_charpoly(spec("F", 3, 2), verify_direct=False).product
    f6 = full_charpoly(spec("F", 3, 6), verify_direct=False).product
    quotient, rem = poly_divrem(f6, f2)
    assert rem.is_zero()
    assert quotient.degree == 12
