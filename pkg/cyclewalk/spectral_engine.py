"""
Spektral-Engine: charakteristische Polynome der Impulssektoren

f_{N,k}(x) = det(xI_L - Z_L^k A) über Q(ζ_N) per Faddeev-LeVerrier,
f_N(x) = Π_k f_{N,k}(x) mit Rationalitätsprüfung und direkter Gegenprobe
det(xI_{LN} - U) per Auswertung + Interpolation.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import itertools
import logging
import sys

import numpy as np

# Pfad für Imports hinzufügen
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from config import config as cyclewalk_config
from cyclewalk.errors import FormulaMismatchError, InternalCheckError
from cyclewalk.libs.cyclotomic import CyclotomicElement, euler_phi, root_sum
from cyclewalk.libs.exact_arith import (
    RationalPolynomial,
    format_rational,
    integer_determinant,
    interpolate,
)
from cyclewalk.walk_builder import (
    WalkSpec,
    chirality_shift,
    coin_matrix,
    evolution_matrix,
    momentum_diagonal,
)

DIRECT_CHECK_MAX_DIM = cyclewalk_config.DIRECT_CHECK_MAX_DIM

logger = logging.getLogger(__name__)

# (Formel, Walk) -> bereits gewarnt
_WARNED: set = set()


def _warn_once(key: Tuple, message: str):
    if key in _WARNED:
        return
    _WARNED.add(key)
    logger.warning(message)


# ============================================================================
# Polynome über Q(ζ_N)
# ============================================================================

class CycloPolynomial:
    """Polynom mit Koeffizienten in Q(ζ_N), aufsteigend sortiert."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[CyclotomicElement]):
        values = list(coeffs)
        for c in values:
            if c.order != order:
                raise InternalCheckError(f"Koeffizient der Ordnung {c.order} in Polynom über Q(ζ_{order})")
        while values and values[-1].is_zero():
            values.pop()
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(values))

    def __setattr__(self, name, value):
        raise AttributeError("CycloPolynomial ist unveränderlich")

    def __reduce__(self):
        return (CycloPolynomial, (self.order, self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> CyclotomicElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return CyclotomicElement.zero(self.order)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloPolynomial):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __mul__(self, other: "CycloPolynomial") -> "CycloPolynomial":
        if other.order != self.order:
            raise InternalCheckError("Polynome über verschiedenen Kreisteilungskörpern")
        if not self.coeffs or not other.coeffs:
            return CycloPolynomial(self.order, [])
        zero = CyclotomicElement.zero(self.order)
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return CycloPolynomial(self.order, out)

    def conjugate(self) -> "CycloPolynomial":
        return CycloPolynomial(self.order, [c.conjugate() for c in self.coeffs])

    def to_rational(self) -> RationalPolynomial:
        """
        Wandelt in ein Polynom über Q um.

        Raises:
            InternalCheckError: wenn ein Koeffizient nach Reduktion nicht rational ist
        """
        out = []
        for i, c in enumerate(self.coeffs):
            if not c.is_rational():
                raise InternalCheckError(
                    f"Koeffizient von x^{i} ist nicht rational: {c.render()} - Rechenfehler in Q(ζ_{self.order})"
                )
            out.append(c.rational_value())
        return RationalPolynomial(out)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_json()["coeffs"] for c in self.coeffs]}

    def render(self, var: str = "x") -> str:
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if c == 1 and mono:
                parts.append(mono)
            else:
                parts.append(f"({c.render()})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"CycloPolynomial({self.render()})"


# ============================================================================
# Sektor-Polynome
# ============================================================================

def _combine(order: int, terms: Iterable[Tuple[Fraction, CyclotomicElement]]) -> CyclotomicElement:
    """Σ q_i · e_i mit rationalen q_i."""
    acc = [Fraction(0)] * euler_phi(order)
    for q, e in terms:
        if q == 0:
            continue
        for i, c in enumerate(e.coeffs):
            acc[i] += q * c
    return CyclotomicElement(order, acc)


def sector_charpoly(spec: WalkSpec, k: int) -> CycloPolynomial:
    """
    det(xI_L - Z_L^k A) über Q(ζ_N) per Faddeev-LeVerrier.

    Z_L^k A wird nie explizit gebildet: A ist rational, die Zeile c wird
    danach mit ζ_N^{σ(c)k} multipliziert.

    Returns:
        monisches CycloPolynomial vom Grad L
    """
    N, L = spec.vertices, spec.states
    diag = momentum_diagonal(spec, k)
    coin = coin_matrix(spec)
    zero = CyclotomicElement.zero(N)
    one = CyclotomicElement.one(N)

    coeffs: List[CyclotomicElement] = [zero] * (L + 1)
    coeffs[L] = one
    current = [[one if i == j else zero for j in range(L)] for i in range(L)]
    for step in range(1, L + 1):
        product = [
            [diag[c] * _combine(N, ((coin.row(c)[t], current[t][j]) for t in range(L))) for j in range(L)]
            for c in range(L)
        ]
        trace = product[0][0]
        for c in range(1, L):
            trace = trace + product[c][c]
        c_next = trace.scale(Fraction(-1, step))
        coeffs[L - step] = c_next
        if step < L:
            current = [[product[i][j] + c_next if i == j else product[i][j] for j in range(L)]
                       for i in range(L)]

    poly = CycloPolynomial(N, coeffs)
    if poly.degree != L or not poly.is_monic():
        raise InternalCheckError(f"Sektor {k} von {spec.label} ist nicht monisch vom Grad {L}")
    return poly


def _sector_worker(args: Tuple[WalkSpec, int]) -> CycloPolynomial:
    spec, k = args
    return sector_charpoly(spec, k)


def sector_charpolys(spec: WalkSpec, jobs: int = 1) -> List[CycloPolynomial]:
    """Alle N Sektoren, optional parallel (Ergebnis immer in k-Reihenfolge)."""
    tasks = [(spec, k) for k in range(spec.vertices)]
    if jobs <= 1 or spec.vertices == 1:
        return [_sector_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(_sector_worker, tasks))


# ============================================================================
# Gesamtpolynom
# ============================================================================

@dataclass(frozen=True)
class CharPolyBundle:
    """Sektoren f_{N,k} und Produkt f_N = Π_k f_{N,k} (rational)."""

    spec: WalkSpec
    sectors: Tuple[CycloPolynomial, ...]
    product: RationalPolynomial
    direct_checked: bool = False

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "L": self.spec.states,
            "N": self.spec.vertices,
            "sectors": [
                {"k": k, "coeffs": [c.to_json() for c in s.coeffs]}
                for k, s in enumerate(self.sectors)
            ],
            "product": self.product.to_json(),
            "product_text": self.product.render(),
            "direct_checked": self.direct_checked,
        }


def direct_charpoly(spec: WalkSpec) -> RationalPolynomial:
    """
    det(xI_{LN} - U) ohne Sektorzerlegung.

    Mit B = L·U (ganzzahlig) ist g(y) = det(yI - B) ein ganzzahliges Polynom;
    g wird an LN+1 Stellen 0, 1, -1, 2, -2, … per Bareiss ausgewertet,
    interpoliert und über f(x) = L^{-LN} g(Lx) zurückskaliert.
    """
    u = evolution_matrix(spec)
    b = u.integer_scaled()
    n = u.dimension
    nodes = [0]
    step = 1
    while len(nodes) < n + 1:
        nodes.append(step)
        if len(nodes) < n + 1:
            nodes.append(-step)
        step += 1

    values = []
    for y in nodes:
        shifted = [[(y if i == j else 0) - b[i][j] for j in range(n)] for i in range(n)]
        values.append(integer_determinant(shifted))
    g = interpolate(nodes, values)
    scale = Fraction(1, spec.states ** n)
    return g.substitute_scaled(spec.states).scale(scale)


def full_charpoly(spec: WalkSpec, verify_direct: Optional[bool] = None, jobs: int = 1) -> CharPolyBundle:
    """
    Berechnet f_N = Π_k f_{N,k} in Q(ζ_N)[x] und prüft Rationalität.

    Args:
        spec: Walk-Spezifikation
        verify_direct: direkte Determinante vergleichen (Default: LN <= DIRECT_CHECK_MAX_DIM)
        jobs: Worker für die Sektoren

    Raises:
        InternalCheckError: bei nicht-rationalem Produkt oder Abweichung von der Determinante
    """
    sectors = sector_charpolys(spec, jobs=jobs)
    product = sectors[0]
    for s in sectors[1:]:
        product = product * s
    rational = product.to_rational()

    if rational.degree != spec.dimension or not rational.is_monic():
        raise InternalCheckError(f"f_N von {spec.label} ist nicht monisch vom Grad {spec.dimension}")
    if abs(rational.coeff(0)) != 1:
        raise InternalCheckError(
            f"Konstanter Term von f_N ({spec.label}) hat nicht Betrag 1: {format_rational(rational.coeff(0))}"
        )

    if verify_direct is None:
        verify_direct = spec.dimension <= DIRECT_CHECK_MAX_DIM
    if verify_direct:
        direct = direct_charpoly(spec)
        if direct != rational:
            raise InternalCheckError(
                f"Sektorprodukt und det(xI - U) stimmen für {spec.label} nicht überein"
            )
        logger.debug(f"Direkte Gegenprobe für {spec.label} bestanden")

    return CharPolyBundle(spec=spec, sectors=tuple(sectors), product=rational, direct_checked=bool(verify_direct))


def conjugate_symmetry_holds(bundle: CharPolyBundle) -> bool:
    """Sektor N-k ist das komplex Konjugierte von Sektor k."""
    n = bundle.spec.vertices
    return all(bundle.sectors[(n - k) % n] == bundle.sectors[k].conjugate() for k in range(n))


def unit_circle_deviation(spec: WalkSpec) -> float:
    """max | |λ| - 1 | über die Float-Eigenwerte von U."""
    eigenvalues = np.linalg.eigvals(evolution_matrix(spec).to_float())
    return float(np.max(np.abs(np.abs(eigenvalues) - 1.0)))


def roots_on_unit_circle(bundle: CharPolyBundle, tol: float = 1e-8) -> bool:
    return unit_circle_deviation(bundle.spec) < tol


# ============================================================================
# Koeffizientenformeln
# ============================================================================

@dataclass(frozen=True)
class CoefficientCheck:
    degree: int
    formula: str
    expected: str
    actual: str
    agrees: bool
    authoritative: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "formula": self.formula,
            "expected": self.expected,
            "actual": self.actual,
            "agrees": self.agrees,
            "authoritative": self.authoritative,
            "note": self.note,
        }


@dataclass(frozen=True)
class CoefficientReport:
    spec: WalkSpec
    sector: int
    checks: Tuple[CoefficientCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.agrees for c in self.checks if c.authoritative)

    @property
    def discrepancies(self) -> List[CoefficientCheck]:
        return [c for c in self.checks if not c.agrees and not c.authoritative]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.label,
            "sector": self.sector,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _subset_sum_family(spec: WalkSpec, size: int) -> Dict[int, int]:
    """Anzahl der size-Teilmengen verschiedener Verschiebungen σ mit Summe j."""
    shifts = [chirality_shift(spec, c) for c in range(spec.states)]
    counts: Dict[int, int] = {}
    for subset in itertools.combinations(shifts, size):
        s = sum(subset)
        counts[s] = counts.get(s, 0) + 1
    return counts


def _family_element(spec: WalkSpec, k: int, family: Dict[int, int]) -> CyclotomicElement:
    exps = sorted(family)
    return root_sum(spec.vertices, [j * k for j in exps], [family[j] for j in exps])


def _ring_sum(spec: WalkSpec, k: int, lo: int, hi: int) -> CyclotomicElement:
    """Σ_{lo <= |j| <= hi} ζ_N^{jk} (j = 0 nur bei lo = 0 einmal)."""
    exps = [j * k for j in range(-hi, hi + 1) if abs(j) >= lo]
    return root_sum(spec.vertices, exps)


def _check(degree: int, formula: str, expected: CyclotomicElement, actual: CyclotomicElement,
           authoritative: bool = True, note: str = "") -> CoefficientCheck:
    return CoefficientCheck(
        degree=degree,
        formula=formula,
        expected=expected.render(),
        actual=actual.render(),
        agrees=expected == actual,
        authoritative=authoritative,
        note=note,
    )


def _integral_family(spec: WalkSpec, k: int, degree: int, value: CyclotomicElement, divisor: int):
    """-L·c/divisor muss in Z[ζ_N] liegen."""
    family = value.scale(Fraction(-spec.states, divisor))
    if not family.is_integral():
        raise FormulaMismatchError(
            f"Ganzzahlige Familie zu x^{degree} existiert nicht: {family.render()}",
            spec=spec.label, sector=k, degree=degree,
        )
    return family


def _m_checks(spec: WalkSpec, k: int, poly: CycloPolynomial) -> List[CoefficientCheck]:
    L, m = spec.states, spec.m
    checks = [
        _check(0, "-1", CyclotomicElement.from_rational(spec.vertices, -1), poly.coeff(0)),
        _check(1, "-(2m-1)/L · Σ_{|j|<=m} ζ^{jk}",
               _ring_sum(spec, k, 0, m).scale(Fraction(-(2 * m - 1), L)), poly.coeff(1)),
    ]

    # x²: Paar-Familie, exakt aus den Verschiebungen gezählt
    _integral_family(spec, k, 2, poly.coeff(2), 2 * m - 3)
    pairs = _subset_sum_family(spec, 2)
    checks.append(_check(2, "-(2m-3)/L · Σ a_j ζ^{jk}",
                         _family_element(spec, k, pairs).scale(Fraction(-(2 * m - 3), L)), poly.coeff(2)))
    claimed = {j: m - abs(j) // 2 for j in range(-(2 * m - 1), 2 * m)}
    checks.append(_check(2, "a_j = m - q_2(|j|)",
                         _family_element(spec, k, claimed).scale(Fraction(-(2 * m - 3), L)), poly.coeff(2),
                         authoritative=False, note="Behauptung für a_j (nur Bericht)"))

    if L >= 5:
        _integral_family(spec, k, 3, poly.coeff(3), 2 * m - 5)
        triples = _family_element(spec, k, _subset_sum_family(spec, 3))
        checks.append(_check(3, "-(2m-5)/L · Σ b_j ζ^{jk}",
                             triples.scale(Fraction(-(2 * m - 5), L)), poly.coeff(3)))
        alt = _check(3, "-(2m-3)/L · Σ b_j ζ^{jk}", triples.scale(Fraction(-(2 * m - 3), L)), poly.coeff(3),
                     authoritative=False, note="alternative Konstante")
        if alt.agrees:
            _warn_once(("M-x3-alt", spec.label), f"⚠️  x³-Konstante (2m-3) stimmt für {spec.label} statt (2m-5)")
        checks.append(alt)
    return checks


def _f_checks(spec: WalkSpec, k: int, poly: CycloPolynomial) -> List[CoefficientCheck]:
    L, m, N = spec.states, spec.m, spec.vertices
    sign = 1 if m % 2 == 1 else -1  # (-1)^{m+1}
    inner = _ring_sum(spec, k, 1, m)
    checks = [
        _check(0, "(-1)^{m+1}", CyclotomicElement.from_rational(N, sign), poly.coeff(0)),
        _check(1, "(-1)^{m+1}/L · ((2m-1) - 2Σ_{0<|j|<=m} ζ^{jk})",
               (inner.scale(-2) + (2 * m - 1)).scale(Fraction(sign, L)), poly.coeff(1)),
    ]

    printed_plus = _check(1, "(-1)^{m+1}/L · (2Σ + (2m-1))",
                          (inner.scale(2) + (2 * m - 1)).scale(Fraction(sign, L)), poly.coeff(1),
                          authoritative=False, note="Vorzeichen-Variante +(2m-1)")
    printed_minus = _check(1, "(-1)^{m+1}/L · (2Σ - (2m-1))",
                           (inner.scale(2) - (2 * m - 1)).scale(Fraction(sign, L)), poly.coeff(1),
                           authoritative=False, note="Vorzeichen-Variante -(2m-1)")
    checks += [printed_plus, printed_minus]

    if L >= 5:
        c2 = _check(2, "(-1)^m/L · (2Σ_{0<|j|<m} ζ^{jk} + m(2m-3))",
                    (_ring_sum(spec, k, 1, m - 1).scale(2) + m * (2 * m - 3)).scale(Fraction(-sign, L)),
                    poly.coeff(2), authoritative=False, note="gedruckte x²-Formel")
        c3 = _check(3, "(-1)^m/L · (-2(m-1)Σ_{0<|j|<=m} ζ^{jk} + m(2m-5))",
                    (inner.scale(-2 * (m - 1)) + m * (2 * m - 5)).scale(Fraction(-sign, L)),
                    poly.coeff(3), authoritative=False, note="gedruckte x³-Formel")
        checks += [c2, c3]

    for check in checks:
        if not check.authoritative and not check.agrees:
            _warn_once((check.formula, spec.label, k),
                       f"⚠️  Gedruckte Formel weicht ab ({spec.label}, k={k}, x^{check.degree}): "
                       f"{check.formula} = {check.expected}, exakt {check.actual}")
    return checks


def check_coefficient_formulas(spec: WalkSpec, k: int, poly: Optional[CycloPolynomial] = None) -> CoefficientReport:
    """
    Vergleicht die niedrigen Koeffizienten von f_{N,k} mit den geschlossenen Formeln.

    Raises:
        FormulaMismatchError: wenn eine maßgebliche Formel oder eine Ganzzahligkeit verletzt ist
    """
    if poly is None:
        poly = sector_charpoly(spec, k)

    # L·c_r liegt immer in Z[ζ_N] (Rang-1-Störung einer ganzzahligen Matrix)
    for r, c in enumerate(poly.coeffs):
        if not c.scale(spec.states).is_integral():
            raise FormulaMismatchError(
                f"L·c_{r} liegt nicht in Z[ζ_{spec.vertices}]: {c.render()}",
                spec=spec.label, sector=k, degree=r,
            )

    checks = _m_checks(spec, k, poly) if spec.family == "M" else _f_checks(spec, k, poly)
    report = CoefficientReport(spec=spec, sector=k, checks=tuple(checks))
    for check in checks:
        if check.authoritative and not check.agrees:
            raise FormulaMismatchError(
                f"Formel {check.formula} verletzt: erwartet {check.expected}, exakt {check.actual}",
                spec=spec.label, sector=k, degree=check.degree,
            )
    return report
