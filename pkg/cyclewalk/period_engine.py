"""
Perioden-Engine

Entscheidet T = inf{n >= 1 : U^n = I} mit Zertifikat:
- Finite: f_N = Π Φ_d^{e_d}, T = kgV(d), optional bestätigt durch U^T = I
- Infinite: nicht-ganzzahliger Koeffizient von f_N oder
  Rest ohne Kreisteilungsfaktor
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import logging
import math
import sys
import time

import numpy as np

# Pfad für Imports hinzufügen
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from config import config as cyclewalk_config
from cyclewalk.errors import FormulaMismatchError, InternalCheckError, SpecError
from cyclewalk.libs.cyclotomic import (
    CycloFactorCertificate,
    CyclotomicElement,
    lcm_of_orders,
    root_power,
    strip_cyclotomic_factors,
)
from cyclewalk.libs.exact_arith import (
    RationalPolynomial,
    first_non_integer,
    format_rational,
    parse_rational,
)
from cyclewalk.spectral_engine import CharPolyBundle, full_charpoly
from cyclewalk.walk_builder import WalkSpec, evolution_matrix, sector_matrix

POWER_CHECK_BUDGET = cyclewalk_config.POWER_CHECK_BUDGET

logger = logging.getLogger(__name__)


# ============================================================================
# Ergebnis-Typen
# ============================================================================

@dataclass(frozen=True)
class NonIntegerCoefficient:
    degree: int
    value: Fraction

    kind = "non_integer_coeff"

    def detail(self) -> str:
        return f"deg={self.degree} val={format_rational(self.value)}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "value": format_rational(self.value)}


@dataclass(frozen=True)
class NonCyclotomicRemainder:
    poly: RationalPolynomial

    kind = "non_cyclotomic_remainder"

    def detail(self) -> str:
        return f"deg={self.poly.degree}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "poly": self.poly.to_json(), "poly_text": self.poly.render()}


InfiniteCertificate = Union[NonIntegerCoefficient, NonCyclotomicRemainder]


@dataclass(frozen=True)
class PeriodResult:
    """Finite{T, factors, confirmed_by_power} oder Infinite{certificate}."""

    spec: WalkSpec
    verdict: str
    T: Optional[int] = None
    factors: Optional[CycloFactorCertificate] = None
    confirmed_by_power: Optional[bool] = None
    certificate: Optional[InfiniteCertificate] = None

    @property
    def is_finite(self) -> bool:
        return self.verdict == "finite"

    @property
    def certificate_kind(self) -> str:
        if self.is_finite:
            return "cyclotomic"
        return self.certificate.kind

    @property
    def certificate_detail(self) -> str:
        if self.is_finite:
            return self.factors.render_multiset()
        return self.certificate.detail()

    def to_dict(self) -> dict:
        data = {
            "family": self.spec.family,
            "L": self.spec.states,
            "N": self.spec.vertices,
            "verdict": self.verdict,
            "T": self.T,
            "certificate_kind": self.certificate_kind,
            "certificate_detail": self.certificate_detail,
        }
        if self.is_finite:
            data["factors"] = self.factors.to_dict()
            data["confirmed_by_power"] = self.confirmed_by_power
        else:
            data["certificate"] = self.certificate.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodResult":
        spec = WalkSpec(family=data["family"], states=data["L"], vertices=data["N"])
        if data["verdict"] == "finite":
            return cls(
                spec=spec,
                verdict="finite",
                T=int(data["T"]),
                factors=CycloFactorCertificate.from_dict(data["factors"]),
                confirmed_by_power=data.get("confirmed_by_power"),
            )
        cert = data["certificate"]
        if cert["kind"] == NonIntegerCoefficient.kind:
            certificate = NonIntegerCoefficient(degree=int(cert["degree"]), value=parse_rational(cert["value"]))
        else:
            certificate = NonCyclotomicRemainder(poly=RationalPolynomial.from_json(cert["poly"]))
        return cls(spec=spec, verdict="infinite", certificate=certificate)


# ============================================================================
# Exakte Matrixpotenzen
# ============================================================================

def _is_scaled_identity(matrix: List[List[int]], scale: int) -> bool:
    for i, row in enumerate(matrix):
        for j, x in enumerate(row):
            if x != (scale if i == j else 0):
                return False
    return True


def period_by_power(spec: WalkSpec, max_t: int) -> Optional[int]:
    """
    Kleinstes T <= max_t mit U^T = I, sonst None.

    Rechnet ganzzahlig mit B = L·U (dünne Zeilen): U^t = I genau wenn B^t = L^t·I.
    """
    if max_t < 1:
        return None
    u = evolution_matrix(spec)
    L = spec.states
    sparse = [[(j, int(x * L)) for j, x in row] for row in u.nonzero_rows()]
    current = u.integer_scaled()
    n = u.dimension
    for t in range(1, max_t + 1):
        if t > 1:
            nxt = []
            for row in sparse:
                acc = [0] * n
                for j, b in row:
                    src = current[j]
                    for col in range(n):
                        if src[col]:
                            acc[col] += b * src[col]
                nxt.append(acc)
            current = nxt
        if _is_scaled_identity(current, L ** t):
            return t
    return None


# ============================================================================
# Periodenentscheidung
# ============================================================================

def decide_period(spec: WalkSpec, bundle: Optional[CharPolyBundle] = None) -> PeriodResult:
    """
    Entscheidet die Periode von U.

    1. f_N über full_charpoly (direkte Gegenprobe bis DIRECT_CHECK_MAX_DIM)
    2. nicht-ganzzahliger Koeffizient -> Infinite (niedrigster Grad)
    3. Kreisteilungsfaktoren abspalten; Rest != 1 -> Infinite
    4. T = kgV der Ordnungen, Bestätigung per Potenz im Budget
    """
    if bundle is None:
        bundle = full_charpoly(spec)
    f = bundle.product

    bad = first_non_integer(f)
    if bad is not None:
        degree, value = bad
        logger.debug(f"{spec.label}: nicht-ganzzahliger Koeffizient x^{degree} = {format_rational(value)}")
        return PeriodResult(spec=spec, verdict="infinite",
                            certificate=NonIntegerCoefficient(degree=degree, value=value))

    cert = strip_cyclotomic_factors(f)
    if not cert.is_complete():
        return PeriodResult(spec=spec, verdict="infinite",
                            certificate=NonCyclotomicRemainder(poly=cert.remainder))

    period = lcm_of_orders(cert)
    confirmed = False
    if spec.dimension * period <= POWER_CHECK_BUDGET:
        by_power = period_by_power(spec, period)
        if by_power != period:
            raise InternalCheckError(
                f"Potenzprobe widerspricht dem Zertifikat für {spec.label}: T={period}, Potenz={by_power}"
            )
        confirmed = True
    else:
        logger.warning(f"⚠️  {spec.label}: T={period} ohne Potenzprobe (unconfirmed-by-power)")

    return PeriodResult(spec=spec, verdict="finite", T=period, factors=cert, confirmed_by_power=confirmed)


def float_shadow_corroborates_infinite(spec: WalkSpec, n_max: int = 1000, threshold: float = 1e-6) -> bool:
    """Gibt es einen Eigenwert λ mit |λ^n - 1| > threshold für alle n <= n_max?"""
    eigenvalues = np.linalg.eigvals(evolution_matrix(spec).to_float())
    exponents = np.arange(1, n_max + 1)
    powers = np.power.outer(eigenvalues, exponents)
    distance = np.abs(powers - 1.0).min(axis=1)
    return bool(np.any(distance > threshold))


# ============================================================================
# Geschlossene Zertifikate
# ============================================================================

def _x1_coefficient_formula(spec: WalkSpec) -> Tuple[Fraction, Optional[Fraction]]:
    """(exakte Form, gedruckte F-Variante) des x¹-Koeffizienten von f_N für ggT(N, L) = 1."""
    L, N, m = spec.states, spec.vertices, spec.m
    q = m // N
    if spec.family == "M":
        sign = -1 if N % 2 else 1
        return Fraction(sign * (2 * m - 1) * (2 * q + 1) * N, L), None
    sign = -1 if (N * (m + 1)) % 2 else 1
    engine_form = Fraction(sign * N * (2 * m - 1 - 4 * q), L)
    printed = Fraction(sign * N * (2 * (2 * q + 1) + 2 * m - 3), L)
    return engine_form, printed


def coprime_certificate(spec: WalkSpec, bundle: Optional[CharPolyBundle] = None) -> Optional[Fraction]:
    """
    Geschlossener x¹-Koeffizient von f_N für ggT(N, L) = 1, sonst None.

    Raises:
        FormulaMismatchError: Formel != exakter Koeffizient oder Koeffizient ganzzahlig
    """
    if math.gcd(spec.vertices, spec.states) != 1:
        return None
    if bundle is None:
        bundle = full_charpoly(spec, verify_direct=False)

    expected, printed = _x1_coefficient_formula(spec)
    actual = bundle.product.coeff(1)
    if expected != actual:
        raise FormulaMismatchError(
            f"x¹-Formel für {spec.label}: erwartet {format_rational(expected)}, exakt {format_rational(actual)}",
            spec=spec.label, degree=1,
        )
    if actual.denominator == 1:
        raise FormulaMismatchError(
            f"x¹-Koeffizient von f_N ({spec.label}) ist ganzzahlig: {format_rational(actual)}",
            spec=spec.label, degree=1,
        )
    if printed is not None and printed != actual:
        logger.warning(
            f"⚠️  Gedruckte F-Formel für {spec.label} weicht ab: {format_rational(printed)} statt {format_rational(actual)}"
        )
    return actual


@dataclass(frozen=True)
class SquareCertificate:
    """x³-Koeffizient von f_{L²}."""

    spec: WalkSpec
    value: Fraction

    @property
    def non_integral(self) -> bool:
        return self.value.denominator != 1

    def to_dict(self) -> dict:
        return {"spec": self.spec.label, "degree": 3, "value": format_rational(self.value),
                "non_integral": self.non_integral}


def square_certificate(spec: WalkSpec, bundle: Optional[CharPolyBundle] = None) -> SquareCertificate:
    if spec.vertices != spec.states ** 2:
        raise SpecError(f"square_certificate benötigt N = L² ({spec.label})")
    if bundle is None:
        bundle = full_charpoly(spec, verify_direct=False)
    return SquareCertificate(spec=spec, value=bundle.product.coeff(3))


# ============================================================================
# F-Typ: vierte Potenz der Sektoren
# ============================================================================

def _matmul(a: Sequence[Sequence[CyclotomicElement]], b: Sequence[Sequence[CyclotomicElement]]):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = a[i][0] * b[0][j]
            for t in range(1, n):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def _is_identity(matrix) -> bool:
    return all(x == (1 if i == j else 0) for i, row in enumerate(matrix) for j, x in enumerate(row))


def _require_f_diagonal(spec: WalkSpec):
    if spec.family != "F" or spec.vertices != spec.states:
        raise SpecError(f"Nur für F-Typ mit N = L definiert ({spec.label})")


def fourth_power_check(spec: WalkSpec) -> bool:
    """(Z^k A^F)^4 = I für alle k und (Z^k A^F)^2 != I für mindestens ein k."""
    _require_f_diagonal(spec)
    some_square_differs = False
    for k in range(spec.vertices):
        m = sector_matrix(spec, k)
        square = _matmul(m, m)
        if not _is_identity(_matmul(square, square)):
            logger.info(f"{spec.label}: (Z^{k}A)^4 != I")
            return False
        if not _is_identity(square):
            some_square_differs = True
    return some_square_differs


@dataclass(frozen=True)
class SquareEntryReport:
    sector: int
    diagonal_holds: bool
    offdiagonal_holds: bool

    def to_dict(self) -> dict:
        return {"k": self.sector, "diagonal_holds": self.diagonal_holds,
                "offdiagonal_holds": self.offdiagonal_holds}


def rescaled_square_claim(spec: WalkSpec, k: int) -> SquareEntryReport:
    """
    Prüft L²·(Z^kA^F)² gegen Diagonale L²-4L und Nebeneinträge -2L(1 + ζ^{(j-i)k}).

    Die Einträge sind als mit L² skaliert gelesen.
    """
    _require_f_diagonal(spec)
    if not 1 <= k < spec.vertices:
        raise SpecError(f"Sektor k={k} muss in 1..{spec.vertices - 1} liegen")
    L, N = spec.states, spec.vertices
    m = sector_matrix(spec, k)
    square = _matmul(m, m)
    diag_ok, off_ok = True, True
    for i in range(L):
        for j in range(L):
            scaled = square[i][j].scale(L * L)
            if i == j:
                diag_ok = diag_ok and scaled == L * L - 4 * L
            else:
                expected = (root_power(N, (j - i) * k) + 1).scale(-2 * L)
                off_ok = off_ok and scaled == expected
    if not diag_ok or not off_ok:
        logger.info(f"{spec.label}, k={k}: Diagonale {diag_ok}, Nebeneinträge {off_ok}")
    return SquareEntryReport(sector=k, diagonal_holds=diag_ok, offdiagonal_holds=off_ok)


# ============================================================================
# Sweep
# ============================================================================

@dataclass(frozen=True)
class SweepCell:
    spec: WalkSpec
    result: PeriodResult
    seconds: float


def _timed_decide(spec: WalkSpec) -> SweepCell:
    started = time.perf_counter()
    result = decide_period(spec)
    return SweepCell(spec=spec, result=result, seconds=time.perf_counter() - started)


def sweep(specs: Sequence[WalkSpec], jobs: int = 1) -> List[SweepCell]:
    """decide_period für alle Zellen; Ergebnis sortiert nach (Familie, L, N)."""
    ordered = sorted(set(specs), key=lambda s: s.sort_key())
    if jobs <= 1 or len(ordered) <= 1:
        cells = [_timed_decide(s) for s in ordered]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            cells = list(executor.map(_timed_decide, ordered))
    logger.info(f"Sweep: {len(cells)} Zellen mit {jobs} Worker(n)")
    return sorted(cells, key=lambda c: c.spec.sort_key())
