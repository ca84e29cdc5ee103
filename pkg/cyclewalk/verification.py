"""
Prüfungen für den verify-Befehl

Jede Funktion erhält die Parameter aus checks/checks.json und liefert
(bestanden, Detailtext). run_checks führt die aktivierten Prüfungen aus.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import math
import random
import time

import sympy
from pydantic import ValidationError

from checks.check_manager import CheckManager, get_check_manager
from cyclewalk.errors import CycleWalkError, UsageError
from cyclewalk.libs.cyclotomic import (
    CyclotomicElement,
    cyclotomic_polynomial,
    euler_phi,
    to_common_order,
)
from cyclewalk.libs.exact_arith import RationalPolynomial, poly_divrem, poly_is_integer, poly_mul
from cyclewalk.period_engine import (
    coprime_certificate,
    decide_period,
    fourth_power_check,
    period_by_power,
    square_certificate,
)
from cyclewalk.spectral_engine import (
    check_coefficient_formulas,
    conjugate_symmetry_holds,
    direct_charpoly,
    full_charpoly,
    sector_charpoly,
    unit_circle_deviation,
)
from cyclewalk.walk_builder import WalkSpec, evolution_matrix
from cyclewalk.zeta_engine import (
    absolute_zeta_descriptor,
    eval_Zf_mellin,
    recognize_kurokawa,
    walk_zeta,
    walk_zeta_closed_form,
)

logger = logging.getLogger(__name__)

CheckResult = Tuple[bool, str]


def specs_up_to(max_dim: int, families: Sequence[str] = ("M", "F")) -> List[WalkSpec]:
    """Alle Walks mit L·N <= max_dim."""
    out = []
    for family in families:
        for L in range(3, max_dim // 2 + 1, 2):
            for N in range(2, max_dim // L + 1):
                out.append(WalkSpec(family=family, states=L, vertices=N))
    return out


def _random_element(rng: random.Random, order: int) -> CyclotomicElement:
    return CyclotomicElement(order, [Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(euler_phi(order))])


# ============================================================================
# Struktur
# ============================================================================

def check_u_orthogonal(max_dim: int = 60) -> CheckResult:
    specs = specs_up_to(max_dim)
    for spec in specs:
        u = evolution_matrix(spec)
        if not u.is_orthogonal():
            return False, f"U nicht orthogonal für {spec.label}"
        rows = u.nonzero_rows()
        if any(len(r) != spec.states for r in rows):
            return False, f"Zeile mit != L Einträgen für {spec.label}"
        col_counts = [0] * u.dimension
        for r in rows:
            for j, _ in r:
                col_counts[j] += 1
        if any(c != spec.states for c in col_counts):
            return False, f"Spalte mit != L Einträgen für {spec.label}"
    return True, f"{len(specs)} Walks geprüft"


def check_phi_product_identity(max_n: int = 60) -> CheckResult:
    for n in range(1, max_n + 1):
        phi = cyclotomic_polynomial(n)
        if not poly_is_integer(phi) or phi.degree != euler_phi(n):
            return False, f"Φ_{n} ist nicht ganzzahlig vom Grad φ({n})"
        product = RationalPolynomial([1])
        for d in sympy.divisors(n):
            product = poly_mul(product, cyclotomic_polynomial(d))
        if product != RationalPolynomial.x_power_minus_one(n):
            return False, f"Π_(d|{n}) Φ_d != x^{n} - 1"
    return True, f"n = 1..{max_n}"


def check_cyclotomic_field_axioms(max_order: int = 12, samples: int = 25, seed: int = 7) -> CheckResult:
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randint(2, max_order)
        a, b, c = (_random_element(rng, n) for _ in range(3))
        if not a.is_zero() and a * a.inverse() != 1:
            return False, f"a·a⁻¹ != 1 in Q(ζ_{n})"
        if a * (b + c) != a * b + a * c:
            return False, f"Distributivität verletzt in Q(ζ_{n})"
        target = n * rng.randint(2, 3)
        if to_common_order(a * b, target) != to_common_order(a, target) * to_common_order(b, target):
            return False, f"Heben nach Q(ζ_{target}) nicht multiplikativ"
    return True, f"{samples} Stichproben"


def check_float_shadow_unit_circle(max_dim: int = 45, tol: float = 1e-8) -> CheckResult:
    worst = 0.0
    for spec in specs_up_to(max_dim):
        deviation = unit_circle_deviation(spec)
        worst = max(worst, deviation)
        if deviation >= tol:
            return False, f"{spec.label}: Abweichung {deviation:.2e}"
    return True, f"max. Abweichung {worst:.2e}"


# ============================================================================
# Spektrum
# ============================================================================

def check_sector_closed_forms(states: Sequence[int] = (3, 5, 7)) -> CheckResult:
    for L in states:
        spec = WalkSpec(family="M", states=L, vertices=L)
        x_minus, x_plus = RationalPolynomial([-1, 1]), RationalPolynomial([1, 1])
        expected_zero = poly_mul(x_minus, x_plus ** (L - 1))
        if sector_charpoly(spec, 0).to_rational() != expected_zero:
            return False, f"f_(L,0) für L={L} weicht ab"
        for k in range(1, L):
            if sector_charpoly(spec, k).to_rational() != RationalPolynomial.x_power_minus_one(L):
                return False, f"f_(L,{k}) für L={L} ist nicht x^L - 1"
    return True, f"L ∈ {list(states)}"


def check_product_identity(max_dim: int = 60) -> CheckResult:
    specs = specs_up_to(max_dim)
    for spec in specs:
        bundle = full_charpoly(spec, verify_direct=False)
        if bundle.product != direct_charpoly(spec):
            return False, f"Produkt != det(xI - U) für {spec.label}"
    return True, f"{len(specs)} Walks"


def check_divisibility(max_dim: int = 60) -> CheckResult:
    pairs = 0
    for family in ("M", "F"):
        for L in range(3, max_dim // 2 + 1, 2):
            products = {}
            for N in range(2, max_dim // L + 1):
                products[N] = full_charpoly(WalkSpec(family=family, states=L, vertices=N), verify_direct=False).product
            for n2, p2 in products.items():
                for n1, p1 in products.items():
                    if n1 < n2 and n2 % n1 == 0:
                        _, rem = poly_divrem(p2, p1)
                        if not rem.is_zero():
                            return False, f"f_{n1} teilt f_{n2} nicht ({family}, L={L})"
                        pairs += 1
    return True, f"{pairs} Teilerpaare"


def check_coefficient_formulas_grid(states: Sequence[int] = (3, 5, 7), vertices: Sequence[int] = (2, 8)) -> CheckResult:
    lo, hi = vertices
    count, discrepancies = 0, 0
    for family in ("M", "F"):
        for L in states:
            for N in range(lo, hi + 1):
                spec = WalkSpec(family=family, states=L, vertices=N)
                for k in range(N):
                    report = check_coefficient_formulas(spec, k)
                    discrepancies += len(report.discrepancies)
                    count += 1
    return True, f"{count} Sektoren, {discrepancies} Abweichungen gedruckter Varianten protokolliert"


def check_conjugate_symmetry(states: Sequence[int] = (3, 5), vertices: Sequence[int] = (2, 7)) -> CheckResult:
    lo, hi = vertices
    for family in ("M", "F"):
        for L in states:
            for N in range(lo, hi + 1):
                spec = WalkSpec(family=family, states=L, vertices=N)
                if not conjugate_symmetry_holds(full_charpoly(spec, verify_direct=False)):
                    return False, f"Konjugationssymmetrie verletzt für {spec.label}"
    return True, "alle Sektorpaare konjugiert"


# ============================================================================
# Perioden
# ============================================================================

def check_period_table(family: str = "M", diagonal_states: Sequence[int] = (3, 5, 7, 9),
                       grid_states: Sequence[int] = (3, 5, 7), max_vertices: int = 12) -> CheckResult:
    for L in diagonal_states:
        spec = WalkSpec(family=family, states=L, vertices=L)
        expected = 2 * L if family == "M" else 4
        result = decide_period(spec)
        if not result.is_finite or result.T != expected:
            return False, f"{spec.label}: erwartet T={expected}, erhalten {result.verdict} {result.T}"
        if not result.confirmed_by_power:
            return False, f"{spec.label}: T={expected} nicht per Potenz bestätigt"
        if period_by_power(spec, expected - 1) is not None:
            return False, f"{spec.label}: Potenzprobe findet kleineres T"
    cells = 0
    for L in grid_states:
        for N in range(2, max_vertices + 1):
            if N == L:
                continue
            spec = WalkSpec(family=family, states=L, vertices=N)
            result = decide_period(spec)
            if result.is_finite:
                return False, f"{spec.label}: erwartet unendlich, erhalten T={result.T}"
            cells += 1
    return True, f"Diagonale {list(diagonal_states)}, {cells} unendliche Zellen"


def check_coprime_certificates(states: Sequence[int] = (3, 5, 7), max_vertices: int = 12) -> CheckResult:
    count = 0
    for family in ("M", "F"):
        for L in states:
            for N in range(2, max_vertices + 1):
                if math.gcd(N, L) != 1:
                    continue
                value = coprime_certificate(WalkSpec(family=family, states=L, vertices=N))
                if value is None or value.denominator == 1:
                    return False, f"Kein nicht-ganzzahliges Zertifikat für {family},{L},{N}"
                count += 1
    return True, f"{count} Zertifikate"


def check_square_certificates(states: Sequence[int] = (3,)) -> CheckResult:
    for family in ("M", "F"):
        for L in states:
            cert = square_certificate(WalkSpec(family=family, states=L, vertices=L * L))
            if not cert.non_integral:
                return False, f"x³-Koeffizient von f_(L²) ganzzahlig für {family}, L={L}"
    return True, f"L ∈ {list(states)}"


def check_fourth_power(states: Sequence[int] = (3, 5, 7)) -> CheckResult:
    for L in states:
        if not fourth_power_check(WalkSpec(family="F", states=L, vertices=L)):
            return False, f"(Z^k A^F)^4 = I verletzt für L={L}"
    return True, f"L ∈ {list(states)}"


# ============================================================================
# Zeta
# ============================================================================

def check_walk_zeta_closed_form(states: Sequence[int] = (3, 5, 7)) -> CheckResult:
    for L in states:
        zeta = walk_zeta(WalkSpec(family="M", states=L, vertices=L), verify_direct=False)
        if zeta.as_rational_function() != walk_zeta_closed_form(L):
            return False, f"Walk-Zeta für L={L} weicht von der geschlossenen Form ab"
    return True, f"L ∈ {list(states)}"


def check_absolute_zeta_descriptor(states: Sequence[int] = (3, 5, 7)) -> CheckResult:
    for L in states:
        form = recognize_kurokawa(walk_zeta_closed_form(L))
        if form is None:
            return False, f"Keine Kurokawa-Form für L={L}"
        desc = absolute_zeta_descriptor(form)
        omega = tuple([2] * (L - 1) + [L] * (L - 1))
        if desc.omega != omega or desc.deg_f != -L * L or desc.D != -L * L or desc.C != -1:
            return False, f"Parameter für L={L} weichen ab"
        for t in desc.terms:
            if t.offset != L * L + t.subset_size or t.sign != (-1) ** (t.subset_size + 1):
                return False, f"Term |I|={t.subset_size} für L={L} weicht ab"
            if t.multiplicity != math.comb(L - 2, t.subset_size):
                return False, f"Vielfachheit für |I|={t.subset_size}, L={L} weicht ab"
        if not desc.factor_lists_consistent():
            return False, f"Γ- und S-Faktorlisten für L={L} passen nicht"
    return True, f"L ∈ {list(states)}"


def check_mellin_identity(states: int = 3, w: float = 6.0, s: float = 1.0,
                          tol: float = 5e-5, limit: float = 1e-4) -> CheckResult:
    form = recognize_kurokawa(walk_zeta_closed_form(states))
    desc = absolute_zeta_descriptor(form)
    mellin = eval_Zf_mellin(form, w, s, tol)
    series = desc.subset_series(w, s, tol)
    diff = abs(mellin - series)
    return diff < limit, f"Mellin {mellin:.10g}, Reihe {series:.10g}, Differenz {diff:.2e}"


CHECK_FUNCTIONS: Dict[str, Callable[..., CheckResult]] = {
    fn.__name__: fn
    for fn in (
        check_u_orthogonal,
        check_phi_product_identity,
        check_cyclotomic_field_axioms,
        check_float_shadow_unit_circle,
        check_sector_closed_forms,
        check_product_identity,
        check_divisibility,
        check_coefficient_formulas_grid,
        check_conjugate_symmetry,
        check_period_table,
        check_coprime_certificates,
        check_square_certificates,
        check_fourth_power,
        check_walk_zeta_closed_form,
        check_absolute_zeta_descriptor,
        check_mellin_identity,
    )
}


# ============================================================================
# Ausführung
# ============================================================================

@dataclass(frozen=True)
class CheckOutcome:
    check_id: str
    name: str
    category: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return {
            "id": self.check_id,
            "name": self.name,
            "category": self.category,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }

    def render(self) -> str:
        mark = "✅" if self.passed else "❌"
        return f"{mark} {self.check_id:<28} {self.detail} ({self.seconds:.1f}s)"


def run_check(check: Dict) -> CheckOutcome:
    fn = CHECK_FUNCTIONS.get(check.get("function", ""))
    if fn is None:
        raise UsageError(f"Unbekannte Prüffunktion: {check.get('function')!r}")
    started = time.perf_counter()
    try:
        passed, detail = fn(**check.get("params", {}))
    except CycleWalkError as e:
        passed, detail = False, f"{type(e).__name__}: {e.detail}"
    except ValidationError as e:
        passed, detail = False, f"Ungültige Parameter: {e.error_count()} Fehler"
    seconds = time.perf_counter() - started
    if not passed:
        logger.error(f"❌ Prüfung {check['id']} fehlgeschlagen: {detail}")
    return CheckOutcome(
        check_id=check["id"],
        name=check.get("name", check["id"]),
        category=check.get("category_id", ""),
        passed=passed,
        detail=detail,
        seconds=seconds,
    )


def run_checks(only: Optional[Iterable[str]] = None, manager: Optional[CheckManager] = None) -> List[CheckOutcome]:
    """
    Führt die aktivierten Prüfungen aus (oder genau die in only genannten).

    Raises:
        UsageError: bei unbekannter Prüf-ID
    """
    manager = manager or get_check_manager()
    if only:
        checks = []
        for check_id in only:
            data = manager.get_check_data(check_id)
            if data is None:
                raise UsageError(f"Unbekannte Prüfung: {check_id!r}")
            checks.append(data)
    else:
        checks = manager.get_enabled_checks()
    return [run_check(c) for c in checks]
