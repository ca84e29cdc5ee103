"""
Kreisteilungspolynome und Arithmetik in Q(ζ_N)

- Katalog der Φ_n (pro Prozess, write-once, threadsicher)
- CyclotomicElement: kanonische Darstellung mod Φ_N
- strip_cyclotomic_factors: Abspalten aller Φ_d-Faktoren mit Zertifikat
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import math
import threading

import numpy as np
import sympy

from cyclewalk.errors import ArithmeticDomainError
from cyclewalk.libs.exact_arith import (
    ONE,
    RationalPolynomial,
    as_fraction,
    format_rational,
    parse_rational,
    poly_divrem,
    poly_mul,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Φ-Katalog
# ============================================================================

_PHI_CATALOG: Dict[int, RationalPolynomial] = {}
_PHI_LOCK = threading.Lock()


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    """Eulersche φ-Funktion (über sympy.totient)."""
    if n < 1:
        raise ArithmeticDomainError(f"φ(n) benötigt n >= 1 (n={n})")
    return int(sympy.totient(n))


def cyclotomic_polynomial(n: int) -> RationalPolynomial:
    """
    Liefert Φ_n als (x^n - 1) / Π_{d|n, d<n} Φ_d.

    Args:
        n: Ordnung, n >= 1

    Returns:
        Φ_n mit ganzzahligen Koeffizienten vom Grad φ(n)
    """
    if n < 1:
        raise ArithmeticDomainError(f"Kreisteilungspolynom benötigt n >= 1 (n={n})")
    cached = _PHI_CATALOG.get(n)
    if cached is not None:
        return cached

    poly = RationalPolynomial.x_power_minus_one(n)
    for d in sympy.divisors(n)[:-1]:
        poly, rem = poly_divrem(poly, cyclotomic_polynomial(d))
        if not rem.is_zero():
            raise ArithmeticDomainError(f"Φ_{d} teilt x^{n} - 1 nicht (interner Fehler)")

    # write-once: ein parallel berechneter identischer Wert wird verworfen
    with _PHI_LOCK:
        return _PHI_CATALOG.setdefault(n, poly)


def _reduce(coeffs: List[Fraction], order: int) -> List[Fraction]:
    """Reduziert eine Koeffizientenliste modulo des (monischen) Φ_order."""
    phi = cyclotomic_polynomial(order)
    dphi = phi.degree
    if len(coeffs) <= dphi:
        return coeffs
    tail = [(j, c) for j, c in enumerate(phi.coeffs[:-1]) if c != 0]
    out = list(coeffs)
    for i in range(len(out) - 1, dphi - 1, -1):
        c = out[i]
        if c == 0:
            continue
        out[i] = Fraction(0)
        base = i - dphi
        for j, pc in tail:
            out[base + j] -= c * pc
    return out[:dphi]


# ============================================================================
# Elemente von Q(ζ_N)
# ============================================================================

class CyclotomicElement:
    """
    Element von Q(ζ_N), dargestellt als Polynom in ζ_N vom Grad < φ(N).

    Zwei Elemente gleicher Ordnung sind genau dann gleich, wenn ihre
    Darstellungen identisch sind. Arithmetik nur bei gleicher Ordnung.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Union[int, Fraction, str]] = ()):
        if order < 1:
            raise ArithmeticDomainError(f"Ordnung muss >= 1 sein (order={order})")
        values = _reduce([as_fraction(c) for c in coeffs], order)
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(values))

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicElement ist unveränderlich")

    def __reduce__(self):
        return (CyclotomicElement, (self.order, self.coeffs))

    # --- Konstruktoren ------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "CyclotomicElement":
        return cls(order)

    @classmethod
    def one(cls, order: int) -> "CyclotomicElement":
        return cls(order, [1])

    @classmethod
    def from_rational(cls, order: int, value: Union[int, Fraction]) -> "CyclotomicElement":
        return cls(order, [value])

    # --- Eigenschaften ------------------------------------------------------

    @property
    def rep(self) -> RationalPolynomial:
        """Kanonischer Repräsentant mod Φ_N."""
        return RationalPolynomial(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return len(self.coeffs) <= 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ArithmeticDomainError(f"Element ist nicht rational: {self.render()}")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def is_integral(self) -> bool:
        """Liegt das Element in Z[ζ_N] (ganzzahlige Koordinaten)?"""
        return all(c.denominator == 1 for c in self.coeffs)

    # --- Operatoren ---------------------------------------------------------

    def _check(self, other: "CyclotomicElement"):
        if not isinstance(other, CyclotomicElement):
            raise ArithmeticDomainError(f"Kein CyclotomicElement: {other!r}")
        if other.order != self.order:
            raise ArithmeticDomainError(
                f"Ordnungskonflikt: Q(ζ_{self.order}) vs. Q(ζ_{other.order}) - vorher to_common_order aufrufen"
            )

    def __eq__(self, other) -> bool:
        if isinstance(other, CyclotomicElement):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_rational(self.order, other)
        return cyclo_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.from_rational(self.order, other)
        return cyclo_sub(self, other)

    def __rsub__(self, other):
        return cyclo_sub(CyclotomicElement.from_rational(self.order, as_fraction(other)), self)

    def __neg__(self):
        return cyclo_neg(self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return cyclo_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ArithmeticDomainError("Division durch 0 in Q(ζ_N)")
            return self.scale(Fraction(1) / as_fraction(other))
        return cyclo_mul(self, cyclo_inverse(other))

    def __pow__(self, exponent: int) -> "CyclotomicElement":
        base = self if exponent >= 0 else cyclo_inverse(self)
        exponent = abs(exponent)
        result = CyclotomicElement.one(self.order)
        while exponent:
            if exponent & 1:
                result = cyclo_mul(result, base)
            base = cyclo_mul(base, base)
            exponent >>= 1
        return result

    def scale(self, factor: Union[int, Fraction]) -> "CyclotomicElement":
        factor = as_fraction(factor)
        return CyclotomicElement(self.order, [c * factor for c in self.coeffs])

    def inverse(self) -> "CyclotomicElement":
        return cyclo_inverse(self)

    def conjugate(self) -> "CyclotomicElement":
        """Komplexe Konjugation ζ ↦ ζ^{-1}."""
        n = self.order
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            out[(-i) % n] += c
        return CyclotomicElement(n, out)

    def to_complex(self) -> complex:
        """Float-Schatten unter ζ_N ↦ e^{2πi/N}."""
        if not self.coeffs:
            return 0j
        powers = np.exp(2j * np.pi * np.arange(len(self.coeffs)) / self.order)
        values = np.array([float(c) for c in self.coeffs])
        return complex(values @ powers)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CyclotomicElement":
        return cls(int(data["order"]), [parse_rational(str(c)) for c in data["coeffs"]])

    def render(self, var: Optional[str] = None) -> str:
        return self.rep.render(var or f"ζ{self.order}")

    def __repr__(self) -> str:
        return f"CyclotomicElement(order={self.order}, {self.render()})"


def cyclo_add(a: CyclotomicElement, b: CyclotomicElement) -> CyclotomicElement:
    a._check(b)
    x, y = a.coeffs, b.coeffs
    if len(x) < len(y):
        x, y = y, x
    out = list(x)
    for i, c in enumerate(y):
        out[i] += c
    return CyclotomicElement(a.order, out)


def cyclo_neg(a: CyclotomicElement) -> CyclotomicElement:
    return CyclotomicElement(a.order, [-c for c in a.coeffs])


def cyclo_sub(a: CyclotomicElement, b: CyclotomicElement) -> CyclotomicElement:
    return cyclo_add(a, cyclo_neg(b))


def cyclo_mul(a: CyclotomicElement, b: CyclotomicElement) -> CyclotomicElement:
    """Faltung der Repräsentanten, dann Reduktion mod Φ_N."""
    a._check(b)
    if not a.coeffs or not b.coeffs:
        return CyclotomicElement.zero(a.order)
    out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            if y:
                out[i + j] += x * y
    return CyclotomicElement(a.order, out)


def cyclo_inverse(a: CyclotomicElement) -> CyclotomicElement:
    """
    Inverses über den erweiterten euklidischen Algorithmus von rep gegen Φ_N.

    Raises:
        ArithmeticDomainError: für das Nullelement
    """
    if not isinstance(a, CyclotomicElement):
        raise ArithmeticDomainError(f"Kein CyclotomicElement: {a!r}")
    if a.is_zero():
        raise ArithmeticDomainError("Inverses von 0 existiert nicht")
    if a.is_rational():
        return CyclotomicElement.from_rational(a.order, 1 / a.rational_value())

    # Invariante: s_i * a ≡ r_i (mod Φ_N)
    r0, r1 = cyclotomic_polynomial(a.order), a.rep
    s0, s1 = RationalPolynomial(), ONE
    while not r1.is_zero():
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - poly_mul(q, s1)
    if r0.degree != 0:
        raise ArithmeticDomainError(f"ggT mit Φ_{a.order} ist nicht konstant (interner Fehler)")
    return CyclotomicElement(a.order, s0.scale(1 / r0.coeffs[0]).coeffs)


def root_power(order: int, exponent: int) -> CyclotomicElement:
    """Kanonischer Repräsentant von ζ_N^{e mod N}."""
    if order < 1:
        raise ArithmeticDomainError(f"Ordnung muss >= 1 sein (order={order})")
    e = exponent % order
    return CyclotomicElement(order, [0] * e + [1])


def to_common_order(a: CyclotomicElement, target: int) -> CyclotomicElement:
    """
    Hebt a nach Q(ζ_M) über ζ_N = ζ_M^{M/N}.

    Raises:
        ArithmeticDomainError: wenn a.order kein Teiler von M ist
    """
    if target < 1 or target % a.order != 0:
        raise ArithmeticDomainError(f"Ordnung {a.order} teilt Zielordnung {target} nicht")
    step = target // a.order
    out = [Fraction(0)] * (step * max(len(a.coeffs) - 1, 0) + 1)
    for i, c in enumerate(a.coeffs):
        out[i * step] = c
    return CyclotomicElement(target, out)


def root_sum(order: int, exponents: Iterable[int], weights: Optional[Sequence[int]] = None) -> CyclotomicElement:
    """Σ w_i ζ_N^{e_i} als Element von Q(ζ_N)."""
    out = [Fraction(0)] * order
    exponents = list(exponents)
    weights = list(weights) if weights is not None else [1] * len(exponents)
    for e, w in zip(exponents, weights):
        out[e % order] += w
    return CyclotomicElement(order, out)


def coordinates_in_root_basis(element: CyclotomicElement) -> List[Fraction]:
    """Koordinaten bzgl. ζ^0 .. ζ^{φ(N)-1}, aufgefüllt auf Länge φ(N)."""
    n = euler_phi(element.order)
    return list(element.coeffs) + [Fraction(0)] * (n - len(element.coeffs))


# ============================================================================
# Abspalten von Kreisteilungsfaktoren
# ============================================================================

@dataclass(frozen=True)
class CycloFactorCertificate:
    """Zertifikat p = Π Φ_d^{mult} · remainder."""

    factors: Tuple[Tuple[int, int], ...]
    remainder: RationalPolynomial = field(default=ONE)

    def rebuild(self) -> RationalPolynomial:
        result = self.remainder
        for d, mult in self.factors:
            result = poly_mul(result, cyclotomic_polynomial(d) ** mult)
        return result

    def is_complete(self) -> bool:
        return self.remainder == ONE

    @property
    def orders(self) -> List[int]:
        return [d for d, _ in self.factors]

    def multiplicity(self, d: int) -> int:
        return dict(self.factors).get(d, 0)

    def render_multiset(self) -> str:
        """Kompakte Form "{1:3;2:2;3:2}"."""
        return "{" + ";".join(f"{d}:{mult}" for d, mult in self.factors) + "}"

    def to_dict(self) -> dict:
        return {
            "factors": [{"d": d, "multiplicity": mult} for d, mult in self.factors],
            "remainder": self.remainder.to_json(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CycloFactorCertificate":
        return cls(
            factors=tuple((int(f["d"]), int(f["multiplicity"])) for f in data["factors"]),
            remainder=RationalPolynomial.from_json(data["remainder"]),
        )


def lcm_of_orders(cert: CycloFactorCertificate) -> int:
    return math.lcm(*cert.orders) if cert.factors else 1


def cyclotomic_candidates(degree: int) -> List[int]:
    """Alle d <= 2*deg² mit φ(d) <= deg (φ(d) >= sqrt(d/2) macht die Liste vollständig)."""
    if degree < 1:
        return []
    return [d for d in range(1, 2 * degree * degree + 1) if euler_phi(d) <= degree]


def _may_vanish(coeffs: Sequence[Fraction], d: int) -> bool:
    """Float-Vorfilter: False nur wenn p(ζ_d) sicher != 0 ist."""
    values = np.array([float(c) for c in coeffs], dtype=float)
    z = np.exp(2j * np.pi / d)
    value = np.polyval(values[::-1], z)
    scale = float(np.abs(values).sum())
    return abs(value) <= 1e-6 * max(scale, 1.0)


def strip_cyclotomic_factors(p: RationalPolynomial) -> CycloFactorCertificate:
    """
    Spaltet alle Φ_d-Faktoren von p per Probedivision ab.

    Args:
        p: monisches Polynom != 0

    Returns:
        CycloFactorCertificate mit sortierten (d, Vielfachheit) und Rest
    """
    if p.is_zero():
        raise ArithmeticDomainError("Nullpolynom hat keine Kreisteilungszerlegung")
    if not p.is_monic():
        raise ArithmeticDomainError(f"Polynom ist nicht monisch: {p.render()}")

    remainder = p
    factors: List[Tuple[int, int]] = []
    for d in cyclotomic_candidates(p.degree):
        if euler_phi(d) > remainder.degree:
            continue
        if not _may_vanish(remainder.coeffs, d):
            continue
        phi = cyclotomic_polynomial(d)
        mult = 0
        while remainder.degree >= phi.degree:
            quotient, rem = poly_divrem(remainder, phi)
            if not rem.is_zero():
                break
            remainder = quotient
            mult += 1
        if mult:
            factors.append((d, mult))
        if remainder.degree == 0:
            break

    logger.debug(f"Kreisteilungsfaktoren von Grad {p.degree}: {factors}, Rest-Grad {remainder.degree}")
    return CycloFactorCertificate(factors=tuple(factors), remainder=remainder)
