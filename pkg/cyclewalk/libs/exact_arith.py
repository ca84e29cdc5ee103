"""
Exakte Arithmetik für cyclewalk

Rationale Skalare (fractions.Fraction) und dichte univariate Polynome über Q.
Alle Werte sind nach der Konstruktion unveränderlich; es wird nirgends gerundet.

Serialisierung:
- Rational als String "num/den" (den entfällt bei 1)
- Polynom als aufsteigend sortiertes Koeffizienten-Array
"""
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union
import logging

from cyclewalk.errors import ArithmeticDomainError

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]


# ============================================================================
# Rationale Skalare
# ============================================================================

def as_fraction(value: Union[Scalar, str]) -> Fraction:
    """Wandelt int / Fraction / "num/den" in eine kanonische Fraction um."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ArithmeticDomainError(f"Bool ist kein rationaler Wert: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise ArithmeticDomainError(f"Kein exakter Wert: {value!r} ({type(value).__name__})")


def format_rational(value: Fraction) -> str:
    """Fraction -> "num/den" (den entfällt bei 1)."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """"num/den" -> Fraction; wirft ArithmeticDomainError bei ungültiger Eingabe."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ArithmeticDomainError(f"Ungültige rationale Zahl {text!r}: {e}")


# ============================================================================
# Dichte Polynome über Q
# ============================================================================

class RationalPolynomial:
    """
    Dichtes Polynom über Q, Koeffizient i gehört zu x^i.

    Der höchste Koeffizient ist nie 0; das Nullpolynom hat die leere Liste.
    Gleichheit ist strukturelle Gleichheit der kanonischen Form.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Union[Scalar, str]] = ()):
        values = [as_fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPolynomial ist unveränderlich")

    def __reduce__(self):
        return (RationalPolynomial, (self.coeffs,))

    # --- Konstruktoren ------------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar) -> "RationalPolynomial":
        return cls([value])

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "RationalPolynomial":
        if exponent < 0:
            raise ArithmeticDomainError(f"Negativer Exponent {exponent}")
        return cls([0] * exponent + [coeff])

    @classmethod
    def x_power_minus_one(cls, n: int) -> "RationalPolynomial":
        """x^n - 1"""
        if n < 1:
            raise ArithmeticDomainError(f"x^n - 1 benötigt n >= 1 (n={n})")
        return cls([-1] + [0] * (n - 1) + [1])

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> "RationalPolynomial":
        result = ONE
        for r in roots:
            result = poly_mul(result, cls([-as_fraction(r), 1]))
        return result

    # --- Eigenschaften ------------------------------------------------------

    @property
    def degree(self) -> int:
        """Grad; -1 für das Nullpolynom."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    # --- Operatoren ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPolynomial([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other):
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return poly_sub(self, _coerce(other))

    def __rsub__(self, other):
        return poly_sub(_coerce(other), self)

    def __neg__(self):
        return poly_neg(self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return poly_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RationalPolynomial":
        if exponent < 0:
            raise ArithmeticDomainError("Negative Potenzen von Polynomen sind nicht definiert")
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = poly_mul(result, base)
            base = poly_mul(base, base)
            exponent >>= 1
        return result

    def __divmod__(self, other):
        return poly_divrem(self, _coerce(other))

    def __call__(self, value: Scalar) -> Fraction:
        return poly_eval(self, as_fraction(value))

    def __repr__(self) -> str:
        return f"RationalPolynomial({self.render()})"

    # --- Hilfsfunktionen ----------------------------------------------------

    def scale(self, factor: Scalar) -> "RationalPolynomial":
        factor = as_fraction(factor)
        return RationalPolynomial(c * factor for c in self.coeffs)

    def reverse(self, n: int) -> "RationalPolynomial":
        """u^n * p(1/u) für deg(p) <= n."""
        if self.degree > n:
            raise ArithmeticDomainError(f"Umkehrung mit n={n} < Grad {self.degree}")
        padded = list(self.coeffs) + [Fraction(0)] * (n + 1 - len(self.coeffs))
        return RationalPolynomial(reversed(padded))

    def substitute_scaled(self, factor: Scalar) -> "RationalPolynomial":
        """p(factor * x)"""
        factor = as_fraction(factor)
        power, out = Fraction(1), []
        for c in self.coeffs:
            out.append(c * power)
            power *= factor
        return RationalPolynomial(out)

    def lowest_degree(self) -> int:
        """Kleinster Exponent mit Koeffizient != 0 (Nullpolynom: -1)."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return -1

    def shift_down(self, e: int) -> "RationalPolynomial":
        """p / x^e, sofern x^e teilt."""
        if any(c != 0 for c in self.coeffs[:e]):
            raise ArithmeticDomainError(f"x^{e} teilt {self.render()} nicht")
        return RationalPolynomial(self.coeffs[e:])

    def as_integer_list(self) -> List[int]:
        if not poly_is_integer(self):
            raise ArithmeticDomainError(f"Polynom ist nicht ganzzahlig: {self.render()}")
        return [c.numerator for c in self.coeffs]

    def to_json(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "RationalPolynomial":
        return cls(parse_rational(str(c)) for c in data)

    def render(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if i == 0:
                body = format_rational(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{format_rational(mag)}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _coerce(value) -> RationalPolynomial:
    if isinstance(value, RationalPolynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalPolynomial([value])
    raise ArithmeticDomainError(f"Kein Polynom: {value!r}")


ZERO = RationalPolynomial()
ONE = RationalPolynomial([1])
X = RationalPolynomial([0, 1])


# ============================================================================
# Ring-Operationen
# ============================================================================

def poly_add(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    a, b = p.coeffs, q.coeffs
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return RationalPolynomial(out)


def poly_neg(p: RationalPolynomial) -> RationalPolynomial:
    return RationalPolynomial(-c for c in p.coeffs)


def poly_sub(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    return poly_add(p, poly_neg(q))


def poly_mul(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    """Faltung der Koeffizientenlisten."""
    if not p.coeffs or not q.coeffs:
        return ZERO
    out = [Fraction(0)] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            if b:
                out[i + j] += a * b
    return RationalPolynomial(out)


def poly_divrem(p: RationalPolynomial, d: RationalPolynomial) -> Tuple[RationalPolynomial, RationalPolynomial]:
    """
    Division mit Rest: p = q*d + r mit deg(r) < deg(d).

    Raises:
        ArithmeticDomainError: wenn d das Nullpolynom ist
    """
    if d.is_zero():
        raise ArithmeticDomainError("Division durch das Nullpolynom")
    dd = d.degree
    if p.degree < dd:
        return ZERO, p
    lc = d.leading
    rem = list(p.coeffs)
    quot = [Fraction(0)] * (len(rem) - dd)
    divisor = [(j, c) for j, c in enumerate(d.coeffs) if c != 0]
    for i in range(len(rem) - 1, dd - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        q = c if lc == 1 else c / lc
        quot[i - dd] = q
        base = i - dd
        for j, dc in divisor:
            rem[base + j] -= q * dc
    return RationalPolynomial(quot), RationalPolynomial(rem[:dd])


def poly_is_integer(p: RationalPolynomial) -> bool:
    return all(c.denominator == 1 for c in p.coeffs)


def poly_eval(p: RationalPolynomial, v: Scalar) -> Fraction:
    """Horner-Auswertung (exakt)."""
    v = as_fraction(v)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * v + c
    return acc


def first_non_integer(p: RationalPolynomial):
    """(Grad, Wert) des niedrigsten nicht-ganzzahligen Koeffizienten oder None."""
    for i, c in enumerate(p.coeffs):
        if c.denominator != 1:
            return i, c
    return None


# ============================================================================
# Rationale Funktionen
# ============================================================================

class RationalFunction:
    """Quotient numerator/denominator zweier Polynome; Gleichheit per Kreuzmultiplikation."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: RationalPolynomial, denominator: RationalPolynomial):
        if denominator.is_zero():
            raise ArithmeticDomainError("Nenner einer rationalen Funktion ist das Nullpolynom")
        object.__setattr__(self, "numerator", _coerce(numerator))
        object.__setattr__(self, "denominator", _coerce(denominator))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction ist unveränderlich")

    def __reduce__(self):
        return (RationalFunction, (self.numerator, self.denominator))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return poly_mul(self.numerator, other.denominator) == poly_mul(other.numerator, self.denominator)

    def __hash__(self):
        raise TypeError("RationalFunction ist nicht hashbar (Gleichheit per Kreuzprodukt)")

    def __neg__(self):
        return RationalFunction(poly_neg(self.numerator), self.denominator)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(poly_mul(self.numerator, other.numerator),
                                poly_mul(self.denominator, other.denominator))

    def evaluate(self, v: Scalar) -> Fraction:
        den = poly_eval(self.denominator, v)
        if den == 0:
            raise ArithmeticDomainError(f"Polstelle bei {format_rational(as_fraction(v))}")
        return poly_eval(self.numerator, v) / den

    def render(self, var: str = "u") -> str:
        return f"({self.numerator.render(var)}) / ({self.denominator.render(var)})"

    def to_json(self) -> dict:
        return {"numerator": self.numerator.to_json(), "denominator": self.denominator.to_json()}

    def __repr__(self) -> str:
        return f"RationalFunction({self.render('x')})"


# ============================================================================
# Interpolation und Determinanten
# ============================================================================

def interpolate(nodes: Sequence[Scalar], values: Sequence[Scalar]) -> RationalPolynomial:
    """
    Exakte Newton-Interpolation durch (nodes[i], values[i]).

    Args:
        nodes: paarweise verschiedene rationale Stützstellen
        values: Funktionswerte

    Returns:
        Das eindeutige Polynom vom Grad < len(nodes)
    """
    xs = [as_fraction(x) for x in nodes]
    if len(set(xs)) != len(xs):
        raise ArithmeticDomainError("Interpolationsknoten müssen verschieden sein")
    coef = [as_fraction(y) for y in values]
    n = len(xs)
    # dividierte Differenzen in place
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level])
    result = RationalPolynomial([coef[-1]]) if n else ZERO
    for i in range(n - 2, -1, -1):
        result = poly_add(poly_mul(result, RationalPolynomial([-xs[i], 1])), RationalPolynomial([coef[i]]))
    return result


def integer_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Bareiss-Elimination (bruchfrei) für ganzzahlige quadratische Matrizen."""
    a = [list(row) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ArithmeticDomainError("Determinante benötigt eine quadratische Matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        akk = a[k][k]
        tail_k = a[k][k + 1:]
        for i in range(k + 1, n):
            row_i = a[i]
            aik = row_i[k]
            if aik == 0:
                row_i[k + 1:] = [(x * akk) // prev for x in row_i[k + 1:]]
            else:
                row_i[k + 1:] = [(x * akk - aik * y) // prev for x, y in zip(row_i[k + 1:], tail_k)]
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]
