"""
Zeta-Engine

- Walk-Zeta ζ(u) = det(I - uU)^{-1} exakt über die Koeffizientenumkehr von f_N
- Erkennung der Kurokawa-Form ±x^{l/2} Π(x^m - 1) / Π(x^n - 1)
- Deskriptor der absoluten Zeta-Funktion (Teilmengen-Terme, deg f, D, C)
- Numerik: multiple Hurwitz-Zeta und Mellin-Darstellung von Z_f(w, s)
"""
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math
import sys

import mpmath
import numpy as np

# Pfad für Imports hinzufügen
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from config import config as cyclewalk_config
from cyclewalk.errors import ArithmeticDomainError, InternalCheckError, SpecError
from cyclewalk.libs.cyclotomic import strip_cyclotomic_factors
from cyclewalk.libs.exact_arith import (
    ONE,
    RationalFunction,
    RationalPolynomial,
    format_rational,
    integer_determinant,
    interpolate,
    poly_is_integer,
    poly_mul,
)
from cyclewalk.spectral_engine import CharPolyBundle, full_charpoly
from cyclewalk.walk_builder import WalkSpec, evolution_matrix

DIRECT_CHECK_MAX_DIM = cyclewalk_config.DIRECT_CHECK_MAX_DIM
MAX_SUBSET_FACTORS = cyclewalk_config.MAX_SUBSET_FACTORS
MELLIN_SPLIT_POINT = cyclewalk_config.MELLIN_SPLIT_POINT
MPMATH_DPS = cyclewalk_config.MPMATH_DPS
HURWITZ_MAX_RADIUS = cyclewalk_config.HURWITZ_MAX_RADIUS

logger = logging.getLogger(__name__)


# ============================================================================
# Walk-Zeta
# ============================================================================

@dataclass(frozen=True)
class WalkZeta:
    """ζ(u) = 1 / denominator(u) mit denominator = det(I - uU)."""

    spec: WalkSpec
    denominator: RationalPolynomial

    def as_rational_function(self) -> RationalFunction:
        return RationalFunction(ONE, self.denominator)

    def to_dict(self) -> dict:
        return {
            "family": self.spec.family,
            "L": self.spec.states,
            "N": self.spec.vertices,
            "numerator": ["1"],
            "denominator": self.denominator.to_json(),
            "text": f"1 / ({self.denominator.render('u')})",
        }


def direct_zeta_denominator(spec: WalkSpec) -> RationalPolynomial:
    """det(I - uU) per Bareiss an LN+1 ganzzahligen Stellen: L^{-LN}·det(L·I - u·B), B = L·U."""
    u_matrix = evolution_matrix(spec)
    b = u_matrix.integer_scaled()
    n = u_matrix.dimension
    L = spec.states
    nodes = list(range(n + 1))
    values = []
    for u in nodes:
        values.append(integer_determinant(
            [[(L if i == j else 0) - u * b[i][j] for j in range(n)] for i in range(n)]
        ))
    return interpolate(nodes, values).scale(Fraction(1, L ** n))


def walk_zeta(spec: WalkSpec, bundle: Optional[CharPolyBundle] = None,
              verify_direct: Optional[bool] = None) -> WalkZeta:
    """
    Exakte Walk-Zeta über det(I - uU) = u^{LN} f_N(1/u).

    Raises:
        InternalCheckError: wenn denominator(0) != 1 oder die direkte Determinante abweicht
    """
    if bundle is None:
        bundle = full_charpoly(spec, verify_direct=False)
    denominator = bundle.product.reverse(spec.dimension)
    if denominator.coeff(0) != 1:
        raise InternalCheckError(f"det(I - uU) hat für {spec.label} nicht den Wert 1 bei u = 0")

    if verify_direct is None:
        verify_direct = spec.dimension <= DIRECT_CHECK_MAX_DIM
    if verify_direct and direct_zeta_denominator(spec) != denominator:
        raise InternalCheckError(f"Umkehridentität für {spec.label} verletzt")
    return WalkZeta(spec=spec, denominator=denominator)


def walk_zeta_closed_form(states: int) -> RationalFunction:
    """-(u-1)^{L-2} / ((u²-1)^{L-1} (u^L-1)^{L-1})"""
    if states < 3 or states % 2 == 0:
        raise SpecError(f"L muss ungerade und >= 3 sein (L={states})")
    u_minus_one = RationalPolynomial([-1, 1])
    numerator = -(u_minus_one ** (states - 2))
    denominator = poly_mul(RationalPolynomial.x_power_minus_one(2) ** (states - 1),
                           RationalPolynomial.x_power_minus_one(states) ** (states - 1))
    return RationalFunction(numerator, denominator)


# ============================================================================
# Kurokawa-Form
# ============================================================================

@dataclass(frozen=True)
class KurokawaForm:
    """sign · x^{l/2} · Π_i (x^{m(i)} - 1) / Π_j (x^{n(j)} - 1)"""

    sign: int
    l: int
    m_list: Tuple[int, ...]
    n_list: Tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise SpecError(f"Vorzeichen muss ±1 sein (sign={self.sign})")
        if self.l % 2:
            raise SpecError(f"l muss gerade sein (l={self.l})")
        if any(x < 1 for x in self.m_list + self.n_list):
            raise SpecError("Exponenten m(i), n(j) müssen positiv sein")

    @property
    def a(self) -> int:
        return len(self.m_list)

    @property
    def b(self) -> int:
        return len(self.n_list)

    @property
    def theorem_conformant(self) -> bool:
        return self.a >= 1 and self.b >= 1

    def expand(self) -> RationalFunction:
        numerator = RationalPolynomial([self.sign])
        denominator = ONE
        half = self.l // 2
        if half >= 0:
            numerator = numerator * RationalPolynomial.monomial(half)
        else:
            denominator = RationalPolynomial.monomial(-half)
        for m in self.m_list:
            numerator = poly_mul(numerator, RationalPolynomial.x_power_minus_one(m))
        for n in self.n_list:
            denominator = poly_mul(denominator, RationalPolynomial.x_power_minus_one(n))
        return RationalFunction(numerator, denominator)

    def render(self, var: str = "x") -> str:
        sign = "-" if self.sign < 0 else ""
        mono = "" if self.l == 0 else f"{var}^({self.l}/2)·"
        num = "·".join(f"({var}^{m}-1)" for m in self.m_list) or "1"
        den = "·".join(f"({var}^{n}-1)" for n in self.n_list) or "1"
        return f"{sign}{mono}{num} / {den}"

    def to_dict(self) -> dict:
        return {
            "sign": self.sign,
            "l": self.l,
            "m_list": list(self.m_list),
            "n_list": list(self.n_list),
            "theorem_conformant": self.theorem_conformant,
            "text": self.render(),
        }


def _cyclotomic_exponents(p: RationalPolynomial) -> Optional[Dict[int, int]]:
    """Φ_d-Exponenten eines monischen Polynoms oder None bei Rest != 1."""
    cert = strip_cyclotomic_factors(p)
    if not cert.is_complete():
        return None
    return dict(cert.factors)


def recognize_kurokawa(r: RationalFunction) -> Optional[KurokawaForm]:
    """
    Schreibt r als sign·x^{l/2}·Π(x^m - 1)/Π(x^n - 1), falls möglich.

    Monome werden abgespalten, Zähler und Nenner in Φ_d zerlegt und die
    Netto-Exponenten c_d von oben nach unten in (x^n - 1)-Exponenten
    e_n = c_n - Σ_{n | k, k > n} e_k umgerechnet. Das Ergebnis wird durch
    Ausmultiplizieren bestätigt.

    Returns:
        KurokawaForm oder None
    """
    num, den = r.numerator, r.denominator
    if not poly_is_integer(num) or not poly_is_integer(den):
        raise ArithmeticDomainError("Kurokawa-Erkennung benötigt ganzzahlige Zähler und Nenner")
    if num.is_zero():
        return None

    shift = num.lowest_degree() - den.lowest_degree()
    num = num.shift_down(num.lowest_degree())
    den = den.shift_down(den.lowest_degree())

    ratio = num.leading / den.leading
    if ratio not in (1, -1):
        logger.debug(f"Leitkoeffizienten-Verhältnis {format_rational(ratio)} ist nicht ±1")
        return None

    num_exp = _cyclotomic_exponents(num.scale(1 / num.leading))
    den_exp = _cyclotomic_exponents(den.scale(1 / den.leading))
    if num_exp is None or den_exp is None:
        return None

    net: Dict[int, int] = {}
    for d, e in num_exp.items():
        net[d] = net.get(d, 0) + e
    for d, e in den_exp.items():
        net[d] = net.get(d, 0) - e

    top = max(net) if net else 0
    power_exp: Dict[int, int] = {}
    for n in range(top, 0, -1):
        e = net.get(n, 0) - sum(power_exp.get(k, 0) for k in range(2 * n, top + 1, n))
        if e:
            power_exp[n] = e

    m_list = tuple(sorted(n for n, e in power_exp.items() if e > 0 for _ in range(e)))
    n_list = tuple(sorted(n for n, e in power_exp.items() if e < 0 for _ in range(-e)))
    form = KurokawaForm(sign=int(ratio), l=2 * shift, m_list=m_list, n_list=n_list)

    if form.expand() != r:
        logger.warning(f"⚠️  Kurokawa-Form {form.render()} reproduziert die Eingabe nicht")
        return None
    if not form.theorem_conformant:
        logger.info(f"Kurokawa-Form {form.render()} erfüllt a >= 1, b >= 1 nicht")
    return form


# ============================================================================
# Absolute Zeta: Deskriptor
# ============================================================================

@dataclass(frozen=True)
class SubsetTerm:
    """Gruppe der Teilmengen I mit |I| = subset_size und m(I) = shift."""

    subset_size: int
    multiplicity: int
    shift: int
    sign: int
    offset: Fraction

    def to_dict(self) -> dict:
        return {
            "subset_size": self.subset_size,
            "multiplicity": self.multiplicity,
            "shift": self.shift,
            "sign": self.sign,
            "argument_offset": format_rational(self.offset),
        }


@dataclass(frozen=True)
class FactorRecord:
    """Formaler Faktor Γ_b(s + offset, ω)^exponent bzw. S_b(...)^exponent."""

    function: str
    order: int
    offset: Fraction
    exponent: int

    def to_dict(self) -> dict:
        return {"function": self.function, "order": self.order,
                "argument_offset": format_rational(self.offset), "exponent": self.exponent}


@dataclass(frozen=True)
class AbsZetaDescriptor:
    form: KurokawaForm
    terms: Tuple[SubsetTerm, ...]
    omega: Tuple[int, ...]
    deg_f: Fraction
    D: int
    C: int
    zeta_factors: Tuple[FactorRecord, ...] = field(default_factory=tuple)
    epsilon_factors: Tuple[FactorRecord, ...] = field(default_factory=tuple)

    def signed_multiplicity_sum(self) -> int:
        return sum(t.sign * t.multiplicity for t in self.terms)

    def factor_lists_consistent(self) -> bool:
        """Γ- und S-Faktoren haben dieselbe (offset, exponent)-Multimenge."""
        key = lambda f: (f.offset, f.exponent)
        return sorted(map(key, self.zeta_factors)) == sorted(map(key, self.epsilon_factors))

    def to_dict(self) -> dict:
        return {
            "form": self.form.to_dict(),
            "terms": [t.to_dict() for t in self.terms],
            "omega": list(self.omega),
            "deg_f": format_rational(self.deg_f),
            "D": self.D,
            "C": self.C,
            "zeta_factors": [f.to_dict() for f in self.zeta_factors],
            "epsilon_factors": [f.to_dict() for f in self.epsilon_factors],
            "text": self.render_text(),
        }

    def render_text(self) -> str:
        b = len(self.omega)
        omega = "(" + ",".join(str(x) for x in self.omega) + ")"

        def arg(offset: Fraction) -> str:
            if offset == 0:
                return "s"
            return f"s{'+' if offset > 0 else '-'}{format_rational(abs(offset))}"

        series = []
        for t in self.terms:
            coeff = t.sign * t.multiplicity
            lead = "-" if coeff < 0 else "+"
            mult = "" if abs(coeff) == 1 else f"{abs(coeff)}·"
            series.append(f"{lead} {mult}ζ_{b}(w, {arg(t.offset)}, {omega})")
        zeta = " · ".join(f"Γ_{b}({arg(f.offset)}, ω)^{f.exponent}" for f in self.zeta_factors)
        eps = " · ".join(f"S_{b}({arg(f.offset)}, ω)^{f.exponent}" for f in self.epsilon_factors)
        return "\n".join([
            f"Z_f(w,s) = {' '.join(series).lstrip('+ ')}",
            f"ζ_f(s) = {zeta}",
            f"ε_f(s) = {eps}",
            f"ζ_f(D-s)^C = ε_f(s)·ζ_f(s)  mit  deg f = {format_rational(self.deg_f)}, D = {self.D}, C = {self.C}",
        ])

    def subset_series(self, w: float, s: float, tol: Optional[float] = None) -> float:
        """Σ_terms sign·mult·ζ_b(w, s + offset, ω) numerisch."""
        tol = tol if tol is not None else cyclewalk_config.DEFAULT_TOLERANCE
        weight = sum(t.multiplicity for t in self.terms) or 1
        total = 0.0
        for t in self.terms:
            value = eval_multiple_hurwitz(w, s + float(t.offset), self.omega, tol / weight)
            total += t.sign * t.multiplicity * value
        return total


def absolute_zeta_descriptor(form: KurokawaForm) -> AbsZetaDescriptor:
    """
    Teilmengen-Entwicklung Z_f(w,s) = Σ_I (-1)^{|I|} ζ_b(w, s - deg f + m(I), n).

    Teilmengen werden nach (|I|, m(I)) gruppiert; das Vorzeichen der Form
    geht in jeden Term ein.

    Raises:
        SpecError: b = 0 oder a > MAX_SUBSET_FACTORS
    """
    if form.b < 1:
        raise SpecError("Deskriptor benötigt b >= 1 (mindestens ein Nennerfaktor)")
    if form.a > MAX_SUBSET_FACTORS:
        raise SpecError(f"a = {form.a} überschreitet MAX_SUBSET_FACTORS = {MAX_SUBSET_FACTORS}")

    deg_f = Fraction(form.l, 2) + sum(form.m_list) - sum(form.n_list)
    D = form.l + sum(form.m_list) - sum(form.n_list)
    C = 1 if (form.a - form.b) % 2 == 0 else -1

    # (|I|, m(I)) -> Anzahl
    groups: Dict[Tuple[int, int], int] = {(0, 0): 1}
    for m in form.m_list:
        updated = dict(groups)
        for (size, total), count in groups.items():
            k = (size + 1, total + m)
            updated[k] = updated.get(k, 0) + count
        groups = updated

    terms = []
    for (size, total), count in sorted(groups.items()):
        sign = form.sign * (-1) ** size
        terms.append(SubsetTerm(subset_size=size, multiplicity=count, shift=total,
                                sign=sign, offset=total - deg_f))

    zeta_factors = tuple(FactorRecord("Γ", form.b, t.offset, t.sign * t.multiplicity) for t in terms)
    epsilon_factors = tuple(FactorRecord("S", form.b, t.offset, t.sign * t.multiplicity) for t in terms)
    return AbsZetaDescriptor(
        form=form,
        terms=tuple(terms),
        omega=tuple(sorted(form.n_list)),
        deg_f=deg_f,
        D=D,
        C=C,
        zeta_factors=zeta_factors,
        epsilon_factors=epsilon_factors,
    )


# ============================================================================
# Numerik
# ============================================================================

def _hurwitz_tail_bound(w: float, omega: Sequence[int], radius: int) -> float:
    """Obere Schranke für Σ_{n·ω > R} (n·ω + x)^{-w}."""
    r = len(omega)
    prod = float(np.prod(omega))
    return ((1 + sum(omega) / radius) ** r * w * radius ** (r - w)
            / ((w - r) * math.factorial(r) * prod))


def lattice_counts(omega: Sequence[int], radius: int) -> np.ndarray:
    """c[v] = #{n >= 0 : n·ω = v} für v <= radius (Erzeugende Π 1/(1 - q^ω))."""
    counts = np.zeros(radius + 1, dtype=float)
    counts[0] = 1.0
    for step in omega:
        for residue in range(min(step, radius + 1)):
            counts[residue::step] = np.cumsum(counts[residue::step])
    return counts


def eval_multiple_hurwitz(w: float, x: float, omega: Sequence[int], tol: float) -> float:
    """
    ζ_r(w, x, ω) = Σ_{n >= 0} (n·ω + x)^{-w} mit garantiertem Fehler < tol.

    Raises:
        SpecError: w <= r, x <= 0, ω_i < 1 oder tol <= 0
        ArithmeticDomainError: tol ist mit R <= HURWITZ_MAX_RADIUS nicht erreichbar
    """
    omega = [int(o) for o in omega]
    r = len(omega)
    if r < 1 or any(o < 1 for o in omega):
        raise SpecError(f"ω muss aus positiven ganzen Zahlen bestehen: {omega}")
    if w <= r:
        raise SpecError(f"Konvergenz benötigt w > r (w={w}, r={r})")
    if x <= 0:
        raise SpecError(f"x muss positiv sein (x={x})")
    if tol <= 0:
        raise SpecError(f"tol muss positiv sein (tol={tol})")

    radius = 64
    while _hurwitz_tail_bound(w, omega, radius) >= tol / 2:
        radius *= 2
        if radius > HURWITZ_MAX_RADIUS:
            raise ArithmeticDomainError(
                f"ζ_{r}(w={w}) mit tol={tol} braucht R > {HURWITZ_MAX_RADIUS}; w näher an r={r} oder tol größer wählen"
            )
    counts = lattice_counts(omega, radius)
    values = np.arange(radius + 1, dtype=float) + x
    total = float(np.sum(counts * values ** (-w)))
    logger.debug(f"ζ_{r}(w={w}, x={x}, ω={omega}) mit R={radius}: {total}")
    return total


def _mellin_integrand(form: KurokawaForm, s: mpmath.mpf, w: mpmath.mpf):
    half = mpmath.mpf(form.l) / 2

    def integrand(t):
        if t == 0:
            return mpmath.mpf(0)
        value = form.sign * mpmath.exp((half - s) * t) * mpmath.power(t, w - 1)
        for m in form.m_list:
            value *= mpmath.expm1(m * t)
        for n in form.n_list:
            value /= mpmath.expm1(n * t)
        return value

    return integrand


def eval_Zf_mellin(form: KurokawaForm, w: float, s: float, tol: float) -> float:
    """
    Z_f(w,s) = (1/Γ(w)) ∫_0^∞ f(e^t) e^{-st} t^{w-1} dt numerisch.

    [0, t0] und [t0, T] per mpmath.quad (tanh-sinh), T aus der Schranke
    |f(e^t)| <= K·e^{deg f·t} (t >= t0) über die unvollständige Gammafunktion.

    Raises:
        SpecError: w <= b - a, s <= deg f oder tol <= 0
        InternalCheckError: wenn die Quadratur die Toleranz nicht erreicht
    """
    deg_f = Fraction(form.l, 2) + sum(form.m_list) - sum(form.n_list)
    if w <= form.b - form.a:
        raise SpecError(f"Mellin-Integral benötigt w > b - a (w={w}, b-a={form.b - form.a})")
    if s <= deg_f:
        raise SpecError(f"Mellin-Integral benötigt s > deg f (s={s}, deg f={format_rational(deg_f)})")
    if tol <= 0:
        raise SpecError(f"tol muss positiv sein (tol={tol})")

    with mpmath.workdps(MPMATH_DPS):
        w_mp, s_mp = mpmath.mpf(w), mpmath.mpf(s)
        t0 = mpmath.mpf(MELLIN_SPLIT_POINT)
        decay = s_mp - mpmath.mpf(deg_f.numerator) / deg_f.denominator
        bound = mpmath.mpf(1)
        for n in form.n_list:
            bound /= -mpmath.expm1(-n * t0)

        t_max = t0 + 1
        while bound * mpmath.gammainc(w_mp, decay * t_max, mpmath.inf, regularized=True) / decay ** w_mp >= tol / 4:
            t_max *= 2

        integrand = _mellin_integrand(form, s_mp, w_mp)
        gamma_w = mpmath.gamma(w_mp)
        for degree in (6, 8, 10):
            value, error = mpmath.quad(integrand, [0, t0, t_max], error=True, maxdegree=degree)
            if error / gamma_w < tol / 2:
                break
        else:
            raise InternalCheckError(
                f"Quadratur erreicht tol={tol} nicht (Fehlerschätzung {mpmath.nstr(error / gamma_w, 5)})"
            )
        result = value / gamma_w

    logger.debug(f"Z_f(w={w}, s={s}) = {mpmath.nstr(result, 12)} (T={mpmath.nstr(t_max, 6)})")
    return float(result)
