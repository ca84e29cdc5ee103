"""
Walk-Builder: Münzmatrizen, Impulsmatrix und Zeitentwicklungsoperator U

Basis (vertex-major): (v, c) ↦ v*L + c, Chiralitäten ←m, …, ←1, ·, 1→, …, m→.
Alle Einträge sind exakte Fractions.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Literal, Tuple
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from cyclewalk.errors import SpecError
from cyclewalk.libs.cyclotomic import CyclotomicElement, root_power
from cyclewalk.libs.exact_arith import format_rational

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[Fraction, ...], ...]


# ============================================================================
# Walk-Spezifikation
# ============================================================================

class WalkSpec(BaseModel):
    """Grover-Walk der Familie M oder F mit L Chiralitäten auf dem Kreis C_N."""

    model_config = ConfigDict(frozen=True)

    family: Literal["M", "F"]
    states: int
    vertices: int

    @field_validator("states")
    @classmethod
    def _odd_states(cls, value: int) -> int:
        if value < 3 or value % 2 == 0:
            raise ValueError(f"L muss ungerade und >= 3 sein (L={value})")
        return value

    @field_validator("vertices")
    @classmethod
    def _enough_vertices(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"N muss >= 2 sein (N={value})")
        return value

    @property
    def L(self) -> int:
        return self.states

    @property
    def N(self) -> int:
        return self.vertices

    @property
    def m(self) -> int:
        return (self.states - 1) // 2

    @property
    def dimension(self) -> int:
        return self.states * self.vertices

    @property
    def label(self) -> str:
        return f"{self.family},{self.states},{self.vertices}"

    def sort_key(self) -> Tuple[str, int, int]:
        return (self.family, self.states, self.vertices)


def chirality_labels(spec: WalkSpec) -> List[str]:
    m = spec.m
    return [f"←{m - c}" for c in range(m)] + ["·"] + [f"{j}→" for j in range(1, m + 1)]


def chirality_shift(spec: WalkSpec, c: int) -> int:
    """
    Spalten-Offset der Zeile mit Chiralität c: σ(←j) = +j, σ(·) = 0, σ(j→) = -j.

    Zeile (v, c) von U hat ihre Einträge im Knoten v + σ(c) (mod N).
    """
    if not 0 <= c < spec.states:
        raise SpecError(f"Chiralitätsindex {c} außerhalb von 0..{spec.states - 1}")
    return spec.m - c


# ============================================================================
# Münzmatrizen
# ============================================================================

@dataclass(frozen=True)
class CoinMatrix:
    """Lokale Grover-Münze A^M oder A^F (L×L, rational)."""

    family: str
    entries: Matrix

    @property
    def size(self) -> int:
        return len(self.entries)

    def row(self, c: int) -> Tuple[Fraction, ...]:
        return self.entries[c]

    def transpose(self) -> Matrix:
        return tuple(zip(*self.entries))

    def is_orthogonal(self) -> bool:
        n = self.size
        for i in range(n):
            for j in range(i, n):
                dot = sum(self.entries[i][t] * self.entries[j][t] for t in range(n))
                if dot != (1 if i == j else 0):
                    return False
        return True

    def is_symmetric(self) -> bool:
        return self.entries == self.transpose()

    def is_persymmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[n - 1 - j][n - 1 - i]
                   for i in range(n) for j in range(n))

    def to_json(self) -> List[List[str]]:
        return [[format_rational(x) for x in row] for row in self.entries]


def coin_matrix(spec: WalkSpec) -> CoinMatrix:
    """
    M: Diagonale -(2m-1)/L, sonst 2/L.
    F: Antidiagonale -(2m-1)/L, sonst 2/L.
    """
    L, m = spec.states, spec.m
    marked = Fraction(-(2 * m - 1), L)
    other = Fraction(2, L)
    rows = []
    for i in range(L):
        j_marked = i if spec.family == "M" else L - 1 - i
        rows.append(tuple(marked if j == j_marked else other for j in range(L)))
    return CoinMatrix(family=spec.family, entries=tuple(rows))


# ============================================================================
# Impulsmatrix und Sektoren
# ============================================================================

def _check_sector(spec: WalkSpec, k: int):
    if not 0 <= k < spec.vertices:
        raise SpecError(f"Sektor k={k} außerhalb von 0..{spec.vertices - 1}")


def momentum_diagonal(spec: WalkSpec, k: int) -> List[CyclotomicElement]:
    """Diagonale von Z_L^k: (ζ_N^{mk}, …, 1, …, ζ_N^{-mk})."""
    _check_sector(spec, k)
    return [root_power(spec.vertices, chirality_shift(spec, c) * k) for c in range(spec.states)]


def momentum_matrix(spec: WalkSpec, k: int) -> List[List[CyclotomicElement]]:
    """Z_L^k als volle L×L-Diagonalmatrix über Q(ζ_N)."""
    diag = momentum_diagonal(spec, k)
    zero = CyclotomicElement.zero(spec.vertices)
    return [[diag[i] if i == j else zero for j in range(spec.states)] for i in range(spec.states)]


def sector_matrix(spec: WalkSpec, k: int) -> List[List[CyclotomicElement]]:
    """Z_L^k · A über Q(ζ_N): Zeile c wird mit ζ_N^{σ(c)k} multipliziert."""
    diag = momentum_diagonal(spec, k)
    coin = coin_matrix(spec)
    return [[diag[c] * a for a in coin.row(c)] for c in range(spec.states)]


def selection_block(spec: WalkSpec, j: int) -> Matrix:
    """
    Zeilen-Selektion von A zur Verschiebung j (-m <= j <= m).

    j > 0 entspricht dem Block L_j (Chiralität ←j), j < 0 dem Block R_{|j|},
    j = 0 dem Block S.
    """
    if abs(j) > spec.m:
        raise SpecError(f"Verschiebung {j} außerhalb von -{spec.m}..{spec.m}")
    coin = coin_matrix(spec)
    zero_row = tuple(Fraction(0) for _ in range(spec.states))
    return tuple(coin.row(c) if chirality_shift(spec, c) == j else zero_row
                 for c in range(spec.states))


# ============================================================================
# Zeitentwicklungsoperator
# ============================================================================

@dataclass(frozen=True)
class EvolutionMatrix:
    """U = S·C als dichte LN×LN-Matrix."""

    spec: WalkSpec
    entries: Matrix

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def block(self, v: int, w: int) -> Matrix:
        L = self.spec.states
        return tuple(tuple(self.entries[v * L + a][w * L: (w + 1) * L]) for a in range(L))

    def nonzero_rows(self) -> List[List[Tuple[int, Fraction]]]:
        return [[(j, x) for j, x in enumerate(row) if x != 0] for row in self.entries]

    def integer_scaled(self) -> List[List[int]]:
        """L·U mit ganzzahligen Einträgen."""
        L = self.spec.states
        return [[int(x * L) for x in row] for row in self.entries]

    def is_orthogonal(self) -> bool:
        """Exakter Test U·Uᵀ = I über die dünn besetzten Zeilen."""
        rows = [dict(r) for r in self.nonzero_rows()]
        n = self.dimension
        for i in range(n):
            for j in range(i, n):
                a, b = rows[i], rows[j]
                if len(a) > len(b):
                    a, b = b, a
                dot = sum(x * b[col] for col, x in a.items() if col in b)
                if dot != (1 if i == j else 0):
                    return False
        return True

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def to_json(self) -> dict:
        return {
            "family": self.spec.family,
            "L": self.spec.states,
            "N": self.spec.vertices,
            "dimension": self.dimension,
            "rows": [[format_rational(x) for x in row] for row in self.entries],
        }


def evolution_matrix(spec: WalkSpec) -> EvolutionMatrix:
    """
    Baut U = S·C (vertex-major).

    Zeile (v, c) erhält A[c, :] im Knoten v + σ(c) mod N; fallen für N <= 2m
    mehrere Verschiebungen auf denselben Knoten, werden die Beiträge addiert.
    """
    L, N = spec.states, spec.vertices
    coin = coin_matrix(spec)
    dim = L * N
    rows: List[List[Fraction]] = [[Fraction(0)] * dim for _ in range(dim)]
    for v in range(N):
        for c in range(L):
            w = (v + chirality_shift(spec, c)) % N
            target = rows[v * L + c]
            for c2, a in enumerate(coin.row(c)):
                target[w * L + c2] += a

    logger.debug(f"U für {spec.label} gebaut (Dimension {dim})")
    return EvolutionMatrix(spec=spec, entries=tuple(tuple(r) for r in rows))


def block_offsets(spec: WalkSpec) -> Dict[int, List[int]]:
    """Knoten-Offset d (mod N) -> Liste der Verschiebungen j mit j ≡ d."""
    out: Dict[int, List[int]] = {}
    for j in range(-spec.m, spec.m + 1):
        out.setdefault(j % spec.vertices, []).append(j)
    return out
