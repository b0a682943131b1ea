"""
Linear algebra over Z/p^N
Smith normal form by minimal-valuation pivoting, cokernel profiles of ideals of Λ_n,
and ideal membership.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from iwasawa_sha.core.errors import LevelMismatch, PrecisionMismatch
from iwasawa_sha.services.algebra import AlgebraElement

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PMatrix:
    p: int
    N: int
    entries: np.ndarray

    @classmethod
    def from_rows(cls, p: int, N: int, rows: Sequence[Sequence[int]]) -> "PMatrix":
        mod = p ** N
        data = np.array([[int(x) % mod for x in row] for row in rows], dtype=object)
        return cls(p, N, data.reshape(len(rows), -1))

    @classmethod
    def identity(cls, p: int, N: int, size: int) -> "PMatrix":
        return cls.diagonal(p, N, [1] * size)

    @classmethod
    def diagonal(cls, p: int, N: int, diag: Sequence[int]) -> "PMatrix":
        size = len(diag)
        return cls.from_rows(p, N, [[diag[i] if i == j else 0 for j in range(size)] for i in range(size)])

    @classmethod
    def zeros(cls, p: int, N: int, rows: int, cols: int) -> "PMatrix":
        return cls.from_rows(p, N, [[0] * cols for _ in range(rows)])

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def _check(self, other: "PMatrix"):
        if (self.p, self.N) != (other.p, other.N):
            raise PrecisionMismatch("matrices over different Z/p^N")

    def __matmul__(self, other: "PMatrix") -> "PMatrix":
        self._check(other)
        return PMatrix(self.p, self.N, (self.entries.dot(other.entries)) % self.p ** self.N)

    def hstack(self, other: "PMatrix") -> "PMatrix":
        self._check(other)
        return PMatrix(self.p, self.N, np.hstack([self.entries, other.entries]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PMatrix):
            return NotImplemented
        return (self.p, self.N) == (other.p, other.N) and np.array_equal(self.entries, other.entries)

    __hash__ = None


@dataclass(frozen=True)
class DivisorProfile:
    """Valuations of the elementary divisors of a cokernel over Z/p^N."""

    exponents: Tuple[int, ...]
    rank_deficit: int

    @property
    def is_finite(self) -> bool:
        return self.rank_deficit == 0

    @property
    def order_exponent(self) -> int:
        """ord_p of the cokernel order; only meaningful when is_finite."""
        return sum(self.exponents)

    @property
    def structure(self) -> Tuple[int, ...]:
        """Nontrivial cyclic factors Z/p^d."""
        return tuple(d for d in self.exponents if d > 0)


def _pivot(sub: np.ndarray, p: int) -> Optional[Tuple[int, int, int]]:
    """First entry (row-major) of least valuation in sub, with that valuation; None when sub is zero."""
    rows, cols = np.nonzero(sub)
    if not rows.size:
        return None
    values = sub[rows, cols]
    v = 0
    while True:
        hits = np.flatnonzero(values % p)
        if hits.size:
            k = hits[0]
            return int(rows[k]), int(cols[k]), v
        values = values // p
        v += 1


def _eliminate(
    entries: np.ndarray, p: int, N: int, rhs: Optional[np.ndarray] = None
) -> Tuple[List[int], int, Optional[np.ndarray]]:
    mod = p ** N
    a = entries.copy()
    b = None if rhs is None else rhs.copy()
    n_rows, n_cols = a.shape
    exponents: List[int] = []
    r = 0
    while r < min(n_rows, n_cols):
        pivot = _pivot(a[r:, r:], p)
        if pivot is None:
            break
        i, j, v = r + pivot[0], r + pivot[1], pivot[2]
        if i != r:
            a[[r, i]] = a[[i, r]]
            if b is not None:
                b[[r, i]] = b[[i, r]]
        if j != r:
            a[:, [r, j]] = a[:, [j, r]]
        scale = p ** v
        unit_inv = pow(a[r, r] // scale, -1, mod)
        # columns left of r are already zero from row r down
        a[r, r:] = (a[r, r:] * unit_inv) % mod
        if b is not None:
            b[r] = (b[r] * unit_inv) % mod
        factors = a[r + 1:, r] // scale
        active = np.flatnonzero(factors)
        if active.size:
            rows = r + 1 + active
            a[rows, r:] = (a[rows, r:] - np.outer(factors[active], a[r, r:])) % mod
            if b is not None:
                b[rows] = (b[rows] - np.outer(factors[active], b[r])) % mod
        # every entry right of the pivot is a multiple of it; column operations touch only row r
        a[r, r + 1:] = 0
        exponents.append(v)
        r += 1
    return exponents, n_rows - len(exponents), b


def _verdicts(reduced: np.ndarray, exponents: Sequence[int], p: int, N: int) -> List[bool]:
    verdicts = []
    for column in reduced.T:
        ok = True
        for i, value in enumerate(column):
            bound = p ** exponents[i] if i < len(exponents) else p ** N
            if value % bound:
                ok = False
                break
        verdicts.append(ok)
    return verdicts


def smith_form(matrix: PMatrix) -> DivisorProfile:
    exponents, deficit, _ = _eliminate(matrix.entries, matrix.p, matrix.N)
    return DivisorProfile(tuple(sorted(exponents)), deficit)


def mult_matrix(f: AlgebraElement) -> PMatrix:
    """Column i holds the coefficients of γ^i * f."""
    size = f.size
    data = np.empty((size, size), dtype=object)
    for i in range(size):
        for k in range(size):
            data[k, i] = f.values[(k - i) % size]
    return PMatrix(f.p, f.N, data)


def _generator_matrix(gens: Sequence[AlgebraElement]) -> PMatrix:
    """Columns γ^i g_j spanning the ideal, repeated columns dropped (ν-images repeat with period p^{n-1})."""
    if not gens:
        raise LevelMismatch("at least one generator is required")
    first = gens[0]
    for g in gens[1:]:
        first._check(g)
    seen = set()
    columns = []
    for g in gens:
        for column in mult_matrix(g).entries.T:
            key = tuple(column)
            if key not in seen:
                seen.add(key)
                columns.append(column)
    return PMatrix(first.p, first.N, np.array(columns, dtype=object).T.reshape(first.size, len(columns)))


def _columns(elements: Sequence[AlgebraElement], rows: int) -> np.ndarray:
    return np.array([f.values for f in elements], dtype=object).T.reshape(rows, len(elements))


def reduce_ideal(
    gens: Sequence[AlgebraElement], elements: Sequence[AlgebraElement] = ()
) -> Tuple[DivisorProfile, List[bool]]:
    """Profile of Λ_n/(gens) and membership of each element, from a single elimination."""
    matrix = _generator_matrix(gens)
    for f in elements:
        f._check(gens[0])
    rhs = _columns(elements, matrix.rows) if elements else None
    exponents, deficit, reduced = _eliminate(matrix.entries, matrix.p, matrix.N, rhs)
    profile = DivisorProfile(tuple(sorted(exponents)), deficit)
    verdicts = _verdicts(reduced, exponents, matrix.p, matrix.N) if elements else []
    logger.debug(f"reduced {len(gens)} generators at level {gens[0].level}: {profile.structure}")
    return profile, verdicts


@dataclass(frozen=True, eq=False)
class IdealReduction:
    """
    Echelon data of a fixed ideal: elementary divisor exponents in pivot order and the
    accumulated row operations, so later membership queries skip the elimination.
    """

    p: int
    N: int
    exponents: Tuple[int, ...]
    rank_deficit: int
    transform: np.ndarray

    @property
    def profile(self) -> DivisorProfile:
        return DivisorProfile(tuple(sorted(self.exponents)), self.rank_deficit)

    def contains(self, elements: Sequence[AlgebraElement]) -> List[bool]:
        for f in elements:
            if (f.p, f.N, f.size) != (self.p, self.N, self.transform.shape[0]):
                raise PrecisionMismatch("element does not live in the reduced ring")
        rhs = _columns(elements, self.transform.shape[0])
        reduced = self.transform.dot(rhs) % self.p ** self.N
        return _verdicts(reduced, self.exponents, self.p, self.N)


def ideal_reduction(gens: Sequence[AlgebraElement]) -> IdealReduction:
    matrix = _generator_matrix(gens)
    identity = PMatrix.identity(matrix.p, matrix.N, matrix.rows).entries
    exponents, deficit, transform = _eliminate(matrix.entries, matrix.p, matrix.N, identity)
    return IdealReduction(matrix.p, matrix.N, tuple(exponents), deficit, transform)


def quotient_profile(gens: Sequence[AlgebraElement]) -> DivisorProfile:
    """Profile of Λ_n / (g_1, ..., g_k) as a Z_p-module."""
    return reduce_ideal(gens)[0]


def ideal_members(elements: Sequence[AlgebraElement], gens: Sequence[AlgebraElement]) -> List[bool]:
    """For each f, whether f lies in (g_1, ..., g_k) + p^N Λ_n; one elimination for all of them."""
    return reduce_ideal(gens, elements)[1]


def ideal_membership(f: AlgebraElement, gens: Sequence[AlgebraElement]) -> bool:
    """Whether f lies in (g_1, ..., g_k) + p^N Λ_n."""
    return ideal_members([f], gens)[0]
