"""
Character evaluation Λ_n -> Z_p[ζ_{p^m}] and valuations in the ramified rings
Elements of Z_p[ζ_{p^m}] are residues mod Φ_{p^m}(x) in the x-power basis; χ(γ) = ζ is the class of x.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Tuple

from sympy import Poly, cyclotomic_poly, symbols

from iwasawa_sha.core.errors import LevelMismatch, PrecisionMismatch, ZeroAtPrecision
from iwasawa_sha.services.algebra import AlgebraElement, project_to
from iwasawa_sha.services.padic import int_valuation

_x = symbols("x")


def ramification_index(p: int, m: int) -> int:
    """φ(p^m); 1 for the trivial character."""
    return 1 if m == 0 else p ** (m - 1) * (p - 1)


@dataclass(frozen=True)
class CycloElement:
    p: int
    N: int
    m: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != ramification_index(self.p, self.m):
            raise ValueError(f"Z_p[ζ_(p^{self.m})] elements have {ramification_index(self.p, self.m)} coefficients")

    @classmethod
    def one(cls, p: int, N: int, m: int) -> "CycloElement":
        e = ramification_index(p, m)
        return cls(p, N, m, (1,) + (0,) * (e - 1))

    @classmethod
    def from_polynomial(cls, p: int, N: int, m: int, poly: List[int]) -> "CycloElement":
        return cls(p, N, m, _reduce_mod_phi(poly, p, N, m))

    @property
    def e(self) -> int:
        return ramification_index(self.p, self.m)

    def _check(self, other: "CycloElement"):
        if (self.p, self.N) != (other.p, other.N):
            raise PrecisionMismatch("cyclotomic elements over different Z/p^N")
        if self.m != other.m:
            raise LevelMismatch(f"Z_p[ζ_(p^{self.m})] vs Z_p[ζ_(p^{other.m})]")

    def __add__(self, other: "CycloElement") -> "CycloElement":
        self._check(other)
        mod = self.p ** self.N
        return CycloElement(self.p, self.N, self.m, tuple((a + b) % mod for a, b in zip(self.values, other.values)))

    def __mul__(self, other: "CycloElement") -> "CycloElement":
        self._check(other)
        product = [0] * (2 * self.e - 1)
        for i, a in enumerate(self.values):
            if a:
                for j, b in enumerate(other.values):
                    product[i + j] += a * b
        return CycloElement.from_polynomial(self.p, self.N, self.m, product)


@dataclass(frozen=True)
class RamifiedValuation:
    """ord_p = numerator / denominator with ord_p(p) = 1."""

    numerator: int
    denominator: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@lru_cache(maxsize=None)
def _cyclotomic(p: int, m: int) -> Poly:
    return cyclotomic_poly(p ** m, _x, polys=True)


def _reduce_mod_phi(poly: List[int], p: int, N: int, m: int) -> Tuple[int, ...]:
    mod = p ** N
    if m == 0:
        return (sum(poly) % mod,)
    e = ramification_index(p, m)
    remainder = Poly(list(reversed(poly)) or [0], _x).rem(_cyclotomic(p, m))
    coeffs = [int(c) % mod for c in reversed(remainder.all_coeffs())]
    return tuple(coeffs + [0] * (e - len(coeffs)))


def char_eval(f: AlgebraElement, m: int) -> CycloElement:
    """χ(f) for the character of order p^m sending γ to ζ_{p^m}."""
    if not 0 <= m <= f.level:
        raise LevelMismatch(f"character of order {f.p}^{m} is not defined on level {f.level}")
    projected = project_to(f, m)
    return CycloElement.from_polynomial(f.p, f.N, m, list(projected.values))


@lru_cache(maxsize=None)
def _substitution_matrix(p: int, m: int, N: int) -> Tuple[Tuple[int, ...], ...]:
    """Rows k: binom(i, k) mod p^N, taking x-basis coefficients to the u = x - 1 basis."""
    e = ramification_index(p, m)
    mod = p ** N
    return tuple(tuple(comb(i, k) % mod for i in range(e)) for k in range(e))


def eisenstein_coordinates(z: CycloElement) -> Tuple[int, ...]:
    mod = z.p ** z.N
    rows = _substitution_matrix(z.p, z.m, z.N)
    return tuple(sum(b * c for b, c in zip(row, z.values)) % mod for row in rows)


def eisenstein_valuation(z: CycloElement) -> RamifiedValuation:
    e = z.e
    if z.m == 0:
        (value,) = z.values
        if value == 0:
            raise ZeroAtPrecision(f"χ value is zero mod {z.p}^{z.N}")
        return RamifiedValuation(int_valuation(value, z.p, z.N), 1)
    best = None
    for k, b in enumerate(eisenstein_coordinates(z)):
        if b == 0:
            continue
        candidate = e * int_valuation(b, z.p, z.N) + k
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise ZeroAtPrecision(f"χ value is zero mod {z.p}^{z.N}")
    return RamifiedValuation(best, e)


def cyclo_is_zero(z: CycloElement) -> bool:
    return not any(z.values)
