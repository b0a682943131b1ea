"""
Truncated multivariate power series over Q with a p-adic precision ledger

Coefficients live exactly in a sympy ring over QQ. A grading variable t rides along
with every monomial (t^d on total degree d), so `rs_mul`/`rs_subs` truncate by total
degree. Each series carries one absolute precision: every coefficient is correct
mod p^abs_prec, and is rounded there after each operation.

Precision loss is charged through the slope of a series, the least s >= 0 with
v_p(c) >= -s * max(1, deg) for every coefficient c.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Dict, Iterator, List, Sequence, Tuple

from sympy import multiplicity
from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_mul, rs_series_reversion, rs_subs, rs_trunc
from sympy.polys.rings import PolyElement, PolyRing, ring

from iwasawa_sha.core.errors import LevelMismatch, PrecisionExhausted, PrecisionMismatch
from iwasawa_sha.services.padic import PadicNumber

Exponents = Tuple[int, ...]


@lru_cache(maxsize=None)
def graded_ring(nvars: int) -> PolyRing:
    """QQ[t, X0, ..., X{nvars-1}]; generator 0 is the grading variable."""
    names = ",".join(["t"] + [f"X{i}" for i in range(nvars)])
    return ring(names, QQ)[0]


def _fraction(c) -> Fraction:
    return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))


def _valuation(q: Fraction, p: int) -> int:
    return int(multiplicity(p, abs(q.numerator))) - int(multiplicity(p, q.denominator))


def _slope(terms: Dict[Exponents, Fraction], p: int) -> Fraction:
    worst = Fraction(0)
    for exps, c in terms.items():
        if c:
            worst = max(worst, Fraction(-_valuation(c, p), max(1, sum(exps))))
    return worst


def _round(q: Fraction, p: int, abs_prec: int) -> Fraction:
    return PadicNumber.from_fraction(p, q, abs_prec).to_fraction()


@dataclass(frozen=True)
class TruncatedSeries:
    p: int
    nvars: int
    degree_cap: int
    poly: PolyElement
    abs_prec: int

    # constructors

    @classmethod
    def from_terms(
        cls, p: int, nvars: int, degree_cap: int, terms: Dict[Exponents, Fraction], abs_prec: int
    ) -> "TruncatedSeries":
        if abs_prec <= 0:
            raise PrecisionExhausted(f"series only known mod p^{abs_prec}")
        R = graded_ring(nvars)
        rounded = {}
        for exps, c in terms.items():
            if sum(exps) > degree_cap:
                continue
            c = _round(Fraction(c), p, abs_prec)
            if c:
                rounded[(sum(exps),) + tuple(exps)] = QQ(c.numerator, c.denominator)
        return cls(p, nvars, degree_cap, R.from_dict(rounded) if rounded else R.zero, abs_prec)

    @classmethod
    def _from_poly(cls, p: int, nvars: int, degree_cap: int, poly: PolyElement, abs_prec: int) -> "TruncatedSeries":
        terms = {m[1:nvars + 1]: _fraction(c) for m, c in poly.items()}
        return cls.from_terms(p, nvars, degree_cap, terms, abs_prec)

    @classmethod
    def variable(cls, p: int, nvars: int, index: int, degree_cap: int, abs_prec: int) -> "TruncatedSeries":
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return cls.from_terms(p, nvars, degree_cap, {exps: Fraction(1)}, abs_prec)

    @classmethod
    def zero(cls, p: int, nvars: int, degree_cap: int, abs_prec: int) -> "TruncatedSeries":
        return cls.from_terms(p, nvars, degree_cap, {}, abs_prec)

    @classmethod
    def univariate(cls, p: int, degree_cap: int, coeffs: Dict[int, Fraction], abs_prec: int) -> "TruncatedSeries":
        return cls.from_terms(p, 1, degree_cap, {(j,): c for j, c in coeffs.items()}, abs_prec)

    # coefficients

    def exact(self, exps: Exponents) -> Fraction:
        c = self.poly.get((sum(exps),) + tuple(exps))
        return _fraction(c) if c is not None else Fraction(0)

    def coefficient(self, exps: Exponents) -> PadicNumber:
        return PadicNumber.from_fraction(self.p, self.exact(exps), self.abs_prec)

    def rational_terms(self) -> Dict[Exponents, Fraction]:
        return {m[1:]: _fraction(c) for m, c in self.poly.items()}

    def terms(self) -> Iterator[Tuple[Exponents, PadicNumber]]:
        for exps, c in sorted(self.rational_terms().items(), key=lambda item: (sum(item[0]), item[0])):
            yield exps, PadicNumber.from_fraction(self.p, c, self.abs_prec)

    def all_zero(self) -> bool:
        return not self.poly

    def has_zero_constant_term(self) -> bool:
        return (0,) * (self.nvars + 1) not in self.poly

    def slope(self) -> Fraction:
        return _slope(self.rational_terms(), self.p)

    def _loss(self, degree: int) -> int:
        return ceil(self.slope() * degree)

    # arithmetic

    def _check(self, other: "TruncatedSeries"):
        if other.p != self.p:
            raise PrecisionMismatch("series over different primes")
        if other.nvars != self.nvars:
            raise LevelMismatch(f"{self.nvars}-variable vs {other.nvars}-variable series")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        cap = min(self.degree_cap, other.degree_cap)
        t = graded_ring(self.nvars).gens[0]
        total = rs_trunc(self.poly + other.poly, t, cap + 1)
        return TruncatedSeries._from_poly(self.p, self.nvars, cap, total, min(self.abs_prec, other.abs_prec))

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.p, self.nvars, self.degree_cap, -self.poly, self.abs_prec)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        cap = min(self.degree_cap, other.degree_cap)
        t = graded_ring(self.nvars).gens[0]
        product = rs_mul(self.poly, other.poly, t, cap + 1)
        abs_prec = min(self.abs_prec - other._loss(cap), other.abs_prec - self._loss(cap))
        return TruncatedSeries._from_poly(self.p, self.nvars, cap, product, abs_prec)

    def truncate(self, degree_cap: int) -> "TruncatedSeries":
        t = graded_ring(self.nvars).gens[0]
        return TruncatedSeries(self.p, self.nvars, degree_cap, rs_trunc(self.poly, t, degree_cap + 1), self.abs_prec)

    def embed(self, nvars: int, positions: Sequence[int]) -> "TruncatedSeries":
        """View as a series in nvars variables, variable i landing at positions[i]."""
        terms = {}
        for exps, c in self.rational_terms().items():
            new = [0] * nvars
            for i, e in zip(positions, exps):
                new[i] += e
            terms[tuple(new)] = c
        return TruncatedSeries.from_terms(self.p, nvars, self.degree_cap, terms, self.abs_prec)

    def compose(self, subs: Sequence["TruncatedSeries"]) -> "TruncatedSeries":
        """Substitute subs[i] for variable i simultaneously; substitutes need zero constant term."""
        if len(subs) != self.nvars:
            raise LevelMismatch(f"need {self.nvars} substitutes, got {len(subs)}")
        target = subs[0]
        for s in subs:
            target._check(s)
            if not s.has_zero_constant_term():
                raise ValueError("substitutes must have zero constant term")
        cap = min([self.degree_cap] + [s.degree_cap for s in subs])
        width = max(self.nvars, target.nvars)
        R = graded_ring(width)
        pad = (0,) * (width - self.nvars)
        outer = R.from_dict({(0,) + m[1:] + pad: c for m, c in self.poly.items() if m[0] <= cap}) if self.poly else R.zero
        rules = {R.gens[1 + i]: _widen(s.poly, width) for i, s in enumerate(subs)}
        composed = rs_subs(outer, rules, R.gens[0], cap + 1)

        inner_slope = max(s.slope() for s in subs)
        abs_prec = min(
            self.abs_prec - ceil(inner_slope * cap),
            min(s.abs_prec for s in subs) - ceil((inner_slope + self.slope()) * cap),
        )
        return TruncatedSeries._from_poly(self.p, target.nvars, cap, composed, abs_prec)

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of a univariate series with unit linear coefficient."""
        if self.nvars != 1:
            raise ValueError("reversion needs a univariate series")
        if not self.has_zero_constant_term():
            raise ValueError("series must have zero constant term")
        if (1, 1) not in self.poly:
            raise ValueError("series has no linear term")
        R = graded_ring(2)
        _, x, y = R.gens
        plain = R.from_dict({(0, m[1], 0): c for m, c in self.poly.items()})
        inverse = rs_series_reversion(plain, x, self.degree_cap + 1, y)
        terms = {(m[2],): _fraction(c) for m, c in inverse.items()}
        loss = ceil((self.slope() + _slope(terms, self.p)) * (self.degree_cap + 1))
        return TruncatedSeries.from_terms(self.p, 1, self.degree_cap, terms, self.abs_prec - loss)


def _widen(poly: PolyElement, width: int) -> PolyElement:
    nvars = poly.ring.ngens - 1
    if nvars == width:
        return poly
    pad = (0,) * (width - nvars)
    R = graded_ring(width)
    return R.from_dict({m + pad: c for m, c in poly.items()}) if poly else R.zero


def series_dump(series: TruncatedSeries) -> List[dict]:
    """Per-monomial records `deg k: val=v, unit=u`."""
    lines = []
    for k, c in series.terms():
        lines.append({
            "deg": k[0] if series.nvars == 1 else list(k),
            "val": str(c.valuation()),
            "unit": None if c.is_zero() else str(c.unit),
            "abs_prec": c.abs_prec,
        })
    return lines
