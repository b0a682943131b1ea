"""
p-adic substrate
Capped-precision integers Z/p^N standing in for Z_p, plus PadicNumber for the
formal-group side where coefficients have negative valuation.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime, multiplicity

from iwasawa_sha.core.errors import NotAUnit, PrecisionMismatch, UsageError


@dataclass(frozen=True)
class AtLeast:
    """Valuation marker for a value indistinguishable from zero at precision `bound`."""

    bound: int

    def __str__(self) -> str:
        return f"≥{self.bound}"


Valuation = Union[int, AtLeast]


def is_odd_prime(p: int) -> bool:
    return p > 2 and isprime(p)


def require_odd_prime(p: int) -> int:
    if not is_odd_prime(p):
        raise UsageError(f"p must be an odd prime >= 3, got {p}")
    return p


def int_valuation(x: int, p: int, cap: int) -> int:
    """Largest k <= cap with p^k | x; zero has valuation cap."""
    if x == 0:
        return cap
    k = 0
    while k < cap and x % p == 0:
        x //= p
        k += 1
    return k


@dataclass(frozen=True)
class PadicScalar:
    p: int
    N: int
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.p ** self.N:
            raise ValueError(f"value {self.value} out of range mod {self.p}^{self.N}")

    @classmethod
    def from_int(cls, p: int, N: int, x: int) -> "PadicScalar":
        return cls(p, N, x % p ** N)

    @classmethod
    def random(cls, rng: random.Random, p: int, N: int, unit: bool = False) -> "PadicScalar":
        mod = p ** N
        while True:
            value = rng.randrange(mod)
            if not unit or value % p:
                return cls(p, N, value)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, int):
            return PadicScalar.from_int(self.p, self.N, other)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if (other.p, other.N) != (self.p, self.N):
            raise PrecisionMismatch(
                f"cannot mix Z/{self.p}^{self.N} with Z/{other.p}^{other.N}"
            )
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PadicScalar(self.p, self.N, (self.value + other.value) % self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PadicScalar(self.p, self.N, (self.value - other.value) % self.modulus)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PadicScalar(self.p, self.N, (self.value * other.value) % self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.p, self.N, (-self.value) % self.modulus)

    def __pow__(self, k: int):
        if k < 0:
            return unit_inverse(self) ** (-k)
        return PadicScalar(self.p, self.N, pow(self.value, k, self.modulus))

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def __str__(self) -> str:
        return f"{self.value} mod {self.p}^{self.N}"


def val_p(a: PadicScalar) -> Valuation:
    if a.value == 0:
        return AtLeast(a.N)
    return int_valuation(a.value, a.p, a.N)


def unit_inverse(a: PadicScalar) -> PadicScalar:
    if not a.is_unit():
        raise NotAUnit(f"{a} has positive valuation")
    return PadicScalar(a.p, a.N, pow(a.value, -1, a.modulus))


@dataclass(frozen=True)
class PadicNumber:
    """
    p^shift * unit with unit known mod p^relprec.

    Absolute precision is shift + relprec. relprec == 0 encodes a number that is
    zero to the known precision, with valuation at least `shift`.
    """

    p: int
    shift: int
    unit: int
    relprec: int

    @classmethod
    def zero(cls, p: int, abs_prec: int) -> "PadicNumber":
        return cls(p, abs_prec, 0, 0)

    @classmethod
    def from_fraction(cls, p: int, q: Union[int, Fraction], abs_prec: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, abs_prec)
        num, den = q.numerator, q.denominator
        vn = _exact_valuation(num, p)
        vd = _exact_valuation(den, p)
        v = vn - vd
        if v >= abs_prec:
            return cls.zero(p, abs_prec)
        relprec = abs_prec - v
        mod = p ** relprec
        unit = (num // p ** vn) * pow(den // p ** vd, -1, mod) % mod
        return cls(p, v, unit, relprec)

    @classmethod
    def from_scalar(cls, a: PadicScalar) -> "PadicNumber":
        return cls._normalized(a.p, 0, a.value, a.N)

    @classmethod
    def _normalized(cls, p: int, base: int, digits: int, abs_prec: int) -> "PadicNumber":
        """Build p^base * digits known to absolute precision abs_prec."""
        span = abs_prec - base
        if span <= 0:
            return cls.zero(p, abs_prec)
        digits %= p ** span
        if digits == 0:
            return cls.zero(p, abs_prec)
        v = int_valuation(digits, p, span)
        relprec = span - v
        return cls(p, base + v, (digits // p ** v) % p ** relprec, relprec)

    @property
    def abs_prec(self) -> int:
        return self.shift + self.relprec

    def is_zero(self) -> bool:
        return self.relprec == 0

    def valuation(self) -> Valuation:
        if self.is_zero():
            return AtLeast(self.shift)
        return self.shift

    @property
    def scalar(self) -> PadicScalar:
        """Unit part as a PadicScalar at the relative precision."""
        if self.is_zero():
            raise NotAUnit("zero has no unit part")
        return PadicScalar(self.p, self.relprec, self.unit)

    def _check(self, other: "PadicNumber"):
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_fraction(self.p, other, self.abs_prec)
        if other.p != self.p:
            raise PrecisionMismatch(f"cannot mix {self.p}-adic and {other.p}-adic numbers")
        return other

    def __add__(self, other):
        other = self._check(other)
        abs_prec = min(self.abs_prec, other.abs_prec)
        base = min(self.shift, other.shift)
        digits = self.unit * self.p ** (self.shift - base) + other.unit * self.p ** (other.shift - base)
        return PadicNumber._normalized(self.p, base, digits, abs_prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.shift, (-self.unit) % self.p ** self.relprec, self.relprec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        shift = self.shift + other.shift
        if self.is_zero() or other.is_zero():
            return PadicNumber.zero(self.p, shift + min(self.relprec, other.relprec))
        relprec = min(self.relprec, other.relprec)
        return PadicNumber(self.p, shift, self.unit * other.unit % self.p ** relprec, relprec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise NotAUnit("division by a number that is zero at precision")
        shift = self.shift - other.shift
        if self.is_zero():
            return PadicNumber.zero(self.p, shift)
        relprec = min(self.relprec, other.relprec)
        mod = self.p ** relprec
        return PadicNumber(self.p, shift, self.unit * pow(other.unit, -1, mod) % mod, relprec)

    def to_fraction(self) -> Fraction:
        """Representative p^shift * unit with the unit taken in [0, p^relprec)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.shift

    def __str__(self) -> str:
        if self.is_zero():
            return f"O({self.p}^{self.shift})"
        return f"{self.p}^{self.shift}*{self.unit} + O({self.p}^{self.abs_prec})"


def _exact_valuation(x: int, p: int) -> int:
    return int(multiplicity(p, abs(x)))
