"""
Group ring arithmetic in Λ_n = Z_p[G_n]
Elements are coefficient vectors in the basis 1, γ, ..., γ^{p^n - 1} for a generator γ
fixed compatibly across levels (π maps γ at level n to γ at level n-1).
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Optional, Tuple, Union

import numpy as np

from iwasawa_sha.core.errors import LevelMismatch, LevelZero, PrecisionExhausted, PrecisionMismatch
from iwasawa_sha.services.padic import PadicScalar, int_valuation

Sign = Literal["+", "-"]
Constraint = Literal["none", "mu0", "unit", "lift"]

_TEXT_FORM = re.compile(r"^\s*level\s+(\d+)\s*;\s*(\[.*\])\s*mod\s+(\d+)\^(\d+)\s*$")


@dataclass(frozen=True)
class AlgebraElement:
    p: int
    N: int
    level: int
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.p ** self.level:
            raise ValueError(
                f"level {self.level} element needs {self.p ** self.level} coefficients, got {len(self.values)}"
            )

    # constructors

    @classmethod
    def from_ints(cls, p: int, N: int, level: int, ints: Iterable[int]) -> "AlgebraElement":
        mod = p ** N
        return cls(p, N, level, tuple(int(c) % mod for c in ints))

    @classmethod
    def zero(cls, p: int, N: int, level: int) -> "AlgebraElement":
        return cls(p, N, level, (0,) * p ** level)

    @classmethod
    def one(cls, p: int, N: int, level: int) -> "AlgebraElement":
        return cls.gamma_power(p, N, level, 0)

    @classmethod
    def gamma_power(cls, p: int, N: int, level: int, k: int) -> "AlgebraElement":
        size = p ** level
        values = [0] * size
        values[k % size] = 1
        return cls(p, N, level, tuple(values))

    # views

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def coeff(self, i: int) -> PadicScalar:
        return PadicScalar(self.p, self.N, self.values[i])

    @property
    def coeffs(self) -> Tuple[PadicScalar, ...]:
        return tuple(PadicScalar(self.p, self.N, c) for c in self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def augmentation(self) -> PadicScalar:
        return PadicScalar(self.p, self.N, sum(self.values) % self.modulus)

    def is_unit(self) -> bool:
        return sum(self.values) % self.p != 0

    # arithmetic

    def _check(self, other: "AlgebraElement"):
        if (other.p, other.N) != (self.p, self.N):
            raise PrecisionMismatch(
                f"cannot mix Λ over Z/{self.p}^{self.N} with Λ over Z/{other.p}^{other.N}"
            )
        if other.level != self.level:
            raise LevelMismatch(f"level {self.level} vs level {other.level}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        mod = self.modulus
        return AlgebraElement(self.p, self.N, self.level, tuple((a + b) % mod for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        mod = self.modulus
        return AlgebraElement(self.p, self.N, self.level, tuple((a - b) % mod for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "AlgebraElement":
        mod = self.modulus
        return AlgebraElement(self.p, self.N, self.level, tuple((-a) % mod for a in self.values))

    def __mul__(self, other: Union["AlgebraElement", PadicScalar, int]) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return scalar_multiply(self, other)

    def __rmul__(self, other: Union[PadicScalar, int]) -> "AlgebraElement":
        return scalar_multiply(self, other)

    def __pow__(self, k: int) -> "AlgebraElement":
        result = AlgebraElement.one(self.p, self.N, self.level)
        base = self
        while k:
            if k & 1:
                result = multiply(result, base)
            base = multiply(base, base)
            k >>= 1
        return result

    # serialization

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self.values])

    def to_text(self) -> str:
        return f"level {self.level}; {self.to_json()} mod {self.p}^{self.N}"

    @classmethod
    def from_json(cls, p: int, N: int, payload: str) -> "AlgebraElement":
        ints = [int(c) for c in json.loads(payload)]
        level = _level_of(p, len(ints))
        return cls.from_ints(p, N, level, ints)

    @classmethod
    def from_text(cls, text: str) -> "AlgebraElement":
        match = _TEXT_FORM.match(text)
        if not match:
            raise ValueError(f"not a group ring element: {text!r}")
        level, payload, p, N = int(match[1]), match[2], int(match[3]), int(match[4])
        element = cls.from_json(p, N, payload)
        if element.level != level:
            raise LevelMismatch(f"header says level {level}, payload has level {element.level}")
        return element

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Invariants:
    mu: int
    lambda_: int


def _level_of(p: int, size: int) -> int:
    level, k = 0, 1
    while k < size:
        k *= p
        level += 1
    if k != size:
        raise ValueError(f"{size} coefficients is not a power of {p}")
    return level


def scalar_multiply(f: AlgebraElement, c: Union[PadicScalar, int]) -> AlgebraElement:
    if isinstance(c, PadicScalar):
        if (c.p, c.N) != (f.p, f.N):
            raise PrecisionMismatch(f"scalar {c} does not match Z/{f.p}^{f.N}")
        c = c.value
    mod = f.modulus
    return AlgebraElement(f.p, f.N, f.level, tuple(a * c % mod for a in f.values))


def multiply(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Cyclic convolution: coefficient k is the sum of f_i g_j over i + j = k mod p^n."""
    f._check(g)
    size, mod = f.size, f.modulus
    out = [0] * size
    g_terms = [(j, b) for j, b in enumerate(g.values) if b]
    for i, a in enumerate(f.values):
        if not a:
            continue
        for j, b in g_terms:
            k = i + j
            if k >= size:
                k -= size
            out[k] += a * b
    return AlgebraElement(f.p, f.N, f.level, tuple(c % mod for c in out))


def project_pi(f: AlgebraElement) -> AlgebraElement:
    """π_{n/n-1}: fold coefficients along i mod p^{n-1}."""
    if f.level == 0:
        raise LevelZero("π is undefined on Λ_0")
    return project_to(f, f.level - 1)


def project_to(f: AlgebraElement, m: int) -> AlgebraElement:
    """π_{n/m} for m <= n."""
    if not 0 <= m <= f.level:
        raise LevelMismatch(f"cannot project level {f.level} to level {m}")
    size = f.p ** m
    out = [0] * size
    for i, a in enumerate(f.values):
        out[i % size] += a
    mod = f.modulus
    return AlgebraElement(f.p, f.N, m, tuple(c % mod for c in out))


def lift_nu(f: AlgebraElement) -> AlgebraElement:
    """ν_{n-1/n}: each group element goes to the sum of its preimages."""
    return AlgebraElement(f.p, f.N, f.level + 1, f.values * f.p)


def xi(p: int, N: int, n: int) -> AlgebraElement:
    """Sum of the order-p subgroup of G_n."""
    if n < 1:
        raise LevelZero("ξ_n needs n >= 1")
    step = p ** (n - 1)
    return AlgebraElement(p, N, n, tuple(1 if i % step == 0 else 0 for i in range(p ** n)))


def cyclotomic_factor(p: int, N: int, n: int, m: int) -> AlgebraElement:
    """Φ_{p^m}(γ) in Λ_n, with Φ_1(x) = x - 1."""
    if not 0 <= m <= n:
        raise LevelMismatch(f"cyclotomic factor Φ_(p^{m}) needs 0 <= m <= {n}")
    size, mod = p ** n, p ** N
    values = [0] * size
    if m == 0:
        values[1 % size] += 1
        values[0] -= 1
    else:
        step = p ** (m - 1)
        for a in range(p):
            values[a * step] += 1
    return AlgebraElement(p, N, n, tuple(c % mod for c in values))


def omega_levels(n: int, sign: Sign) -> range:
    """Character levels m >= 1 whose cyclotomic factors make up ω_n^sign."""
    return range(2 if sign == "+" else 1, n + 1, 2)


def omega_pm(p: int, N: int, n: int, sign: Sign) -> AlgebraElement:
    """Product of Φ_{p^m}(γ) over 1 <= m <= n with m even (+) or odd (-)."""
    result = AlgebraElement.one(p, N, n)
    for m in omega_levels(n, sign):
        result = multiply(result, cyclotomic_factor(p, N, n, m))
    return result


def mu_invariant(f: AlgebraElement) -> int:
    mu = min(int_valuation(c, f.p, f.N) for c in f.values)
    if mu >= f.N:
        raise PrecisionExhausted(f"element is zero mod {f.p}^{f.N}; μ is not computable")
    return mu


@lru_cache(maxsize=None)
def _binomial_matrix_mod_p(p: int, size: int) -> np.ndarray:
    """B[k, i] = binom(i, k) mod p."""
    table = np.zeros((size, size), dtype=np.int64)
    column = np.zeros(size, dtype=np.int64)
    column[0] = 1
    table[:, 0] = column
    for i in range(1, size):
        column = (column + np.concatenate(([0], column[:-1]))) % p
        table[:, i] = column
    table.setflags(write=False)
    return table


def augmentation_coordinates(f: AlgebraElement, mu: int) -> np.ndarray:
    """Coefficients of p^{-mu} f mod p in the (γ-1)-power basis of F_p[G_n]."""
    scale = f.p ** mu
    reduced = np.array([(c // scale) % f.p for c in f.values], dtype=np.int64)
    return _binomial_matrix_mod_p(f.p, f.size) @ reduced % f.p


def lambda_invariant(f: AlgebraElement) -> int:
    mu = mu_invariant(f)
    coords = augmentation_coordinates(f, mu)
    nonzero = np.flatnonzero(coords)
    # μ < N guarantees a nonzero reduction
    return int(nonzero[0])


def invariants(f: AlgebraElement) -> Invariants:
    return Invariants(mu=mu_invariant(f), lambda_=lambda_invariant(f))


def random_element(
    rng: random.Random,
    p: int,
    N: int,
    n: int,
    constraint: Constraint = "none",
    target: Optional[AlgebraElement] = None,
) -> AlgebraElement:
    """
    Uniform sample of Λ_n mod p^N under a constraint:
    "mu0" resamples until some coefficient is prime to p (μ = 0), "unit" until the augmentation
    is prime to p (a unit of Λ_n, so also λ = 0), "lift" returns some g with π(g) = target.
    """
    mod = p ** N
    size = p ** n
    if constraint == "lift":
        if target is None or target.level != n - 1:
            raise LevelMismatch(f"lift to level {n} needs a level {n - 1} target")
        if (target.p, target.N) != (p, N):
            raise PrecisionMismatch("lift target has a different precision")
        low = p ** (n - 1)
        values = [rng.randrange(mod) for _ in range(size)]
        for j in range(low):
            others = sum(values[j + t * low] for t in range(1, p))
            values[j] = (target.values[j] - others) % mod
        return AlgebraElement(p, N, n, tuple(values))
    while True:
        values = tuple(rng.randrange(mod) for _ in range(size))
        if constraint == "none":
            return AlgebraElement(p, N, n, values)
        if constraint == "mu0" and any(v % p for v in values):
            return AlgebraElement(p, N, n, values)
        if constraint == "unit" and sum(values) % p:
            return AlgebraElement(p, N, n, values)

