"""
Honda formal group of type t^2 - a_p t + p
Logarithm, its compositional inverse, the group law with an integrality certificate,
the point ε with log(ε) = p/(p+1-a_p), and the trace unit a_p - (p-1)/(a_p-2).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Optional, Tuple, Union

from iwasawa_sha.core.config import settings
from iwasawa_sha.core.errors import (
    IntegralityViolation,
    NonConvergence,
    NotAUnit,
    PrecisionExhausted,
)
from iwasawa_sha.services.padic import PadicNumber, PadicScalar, int_valuation
from iwasawa_sha.services.series import TruncatedSeries

logger = logging.getLogger(__name__)

ScalarLike = Union[int, PadicScalar]


def _as_int(a_p: ScalarLike) -> int:
    return a_p.value if isinstance(a_p, PadicScalar) else int(a_p)


def honda_numerators(p: int, a_p: ScalarLike, K: int) -> Tuple[int, ...]:
    """n_k = p^k x_k, so n_k = a_p n_{k-1} - p n_{k-2} with n_{-1} = 0, n_0 = 1."""
    a = _as_int(a_p)
    out = [1]
    prev = 0
    for _ in range(K):
        out.append(a * out[-1] - p * prev)
        prev = out[-2]
    return tuple(out)


@dataclass(frozen=True)
class HondaCoeffs:
    p: int
    a_p: int
    numerators: Tuple[int, ...]
    x: Tuple[PadicNumber, ...]

    def recursion_residuals(self) -> List[PadicNumber]:
        """p x_k - a_p x_{k-1} + x_{k-2} for k >= 1, with x_{-1} = 0."""
        out = []
        for k in range(1, len(self.x)):
            previous = self.x[k - 2] if k >= 2 else PadicNumber.zero(self.p, self.x[k].abs_prec)
            out.append(self.x[k] * self.p - self.x[k - 1] * self.a_p + previous)
        return out


def honda_coeffs(p: int, a_p: ScalarLike, K: int, abs_prec: Optional[int] = None) -> HondaCoeffs:
    a = _as_int(a_p)
    abs_prec = abs_prec if abs_prec is not None else K + 1
    nums = honda_numerators(p, a, K)
    x = tuple(PadicNumber.from_fraction(p, Fraction(n, p ** k), abs_prec) for k, n in enumerate(nums))
    return HondaCoeffs(p, a, nums, x)


def log_series(p: int, a_p: ScalarLike, D: int, abs_prec: int) -> TruncatedSeries:
    """
    Σ_k x_k ((1+X)^{p^k} - 1) truncated at degree D.

    The k-th term contributes to X^j with valuation >= floor(k/2) - v_p(j), so each
    coefficient sums k up to 2(abs_prec + v_p(j)) + 1 and is exact mod p^abs_prec.
    """
    a = _as_int(a_p)
    deepest = max(int_valuation(j, p, j) for j in range(1, D + 1))
    nums = honda_numerators(p, a, 2 * (abs_prec + deepest) + 1)
    coeffs = {}
    for j in range(1, D + 1):
        last = 2 * (abs_prec + int_valuation(j, p, j)) + 1
        total = Fraction(0)
        for k in range(last + 1):
            if p ** k < j:
                continue
            total += Fraction(nums[k] * comb(p ** k, j), p ** k)
        coeffs[j] = total
    return TruncatedSeries.univariate(p, D, coeffs, abs_prec)


def exp_series(log: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of the logarithm through degree D."""
    if log.nvars != 1:
        raise ValueError("exp_series needs a univariate series")
    if not log.has_zero_constant_term():
        raise ValueError("log-type series must have zero constant term")
    c1 = log.coefficient((1,))
    if c1.is_zero() or c1.shift != 0:
        raise NotAUnit(f"linear coefficient {c1} is not a unit")
    return log.reversion()


def certify_integral(law: TruncatedSeries) -> None:
    if law.abs_prec <= 0:
        raise PrecisionExhausted(f"group law only known mod p^{law.abs_prec}")
    for exps, c in law.terms():
        if not c.is_zero() and c.shift < 0:
            raise IntegralityViolation(f"coefficient of {exps} has valuation {c.shift}: {c}")


@dataclass(frozen=True)
class FormalGroup:
    p: int
    a_p: int
    degree: int
    precision: int
    log: TruncatedSeries
    exp: TruncatedSeries
    law: TruncatedSeries


def build_formal_group(p: int, a_p: ScalarLike, D: int, precision: int) -> FormalGroup:
    a = _as_int(a_p)
    log = log_series(p, a, D, precision)
    exp = exp_series(log)
    x_part = log.embed(2, [0])
    y_part = log.embed(2, [1])
    law = exp.compose([x_part + y_part])
    certify_integral(law)
    logger.debug(f"group law p={p} a_p={a} D={D} built at precision {law.abs_prec}")
    return FormalGroup(p, a, D, precision, log, exp, law)


def group_law(p: int, a_p: ScalarLike, D: int, target: int = 10) -> TruncatedSeries:
    precision = target + settings.series_headroom_per_degree * D
    return build_formal_group(p, a_p, D, precision).law


def agreement_precision(diff: TruncatedSeries) -> Optional[int]:
    """Absolute precision to which diff vanishes, or None when some coefficient is nonzero."""
    return diff.abs_prec if diff.all_zero() else None


def identity_defect(fg: FormalGroup) -> Optional[int]:
    """F(X, 0) - X."""
    cap = fg.law.degree_cap
    x = TruncatedSeries.variable(fg.p, 2, 0, cap, fg.precision)
    zero = TruncatedSeries.zero(fg.p, 2, cap, fg.precision)
    return agreement_precision(fg.law.compose([x, zero]) - x)


def symmetry_defect(fg: FormalGroup) -> Optional[int]:
    return agreement_precision(fg.law - fg.law.embed(2, [1, 0]))


def log_additivity_defect(fg: FormalGroup) -> Optional[int]:
    """log(F(X,Y)) - log(X) - log(Y)."""
    lhs = fg.log.compose([fg.law])
    rhs = fg.log.embed(2, [0]) + fg.log.embed(2, [1])
    return agreement_precision(lhs - rhs)


def associativity_defect(fg: FormalGroup, degree: int) -> Optional[int]:
    """F(F(X,Y),Z) - F(X,F(Y,Z)) through total degree `degree`."""
    law = fg.law.truncate(min(degree, fg.degree))
    cap = law.degree_cap
    x, y, z = (TruncatedSeries.variable(fg.p, 3, i, cap, fg.precision) for i in range(3))
    left = law.compose([law.compose([x, y]), z])
    right = law.compose([x, law.compose([y, z])])
    return agreement_precision(left - right)


def _log_at(p: int, a: int, point: int, target: int) -> int:
    """log(point) mod p^target for point in pZ_p."""
    K = 2 * target
    mod = p ** target
    nums = honda_numerators(p, a, K)
    total = 0
    for k in range(K + 1):
        width = p ** (target + k)
        power = pow(1 + point, p ** k, width)
        total += nums[k] * (((power - 1) % width) // p ** k)
    return total % mod


def _log_derivative_at(p: int, a: int, point: int, target: int) -> int:
    K = 2 * target + 1
    mod = p ** target
    nums = honda_numerators(p, a, K)
    return sum(n * pow(1 + point, p ** k - 1, mod) for k, n in enumerate(nums)) % mod


def epsilon_target(p: int, a_p: ScalarLike, target: int) -> int:
    """p/(p+1-a_p) mod p^target."""
    mod = p ** target
    return p * pow((p + 1 - _as_int(a_p)) % mod, -1, mod) % mod


def epsilon_residual(p: int, a_p: ScalarLike, eps: ScalarLike, target: int) -> int:
    a = _as_int(a_p)
    return (_log_at(p, a, _as_int(eps), target) - epsilon_target(p, a, target)) % p ** target


def solve_epsilon(p: int, a_p: ScalarLike, target: int) -> PadicScalar:
    """Newton iteration for log(ε) = p/(p+1-a_p), started at ε_0 = p/(p+1-a_p)."""
    a = _as_int(a_p)
    mod = p ** target
    t = epsilon_target(p, a, target)
    eps = t
    last_step = -1
    for iteration in range(settings.newton_max_iterations):
        residual = (_log_at(p, a, eps, target) - t) % mod
        if residual == 0:
            break
        derivative = _log_derivative_at(p, a, eps, target)
        if derivative % p == 0:
            raise NonConvergence(f"log' vanishes mod {p} at iteration {iteration}")
        step = residual * pow(derivative, -1, mod) % mod
        step_val = int_valuation(step, p, target)
        if step_val <= last_step:
            raise NonConvergence(f"Newton step valuation {step_val} did not grow past {last_step}")
        last_step = step_val
        eps = (eps - step) % mod
    else:
        raise NonConvergence(f"no convergence in {settings.newton_max_iterations} iterations")
    logger.debug(f"ε for p={p} a_p={a} converged to {eps} mod p^{target}")
    return PadicScalar(p, target, eps)


def trace_unit_u(p: int, a_p: ScalarLike, N: int) -> PadicScalar:
    """a_p - (p-1)/(a_p-2) in Z/p^N."""
    mod = p ** N
    a = _as_int(a_p) % mod
    denominator = (a - 2) % mod
    if denominator % p == 0:
        raise NotAUnit(f"a_p - 2 = {denominator} is not a unit mod {p}")
    u = (a - (p - 1) * pow(denominator, -1, mod)) % mod
    result = PadicScalar(p, N, u)
    if not result.is_unit():
        raise NotAUnit(f"trace unit {result} is not a unit")
    return result
