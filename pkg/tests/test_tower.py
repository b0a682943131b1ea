from math import comb

import pytest
from hypothesis import given

from iwasawa_sha.core.errors import LevelMismatch, ZeroAtPrecision
from iwasawa_sha.services.algebra import AlgebraElement, invariants, random_element, xi
from iwasawa_sha.services.tower import (
    CycloElement,
    RamifiedValuation,
    char_eval,
    cyclo_is_zero,
    eisenstein_valuation,
    ramification_index,
)
from tests.conftest import elements

P, N = 3, 8


def gamma_minus_one(level: int) -> AlgebraElement:
    return AlgebraElement.gamma_power(P, N, level, 1) - AlgebraElement.one(P, N, level)


def test_ramification_index():
    assert ramification_index(3, 0) == 1
    assert ramification_index(3, 1) == 2
    assert ramification_index(3, 2) == 6
    assert ramification_index(5, 3) == 100


def test_gamma_goes_to_zeta():
    value = char_eval(AlgebraElement.gamma_power(P, N, 2, 1), 2)
    assert value.values == (0, 1, 0, 0, 0, 0)


def test_gamma_power_wraps_through_cyclotomic_relation():
    # ζ_9^6 = -1 - ζ_9^3
    value = char_eval(AlgebraElement.gamma_power(P, N, 2, 6), 2)
    mod = P ** N
    assert value.values == (mod - 1, 0, 0, mod - 1, 0, 0)


def test_xi_vanishes_at_top_character():
    assert cyclo_is_zero(char_eval(xi(P, N, 2), 2))
    assert char_eval(xi(P, N, 2), 1).values == (P, 0)
    assert char_eval(xi(P, N, 2), 0).values == (P,)


@given(elements(N=N), elements(N=N))
def test_char_eval_is_a_ring_map(f, g):
    for m in range(3):
        assert char_eval(f * g, m) == char_eval(f, m) * char_eval(g, m)
        assert char_eval(f + g, m) == char_eval(f, m) + char_eval(g, m)


def test_uniformizer_valuation():
    assert eisenstein_valuation(char_eval(gamma_minus_one(2), 2)) == RamifiedValuation(1, 6)
    assert eisenstein_valuation(char_eval(gamma_minus_one(2), 1)) == RamifiedValuation(1, 2)


def test_p_has_valuation_one():
    three = AlgebraElement.from_ints(P, N, 2, [3] + [0] * 8)
    assert eisenstein_valuation(char_eval(three, 2)).as_fraction() == 1


def test_valuation_matches_lambda(rng):
    """μ(f) = 0 and λ(f) < p^{n-1}(p-1) give e·ord_p(χ_n(f)) = λ(f)."""
    e = ramification_index(P, 2)
    for _ in range(300):
        f = random_element(rng, P, N, 2) * gamma_minus_one(2) ** rng.randrange(e)
        if f.is_zero():
            continue
        inv = invariants(f)
        if inv.mu or inv.lambda_ >= e:
            continue
        assert eisenstein_valuation(char_eval(f, 2)) == RamifiedValuation(inv.lambda_, e)


def test_zero_value_has_no_valuation():
    with pytest.raises(ZeroAtPrecision):
        eisenstein_valuation(CycloElement(P, N, 2, (0,) * 6))
    with pytest.raises(ZeroAtPrecision):
        eisenstein_valuation(CycloElement(P, N, 0, (0,)))


def test_character_above_level_is_rejected():
    with pytest.raises(LevelMismatch):
        char_eval(AlgebraElement.one(P, N, 1), 2)


def test_valuation_renders_as_fraction():
    assert str(RamifiedValuation(2, 6)) == "2/6"


def _augmentation_power(p: int, N: int, n: int, k: int) -> AlgebraElement:
    """(γ - 1)^k from the binomial expansion."""
    return AlgebraElement.from_ints(p, N, n, [(-1) ** (k - i) * comb(k, i) if i <= k else 0 for i in range(p ** n)])


def _check_valuation_matches_lambda(rng, p, n, samples):
    e = ramification_index(p, n)
    checked = 0
    while checked < samples:
        f = random_element(rng, p, N, n, "mu0")
        f = f * _augmentation_power(p, N, n, rng.randrange(e))
        inv = invariants(f)
        if inv.mu or inv.lambda_ >= e:
            continue
        assert eisenstein_valuation(char_eval(f, n)) == RamifiedValuation(inv.lambda_, e)
        checked += 1


@pytest.mark.slow
@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_valuation_matches_lambda_at_full_size(rng, p, n):
    _check_valuation_matches_lambda(rng, p, n, 1000)


def test_valuation_is_multiplicative(rng):
    n = 2
    for m in range(n + 1):
        e = ramification_index(P, m)
        for _ in range(100):
            f = random_element(rng, P, N, n) * _augmentation_power(P, N, n, rng.randrange(6)) * P ** rng.randrange(3)
            g = random_element(rng, P, N, n) * _augmentation_power(P, N, n, rng.randrange(6))
            y, z = char_eval(f, m), char_eval(g, m)
            if cyclo_is_zero(y) or cyclo_is_zero(z):
                continue
            total = eisenstein_valuation(y).numerator + eisenstein_valuation(z).numerator
            if total < e * N:
                assert eisenstein_valuation(y * z) == RamifiedValuation(total, e)
