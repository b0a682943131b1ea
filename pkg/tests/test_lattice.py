import random

import numpy as np
import pytest

from iwasawa_sha.core.errors import PrecisionMismatch
from iwasawa_sha.services.algebra import AlgebraElement, lambda_invariant, omega_pm, random_element, xi
from iwasawa_sha.services.lattice import (
    DivisorProfile,
    PMatrix,
    ideal_members,
    ideal_membership,
    ideal_reduction,
    mult_matrix,
    quotient_profile,
    reduce_ideal,
    smith_form,
)

P, N = 3, 6


def _random_unitriangular(rng: random.Random, size: int, upper: bool) -> PMatrix:
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                row.append(1)
            elif (j > i) == upper:
                row.append(rng.randrange(P ** N))
            else:
                row.append(0)
        rows.append(row)
    return PMatrix.from_rows(P, N, rows)


def test_diagonal_profile():
    profile = smith_form(PMatrix.diagonal(P, N, [9, 1, 3]))
    assert profile == DivisorProfile((0, 1, 2), 0)
    assert profile.order_exponent == 3
    assert profile.structure == (1, 2)


def test_profile_is_invariant_under_unimodular_change(rng):
    diag = PMatrix.diagonal(P, N, [1, 3, 3, 27, 1])
    for _ in range(20):
        left = _random_unitriangular(rng, 5, upper=False) @ _random_unitriangular(rng, 5, upper=True)
        right = _random_unitriangular(rng, 5, upper=True) @ _random_unitriangular(rng, 5, upper=False)
        assert smith_form(left @ diag @ right) == smith_form(diag)


def test_zero_matrix_has_full_deficit():
    profile = smith_form(PMatrix.zeros(P, N, 3, 4))
    assert profile.rank_deficit == 3
    assert not profile.is_finite


def test_mult_matrix_multiplies(rng):
    f = random_element(rng, P, N, 2)
    g = random_element(rng, P, N, 2)
    column = PMatrix.from_rows(P, N, [[c] for c in g.values])
    product = mult_matrix(f) @ column
    assert tuple(product.entries[:, 0]) == (f * g).values


def test_matrix_precision_must_match():
    with pytest.raises(PrecisionMismatch):
        PMatrix.identity(P, N, 2) @ PMatrix.identity(P, N + 1, 2)


def test_unit_generates_everything(rng):
    unit = random_element(rng, P, N, 2, "unit")
    profile = quotient_profile([unit])
    assert profile.is_finite and profile.structure == ()


def test_xi_quotient_is_not_finite():
    # Λ_1/(ξ_1) is Z_p[ζ_p], free of rank p - 1
    profile = quotient_profile([xi(P, N, 1)])
    assert profile.rank_deficit == P - 1


def test_omega_quotient_at_level_two():
    profile = quotient_profile([omega_pm(P, N, 2, "+"), omega_pm(P, N, 2, "-")])
    assert profile.is_finite
    assert profile.order_exponent == 2


def test_membership_of_multiples(rng):
    f = random_element(rng, P, N, 2)
    h = random_element(rng, P, N, 2)
    assert ideal_membership(f * h, [f])
    assert ideal_membership(h * f + h * xi(P, N, 2), [f, xi(P, N, 2)])


def test_non_membership():
    one = AlgebraElement.one(P, N, 1)
    assert not ideal_membership(one, [one * P])
    assert ideal_membership(one * 9, [one * P])
    gamma_minus_one = AlgebraElement.gamma_power(P, N, 1, 1) - one
    assert not ideal_membership(one, [gamma_minus_one, one * P])


def test_batched_membership_agrees(rng):
    gens = [omega_pm(P, N, 2, "+"), omega_pm(P, N, 2, "-")]
    candidates = [random_element(rng, P, N, 2) for _ in range(4)] + [gens[0] * gens[1], gens[1]]
    assert ideal_members(candidates, gens) == [ideal_membership(c, gens) for c in candidates]
    assert ideal_members(candidates, gens)[-2:] == [True, True]


def test_entries_are_exact_integers():
    matrix = mult_matrix(AlgebraElement.from_ints(P, N, 1, [1, 2, 3]))
    assert matrix.entries.dtype == np.dtype(object)
    assert (matrix.rows, matrix.cols) == (3, 3)


def test_profile_depends_only_on_the_ideal(rng):
    for _ in range(10):
        f = random_element(rng, P, N, 2)
        g = random_element(rng, P, N, 2) * P
        h = random_element(rng, P, N, 2)
        w = random_element(rng, P, N, 2, "unit")
        base = quotient_profile([f, g])
        assert quotient_profile([w * f, g]) == base
        assert quotient_profile([f, g + h * f]) == base
        assert quotient_profile([g, f]) == base


def test_quotient_by_p_sees_lambda(rng):
    one = AlgebraElement.one(P, N, 2)
    for _ in range(20):
        f = random_element(rng, P, N, 2, "mu0")
        profile = quotient_profile([f, one * P])
        assert profile.is_finite
        assert profile.order_exponent == lambda_invariant(f)


def test_stored_reduction_agrees_with_fresh_elimination(rng):
    gens = [omega_pm(P, N, 2, "+"), omega_pm(P, N, 2, "-")]
    candidates = [random_element(rng, P, N, 2) for _ in range(6)]
    candidates += [gens[0] * random_element(rng, P, N, 2), gens[1] * P]
    reduction = ideal_reduction(gens)
    profile, verdicts = reduce_ideal(gens, candidates)
    assert reduction.profile == profile == quotient_profile(gens)
    assert reduction.contains(candidates) == verdicts == ideal_members(candidates, gens)
    assert verdicts[-2:] == [True, True]


def test_stored_reduction_rejects_foreign_elements():
    reduction = ideal_reduction([xi(P, N, 1)])
    with pytest.raises(PrecisionMismatch):
        reduction.contains([AlgebraElement.one(P, N + 1, 1)])
