import pytest
from hypothesis import given

from iwasawa_sha.core.errors import LevelMismatch, LevelZero, PrecisionExhausted, PrecisionMismatch
from iwasawa_sha.services.algebra import (
    AlgebraElement,
    cyclotomic_factor,
    invariants,
    lambda_invariant,
    lift_nu,
    mu_invariant,
    multiply,
    omega_pm,
    project_pi,
    project_to,
    random_element,
    xi,
)
from tests.conftest import elements

P, N = 3, 6


@given(elements(), elements(), elements())
def test_ring_laws(f, g, h):
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * AlgebraElement.one(P, N, 2) == f


@given(elements(), elements())
def test_augmentation_is_multiplicative(f, g):
    assert (f * g).augmentation() == f.augmentation() * g.augmentation()


@given(elements(level=1))
def test_projection_after_norm_is_multiplication_by_p(f):
    assert project_pi(lift_nu(f)) == f * P


@given(elements())
def test_norm_after_projection_is_xi(f):
    assert lift_nu(project_pi(f)) == xi(P, N, 2) * f


@given(elements())
def test_projection_is_a_ring_map(f):
    g = AlgebraElement.gamma_power(P, N, 2, 4) + f
    assert project_pi(f * g) == project_pi(f) * project_pi(g)


def test_xi_is_top_cyclotomic_factor():
    for n in (1, 2, 3):
        assert xi(P, N, n) == cyclotomic_factor(P, N, n, n)


def test_omega_small_levels():
    assert omega_pm(P, N, 0, "+") == AlgebraElement.one(P, N, 0)
    assert omega_pm(P, N, 0, "-") == AlgebraElement.one(P, N, 0)
    assert omega_pm(P, N, 1, "+") == AlgebraElement.one(P, N, 1)
    assert omega_pm(P, N, 1, "-") == xi(P, N, 1)
    assert omega_pm(P, N, 2, "+") == xi(P, N, 2)


def test_lambda_of_augmentation_powers():
    u = AlgebraElement.gamma_power(P, N, 2, 1) - AlgebraElement.one(P, N, 2)
    for k in range(P ** 2):
        assert lambda_invariant(u ** k) == k
        assert mu_invariant(u ** k) == 0


def test_mu_counts_common_power_of_p():
    # 9 + 18γ + 27γ² = 9(1 + 2γ + 3γ²), and 1 + 2γ ≡ -(γ - 1) mod 3
    f = AlgebraElement.from_ints(P, N, 1, [9, 18, 27])
    assert mu_invariant(f) == 2
    assert lambda_invariant(f) == 1
    g = AlgebraElement.from_ints(P, N, 1, [9, 18, 9])
    assert invariants(g).mu == 2 and invariants(g).lambda_ == 0


def test_zero_has_no_invariants():
    with pytest.raises(PrecisionExhausted):
        mu_invariant(AlgebraElement.zero(P, N, 1))


def test_norm_shifts_lambda(rng):
    """μ(ν f) = μ(f), λ(ν f) = p^n - p^{n-1} + λ(f)."""
    for _ in range(200):
        f = random_element(rng, P, N, 1)
        if f.is_zero():
            continue
        lifted = lift_nu(f)
        assert mu_invariant(lifted) == mu_invariant(f)
        assert lambda_invariant(lifted) == P ** 2 - P + lambda_invariant(f)


def test_lambda_adds_under_multiplication(rng):
    for _ in range(200):
        f = random_element(rng, P, N, 2)
        g = random_element(rng, P, N, 2)
        if f.is_zero() or g.is_zero():
            continue
        inv_f, inv_g = invariants(f), invariants(g)
        if inv_f.mu or inv_g.mu or inv_f.lambda_ + inv_g.lambda_ >= P ** 2:
            continue
        assert invariants(f * g).lambda_ == inv_f.lambda_ + inv_g.lambda_
        assert invariants(f * g).mu == 0


def test_lambda_of_sum_is_at_least_min(rng):
    for _ in range(200):
        f = random_element(rng, P, N, 2, "unit")
        g = random_element(rng, P, N, 2)
        u = AlgebraElement.gamma_power(P, N, 2, 1) - AlgebraElement.one(P, N, 2)
        f, g = f * u ** rng.randrange(5), g * u ** rng.randrange(5)
        total = f + g
        if total.is_zero() or g.is_zero() or mu_invariant(g) or mu_invariant(total):
            continue
        assert lambda_invariant(total) >= min(lambda_invariant(f), lambda_invariant(g))


def test_random_lift_projects_to_target(rng):
    target = random_element(rng, P, N, 1)
    lifted = random_element(rng, P, N, 2, "lift", target=target)
    assert project_pi(lifted) == target


def test_random_unit_has_unit_augmentation(rng):
    for _ in range(20):
        assert random_element(rng, P, N, 2, "unit").is_unit()


def test_project_to_composes():
    f = AlgebraElement.from_ints(P, N, 3, range(27))
    assert project_to(f, 1) == project_pi(project_pi(f))
    assert project_to(f, 3) == f


def test_projection_from_level_zero_is_rejected():
    with pytest.raises(LevelZero):
        project_pi(AlgebraElement.one(P, N, 0))


def test_mixing_levels_or_precisions_is_rejected():
    with pytest.raises(LevelMismatch):
        multiply(AlgebraElement.one(P, N, 1), AlgebraElement.one(P, N, 2))
    with pytest.raises(PrecisionMismatch):
        AlgebraElement.one(P, N, 1) + AlgebraElement.one(P, N + 1, 1)


def test_text_form_round_trip():
    f = AlgebraElement.from_ints(3, 4, 1, [1, -1, 80])
    assert f.to_text() == 'level 1; ["1", "80", "80"] mod 3^4'
    assert AlgebraElement.from_text(f.to_text()) == f
    assert AlgebraElement.from_json(3, 4, f.to_json()) == f


def test_text_form_rejects_bad_length():
    with pytest.raises(ValueError):
        AlgebraElement.from_json(3, 4, '["1", "2"]')


def test_mu0_samples_are_not_all_units(rng):
    samples = [random_element(rng, P, N, 2, "mu0") for _ in range(200)]
    assert all(mu_invariant(f) == 0 for f in samples)
    assert any(not f.is_unit() for f in samples)


def _scaled_sample(rng, p, N, n):
    u = AlgebraElement.gamma_power(p, N, n, 1) - AlgebraElement.one(p, N, n)
    return random_element(rng, p, N, n) * u ** rng.randrange(p ** n) * p ** rng.randrange(3)


def _check_norm_and_projection_lemmas(rng, p, N, n, samples):
    top = p ** n - p ** (n - 1)
    for _ in range(samples):
        f = _scaled_sample(rng, p, N, n - 1)
        g = _scaled_sample(rng, p, N, n)
        h = _scaled_sample(rng, p, N, n)
        assert project_pi(lift_nu(f)) == f * p
        assert lift_nu(project_pi(g)) == xi(p, N, n) * g

        if not f.is_zero():
            lifted = invariants(lift_nu(f))
            assert lifted.mu == mu_invariant(f)
            assert lifted.lambda_ == top + lambda_invariant(f)

        if g.is_zero():
            continue
        below = project_pi(g)
        if not below.is_zero():
            # reduction mod p truncates the (γ-1)-expansion at p^{n-1}
            assert mu_invariant(below) >= mu_invariant(g)
            if mu_invariant(below) == mu_invariant(g):
                assert lambda_invariant(below) == lambda_invariant(g)

        product = g * h
        if h.is_zero() or product.is_zero():
            continue
        inv_g, inv_h, inv_gh = invariants(g), invariants(h), invariants(product)
        assert inv_gh.mu >= inv_g.mu + inv_h.mu
        if inv_gh.mu == inv_g.mu + inv_h.mu and inv_g.lambda_ + inv_h.lambda_ < p ** n:
            assert inv_gh.lambda_ == inv_g.lambda_ + inv_h.lambda_


def test_norm_and_projection_lemmas(rng):
    _check_norm_and_projection_lemmas(rng, P, N, 2, 200)


@pytest.mark.slow
@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)])
def test_norm_and_projection_lemmas_at_full_size(rng, p, n):
    _check_norm_and_projection_lemmas(rng, p, N, n, 1000)
