"""Shared fixtures and hypothesis profile"""
import random

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings
from hypothesis import strategies as st

from iwasawa_sha.services.algebra import AlgebraElement

hypothesis_settings.register_profile(
    "iwasawa",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.load_profile("iwasawa")


@pytest.fixture
def rng():
    return random.Random(20251018)


@st.composite
def elements(draw, p: int = 3, N: int = 6, level: int = 2):
    """Uniform group ring elements of Λ_level mod p^N."""
    mod = p ** N
    values = draw(st.lists(st.integers(0, mod - 1), min_size=p ** level, max_size=p ** level))
    return AlgebraElement(p, N, level, tuple(values))
