import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nugap.errors import DomainError
from nugap.gen.plants import (
    GenConfig,
    campaign_stream,
    perturb_plant,
    random_plant,
    random_stabilizing_controller,
)
from nugap.metric.numetric import nu_metric
from nugap.metric.robust import stabilizes


def test_generation_is_deterministic():
    gen = GenConfig(seed=42, p=2, m=2)
    assert random_plant(gen, stream=(3,)).content_key() == random_plant(gen, stream=(3,)).content_key()
    assert random_plant(gen, stream=(3,)).content_key() != random_plant(gen, stream=(4,)).content_key()


def test_streams_are_independent_of_draw_order():
    first = campaign_stream(7, 1).standard_normal(4)
    campaign_stream(7, 0).standard_normal(100)
    np.testing.assert_array_equal(campaign_stream(7, 1).standard_normal(4), first)
    assert not np.allclose(campaign_stream(7, 1).standard_normal(4), campaign_stream(7, 2).standard_normal(4))


def test_generated_plants_have_real_coefficients():
    P = random_plant(GenConfig(seed=3, max_degree=4))
    r = P.entry(0, 0)
    assert np.allclose(np.imag(r.num.coeffs), 0) and np.allclose(np.imag(r.den.coeffs), 0)


@pytest.mark.parametrize(
    "overrides",
    [
        {"pole_zero_circle_gap": 1e-6},
        {"stable_fraction": 1.5},
        {"p": 0},
        {"min_modulus": 0.99},
        {"max_modulus": 1.01},
    ],
)
def test_invalid_generator_settings(overrides):
    with pytest.raises(DomainError):
        GenConfig(**overrides)


def test_zero_perturbation_returns_the_plant(delay):
    assert perturb_plant(delay, 0.0, seed=1) is delay
    with pytest.raises(DomainError):
        perturb_plant(delay, -1e-3, seed=1)


def test_tiny_perturbation_stays_close():
    P = random_plant(GenConfig(seed=8))
    assert nu_metric(P, perturb_plant(P, 1e-6, seed=8)).value <= 1e-3


@seed(43)
@settings(deadline=None, max_examples=20)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_stable_plants_keep_their_poles_clear_of_the_disk(plant_seed):
    gen = GenConfig(seed=plant_seed, max_degree=3, stable_fraction=1.0, pole_zero_circle_gap=0.1)
    r = random_plant(gen).entry(0, 0)
    assert np.all(np.abs(r.poles) >= 1.1 - 1e-9)


@seed(47)
@settings(deadline=None, max_examples=20)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_generated_roots_respect_the_circle_gap(plant_seed):
    gen = GenConfig(seed=plant_seed, max_degree=3)
    r = random_plant(gen).entry(0, 0)
    if len(r.poles):
        assert np.min(np.abs(np.abs(r.poles) - 1)) >= gen.pole_zero_circle_gap - 1e-9


@seed(53)
@settings(deadline=None, max_examples=8)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1), mimo=st.booleans())
def test_random_controller_stabilizes(plant_seed, mimo):
    gen = GenConfig(seed=plant_seed, p=2, m=2, max_degree=1) if mimo else GenConfig(seed=plant_seed)
    P = random_plant(gen)
    C = random_stabilizing_controller(P, plant_seed)
    assert C.shape == (P.m, P.p)
    assert stabilizes(P, C).ok
