import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nugap.algebra.polyalg import Polynomial
from nugap.algebra.tfm import TransferMatrix
from nugap.errors import DomainError
from nugap.factor.coprime import graph_symbols
from nugap.gen.plants import GenConfig, perturb_plant, random_plant
from nugap.metric.numetric import (
    FactorizationCache,
    chordal_distance,
    distance_matrix,
    nu_metric,
    pointwise_gap,
    winding_condition,
    winding_condition_classical,
)
from tests.conftest import constant, plant_family

ONE_OVER_SQRT10 = 0.31622776601683794
IDENTITY_TOLERANCE = 1e-7
SYMMETRY_TOLERANCE = 1e-7
TRIANGLE_TOLERANCE = 1e-6
ORACLE_TOLERANCE = 1e-7


def test_distance_between_constants():
    outcome = nu_metric(constant(1.0), constant(2.0))
    assert outcome.condition_met
    assert outcome.value == pytest.approx(ONE_OVER_SQRT10, abs=1e-9)
    assert outcome.winding == 0


def test_distance_to_itself_vanishes(delay):
    outcome = nu_metric(delay, delay)
    assert outcome.condition_met
    assert outcome.value <= IDENTITY_TOLERANCE


def test_unmatched_unstable_pole_gives_distance_one(delay, zero_plant):
    outcome = nu_metric(delay, zero_plant)
    assert not outcome.condition_met
    assert outcome.value == 1.0
    assert outcome.winding == -1
    assert outcome.theta_star is None


def test_winding_condition_of_identical_symbols(delay):
    G = graph_symbols(delay)
    condition = winding_condition(G, G)
    assert condition.holds
    assert condition.min_modulus == pytest.approx(1.0, abs=1e-9)


def test_winding_condition_for_constants():
    condition = winding_condition(graph_symbols(constant(1.0)), graph_symbols(constant(2.0)))
    assert condition.holds
    assert condition.min_modulus == pytest.approx(3 / np.sqrt(10), abs=1e-9)


def test_classical_condition_matches_determinant_route(delay, zero_plant):
    classical = winding_condition_classical(delay, zero_plant)
    assert classical.invertible
    assert classical.winding == -1


def test_dimension_mismatch_is_rejected(delay):
    with pytest.raises(DomainError):
        nu_metric(delay, TransferMatrix.zeros(2, 1))


def test_pointwise_gap_routes():
    assert pointwise_gap(constant(1.0), constant(2.0), 0.7) == pytest.approx(ONE_OVER_SQRT10)
    assert chordal_distance(1.0, 1.0) == 0.0
    P1 = TransferMatrix.siso([0.3, 1.0], Polynomial.from_roots([0.5, -1.4]).coeffs)
    P2 = TransferMatrix.siso([1.0], [-0.6, 1.0])
    for theta in (0.1, 1.3, 2.9, 4.4):
        chordal = pointwise_gap(P1, P2, theta)
        graph = pointwise_gap(P1, P2, theta, use_graph=True)
        assert chordal == pytest.approx(graph, abs=ORACLE_TOLERANCE)


def test_cache_reuses_factorizations(delay):
    cache = FactorizationCache()
    nu_metric(delay, delay, cache=cache)
    nu_metric(delay, delay, cache=cache)
    assert len(cache) == 1
    assert cache.hits >= 3


def test_distance_matrix_is_symmetric_and_deterministic():
    plants = [random_plant(GenConfig(seed=5), stream=(k,)) for k in range(4)]
    serial = distance_matrix(plants)
    parallel = distance_matrix(plants, workers=3)
    np.testing.assert_array_equal(serial, parallel)
    np.testing.assert_array_equal(serial, serial.T)
    assert np.all(np.diag(serial) == 0)
    assert np.all((serial >= 0) & (serial <= 1 + 1e-9))


@seed(19)
@settings(deadline=None, max_examples=20)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1), mimo=st.booleans())
def test_symmetry_and_range(plant_seed, mimo):
    gen = plant_family(plant_seed, mimo)
    P1, P2 = random_plant(gen, stream=(0,)), random_plant(gen, stream=(1,))
    cache = FactorizationCache()
    d12, d21 = nu_metric(P1, P2, cache=cache), nu_metric(P2, P1, cache=cache)
    assert abs(d12.value - d21.value) <= SYMMETRY_TOLERANCE
    assert 0 <= d12.value <= 1 + 1e-9
    assert d12.condition_met == d21.condition_met


@seed(23)
@settings(deadline=None, max_examples=20)
@given(
    plant_seed=st.integers(min_value=0, max_value=2**31 - 1),
    eps=st.sampled_from([1e-3, 1e-2, 1e-1]),
    mimo=st.booleans(),
    distinct=st.booleans(),
)
def test_triangle_inequality(plant_seed, eps, mimo, distinct):
    gen = plant_family(plant_seed, mimo)
    P1 = random_plant(gen)
    if distinct:
        P2, P3 = random_plant(gen, stream=(1,)), random_plant(gen, stream=(2,))
    else:
        P2, P3 = perturb_plant(P1, eps, plant_seed), perturb_plant(P1, eps, plant_seed + 1)
    cache = FactorizationCache()
    d13 = nu_metric(P1, P3, cache=cache).value
    d12 = nu_metric(P1, P2, cache=cache).value
    d23 = nu_metric(P2, P3, cache=cache).value
    assert d13 <= d12 + d23 + TRIANGLE_TOLERANCE


@seed(29)
@settings(deadline=None, max_examples=20)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_classical_and_determinant_windings_agree(plant_seed):
    P1 = random_plant(GenConfig(seed=plant_seed), stream=(0,))
    P2 = random_plant(GenConfig(seed=plant_seed), stream=(1,))
    determinant = winding_condition(graph_symbols(P1), graph_symbols(P2))
    classical = winding_condition_classical(P1, P2)
    if determinant.invertible and classical.invertible:
        assert determinant.winding == classical.winding


@seed(31)
@settings(deadline=None, max_examples=15)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_siso_distance_is_sup_of_chordal_gap(plant_seed):
    P1 = random_plant(GenConfig(seed=plant_seed))
    P2 = perturb_plant(P1, 0.05, plant_seed)
    outcome = nu_metric(P1, P2)
    if not outcome.condition_met:
        return
    thetas = 2 * np.pi * np.arange(1024) / 1024
    grid_sup = max(pointwise_gap(P1, P2, t) for t in thetas)
    assert grid_sup <= outcome.value + 1e-9
    assert pointwise_gap(P1, P2, outcome.theta_star) == pytest.approx(outcome.value, abs=1e-6)
