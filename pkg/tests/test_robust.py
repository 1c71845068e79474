import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nugap.algebra.tfm import TransferMatrix
from nugap.errors import DomainError, SingularAtPoint
from nugap.gen.plants import perturb_plant, random_plant, random_stabilizing_controller
from nugap.metric.numetric import FactorizationCache
from nugap.metric.robust import (
    closed_loop_direct,
    closed_loop_sampler,
    robustness_check,
    stability_margin,
    stabilizes,
    stabilizes_by_roots,
)
from tests.conftest import constant, plant_family, unit_points

MARGIN_TOLERANCE = 1e-9
ROUTE_TOLERANCE = 1e-7


def test_closed_loop_of_zero_pair(zero_plant):
    cache = FactorizationCache()
    H = closed_loop_sampler(cache.graph(zero_plant), cache.controller(zero_plant))
    np.testing.assert_allclose(H(unit_points(8)), np.broadcast_to([[0, 0], [0, 1]], (8, 2, 2)), atol=1e-12)


def test_margin_of_zero_pair_is_one(zero_plant):
    report = stability_margin(zero_plant, zero_plant)
    assert report.stabilizes
    assert report.margin == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "gain, ok, winding, marginal",
    [
        (-2.0, True, 0, False),
        (-0.5, False, 1, False),
        (0.0, False, 1, False),
        (-1.0, False, None, True),
    ],
)
def test_static_feedback_around_delay(delay, gain, ok, winding, marginal):
    report = stabilizes(delay, constant(gain))
    assert report.ok is ok
    assert report.det_winding == winding
    assert report.boundary_marginal is marginal


@pytest.mark.parametrize("gain", [-2.0, -0.5, 0.0, -1.0, 3.0])
def test_root_route_agrees_with_winding_route(delay, gain):
    by_winding = stabilizes(delay, constant(gain))
    by_roots = stabilizes_by_roots(delay, constant(gain))
    assert by_roots.ok == by_winding.ok
    assert by_roots.boundary_marginal == by_winding.boundary_marginal


def test_margin_of_stabilized_delay(delay):
    # H = [1; z][2, 1] / (z + 2) peaks at z = -1 with norm sqrt(10)
    report = stability_margin(delay, constant(-2.0))
    assert report.stabilizes
    assert report.margin == pytest.approx(1 / np.sqrt(10), abs=MARGIN_TOLERANCE)
    assert report.margin * report.hinf_norm == pytest.approx(1.0)
    assert report.theta_star == pytest.approx(np.pi, abs=1e-5)


def test_margin_without_stabilization_is_zero(delay):
    report = stability_margin(delay, constant(0.0))
    assert not report.stabilizes
    assert report.margin == 0.0
    assert report.hinf_norm is None


def test_factored_loop_matches_direct_formula(delay):
    C = TransferMatrix.siso([-2.0, 0.3], [0.5, 1.0])
    assert stabilizes(delay, C).ok
    cache = FactorizationCache()
    z = unit_points(32)
    H = closed_loop_sampler(cache.graph(delay), cache.controller(C))(z)
    np.testing.assert_allclose(H, closed_loop_direct(delay, C, z), atol=ROUTE_TOLERANCE)


def test_singular_loop_point_is_reported(delay):
    cache = FactorizationCache()
    H = closed_loop_sampler(cache.graph(delay), cache.controller(constant(-1.0)))
    with pytest.raises(SingularAtPoint):
        H(np.array([-1.0 + 0j]))


def test_controller_dimensions_are_checked(delay):
    with pytest.raises(DomainError):
        stabilizes(delay, TransferMatrix.zeros(2, 1))


def test_robustness_slack_without_perturbation(delay):
    report = robustness_check(delay, delay, constant(-2.0))
    assert report.distance.value <= 1e-7
    assert report.slack == pytest.approx(0.0, abs=1e-7)


@seed(37)
@settings(deadline=None, max_examples=10)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1), mimo=st.booleans())
def test_margin_stays_in_unit_interval(plant_seed, mimo):
    P = random_plant(plant_family(plant_seed, mimo))
    C = random_stabilizing_controller(P, plant_seed)
    report = stability_margin(P, C)
    assert report.stabilizes
    assert 0 < report.margin <= 1 + 1e-9
    assert stabilizes_by_roots(P, C).ok


@seed(41)
@settings(deadline=None, max_examples=10)
@given(
    plant_seed=st.integers(min_value=0, max_value=2**31 - 1),
    eps=st.sampled_from([1e-3, 1e-2, 1e-1]),
    mimo=st.booleans(),
)
def test_robust_stability_inequality(plant_seed, eps, mimo):
    P0 = random_plant(plant_family(plant_seed, mimo))
    C = random_stabilizing_controller(P0, plant_seed)
    P = perturb_plant(P0, eps, plant_seed)
    report = robustness_check(P0, P, C)
    assert report.slack >= -1e-6
