import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from nugap.circle.sampling import winding_number
from nugap.circle.toeplitz import index_estimate, semicommutator_norm, toeplitz_section
from nugap.errors import DomainError, NotInvertible
from nugap.gen.plants import GenConfig, random_plant


def test_section_of_constant_is_identity():
    section = toeplitz_section([1.0], 3)
    np.testing.assert_array_equal(section.matrix, np.eye(3))
    assert section.is_hermitian


def test_section_of_shift_is_lower_shift():
    section = toeplitz_section([0.0, 0.0, 1.0], 3)
    np.testing.assert_array_equal(section.matrix, np.eye(3, k=-1))
    assert not section.is_hermitian


def test_section_of_real_symbol_is_tridiagonal():
    section = toeplitz_section([1.0, 2.5, 1.0], 4)
    expected = 2.5 * np.eye(4) + np.eye(4, k=1) + np.eye(4, k=-1)
    np.testing.assert_array_equal(section.matrix, expected)
    assert section.is_hermitian


def test_section_size_must_be_positive():
    with pytest.raises(DomainError):
        toeplitz_section([1.0], 0)


def test_index_of_shift():
    estimate = index_estimate(lambda z: z)
    assert estimate.index == -1
    assert estimate.route == "det-winding"
    assert all(s < 1e-10 for _, s in estimate.sigma_min_trace)


def test_index_of_invertible_symbol():
    estimate = index_estimate(lambda z: 2 + z)
    assert estimate.index == 0
    assert all(s >= 1 - 1e-9 for _, s in estimate.sigma_min_trace)


def test_matrix_symbol_goes_through_determinant():
    def diagonal(z):
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0], out[..., 1, 1] = z, 1 / z
        return out

    assert index_estimate(diagonal).index == 0
    assert index_estimate(lambda z: z).index + index_estimate(lambda z: 1 / z).index == 0


def test_index_needs_invertible_symbol():
    with pytest.raises(NotInvertible):
        index_estimate(lambda z: 1 + z)


def test_semicommutator_of_constants_vanishes():
    assert semicommutator_norm([2.0], [3.0], 8) == 0.0


def test_semicommutator_of_shift_pair_is_rank_one():
    for n in (4, 16):
        assert semicommutator_norm([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], n) == pytest.approx(1.0)


def test_semicommutator_stabilizes_for_trigonometric_polynomials():
    rng = np.random.default_rng(3)
    f = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    g = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    assert semicommutator_norm(f, g, 256) == pytest.approx(semicommutator_norm(f, g, 128), abs=1e-6)


@seed(11)
@settings(deadline=None, max_examples=15)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_index_is_additive_and_odd(plant_seed):
    gen = GenConfig(seed=plant_seed, max_degree=3)
    f = random_plant(gen, stream=(0,)).entry(0, 0)
    g = random_plant(gen, stream=(1,)).entry(0, 0)
    if f.is_zero or g.is_zero:
        return
    i_f, i_g = index_estimate(f).index, index_estimate(g).index
    assert -winding_number(lambda z: f(z) * g(z)).winding == i_f + i_g
    assert -winding_number(lambda z: np.conj(f(z))).winding == -i_f


@seed(13)
@settings(deadline=None, max_examples=15)
@given(plant_seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_stable_outer_symbols_have_index_zero(plant_seed):
    gen = GenConfig(seed=plant_seed, max_degree=3, stable_fraction=1.0)
    f = random_plant(gen).entry(0, 0)
    if f.is_zero or np.any(np.abs(f.zeros) < 1):
        return
    assert index_estimate(f).index == 0
