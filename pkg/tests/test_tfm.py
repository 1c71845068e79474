import numpy as np
import pytest

from nugap.algebra.polyalg import Polynomial, RationalFn
from nugap.algebra.polymatrix import PolyMatrix
from nugap.algebra.tfm import (
    PolyMatrixFraction,
    RationalMatrix,
    Side,
    TransferMatrix,
    build_rmfd,
    check_right_coprime,
    gcrd_reduce,
    poles,
    tm_eval,
    tm_eval_grid,
)
from nugap.config import DEFAULT_CONFIG
from nugap.errors import BoundaryPole, DomainError, PoleProximity
from tests.conftest import unit_points


def test_boundary_pole_is_rejected():
    with pytest.raises(BoundaryPole) as info:
        TransferMatrix.siso([1.0], [-1.0, 1.0])
    assert info.value.entry == (0, 0)


def test_size_cap():
    cfg = DEFAULT_CONFIG.with_overrides(max_dim=2)
    with pytest.raises(DomainError):
        TransferMatrix.zeros(3, 1, cfg)


def test_degree_cap():
    cfg = DEFAULT_CONFIG.with_overrides(max_entry_degree=2)
    with pytest.raises(DomainError):
        TransferMatrix.siso([0.0, 0.0, 0.0, 1.0], cfg=cfg)


def test_entries_are_reduced():
    P = TransferMatrix.siso(Polynomial.from_roots([0.5, 3.0]).coeffs, Polynomial.from_roots([0.5, -2.0]).coeffs)
    r = P.entry(0, 0)
    assert r.num.degree == 1 and r.den.degree == 1


def test_tm_eval_matches_entry_values():
    P = TransferMatrix.from_entries(
        [[RationalFn.from_coeffs([1.0], [-0.5, 1.0]), RationalFn.constant(2.0)]]
    )
    value = tm_eval(P, 2.0)
    np.testing.assert_allclose(value, [[1 / 1.5, 2.0]])
    assert tm_eval_grid(P, unit_points(8)).shape == (8, 1, 2)


def test_tm_eval_refuses_points_at_a_pole():
    P = TransferMatrix.siso([1.0], [-0.5, 1.0])
    with pytest.raises(PoleProximity):
        tm_eval(P, 0.5)
    with pytest.raises(PoleProximity):
        tm_eval_grid(P, np.array([1.0, 0.5 + 1e-12]))


def test_content_key_identifies_equal_plants():
    a = TransferMatrix.siso([1.0, 2.0], [3.0, 1.0])
    b = TransferMatrix.siso([1.0, 2.0], [3.0, 1.0])
    c = TransferMatrix.siso([1.0, 2.5], [3.0, 1.0])
    assert a.content_key() == b.content_key() != c.content_key()


def test_rational_matrix_stacking_keeps_values():
    A = RationalMatrix(PolyMatrix.constant([[1.0]]), Polynomial.from_roots([2.0]))
    B = RationalMatrix(PolyMatrix.constant([[3.0]]), Polynomial.from_roots([-3.0], 2.0))
    z = unit_points(16)
    np.testing.assert_allclose(A.vstack(B)(z)[:, :, 0], np.column_stack([A(z)[:, 0, 0], B(z)[:, 0, 0]]))
    np.testing.assert_allclose(A.hstack(B)(z)[:, 0, :], np.column_stack([A(z)[:, 0, 0], B(z)[:, 0, 0]]))
    assert B.den.lead == 1.0


def test_polymatrix_det_and_adjugate():
    z_poly = Polynomial([0.0, 1.0])
    M = PolyMatrix.from_entries([[z_poly, Polynomial.constant(1.0)], [Polynomial.constant(2.0), z_poly * z_poly]])
    det = M.det().trimmed()
    np.testing.assert_allclose(det.coeffs, [-2.0, 0.0, 0.0, 1.0], atol=1e-12)
    for z in unit_points(5):
        np.testing.assert_allclose(M.adjugate()(z) @ M(z), det(z) * np.eye(2), atol=1e-12)


def test_build_rmfd_reproduces_plant():
    P = TransferMatrix.from_entries(
        [
            [RationalFn.from_coeffs([1.0], [-2.0, 1.0]), RationalFn.from_coeffs([0.0, 1.0], [0.25, 1.0])],
            [RationalFn.constant(0.5), RationalFn.from_coeffs([1.0, 1.0], [-3.0, 1.0])],
        ]
    )
    fraction = build_rmfd(P)
    assert fraction.coprime
    z = unit_points(32)
    np.testing.assert_allclose(fraction.evaluate(z), P.evaluate(z), atol=1e-10)


def test_common_right_divisor_is_removed():
    # a repeated pole in one row: column lcms give det Dp = (z - 2)**2 but the McMillan degree is 1
    P = TransferMatrix.from_entries([[RationalFn.from_coeffs([1.0], [-2.0, 1.0])] * 2])
    found = poles(P)
    assert len(found) == 1
    assert abs(found[0] - 2.0) < 1e-8


def test_gcrd_reduce_on_scalar_fraction():
    Np = PolyMatrix.from_entries([[Polynomial.from_roots([0.3])]])
    Dp = PolyMatrix.from_entries([[Polynomial.from_roots([0.3, 2.0])]])
    fraction = PolyMatrixFraction(Np, Dp, Side.RIGHT)
    assert not check_right_coprime(fraction).ok
    reduced = gcrd_reduce(fraction)
    assert reduced.coprime
    assert reduced.Dp.degree == 1
    z = unit_points(8)
    np.testing.assert_allclose(reduced.evaluate(z), fraction.evaluate(z), atol=1e-10)


def test_poles_of_unstable_siso_plant():
    P = TransferMatrix.siso([1.0], Polynomial.from_roots([0.5, -3.0]).coeffs)
    np.testing.assert_allclose(np.sort(poles(P).real), [-3.0, 0.5], atol=1e-10)


def test_singular_denominator_matrix_is_rejected():
    with pytest.raises(DomainError):
        PolyMatrixFraction(PolyMatrix.constant([[1.0, 1.0]]), PolyMatrix.constant([[1.0, 1.0], [1.0, 1.0]]))
