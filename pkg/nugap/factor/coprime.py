"""
Normalized coprime factorizations and the graph symbols built from them.

Right factors come from a coprime polynomial fraction P = Np Dp^-1 and the
spectral factor R of Phi = Np* Np + Dp* Dp: N = Np R^-1, D = Dp R^-1, both
over the shared stable denominator det R. Left factors are the transposes of
the right factors of P^T.
"""

# built-in imports
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

# numerical imports
import numpy as np
import scipy.linalg

from nugap.algebra.polyalg import poly_bezout, poly_roots
from nugap.algebra.polymatrix import PolyMatrix
from nugap.algebra.tfm import (
    PolyMatrixFraction,
    RationalMatrix,
    Side,
    TransferMatrix,
    build_rmfd,
    check_right_coprime,
)
from nugap.circle.sampling import CircleGrid, sigma_max
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import CertificateNotFound, DomainError, FactorizationError, NotCoprime
from nugap.factor.spectral import spectral_factor_matrix, spectral_factor_scalar, trigonometric_gram

logger = logging.getLogger(__name__)


@dataclass
class NormalizedFactorization:
    """Normalized right (P = N D^-1) or left (P = D^-1 N) coprime factorization.

    `fraction` is the polynomial fraction on the same side and
    `spectral_factor` the R with N = Np R^-1 (right) or N = R^-1 Np (left).
    """

    side: Side
    N: RationalMatrix
    D: RationalMatrix
    residual_norm: float
    fraction: PolyMatrixFraction
    spectral_factor: PolyMatrix
    bezout_residual: Optional[float] = None


@dataclass
class GraphSymbols:
    """G = [N; D] with isometric columns and Gt = [-D~, N~] with coisometric rows."""

    G: RationalMatrix
    Gt: RationalMatrix
    right: NormalizedFactorization
    left: NormalizedFactorization
    annihilation: float

    @property
    def plant_shape(self) -> Tuple[int, int]:
        return self.Gt.shape[0], self.G.shape[1]


@dataclass
class ControllerSymbols:
    """K = [D_C; N_C] and Kt = [-N~_C, D~_C] for a controller C = N_C D_C^-1 = D~_C^-1 N~_C."""

    K: RationalMatrix
    Kt: RationalMatrix
    right: NormalizedFactorization
    left: NormalizedFactorization


@dataclass
class BezoutCertificate:
    X: RationalMatrix
    Y: RationalMatrix
    residual: float


def _grid(cfg: NumericConfig) -> CircleGrid:
    return CircleGrid(cfg.validation_grid)


def _gram_residual(M: RationalMatrix, cfg: NumericConfig, rows: bool = False) -> float:
    """sup over the validation grid of ||M*M - I|| (or ||M M* - I|| when rows=True)."""
    values = M(_grid(cfg).points)
    adjoint = np.conj(np.swapaxes(values, 1, 2))
    gram = values @ adjoint if rows else adjoint @ values
    return float(np.max(sigma_max(gram - np.eye(gram.shape[-1]))))


def nrcf(P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> NormalizedFactorization:
    """Normalized right coprime factorization P = N D^-1 with N*N + D*D = I on the circle."""
    fraction = build_rmfd(P, cfg)
    if not fraction.coprime:
        report = check_right_coprime(fraction, cfg)
        raise NotCoprime([z for z, s in report.witnesses if s < cfg.tol_rank], "right fraction is not coprime")

    phi = trigonometric_gram(fraction.stacked())
    if P.m == 1:
        r = spectral_factor_scalar(phi[:, 0, 0], cfg)
        R = PolyMatrix(r.coeffs[:, None, None])
        det_r, adj_r = r, PolyMatrix.identity(1)
    else:
        R = spectral_factor_matrix(phi, cfg).factor
        det_r, adj_r = R.det().trimmed(), R.adjugate()

    N = RationalMatrix(fraction.Np @ adj_r, det_r)
    D = RationalMatrix(fraction.Dp @ adj_r, det_r)

    if det_r.degree > 0:
        moduli = np.abs(poly_roots(N.den, cfg))
        if np.min(moduli) < 1 + cfg.dist_circle_min:
            raise FactorizationError(f"normalized factor has a pole of modulus {np.min(moduli):.6f}")

    residual = _gram_residual(N.vstack(D), cfg)
    if residual > cfg.tol_normalization:
        raise FactorizationError(f"normalization residual {residual:.3e} exceeds tolerance", residual=residual)

    points = _grid(cfg).points
    plant = P.evaluate(points)
    rebuilt = np.swapaxes(np.linalg.solve(np.swapaxes(D(points), 1, 2), np.swapaxes(N(points), 1, 2)), 1, 2)
    mismatch = float(np.max(sigma_max(plant - rebuilt) / (1 + sigma_max(plant))))
    if mismatch > cfg.tol_graph:
        raise FactorizationError(f"N D^-1 misses the plant by {mismatch:.3e}", mismatch=mismatch)

    logger.debug(f"nrcf of {P!r}: spectral degree {max(R.degree, 0)}, residual {residual:.2e}")
    return NormalizedFactorization(Side.RIGHT, N, D, residual, fraction, R)


def nlcf(P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> NormalizedFactorization:
    """Normalized left coprime factorization P = D~^-1 N~ through the transposed plant."""
    dual = nrcf(P.transpose(), cfg)
    Nt, Dt = dual.N.transpose(), dual.D.transpose()
    residual = _gram_residual(Nt.hstack(Dt), cfg, rows=True)
    if residual > cfg.tol_normalization:
        raise FactorizationError(f"left normalization residual {residual:.3e} exceeds tolerance", residual=residual)
    fraction = PolyMatrixFraction(
        dual.fraction.Np.transpose(), dual.fraction.Dp.transpose(), Side.LEFT, coprime=dual.fraction.coprime
    )
    return NormalizedFactorization(Side.LEFT, Nt, Dt, residual, fraction, dual.spectral_factor.transpose())


def _annihilation(Gt: RationalMatrix, G: RationalMatrix, cfg: NumericConfig) -> float:
    points = _grid(cfg).points
    return float(np.max(sigma_max(Gt(points) @ G(points))))


def graph_symbols(P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> GraphSymbols:
    right, left = nrcf(P, cfg), nlcf(P, cfg)
    G = right.N.vstack(right.D)
    Gt = (-left.D).hstack(left.N)
    annihilation = _annihilation(Gt, G, cfg)
    if annihilation > cfg.tol_graph:
        raise FactorizationError(f"graph symbols fail Gt G = 0 by {annihilation:.3e}", annihilation=annihilation)
    return GraphSymbols(G, Gt, right, left, annihilation)


def controller_symbols(C: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> ControllerSymbols:
    right, left = nrcf(C, cfg), nlcf(C, cfg)
    K = right.D.vstack(right.N)
    Kt = (-left.N).hstack(left.D)
    annihilation = _annihilation(Kt, K, cfg)
    if annihilation > cfg.tol_graph:
        raise FactorizationError(f"controller symbols fail Kt K = 0 by {annihilation:.3e}", annihilation=annihilation)
    return ControllerSymbols(K, Kt, right, left)


def polynomial_bezout_family(
    fraction: PolyMatrixFraction, degree: int
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Solutions Z = [Xp, Yp] of degree <= `degree` to Xp Np + Yp Dp = I by block-Sylvester least squares.

    Returns the least-squares coefficients (m, (degree+1)(p+m)), an
    orthonormal basis of the homogeneous solutions (as columns acting on
    Z^T) and the coefficient residual of the particular solution.
    """
    F = fraction.stacked()
    d = max(F.degree, 0)
    rows, m = F.shape
    sylvester = np.zeros(((degree + 1) * rows, (degree + d + 1) * m), dtype=complex)
    for j in range(degree + 1):
        for k in range(d + 1):
            sylvester[j * rows : (j + 1) * rows, (j + k) * m : (j + k + 1) * m] = F.coeffs[k]
    rhs = np.zeros(((degree + d + 1) * m, m), dtype=complex)
    rhs[:m] = np.eye(m)

    solution, *_ = scipy.linalg.lstsq(sylvester.T, rhs)
    residual = float(np.max(np.abs(sylvester.T @ solution - rhs)))
    nullspace = scipy.linalg.null_space(sylvester.T)
    return solution.T, nullspace, residual


def split_bezout(coeffs: np.ndarray, p: int, m: int) -> Tuple[PolyMatrix, PolyMatrix]:
    """Stacked [Z_0 ... Z_k] coefficients into polynomial matrices Xp (m x p) and Yp (m x m)."""
    blocks = coeffs.reshape(m, -1, p + m).transpose(1, 0, 2)
    return PolyMatrix(blocks[:, :, :p]), PolyMatrix(blocks[:, :, p:])


def bezout_certificate(f: NormalizedFactorization, cfg: NumericConfig = DEFAULT_CONFIG) -> BezoutCertificate:
    """Stable X, Y with X N + Y D = I, from a polynomial certificate scaled by the spectral factor."""
    if f.side is not Side.RIGHT:
        raise DomainError("Bezout certificates are built for right factorizations")
    fraction, R = f.fraction, f.spectral_factor
    p, m = fraction.Np.shape

    if p == 1 and m == 1:
        x, y = poly_bezout(fraction.Np.entry(0, 0), fraction.Dp.entry(0, 0), cfg)
        Xp, Yp = PolyMatrix(x.coeffs[:, None, None]), PolyMatrix(y.coeffs[:, None, None])
    else:
        max_degree = m * max(fraction.stacked().degree, 0)
        best = np.inf
        for degree in range(max_degree + 1):
            coeffs, _, residual = polynomial_bezout_family(fraction, degree)
            best = min(best, residual)
            if residual <= cfg.tol_bezout:
                break
        else:
            raise CertificateNotFound(best, max_degree)
        Xp, Yp = split_bezout(coeffs, p, m)

    # X N + Y D = R (Xp Np + Yp Dp) R^-1
    X, Y = RationalMatrix(R @ Xp), RationalMatrix(R @ Yp)
    points = _grid(cfg).points
    identity_gap = X(points) @ f.N(points) + Y(points) @ f.D(points) - np.eye(m)
    residual = float(np.max(sigma_max(identity_gap)))
    if residual > cfg.tol_bezout_mat:
        raise CertificateNotFound(residual, max(Xp.degree, Yp.degree))
    f.bezout_residual = residual
    return BezoutCertificate(X, Y, residual)
