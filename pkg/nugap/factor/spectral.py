"""
Spectral factorization of positive trigonometric (matrix) polynomials.

Given Phi(zeta) = sum_k Phi_k zeta**k, Hermitian and positive definite on the
circle, find a polynomial (matrix) R with R(zeta)* R(zeta) = Phi(zeta) and
det R free of zeros in the closed unit disk.
"""

# built-in imports
import logging
from dataclasses import dataclass

# numerical imports
import numpy as np
import scipy.linalg

from nugap.algebra.polyalg import Polynomial, poly_roots
from nugap.algebra.polymatrix import PolyMatrix
from nugap.circle.sampling import CircleGrid, laurent_eval, winding_number
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import FactorizationError, NoConvergence, NotPositive

logger = logging.getLogger(__name__)

# Relative size below which the outermost Laurent coefficients count as zero
TRAILING_NOISE = 1e-14


@dataclass
class MatrixSpectralFactor:
    factor: PolyMatrix
    residual: float
    blocks: int


def trigonometric_gram(F: PolyMatrix) -> np.ndarray:
    """Coefficients Phi_{-q..q} of F(zeta)* F(zeta) on the circle, shape (2q+1, m, m)."""
    q = max(F.degree, 0)
    C = F.coeffs
    m = F.shape[1]
    phi = np.zeros((2 * q + 1, m, m), dtype=complex)
    for j in range(C.shape[0]):
        for l in range(C.shape[0]):
            phi[l - j + q] += C[j].conj().T @ C[l]
    return phi


def _trim_laurent(coeffs: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(coeffs))
    while len(coeffs) > 1 and np.max(np.abs(coeffs[[0, -1]])) <= TRAILING_NOISE * scale:
        coeffs = coeffs[1:-1]
    return coeffs


def _matrix_symbol_values(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    q = (coeffs.shape[0] - 1) // 2
    powers = z[:, None] ** np.arange(-q, q + 1)
    return np.einsum("nk,krc->nrc", powers, coeffs)


def spectral_factor_scalar(coeffs: np.ndarray, cfg: NumericConfig = DEFAULT_CONFIG) -> Polynomial:
    """Outer polynomial r with |r(zeta)|**2 = phi(zeta) by pairing the roots of z**q phi(z).

    The roots come in pairs (a, 1/conj(a)); the factor is built from the ones
    outside the disk and scaled to be positive at zeta = 1.
    """
    coeffs = _trim_laurent(np.asarray(coeffs, dtype=complex))
    q = (len(coeffs) - 1) // 2

    grid = CircleGrid(cfg.phi_grid)
    values = laurent_eval(coeffs, grid.points).real
    k = int(np.argmin(values))
    if values[k] <= cfg.tol_invertible * np.max(np.abs(values)):
        raise NotPositive(float(values[k]), float(grid.thetas[k]))

    if q == 0:
        return Polynomial.constant(np.sqrt(coeffs[0].real))

    roots = poly_roots(Polynomial(coeffs), cfg)
    outside = roots[np.abs(roots) > 1.0]
    if len(outside) != q:
        raise NotPositive(float(values[k]), float(grid.thetas[k]))

    monic = Polynomial.from_roots(outside)
    phi_at_one = float(np.sum(coeffs).real)
    factor = monic * (np.sqrt(phi_at_one) / monic(1.0))

    mismatch = np.max(np.abs(np.abs(factor(grid.points)) ** 2 - values)) / np.max(values)
    if mismatch > cfg.tol_specfac:
        logger.warning(f"Scalar spectral factor relative mismatch {mismatch:.2e} above tolerance")
    return factor


def _bauer_section(psi: np.ndarray, q: int, m: int, blocks: int) -> np.ndarray:
    """Cholesky-factor the banded block-Toeplitz section and read its last block row.

    Returns the coefficients A_0..A_q of the analytic factor A with
    A(zeta) A(zeta)* = Psi(zeta).
    """
    n = blocks * m
    bandwidth = (q + 1) * m - 1
    band = np.zeros((bandwidth + 1, n), dtype=complex)
    for k in range(q + 1):
        for r in range(m):
            for c in range(m):
                d = k * m + r - c
                if 0 <= d <= bandwidth:
                    band[d, np.arange(blocks - k) * m + c] = psi[k][r, c]
    lower = scipy.linalg.cholesky_banded(band, lower=True)

    a = np.zeros((q + 1, m, m), dtype=complex)
    for k in range(q + 1):
        for r in range(m):
            for c in range(m):
                d = k * m + r - c
                if 0 <= d <= bandwidth:
                    a[k, r, c] = lower[d, (blocks - 1 - k) * m + c]
    return a


def spectral_factor_matrix(coeffs: np.ndarray, cfg: NumericConfig = DEFAULT_CONFIG) -> MatrixSpectralFactor:
    """Polynomial matrix R with R* R = Phi on the circle and det R outer (Bauer's method).

    The section size doubles from bauer_min_blocks until the residual meets
    its target or bauer_max_blocks is reached.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs))
    while coeffs.shape[0] > 1 and np.max(np.abs(coeffs[[0, -1]])) <= TRAILING_NOISE * scale:
        coeffs = coeffs[1:-1]
    q = (coeffs.shape[0] - 1) // 2
    m = coeffs.shape[1]

    grid = CircleGrid(cfg.phi_grid)
    values = _matrix_symbol_values(coeffs, grid.points)
    eigs = np.linalg.eigvalsh(values)[:, 0]
    k = int(np.argmin(eigs))
    if eigs[k] <= cfg.tol_invertible * np.max(np.abs(eigs)):
        raise NotPositive(float(eigs[k]), float(grid.thetas[k]))

    if q == 0:
        r0 = scipy.linalg.cholesky(coeffs[0], lower=False)
        return MatrixSpectralFactor(PolyMatrix.constant(r0), 0.0, 0)

    # Phi^T = A A* with A = R^T, so Bauer runs on the transposed coefficients
    psi = np.transpose(coeffs[q:], (0, 2, 1))
    target = min(cfg.tol_specfac_mat, cfg.tol_normalization * float(eigs[k]))
    blocks = cfg.bauer_min_blocks
    while True:
        a = _bauer_section(psi, q, m, blocks)
        factor = PolyMatrix(np.transpose(a, (0, 2, 1)))
        rv = factor(grid.points)
        residual = float(np.max(np.linalg.norm(np.conj(np.swapaxes(rv, 1, 2)) @ rv - values, ord=2, axis=(1, 2))))
        logger.debug(f"Bauer section {blocks} blocks: residual {residual:.3e}")
        if residual <= target:
            break
        if blocks >= cfg.bauer_max_blocks:
            if residual <= cfg.tol_specfac_mat:
                logger.warning(f"Bauer residual {residual:.3e} met tol_specfac_mat but not the normalization target")
                break
            raise NoConvergence(residual, blocks)
        blocks *= 2

    det = factor.det().trimmed()
    det_roots = poly_roots(det, cfg) if det.degree > 0 else np.zeros(0)
    if np.any(np.abs(det_roots) <= 1.0) or winding_number(det, cfg).winding != 0:
        raise FactorizationError("matrix spectral factor is not outer")
    logger.info(f"Matrix spectral factor of degree {q} converged at {blocks} blocks (residual {residual:.2e})")
    return MatrixSpectralFactor(factor, residual, blocks)
