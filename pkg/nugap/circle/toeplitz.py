"""
Toeplitz operator diagnostics: finite sections, the determinant-route index
and semicommutator norms.

Finite sections never estimate the index; their smallest singular values are
recorded only as plausibility witnesses next to the winding-number index.
"""

# built-in imports
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

# numerical imports
import numpy as np
import scipy.linalg

from nugap.circle.sampling import Sampler, fourier_coeffs, winding_number
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import DomainError

logger = logging.getLogger(__name__)

SECTION_SIZES = (16, 32, 64, 128, 256)


@dataclass
class ToeplitzSection:
    """n x n section with (j, k) entry c_{j-k} of a symbol's centered coefficients."""

    coeffs: np.ndarray
    n: int
    matrix: np.ndarray = field(repr=False)

    @property
    def is_hermitian(self) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=1e-14))


@dataclass
class IndexEstimate:
    index: int
    route: str
    sigma_min_trace: List[Tuple[int, float]]
    min_modulus: float


def _coefficient(coeffs: np.ndarray, k: np.ndarray) -> np.ndarray:
    q = (len(coeffs) - 1) // 2
    inside = np.abs(k) <= q
    out = np.zeros(k.shape, dtype=complex)
    out[inside] = coeffs[k[inside] + q]
    return out


def toeplitz_section(coeffs: Sequence[complex], n: int) -> ToeplitzSection:
    if n < 1:
        raise DomainError(f"section size must be positive, got {n}")
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) % 2 == 0:
        raise DomainError("centered coefficient arrays have odd length")
    column = _coefficient(coeffs, np.arange(n))
    row = _coefficient(coeffs, -np.arange(n))
    return ToeplitzSection(coeffs, n, scipy.linalg.toeplitz(column, row))


def _determinant_sampler(f: Sampler) -> Sampler:
    def det_symbol(z: np.ndarray) -> np.ndarray:
        values = np.asarray(f(z))
        return values if values.ndim == 1 else np.linalg.det(values)

    return det_symbol


def index_estimate(
    f: Sampler,
    cfg: NumericConfig = DEFAULT_CONFIG,
    section_sizes: Sequence[int] = SECTION_SIZES,
) -> IndexEstimate:
    """Fredholm index of T_f as minus the winding number of det f.

    Matrix symbols go through their determinant only. The trace records
    sigma_min of finite sections of the determinant symbol.
    """
    det_symbol = _determinant_sampler(f)
    report = winding_number(det_symbol, cfg)
    coeffs = fourier_coeffs(det_symbol, max(section_sizes), cfg)

    trace = []
    for n in section_sizes:
        section = toeplitz_section(coeffs, n)
        trace.append((n, float(scipy.linalg.svdvals(section.matrix)[-1])))
    logger.debug(f"Index estimate {-report.winding}; sigma_min trace {trace}")
    return IndexEstimate(-report.winding, "det-winding", trace, report.min_modulus)


def semicommutator_norm(f_coeffs: Sequence[complex], g_coeffs: Sequence[complex], n: int) -> float:
    """Spectral norm of T_n(fg) - T_n(f) T_n(g) for band-limited symbols."""
    f_coeffs = np.asarray(f_coeffs, dtype=complex)
    g_coeffs = np.asarray(g_coeffs, dtype=complex)
    product = np.convolve(f_coeffs, g_coeffs)
    difference = (
        toeplitz_section(product, n).matrix
        - toeplitz_section(f_coeffs, n).matrix @ toeplitz_section(g_coeffs, n).matrix
    )
    return float(np.linalg.norm(difference, ord=2))
