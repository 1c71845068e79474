"""
Unit-circle numerics: sampling grids, winding numbers, L-infinity norms,
Fourier coefficients and the harmonic (Poisson) extension into the disk.

A symbol sampler is any callable mapping an array of points z (shape (n,))
to values of shape (n,) for scalar symbols or (n, rows, cols) for matrix
symbols. Samplers must be re-entrant; every reduction here runs in a fixed
order so results are reproducible for a given config.
"""

# built-in imports
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

# numerical imports
import numpy as np
from scipy.optimize import minimize_scalar

from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import BudgetExhausted, DomainError, NotInvertible

logger = logging.getLogger(__name__)

Sampler = Callable[[np.ndarray], np.ndarray]

MAX_PHASE_STEP = np.pi / 2
POISSON_RADII = 6


@dataclass(frozen=True)
class CircleGrid:
    """Equispaced angles 2*pi*k/size on the unit circle; size is a power of two >= 64."""

    size: int

    def __post_init__(self):
        if self.size < 64 or self.size & (self.size - 1):
            raise DomainError(f"circle grid size must be a power of two >= 64, got {self.size}")

    @property
    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.thetas)


@dataclass
class WindingReport:
    """Integer winding number of a circle symbol plus the evidence behind it.

    Attributes:
        winding: signed number of turns around the origin
        min_modulus: smallest sampled modulus
        samples_used: number of circle samples in the final grid
        max_phase_step: largest phase increment between neighbouring samples
        theta_min: angle where the smallest modulus was seen
    """

    winding: int
    min_modulus: float
    samples_used: int
    max_phase_step: float
    theta_min: float = 0.0

    def is_valid(self, cfg: NumericConfig = DEFAULT_CONFIG) -> bool:
        return self.min_modulus >= cfg.tol_invertible and self.max_phase_step <= MAX_PHASE_STEP

    def to_dict(self) -> dict:
        return {
            "winding": self.winding,
            "min_modulus": self.min_modulus,
            "samples_used": self.samples_used,
            "max_phase_step": self.max_phase_step,
            "theta_min": self.theta_min,
        }


@dataclass
class NormEstimate:
    """Refined sup over the circle of the largest singular value."""

    value: float
    theta_star: float
    samples: int


@dataclass
class PoissonReport:
    """Winding of the harmonic extension at an inner radius and the annulus modulus floor."""

    radius: float
    report: WindingReport
    annulus_min_modulus: float
    radii: List[float]

    @property
    def index_estimate(self) -> int:
        return -self.report.winding


def sigma_max(values: np.ndarray) -> np.ndarray:
    """Largest singular value per sample; scalar samples give their modulus."""
    values = np.asarray(values)
    if values.ndim == 1:
        return np.abs(values)
    return np.linalg.norm(values, ord=2, axis=(-2, -1))


def winding_number(f: Sampler, cfg: NumericConfig = DEFAULT_CONFIG, size: Optional[int] = None) -> WindingReport:
    """Winding number by phase unwrapping, refining until every step is below pi/2.

    Intervals whose phase step exceeds the cap are bisected locally; the
    total sample count is limited by `winding_budget`.
    """
    thetas = 2 * np.pi * np.arange(size or cfg.grid_size) / (size or cfg.grid_size)
    values = np.asarray(f(np.exp(1j * thetas)), dtype=complex)

    while True:
        moduli = np.abs(values)
        k = int(np.argmin(moduli))
        if moduli[k] < cfg.tol_invertible:
            raise NotInvertible(float(moduli[k]), float(thetas[k]), len(thetas))

        steps = np.angle(np.roll(values, -1) / values)
        bad = np.abs(steps) > MAX_PHASE_STEP
        if not bad.any():
            break
        if len(thetas) + int(bad.sum()) > cfg.winding_budget:
            raise BudgetExhausted(len(thetas), float(np.max(np.abs(steps))))

        following = np.roll(thetas, -1)
        following[-1] += 2 * np.pi
        mids = (thetas[bad] + following[bad]) / 2
        mid_values = np.asarray(f(np.exp(1j * mids)), dtype=complex)
        order = np.argsort(np.concatenate([thetas, mids]), kind="stable")
        thetas = np.concatenate([thetas, mids])[order]
        values = np.concatenate([values, mid_values])[order]
        logger.debug(f"Winding refinement: bisected {int(bad.sum())} interval(s), {len(thetas)} samples")

    turns = float(np.sum(steps)) / (2 * np.pi)
    return WindingReport(
        winding=int(round(turns)),
        min_modulus=float(moduli[k]),
        samples_used=len(thetas),
        max_phase_step=float(np.max(np.abs(steps))),
        theta_min=float(thetas[k]),
    )


def linf_norm(M: Sampler, cfg: NumericConfig = DEFAULT_CONFIG, size: Optional[int] = None) -> NormEstimate:
    """Sup over the circle of sigma_max(M), refined around the largest grid peaks.

    The returned value is attained at theta_star, so it is a lower bound of
    the true sup and the reported estimate of it.
    """
    n = size or cfg.grid_size
    thetas = 2 * np.pi * np.arange(n) / n
    sig = sigma_max(M(np.exp(1j * thetas)))

    is_peak = (sig >= np.roll(sig, 1)) & (sig >= np.roll(sig, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(-sig[peaks], kind="stable")][: cfg.norm_peaks]

    best_index = int(np.argmax(sig))
    best, theta_star = float(sig[best_index]), float(thetas[best_index])
    step = 2 * np.pi / n

    def objective(theta: float) -> float:
        return -float(sigma_max(M(np.exp(1j * np.array([theta]))))[0])

    evaluations = n
    for k in peaks:
        result = minimize_scalar(
            objective,
            bounds=(thetas[k] - step, thetas[k] + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        evaluations += int(result.nfev)
        if -result.fun > best * (1 + cfg.tol_norm_rel):
            best, theta_star = -float(result.fun), float(result.x % (2 * np.pi))
    return NormEstimate(value=best, theta_star=theta_star, samples=evaluations)


def fourier_coeffs(f: Sampler, n: int, cfg: NumericConfig = DEFAULT_CONFIG, grid_size: Optional[int] = None) -> np.ndarray:
    """Coefficients c_{-n}..c_{n} (centered array, index k + n) from an oversampled FFT."""
    size = grid_size or cfg.grid_size
    while size < 4 * max(n, 1):
        size *= 2
    samples = 2 * size
    points = np.exp(2j * np.pi * np.arange(samples) / samples)
    c = np.fft.fft(np.asarray(f(points), dtype=complex)) / samples
    return np.concatenate([c[samples - n :], c[: n + 1]]) if n else c[:1]


def laurent_eval(coeffs: np.ndarray, z) -> np.ndarray:
    """Evaluate sum_k c_k z**k for a centered coefficient array."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = (len(coeffs) - 1) // 2
    z = np.asarray(z, dtype=complex)
    powers = np.arange(-n, n + 1)
    return np.sum(coeffs * z[..., None] ** powers, axis=-1)


def poisson_winding(coeffs: np.ndarray, r: float, cfg: NumericConfig = DEFAULT_CONFIG) -> PoissonReport:
    """Winding of the harmonic extension F(r e^{it}) and min |F| on circles approaching the boundary.

    When the floor holds on the sampled annulus, minus the winding is the
    index estimate of the Toeplitz operator with this symbol.
    """
    if not 0 < r < 1:
        raise DomainError(f"Poisson radius must lie in (0, 1), got {r}")
    coeffs = np.asarray(coeffs, dtype=complex)
    n = (len(coeffs) - 1) // 2
    damping = np.abs(np.arange(-n, n + 1))

    tail = float(abs(coeffs[0]) + abs(coeffs[-1]))
    if n and tail > cfg.tol_poisson:
        logger.warning(f"Fourier tail {tail:.2e} above Poisson truncation tolerance; add coefficients")

    def extension(radius: float) -> Sampler:
        damped = coeffs * radius ** damping
        return lambda z: laurent_eval(damped, z)

    report = winding_number(extension(r), cfg)
    radii = [1 - (1 - r) / 2**j for j in range(POISSON_RADII)]
    grid = CircleGrid(cfg.grid_size)
    floor = np.inf
    for radius in radii:
        moduli = np.abs(extension(radius)(grid.points))
        k = int(np.argmin(moduli))
        if moduli[k] < cfg.tol_invertible:
            raise NotInvertible(float(moduli[k]), float(grid.thetas[k]), grid.size)
        floor = min(floor, float(moduli[k]))
    return PoissonReport(radius=r, report=report, annulus_min_modulus=floor, radii=radii)
