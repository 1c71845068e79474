"""
Seeded generation of plants, perturbations and stabilizing controllers.

Every object is a pure function of its seed. Campaign items draw from
independent Philox streams so a campaign can fan out in any order and still
reproduce item by item.
"""

# built-in imports
import logging
from dataclasses import dataclass
from typing import List, Sequence

# numerical imports
import numpy as np

from nugap.algebra.polyalg import Polynomial, RationalFn
from nugap.algebra.polymatrix import PolyMatrix
from nugap.algebra.tfm import TransferMatrix, build_rmfd
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import DomainError, NugapError
from nugap.factor.coprime import polynomial_bezout_family, split_bezout
from nugap.metric.robust import stabilizes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenConfig:
    """Random plant parameters.

    Attributes:
        seed: 64-bit seed of the generator stream
        p: number of outputs
        m: number of inputs
        max_degree: largest entry numerator/denominator degree
        pole_zero_circle_gap: every root keeps | |r| - 1 | >= this gap
        stable_fraction: probability that a pole lies outside the closed disk
        min_modulus: inner radius of the root annulus
        max_modulus: outer radius of the root annulus
        max_retries: resampling attempts before giving up
    """

    seed: int = 0
    p: int = 1
    m: int = 1
    max_degree: int = 2
    pole_zero_circle_gap: float = 0.05
    stable_fraction: float = 0.5
    min_modulus: float = 0.1
    max_modulus: float = 4.0
    max_retries: int = 50

    def __post_init__(self):
        if self.pole_zero_circle_gap < 10 * DEFAULT_CONFIG.dist_circle_min:
            raise DomainError(
                f"pole_zero_circle_gap {self.pole_zero_circle_gap} is below 10 * dist_circle_min"
            )
        if not 0.0 <= self.stable_fraction <= 1.0:
            raise DomainError(f"stable_fraction must lie in [0, 1], got {self.stable_fraction}")
        if min(self.p, self.m) < 1 or self.max_degree < 0:
            raise DomainError("dimensions must be positive and max_degree non-negative")
        if not 0 < self.min_modulus < 1 - self.pole_zero_circle_gap:
            raise DomainError(f"min_modulus {self.min_modulus} leaves no room inside the disk")
        if self.max_modulus <= 1 + self.pole_zero_circle_gap:
            raise DomainError(f"max_modulus {self.max_modulus} leaves no room outside the disk")


def campaign_stream(seed: int, *index: int) -> np.random.Generator:
    """Counter-based generator for one campaign item; streams for distinct indices are independent."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *index])))


def _modulus(rng: np.random.Generator, gen: GenConfig, outside: bool) -> float:
    if outside:
        low, high = 1 + gen.pole_zero_circle_gap, gen.max_modulus
    else:
        low, high = gen.min_modulus, 1 - gen.pole_zero_circle_gap
    return float(np.exp(rng.uniform(np.log(low), np.log(high))))


def random_real_roots(rng: np.random.Generator, degree: int, gen: GenConfig, outside_prob: float) -> List[complex]:
    """Roots of a real polynomial: conjugate pairs plus one real root for odd degrees."""
    roots: List[complex] = []
    while len(roots) + 2 <= degree:
        r = _modulus(rng, gen, rng.random() < outside_prob)
        angle = rng.uniform(0.0, np.pi)
        roots.extend([r * np.exp(1j * angle), r * np.exp(-1j * angle)])
    if len(roots) < degree:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        roots.append(sign * _modulus(rng, gen, rng.random() < outside_prob))
    return roots


def _real_poly(roots: Sequence[complex], gain: float) -> Polynomial:
    p = Polynomial.from_roots(roots, gain)
    return Polynomial(p.coeffs.real)


def _random_entry(rng: np.random.Generator, gen: GenConfig) -> RationalFn:
    den_degree = int(rng.integers(0, gen.max_degree + 1))
    num_degree = int(rng.integers(0, gen.max_degree + 1))
    gain = float(rng.uniform(0.5, 2.0)) * (1.0 if rng.random() < 0.5 else -1.0)
    den = _real_poly(random_real_roots(rng, den_degree, gen, gen.stable_fraction), 1.0)
    num = _real_poly(random_real_roots(rng, num_degree, gen, 0.5), gain)
    return RationalFn(num, den)


def _min_circle_gap(P: TransferMatrix) -> float:
    gaps = [np.min(np.abs(np.abs(r.poles) - 1.0)) for row in P.entries for r in row if len(r.poles)]
    return float(min(gaps)) if gaps else np.inf


def random_plant(gen: GenConfig, cfg: NumericConfig = DEFAULT_CONFIG, stream: Sequence[int] = ()) -> TransferMatrix:
    """Random p x m plant with real coefficients and roots clear of the circle band."""
    rng = campaign_stream(gen.seed, *stream)
    last_error = None
    for attempt in range(gen.max_retries):
        rows = [[_random_entry(rng, gen) for _ in range(gen.m)] for _ in range(gen.p)]
        try:
            plant = TransferMatrix.from_entries(rows, cfg, label=f"random-{gen.seed}")
            build_rmfd(plant, cfg)
        except NugapError as e:
            last_error = e
            logger.debug(f"Plant draw {attempt} rejected: {e.message}")
            continue
        if _min_circle_gap(plant) >= gen.pole_zero_circle_gap:
            return plant
    raise DomainError(f"no valid plant after {gen.max_retries} draws (last error: {last_error})")


def _perturb_poly(p: Polynomial, eps: float, rng: np.random.Generator) -> Polynomial:
    noise = rng.standard_normal(len(p.coeffs))
    if np.iscomplexobj(p.coeffs) and np.any(p.coeffs.imag != 0):
        noise = noise + 1j * rng.standard_normal(len(p.coeffs))
    return Polynomial(p.coeffs + eps * p.scale * noise)


def perturb_plant(
    P: TransferMatrix,
    eps: float,
    seed: int,
    gen: GenConfig = GenConfig(),
    cfg: NumericConfig = DEFAULT_CONFIG,
) -> TransferMatrix:
    """Relative coefficient perturbation of size eps; eps = 0 returns P itself.

    Draws whose poles come closer to the circle than half the required gap
    are resampled.
    """
    if eps < 0:
        raise DomainError(f"perturbation size must be non-negative, got {eps}")
    if eps == 0:
        return P
    required = 0.5 * min(gen.pole_zero_circle_gap, _min_circle_gap(P))
    rng = campaign_stream(seed, 1)
    for attempt in range(gen.max_retries):
        rows = [[RationalFn(_perturb_poly(r.num, eps, rng), _perturb_poly(r.den, eps, rng)) for r in row] for row in P.entries]
        try:
            perturbed = TransferMatrix.from_entries(rows, cfg, label=P.label)
        except NugapError as e:
            logger.debug(f"Perturbation {attempt} rejected: {e.message}")
            continue
        if _min_circle_gap(perturbed) >= required:
            return perturbed
    raise DomainError(f"no perturbation of size {eps} kept the circle gap after {gen.max_retries} draws")


def random_stabilizing_controller(
    P: TransferMatrix,
    seed: int,
    cfg: NumericConfig = DEFAULT_CONFIG,
    max_attempts: int = 20,
) -> TransferMatrix:
    """Controller C = -Yp^-1 Xp from a random member of the polynomial Bezout family.

    With Xp Np + Yp Dp = I the characteristic matrix is the identity, so
    every member that is a valid plant stabilizes P.
    """
    rng = campaign_stream(seed, 2)
    fraction = build_rmfd(P, cfg)
    p, m = P.shape
    real = all(np.all(np.isreal(r.num.coeffs)) and np.all(np.isreal(r.den.coeffs)) for row in P.entries for r in row)
    top_degree = m * max(fraction.stacked().degree, 0) + 1

    for degree in range(top_degree + 1):
        particular, nullspace, residual = polynomial_bezout_family(fraction, degree)
        if residual > cfg.tol_bezout:
            continue
        attempts = max_attempts if nullspace.shape[1] else 1
        for attempt in range(attempts):
            mix = rng.standard_normal((nullspace.shape[1], m)) * 0.5
            coeffs = particular.T + nullspace @ mix
            if real:
                coeffs = coeffs.real
            Xp, Yp = split_bezout(coeffs.T, p, m)
            det_y = Yp.det().trimmed()
            if det_y.is_zero:
                continue
            num = -(Yp.adjugate() @ Xp)
            try:
                controller = TransferMatrix.from_entries(
                    [[RationalFn(num.entry(i, j), det_y) for j in range(p)] for i in range(m)],
                    cfg,
                    label=f"controller-{seed}",
                )
                if stabilizes(P, controller, cfg).ok:
                    logger.debug(f"Stabilizing controller at Bezout degree {degree}, attempt {attempt}")
                    return controller
            except NugapError as e:
                logger.debug(f"Controller draw rejected: {e.message}")
    raise DomainError(f"no stabilizing controller found for {P!r}")
