"""
Seeded property campaign run by `nugap report`.

Each suite draws its items from independent generator streams, checks one
family of properties and reports the worst violation it saw.
"""

# built-in imports
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

# numerical imports
import numpy as np

from nugap.algebra.polyalg import RationalFn, poly_roots
from nugap.algebra.tfm import TransferMatrix
from nugap.circle.sampling import CircleGrid, fourier_coeffs, linf_norm, poisson_winding, sigma_max, winding_number
from nugap.circle.toeplitz import index_estimate
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import NotInvertible, NugapError
from nugap.gen.plants import GenConfig, campaign_stream, perturb_plant, random_plant, random_stabilizing_controller
from nugap.metric.numetric import FactorizationCache, nu_metric
from nugap.metric.robust import (
    closed_loop_direct,
    closed_loop_sampler,
    robustness_check,
    stability_margin,
    stabilizes,
    stabilizes_by_roots,
)

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-7
SYMMETRY_TOL = 1e-7
TRIANGLE_TOL = 1e-6
SLACK_TOL = 1e-6
NORMALIZATION_TOL = 1e-7
ORACLE_TOL = 1e-6
TWO_ROUTE_TOL = 1e-7
CLOSED_FORM_TOL = 1e-9
MARGIN_TOL = 1e-12
POISSON_RADIUS = 0.99
POISSON_TERMS = 512
EPSILONS = (1e-3, 1e-2, 1e-1)


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    worst: float = 0.0
    tolerance: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, violation: float, note: str = "", tolerance: Optional[float] = None) -> None:
        """Count one case whose violation must stay at or below the tolerance."""
        self.cases += 1
        self.worst = max(self.worst, violation)
        if violation > (self.tolerance if tolerance is None else tolerance):
            self.failures += 1
            if note:
                self.notes.append(note)

    def error(self, exc: NugapError, note: str) -> None:
        self.cases += 1
        self.failures += 1
        self.notes.append(f"{note}: {type(exc).__name__}: {exc.message}")
        logger.warning(f"Suite {self.name}: {note} raised {type(exc).__name__}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "failures": self.failures,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "notes": self.notes[:10],
        }


@dataclass(frozen=True)
class CampaignSize:
    """Item counts of every suite, derived from the number of triples."""

    triples: int = 200

    @property
    def siso_plants(self) -> int:
        return min(100, max(4, self.triples // 2))

    @property
    def mimo_plants(self) -> int:
        return min(30, max(2, self.triples // 7))

    @property
    def pairs(self) -> int:
        return min(200, max(4, self.triples))

    @property
    def symbols(self) -> int:
        return min(100, max(4, self.triples // 2))


def _derived_seed(seed: int, *index: int) -> int:
    return int(campaign_stream(seed, *index).integers(0, 2**62))


def _siso_plants(seed: int, count: int, cfg: NumericConfig) -> List[TransferMatrix]:
    return [random_plant(GenConfig(seed=seed), cfg, stream=(1, k)) for k in range(count)]


def _mimo_family(seed: int) -> GenConfig:
    return GenConfig(seed=seed, p=2, m=2, max_degree=1)


def _mimo_plants(seed: int, count: int, cfg: NumericConfig) -> List[TransferMatrix]:
    return [random_plant(_mimo_family(seed), cfg, stream=(2, k)) for k in range(count)]


def metric_axioms(seed: int, size: CampaignSize, cfg: NumericConfig, cache: FactorizationCache) -> List[SuiteResult]:
    identity = SuiteResult("identity", tolerance=IDENTITY_TOL)
    symmetry = SuiteResult("symmetry", tolerance=SYMMETRY_TOL)
    triangle = SuiteResult("triangle", tolerance=TRIANGLE_TOL)

    plants = _siso_plants(seed, size.siso_plants, cfg) + _mimo_plants(seed, size.mimo_plants, cfg)
    for k, P in enumerate(plants):
        try:
            identity.record(nu_metric(P, P, cfg, cache).value, f"plant {k}")
        except NugapError as e:
            identity.error(e, f"plant {k}")

    for k in range(len(plants) - 1):
        P1, P2 = plants[k], plants[k + 1]
        if P1.shape != P2.shape:
            continue
        try:
            d12, d21 = nu_metric(P1, P2, cfg, cache).value, nu_metric(P2, P1, cfg, cache).value
            symmetry.record(abs(d12 - d21), f"pair {k}")
        except NugapError as e:
            symmetry.error(e, f"pair {k}")

    siso, mimo = plants[: size.siso_plants], plants[size.siso_plants :]
    for k in range(size.triples):
        rng = campaign_stream(seed, 3, k)
        family = mimo if k % 4 >= 2 else siso
        try:
            if k % 2 and len(family) >= 3:
                i, j, l = rng.choice(len(family), size=3, replace=False)
                P1, P2, P3 = family[i], family[j], family[l]
            else:
                P1 = family[int(rng.integers(len(family)))]
                P2 = perturb_plant(P1, float(rng.choice(EPSILONS)), _derived_seed(seed, 3, k, 1), cfg=cfg)
                P3 = perturb_plant(P1, float(rng.choice(EPSILONS)), _derived_seed(seed, 3, k, 2), cfg=cfg)
            d13 = nu_metric(P1, P3, cfg, cache).value
            d12 = nu_metric(P1, P2, cfg, cache).value
            d23 = nu_metric(P2, P3, cfg, cache).value
            triangle.record(max(0.0, d13 - d12 - d23), f"triple {k}")
        except NugapError as e:
            triangle.error(e, f"triple {k}")
    return [identity, symmetry, triangle]


def robustness_inequality(seed: int, size: CampaignSize, cfg: NumericConfig, cache: FactorizationCache) -> SuiteResult:
    suite = SuiteResult("robustness", tolerance=SLACK_TOL)
    for k in range(size.triples):
        try:
            gen = _mimo_family(seed) if k % 4 == 3 else GenConfig(seed=seed)
            P0 = random_plant(gen, cfg, stream=(4, k))
            C = random_stabilizing_controller(P0, _derived_seed(seed, 4, k, 1), cfg)
            P = perturb_plant(P0, EPSILONS[k % len(EPSILONS)], _derived_seed(seed, 4, k, 2), cfg=cfg)
            report = robustness_check(P0, P, C, cfg, cache)
            suite.record(max(0.0, -report.slack), f"triple {k}: slack {report.slack:.3e}")
        except NugapError as e:
            suite.error(e, f"triple {k}")
    return suite


def normalization(seed: int, size: CampaignSize, cfg: NumericConfig, cache: FactorizationCache) -> SuiteResult:
    suite = SuiteResult("normalization", tolerance=NORMALIZATION_TOL)
    plants = _siso_plants(seed, size.siso_plants, cfg) + _mimo_plants(seed, size.mimo_plants, cfg)
    for k, P in enumerate(plants):
        try:
            symbols = cache.graph(P, cfg)
            worst = max(symbols.right.residual_norm, symbols.left.residual_norm, symbols.annihilation)
            suite.record(worst, f"plant {k}")
        except NugapError as e:
            suite.error(e, f"plant {k}")
    return suite


def closed_form(cfg: NumericConfig) -> SuiteResult:
    suite = SuiteResult("closed_form", tolerance=CLOSED_FORM_TOL)
    one, two = TransferMatrix.siso([1.0], cfg=cfg), TransferMatrix.siso([2.0], cfg=cfg)
    delay = TransferMatrix.siso([1.0], [0.0, 1.0], cfg)
    zero = TransferMatrix.zeros(1, 1, cfg)
    try:
        suite.record(abs(nu_metric(one, two, cfg).value - 1 / np.sqrt(10)), "d(1, 2)")
        outcome = nu_metric(delay, zero, cfg)
        suite.record(0.0 if outcome.value == 1.0 and outcome.winding == -1 else 1.0, "d(1/z, 0)")
        margin = stability_margin(zero, zero, cfg).margin
        suite.record(abs(margin - 1.0), "mu(0, 0)", tolerance=MARGIN_TOL)
    except NugapError as e:
        suite.error(e, "closed-form case")
    return suite


def gap_oracle(seed: int, size: CampaignSize, cfg: NumericConfig, cache: FactorizationCache) -> SuiteResult:
    """When the winding condition holds, d_nu equals the sup of the chordal distance."""
    suite = SuiteResult("gap_oracle", tolerance=ORACLE_TOL)
    for k in range(size.symbols):
        try:
            P1 = random_plant(GenConfig(seed=seed), cfg, stream=(5, k))
            P2 = perturb_plant(P1, EPSILONS[k % len(EPSILONS)] * 3, _derived_seed(seed, 5, k), cfg=cfg)
            outcome = nu_metric(P1, P2, cfg, cache)
            if not outcome.condition_met:
                continue

            def chordal(z: np.ndarray) -> np.ndarray:
                a, b = P1.evaluate(z)[:, 0, 0], P2.evaluate(z)[:, 0, 0]
                return np.abs(a - b) / np.sqrt((1 + np.abs(a) ** 2) * (1 + np.abs(b) ** 2))

            suite.record(abs(outcome.value - linf_norm(chordal, cfg).value), f"pair {k}")
        except NugapError as e:
            suite.error(e, f"pair {k}")
    return suite


def _symbol(seed: int, stream: int, k: int, cfg: NumericConfig, stable_fraction: float = 0.5) -> RationalFn:
    return random_plant(GenConfig(seed=seed, max_degree=3, stable_fraction=stable_fraction), cfg, stream=(stream, k)).entry(0, 0)


def _index(f: Callable[[np.ndarray], np.ndarray], cfg: NumericConfig) -> int:
    return -winding_number(f, cfg).winding


def index_additivity(seed: int, size: CampaignSize, cfg: NumericConfig) -> SuiteResult:
    """Index of products adds, conjugation negates, small perturbations keep it."""
    suite = SuiteResult("index_additivity", tolerance=0.0)
    for k in range(size.symbols):
        try:
            f, g = _symbol(seed, 6, 2 * k, cfg), _symbol(seed, 6, 2 * k + 1, cfg)
            if f.is_zero or g.is_zero:
                continue
            estimate = index_estimate(f, cfg)
            i_f, i_g = estimate.index, _index(g, cfg)
            suite.record(abs(_index(lambda z: f(z) * g(z), cfg) - i_f - i_g), f"product {k}")
            suite.record(abs(_index(lambda z: np.conj(f(z)), cfg) + i_f), f"conjugate {k}")
            delta = 0.5 * estimate.min_modulus
            suite.record(abs(_index(lambda z: f(z) + delta * z ** (k % 5), cfg) - i_f), f"perturbed {k}")
        except NugapError as e:
            suite.error(e, f"symbol {k}")
    return suite


def outer_invertibility(seed: int, size: CampaignSize, cfg: NumericConfig) -> SuiteResult:
    """A stable rational f is outer-invertible exactly when it has winding 0 above the modulus floor."""
    suite = SuiteResult("outer_invertibility", tolerance=0.0)
    for k in range(size.symbols):
        try:
            f = _symbol(seed, 7, k, cfg, stable_fraction=1.0)
            if f.is_zero:
                continue
            zeros = poly_roots(f.num, cfg) if f.num.degree > 0 else np.zeros(0)
            by_roots = bool(np.all(np.abs(zeros) > 1.0))
            try:
                report = winding_number(f, cfg)
                by_winding = report.winding == 0 and report.min_modulus >= cfg.tol_invertible
            except NotInvertible:
                by_winding = False
            suite.record(float(by_roots != by_winding), f"symbol {k}")
        except NugapError as e:
            suite.error(e, f"symbol {k}")
    return suite


def poisson_consistency(seed: int, size: CampaignSize, cfg: NumericConfig) -> SuiteResult:
    """Boundary winding equals the Poisson winding just inside the circle; det route on diag(z, 1/z)."""
    suite = SuiteResult("poisson_consistency", tolerance=0.0)
    for k in range(max(2, size.symbols // 2)):
        try:
            f = _symbol(seed, 8, k, cfg)
            if f.is_zero:
                continue
            boundary = winding_number(f, cfg).winding
            coeffs = fourier_coeffs(f, POISSON_TERMS, cfg)
            try:
                inner = poisson_winding(coeffs, POISSON_RADIUS, cfg).report.winding
            except NotInvertible:
                suite.notes.append(f"symbol {k}: harmonic extension vanishes in the annulus, skipped")
                continue
            suite.record(float(abs(boundary - inner)), f"symbol {k}")
        except NugapError as e:
            suite.error(e, f"symbol {k}")

    def diagonal(z: np.ndarray) -> np.ndarray:
        out = np.zeros(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0], out[..., 1, 1] = z, 1 / z
        return out

    try:
        blocks = winding_number(lambda z: z, cfg).winding + winding_number(lambda z: 1 / z, cfg).winding
        suite.record(float(abs(index_estimate(diagonal, cfg).index) + abs(blocks)), "diag(z, 1/z)")
    except NugapError as e:
        suite.error(e, "diag(z, 1/z)")
    return suite


def two_route_closed_loop(
    seed: int, size: CampaignSize, cfg: NumericConfig, cache: FactorizationCache
) -> List[SuiteResult]:
    """Factored and direct H(P, C) agree; winding and pole-location stabilization tests agree."""
    suite = SuiteResult("two_route_closed_loop", tolerance=TWO_ROUTE_TOL)
    routes = SuiteResult("stabilization_routes", tolerance=0.0)
    points = CircleGrid(64).points
    for k in range(size.pairs):
        try:
            P = random_plant(GenConfig(seed=seed), cfg, stream=(9, k))
            if k % 2:
                C = random_stabilizing_controller(P, _derived_seed(seed, 9, k), cfg)
            else:
                C = random_plant(GenConfig(seed=seed, max_degree=1), cfg, stream=(10, k))
            by_winding = stabilizes(P, C, cfg, cache)
            by_roots = stabilizes_by_roots(P, C, cfg, cache)
            if not (by_winding.boundary_marginal or by_roots.boundary_marginal):
                routes.record(float(by_winding.ok != by_roots.ok), f"pair {k}: stabilization routes disagree")
            if by_winding.ok:
                factored = closed_loop_sampler(cache.graph(P, cfg), cache.controller(C, cfg), cfg)(points)
                direct = closed_loop_direct(P, C, points)
                gap = float(np.max(sigma_max(factored - direct) / (1 + sigma_max(direct))))
                suite.record(gap, f"pair {k}: factored vs direct {gap:.3e}")
        except NugapError as e:
            suite.error(e, f"pair {k}")
    return [suite, routes]


def run_campaign(seed: int, triples: int, cfg: NumericConfig = DEFAULT_CONFIG) -> List[SuiteResult]:
    """Every property suite for one seed, in a fixed order."""
    size = CampaignSize(triples)
    cache = FactorizationCache()
    logger.info(f"Property campaign: seed {seed}, {triples} triples")
    suites = metric_axioms(seed, size, cfg, cache)
    suites.append(robustness_inequality(seed, size, cfg, cache))
    suites.append(normalization(seed, size, cfg, cache))
    suites.append(closed_form(cfg))
    suites.append(gap_oracle(seed, size, cfg, cache))
    suites.append(index_additivity(seed, size, cfg))
    suites.append(outer_invertibility(seed, size, cfg))
    suites.append(poisson_consistency(seed, size, cfg))
    suites.extend(two_route_closed_loop(seed, size, cfg, cache))
    for suite in suites:
        logger.info(f"Suite {suite.name}: {suite.cases} cases, {suite.failures} failure(s), worst {suite.worst:.3e}")
    return suites


def render_table(suites: List[SuiteResult]) -> str:
    header = f"{'suite':<24} {'cases':>6} {'fail':>5} {'worst':>11} {'tol':>9}  status"
    lines = [header, "-" * len(header)]
    for s in suites:
        status = "PASS" if s.passed else "FAIL"
        lines.append(f"{s.name:<24} {s.cases:>6} {s.failures:>5} {s.worst:>11.3e} {s.tolerance:>9.1e}  {status}")
    return "\n".join(lines)
