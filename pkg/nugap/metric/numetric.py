"""
The nu-metric between plants of equal size.

d(P1, P2) = ||Gt2 G1||_inf when det(G1* G2) is invertible on the circle with
winding number zero, and 1 otherwise.
"""

# built-in imports
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

# numerical imports
import numpy as np

from nugap.algebra.tfm import TransferMatrix, poles, tm_eval
from nugap.circle.sampling import WindingReport, linf_norm, sigma_max, winding_number
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import DomainError, InternalInconsistency, NotInvertible
from nugap.factor.coprime import ControllerSymbols, GraphSymbols, controller_symbols, graph_symbols

logger = logging.getLogger(__name__)


@dataclass
class WindingCondition:
    invertible: bool
    winding: Optional[int]
    min_modulus: float
    report: Optional[WindingReport] = None

    @property
    def holds(self) -> bool:
        return self.invertible and self.winding == 0


@dataclass
class NuMetricOutcome:
    """d_nu value with the evidence for the branch taken."""

    value: float
    condition_met: bool
    winding: Optional[int]
    min_modulus: float
    theta_star: Optional[float]
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "condition_met": self.condition_met,
            "winding": self.winding,
            "min_modulus": self.min_modulus,
            "theta_star": self.theta_star,
            "diagnostics": self.diagnostics,
        }


class FactorizationCache:
    """Opt-in cache of graph and controller symbols keyed by plant content and config.

    Safe to share between threads.
    """

    def __init__(self):
        self._graphs: Dict[Tuple[str, NumericConfig], GraphSymbols] = {}
        self._controllers: Dict[Tuple[str, NumericConfig], ControllerSymbols] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def graph(self, P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> GraphSymbols:
        return self._lookup(self._graphs, graph_symbols, P, cfg)

    def controller(self, C: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> ControllerSymbols:
        return self._lookup(self._controllers, controller_symbols, C, cfg)

    def _lookup(self, table, build, P, cfg):
        key = (P.content_key(), cfg)
        with self._lock:
            if key in table:
                self.hits += 1
                return table[key]
        symbols = build(P, cfg)
        with self._lock:
            self.misses += 1
            table.setdefault(key, symbols)
        return symbols

    def __len__(self) -> int:
        return len(self._graphs) + len(self._controllers)


def symbols_for(P: TransferMatrix, cfg: NumericConfig, cache: Optional[FactorizationCache]) -> GraphSymbols:
    return cache.graph(P, cfg) if cache is not None else graph_symbols(P, cfg)


def _check_same_shape(P1: TransferMatrix, P2: TransferMatrix) -> None:
    if P1.shape != P2.shape:
        raise DomainError(f"plants must have equal dimensions, got {P1.shape} and {P2.shape}")


def _condition_from(f, cfg: NumericConfig) -> WindingCondition:
    try:
        report = winding_number(f, cfg)
    except NotInvertible as e:
        return WindingCondition(False, None, e.min_modulus)
    return WindingCondition(True, report.winding, report.min_modulus, report)


def det_gram_sampler(G1: GraphSymbols, G2: GraphSymbols):
    """zeta -> det(G1(zeta)* G2(zeta))."""

    def f(z: np.ndarray) -> np.ndarray:
        g1, g2 = G1.G(z), G2.G(z)
        return np.linalg.det(np.conj(np.swapaxes(g1, -1, -2)) @ g2)

    return f


def gap_sampler(G1: GraphSymbols, G2: GraphSymbols):
    """zeta -> Gt2(zeta) G1(zeta)."""
    return lambda z: G2.Gt(z) @ G1.G(z)


def winding_condition(G1: GraphSymbols, G2: GraphSymbols, cfg: NumericConfig = DEFAULT_CONFIG) -> WindingCondition:
    """Invertibility and winding number of det(G1* G2) on the circle.

    A symbol dipping below the modulus floor is a result state here, not an
    error.
    """
    if G1.plant_shape != G2.plant_shape:
        raise DomainError(f"graph symbols of {G1.plant_shape} and {G2.plant_shape} plants")
    return _condition_from(det_gram_sampler(G1, G2), cfg)


def winding_condition_classical(
    P1: TransferMatrix, P2: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG
) -> WindingCondition:
    """The same condition from plant values and pole counts.

    det(G1* G2) = conj(det D1) det(I + P1* P2) det D2 on the circle, so its
    winding is wno det(I + P1* P2) + eta(P2) - eta(P1) with eta the number
    of poles inside the disk.
    """
    _check_same_shape(P1, P2)

    def f(z: np.ndarray) -> np.ndarray:
        a, b = P1.evaluate(z), P2.evaluate(z)
        return np.linalg.det(np.eye(P1.m) + np.conj(np.swapaxes(a, -1, -2)) @ b)

    condition = _condition_from(f, cfg)
    if condition.winding is not None:
        eta1 = int(np.sum(np.abs(poles(P1, cfg)) < 1))
        eta2 = int(np.sum(np.abs(poles(P2, cfg)) < 1))
        condition.winding += eta2 - eta1
    return condition


def nu_metric(
    P1: TransferMatrix,
    P2: TransferMatrix,
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
) -> NuMetricOutcome:
    """d_nu(P1, P2) from freshly computed (or cached) normalized factorizations."""
    _check_same_shape(P1, P2)
    G1, G2 = symbols_for(P1, cfg, cache), symbols_for(P2, cfg, cache)
    condition = winding_condition(G1, G2, cfg)
    diagnostics: Dict[str, Any] = {
        "grid_size": cfg.grid_size,
        "winding_samples": condition.report.samples_used if condition.report else None,
        "normalization_residuals": [G1.right.residual_norm, G2.right.residual_norm],
        "annihilation": [G1.annihilation, G2.annihilation],
    }

    if not condition.holds:
        logger.info(f"Winding condition fails (winding={condition.winding}, min modulus {condition.min_modulus:.3e})")
        return NuMetricOutcome(1.0, False, condition.winding, condition.min_modulus, None, diagnostics)

    estimate = linf_norm(gap_sampler(G1, G2), cfg)
    diagnostics["norm_samples"] = estimate.samples
    if estimate.value > 1 + cfg.tol_consistency:
        raise InternalInconsistency(
            f"||Gt2 G1||_inf = {estimate.value:.9f} exceeds 1 under a satisfied winding condition",
            value=estimate.value,
        )
    return NuMetricOutcome(estimate.value, True, condition.winding, condition.min_modulus, estimate.theta_star, diagnostics)


def chordal_distance(a: complex, b: complex) -> float:
    """Distance of two points on the Riemann sphere, |a - b| / sqrt((1 + |a|^2)(1 + |b|^2))."""
    return float(abs(a - b) / np.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2)))


def pointwise_gap(
    P1: TransferMatrix,
    P2: TransferMatrix,
    theta: float,
    cfg: NumericConfig = DEFAULT_CONFIG,
    use_graph: bool = False,
    cache: Optional[FactorizationCache] = None,
) -> float:
    """Gap between the plants at one frequency.

    SISO plants use the chordal formula on plant values; MIMO plants (or
    use_graph=True) use sigma_max(Gt2 G1) from the factorizations.
    """
    _check_same_shape(P1, P2)
    z = np.exp(1j * theta)
    if P1.is_siso and not use_graph:
        return chordal_distance(tm_eval(P1, z, cfg)[0, 0], tm_eval(P2, z, cfg)[0, 0])
    tm_eval(P1, z, cfg), tm_eval(P2, z, cfg)
    G1, G2 = symbols_for(P1, cfg, cache), symbols_for(P2, cfg, cache)
    return float(sigma_max(gap_sampler(G1, G2)(np.array([z])))[0])


def distance_matrix(
    plants: Sequence[TransferMatrix],
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
    workers: int = 1,
) -> np.ndarray:
    """Pairwise d_nu over a plant family; entries may be computed concurrently."""
    cache = cache if cache is not None else FactorizationCache()
    pairs: List[Tuple[int, int]] = [(i, j) for i in range(len(plants)) for j in range(i + 1, len(plants))]

    def entry(pair: Tuple[int, int]) -> float:
        return nu_metric(plants[pair[0]], plants[pair[1]], cfg, cache).value

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(entry, pairs))
    else:
        values = [entry(pair) for pair in pairs]

    out = np.zeros((len(plants), len(plants)))
    for (i, j), value in zip(pairs, values):
        out[i, j] = out[j, i] = value
    return out
