"""
Closed-loop map, stabilization test and stability margin of a feedback pair.

The loop H(P, C) = [P; I](I - CP)^-1 [-C, I] is evaluated as G (Kt G)^-1 Kt
from the stable graph and controller symbols. C stabilizes P exactly when
det(Kt G) is invertible on the circle with winding number zero.
"""

# built-in imports
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

# numerical imports
import numpy as np

from nugap.algebra.polyalg import Polynomial, poly_roots
from nugap.algebra.polymatrix import interpolate_on_circle
from nugap.algebra.tfm import TransferMatrix
from nugap.circle.sampling import Sampler, linf_norm, winding_number
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import DomainError, NotInvertible, SingularAtPoint
from nugap.factor.coprime import ControllerSymbols, GraphSymbols
from nugap.metric.numetric import FactorizationCache, NuMetricOutcome, nu_metric

logger = logging.getLogger(__name__)


@dataclass
class StabilizationReport:
    """Outcome of the determinant-winding stabilization test.

    Attributes:
        ok: True when det(Kt G) is invertible on the circle with winding 0
        det_winding: winding number of det(Kt G), None when not invertible
        det_min_modulus: smallest sampled modulus of det(Kt G)
        boundary_marginal: det(Kt G) vanishes on (or numerically at) the circle
    """

    ok: bool
    det_winding: Optional[int]
    det_min_modulus: float
    boundary_marginal: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "det_winding": self.det_winding,
            "det_min_modulus": self.det_min_modulus,
            "boundary_marginal": self.boundary_marginal,
        }


@dataclass
class MarginReport:
    stabilizes: bool
    hinf_norm: Optional[float]
    margin: float
    det_winding: Optional[int]
    det_min_modulus: float
    theta_star: Optional[float] = None
    boundary_marginal: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stabilizes": self.stabilizes,
            "hinf_norm": self.hinf_norm,
            "margin": self.margin,
            "det_winding": self.det_winding,
            "det_min_modulus": self.det_min_modulus,
            "theta_star": self.theta_star,
            "boundary_marginal": self.boundary_marginal,
        }


@dataclass
class RobustnessReport:
    """mu(P, C) >= mu(P0, C) - d_nu(P0, P) with every quantity behind it."""

    slack: float
    lhs: float
    rhs: float
    nominal: MarginReport
    perturbed: MarginReport
    distance: NuMetricOutcome

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slack": self.slack,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "nominal": self.nominal.to_dict(),
            "perturbed": self.perturbed.to_dict(),
            "distance": self.distance.to_dict(),
        }


def _check_dual(P: TransferMatrix, C: TransferMatrix) -> None:
    if C.shape != (P.m, P.p):
        raise DomainError(f"controller must be {P.m} x {P.p} for a {P.p} x {P.m} plant, got {C.shape}")


def _loop_symbols(
    P: TransferMatrix, C: TransferMatrix, cfg: NumericConfig, cache: Optional[FactorizationCache]
) -> Tuple[GraphSymbols, ControllerSymbols]:
    _check_dual(P, C)
    cache = cache if cache is not None else FactorizationCache()
    return cache.graph(P, cfg), cache.controller(C, cfg)


def loop_determinant_sampler(Pf: GraphSymbols, Cf: ControllerSymbols) -> Sampler:
    """zeta -> det(Kt(zeta) G(zeta))."""
    return lambda z: np.linalg.det(Cf.Kt(z) @ Pf.G(z))


def closed_loop_sampler(Pf: GraphSymbols, Cf: ControllerSymbols, cfg: NumericConfig = DEFAULT_CONFIG) -> Sampler:
    """zeta -> H(zeta) = G (Kt G)^-1 Kt, shape (n, p + m, p + m)."""
    p, m = Pf.plant_shape
    if Cf.Kt.shape != (m, p + m):
        raise DomainError(f"controller symbols of shape {Cf.Kt.shape} do not close a {p} x {m} loop")

    def H(z: np.ndarray) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g, kt = Pf.G(z), Cf.Kt(z)
        loop = kt @ g
        sigma = np.linalg.svd(loop, compute_uv=False)[:, -1]
        k = int(np.argmin(sigma))
        if sigma[k] < cfg.tol_invertible:
            raise SingularAtPoint(float(np.angle(z[k]) % (2 * np.pi)), float(sigma[k]))
        return g @ np.linalg.solve(loop, kt)

    return H


def closed_loop_direct(P: TransferMatrix, C: TransferMatrix, z) -> np.ndarray:
    """[P; I](I - CP)^-1 [-C, I] straight from plant and controller values."""
    _check_dual(P, C)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    p, m = P.shape
    Pz, Cz = P.evaluate(z), C.evaluate(z)
    n = len(z)
    left = np.concatenate([Pz, np.broadcast_to(np.eye(m), (n, m, m))], axis=1)
    right = np.concatenate([-Cz, np.broadcast_to(np.eye(m), (n, m, m))], axis=2)
    return left @ np.linalg.solve(np.eye(m) - Cz @ Pz, right)


def stabilizes(
    P: TransferMatrix,
    C: TransferMatrix,
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
) -> StabilizationReport:
    """Does C stabilize P? Decided by the winding number of det(Kt G)."""
    Pf, Cf = _loop_symbols(P, C, cfg, cache)
    try:
        report = winding_number(loop_determinant_sampler(Pf, Cf), cfg)
    except NotInvertible as e:
        logger.info(f"det(Kt G) vanishes near theta={e.theta:.6f}; loop is boundary-marginal")
        return StabilizationReport(False, None, e.min_modulus, boundary_marginal=True)
    return StabilizationReport(report.winding == 0, report.winding, report.min_modulus)


def _loop_numerator(Pf: GraphSymbols, Cf: ControllerSymbols) -> Polynomial:
    """Polynomial numerator of det(Kt G) over the product of the factor denominators."""
    m = Pf.G.shape[1]
    numKt, numG = Cf.Kt.num, Pf.G.num
    degree = m * (max(numKt.degree, 0) + max(numG.degree, 0))
    coeffs = interpolate_on_circle(lambda z: np.linalg.det(numKt(z) @ numG(z)), degree)
    return Polynomial(coeffs).trimmed()


def stabilizes_by_roots(
    P: TransferMatrix,
    C: TransferMatrix,
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
) -> StabilizationReport:
    """Closed-loop pole route: every root of the numerator of det(Kt G) lies outside the closed disk.

    Roots within dist_circle_min of the circle make the loop boundary-marginal.
    """
    Pf, Cf = _loop_symbols(P, C, cfg, cache)
    numerator = _loop_numerator(Pf, Cf)
    if numerator.is_zero:
        return StabilizationReport(False, None, 0.0, boundary_marginal=True)
    roots = poly_roots(numerator, cfg) if numerator.degree > 0 else np.zeros(0, dtype=complex)
    moduli = np.abs(roots)
    gap = float(np.min(np.abs(moduli - 1.0))) if len(roots) else np.inf
    inside = int(np.sum(moduli < 1.0))
    if gap <= cfg.dist_circle_min:
        return StabilizationReport(False, None, gap, boundary_marginal=True)
    return StabilizationReport(inside == 0, inside, gap)


def stability_margin(
    P: TransferMatrix,
    C: TransferMatrix,
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
) -> MarginReport:
    """mu(P, C) = 1 / ||H(P, C)||_inf when C stabilizes P, else 0."""
    cache = cache if cache is not None else FactorizationCache()
    stab = stabilizes(P, C, cfg, cache)
    if not stab.ok:
        return MarginReport(False, None, 0.0, stab.det_winding, stab.det_min_modulus, None, stab.boundary_marginal)

    Pf, Cf = _loop_symbols(P, C, cfg, cache)
    estimate = linf_norm(closed_loop_sampler(Pf, Cf, cfg), cfg)
    logger.debug(f"||H||_inf = {estimate.value:.12g} at theta={estimate.theta_star:.6f}")
    return MarginReport(
        True, estimate.value, 1.0 / estimate.value, stab.det_winding, stab.det_min_modulus, estimate.theta_star
    )


def robustness_check(
    P0: TransferMatrix,
    P: TransferMatrix,
    C: TransferMatrix,
    cfg: NumericConfig = DEFAULT_CONFIG,
    cache: Optional[FactorizationCache] = None,
) -> RobustnessReport:
    """Slack of mu(P, C) >= mu(P0, C) - d_nu(P0, P); a robust pair never goes negative."""
    cache = cache if cache is not None else FactorizationCache()
    nominal = stability_margin(P0, C, cfg, cache)
    perturbed = stability_margin(P, C, cfg, cache)
    distance = nu_metric(P0, P, cfg, cache)
    lhs, rhs = perturbed.margin, nominal.margin - distance.value
    return RobustnessReport(lhs - rhs, lhs, rhs, nominal, perturbed, distance)
