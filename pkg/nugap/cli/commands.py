"""
Subcommand handlers. Each takes the parsed arguments and the NumericConfig
in force and returns (result document, exit code).
"""

# built-in imports
import logging
import sys
from argparse import Namespace
from typing import Any, Callable, Dict, Tuple

# numerical imports
import numpy as np

from nugap.circle.sampling import CircleGrid, fourier_coeffs, poisson_winding, sigma_max, winding_number
from nugap.circle.toeplitz import index_estimate
from nugap.cli.campaign import render_table, run_campaign
from nugap.cli.documents import load_plant, rational_matrix_to_dict, result_document, write_plot
from nugap.config import NumericConfig
from nugap.errors import EXIT_INCONSISTENT, EXIT_OK, DomainError, NumericFailure, SingularAtPoint
from nugap.factor.coprime import NormalizedFactorization, bezout_certificate
from nugap.metric.numetric import FactorizationCache, det_gram_sampler, gap_sampler, nu_metric
from nugap.metric.robust import closed_loop_sampler, stability_margin

logger = logging.getLogger(__name__)

CommandResult = Tuple[Dict[str, Any], int]


def run_numetric(args: Namespace, cfg: NumericConfig) -> CommandResult:
    P1, P2 = load_plant(args.plant1, cfg), load_plant(args.plant2, cfg)
    cache = FactorizationCache()
    outcome = nu_metric(P1, P2, cfg, cache)
    logger.info(f"d_nu = {outcome.value!r} (condition met: {outcome.condition_met})")

    if args.plot:
        G1, G2 = cache.graph(P1, cfg), cache.graph(P2, cfg)
        grid = CircleGrid(cfg.grid_size)
        gaps = sigma_max(gap_sampler(G1, G2)(grid.points))
        dets = det_gram_sampler(G1, G2)(grid.points)
        write_plot(
            args.plot,
            ["theta", "sigma_max", "det_modulus", "det_arg"],
            zip(grid.thetas, gaps, np.abs(dets), np.angle(dets)),
        )
    return result_document("numetric", [P1, P2], outcome.to_dict(), cfg), EXIT_OK


def run_margin(args: Namespace, cfg: NumericConfig) -> CommandResult:
    P, C = load_plant(args.plant, cfg), load_plant(args.controller, cfg)
    cache = FactorizationCache()
    report = stability_margin(P, C, cfg, cache)
    logger.info(f"Stabilizes: {report.stabilizes}, margin {report.margin!r}")

    if args.plot:
        grid = CircleGrid(cfg.grid_size)
        try:
            H = closed_loop_sampler(cache.graph(P, cfg), cache.controller(C, cfg), cfg)(grid.points)
            write_plot(args.plot, ["theta", "sigma_max"], zip(grid.thetas, sigma_max(H)))
        except SingularAtPoint as e:
            logger.warning(f"No plot data: {e.message}")
    return result_document("margin", [P, C], report.to_dict(), cfg), EXIT_OK


def _factorization_dict(f: NormalizedFactorization) -> Dict[str, Any]:
    return {
        "N": rational_matrix_to_dict(f.N),
        "D": rational_matrix_to_dict(f.D),
        "normalization_residual": f.residual_norm,
    }


def run_factorize(args: Namespace, cfg: NumericConfig) -> CommandResult:
    P = load_plant(args.plant, cfg)
    symbols = FactorizationCache().graph(P, cfg)
    try:
        bezout_residual = bezout_certificate(symbols.right, cfg).residual
    except NumericFailure as e:
        logger.warning(f"No Bezout certificate: {e.message}")
        bezout_residual = None
    result = {
        "right": _factorization_dict(symbols.right),
        "left": _factorization_dict(symbols.left),
        "annihilation": symbols.annihilation,
        "bezout_residual": bezout_residual,
    }
    return result_document("factorize", [P], result, cfg), EXIT_OK


def run_winding(args: Namespace, cfg: NumericConfig) -> CommandResult:
    symbol = load_plant(args.symbol, cfg)
    if not symbol.is_siso:
        raise DomainError(f"winding takes a scalar symbol, got a {symbol.shape} document")
    f = symbol.entry(0, 0)
    result: Dict[str, Any] = winding_number(f, cfg).to_dict()

    if args.toeplitz:
        estimate = index_estimate(f, cfg)
        result["index"] = estimate.index
        result["sigma_min_trace"] = [[n, s] for n, s in estimate.sigma_min_trace]
    if args.poisson is not None:
        poisson = poisson_winding(fourier_coeffs(f, args.terms, cfg), args.poisson, cfg)
        result["poisson"] = {
            "radius": poisson.radius,
            "winding": poisson.report.winding,
            "annulus_min_modulus": poisson.annulus_min_modulus,
            "index_estimate": poisson.index_estimate,
        }
    return result_document("winding", [symbol], result, cfg), EXIT_OK


def run_report(args: Namespace, cfg: NumericConfig) -> CommandResult:
    suites = run_campaign(args.seed, args.triples, cfg)
    if args.table:
        print(render_table(suites), file=sys.stderr)
    passed = all(s.passed for s in suites)
    if not passed:
        failing = [s.name for s in suites if not s.passed]
        logger.error(f"Property campaign failed in suite(s): {', '.join(failing)}")
    result = {"seed": args.seed, "triples": args.triples, "passed": passed, "suites": [s.to_dict() for s in suites]}
    return result_document("report", [], result, cfg), EXIT_OK if passed else EXIT_INCONSISTENT


COMMANDS: Dict[str, Callable[[Namespace, NumericConfig], CommandResult]] = {
    "numetric": run_numetric,
    "margin": run_margin,
    "factorize": run_factorize,
    "winding": run_winding,
    "report": run_report,
}
