"""
Error hierarchy shared by the numerics and the command-line front end.

Every error carries the exit code the CLI reports for it and a JSON-ready
diagnostic payload.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_INCONSISTENT = 4


def _complex_pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


class NugapError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_NUMERIC

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


# Input errors


class InputError(NugapError):
    exit_code = EXIT_INPUT


class DomainError(InputError, ValueError):
    """An operation was called outside its domain."""


class DocumentError(InputError):
    """A plant document failed to parse; `pointer` is a JSON pointer."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message, pointer=pointer)
        self.pointer = pointer


class BoundaryPole(DomainError):
    def __init__(self, entry: Tuple[int, int], pole: complex, distance: float):
        super().__init__(
            f"entry {entry} has a pole at distance {distance:.3e} from the unit circle",
            entry=list(entry),
            pole=_complex_pair(pole),
            distance=distance,
        )
        self.entry = entry
        self.pole = pole


# Numeric failures


class NumericFailure(NugapError):
    exit_code = EXIT_NUMERIC


class NotCoprime(NumericFailure):
    def __init__(self, common_roots: Sequence[complex], message: str = ""):
        super().__init__(
            message or f"operands share {len(common_roots)} root(s)",
            common_roots=[_complex_pair(r) for r in common_roots],
        )
        self.common_roots = list(common_roots)


class PoleProximity(NumericFailure):
    def __init__(self, entry: Tuple[int, int], point: complex, distance: float):
        super().__init__(
            f"evaluation point lies within {distance:.3e} of a pole of entry {entry}",
            entry=list(entry),
            point=_complex_pair(point),
        )
        self.entry = entry


class AmbiguousRank(NumericFailure):
    def __init__(self, point: complex, sigma: float, threshold: float):
        super().__init__(
            f"rank decision at {point:.6g} is ambiguous: sigma_min={sigma:.3e} "
            f"within a factor 10 of {threshold:.1e}",
            point=_complex_pair(point),
            sigma_min=sigma,
            gap=sigma / threshold,
        )


class NotPositive(NumericFailure):
    def __init__(self, minimum: float, theta: float):
        super().__init__(
            f"symbol is not strictly positive on the circle (min {minimum:.3e} at theta={theta:.6f})",
            minimum=minimum,
            theta=theta,
        )
        self.minimum = minimum
        self.theta = theta


class NoConvergence(NumericFailure):
    def __init__(self, residual: float, blocks: int):
        super().__init__(
            f"spectral factor residual {residual:.3e} still above tolerance at {blocks} blocks",
            residual=residual,
            blocks=blocks,
        )


class NotInvertible(NumericFailure):
    """A circle symbol dips below the modulus floor."""

    def __init__(self, min_modulus: float, theta: float, samples: int):
        super().__init__(
            f"symbol modulus {min_modulus:.3e} below the invertibility floor at theta={theta:.6f}",
            min_modulus=min_modulus,
            theta=theta,
            samples=samples,
        )
        self.min_modulus = min_modulus
        self.theta = theta
        self.samples = samples


class BudgetExhausted(NumericFailure):
    def __init__(self, samples: int, max_phase_step: float):
        super().__init__(
            f"winding number not certified within {samples} samples "
            f"(max phase step {max_phase_step:.3f})",
            samples=samples,
            max_phase_step=max_phase_step,
        )


class CertificateNotFound(NumericFailure):
    def __init__(self, residual: float, degree: int):
        super().__init__(
            f"no Bezout certificate up to degree {degree} (best residual {residual:.3e})",
            residual=residual,
            degree=degree,
        )


class SingularAtPoint(NumericFailure):
    def __init__(self, theta: float, sigma: float):
        super().__init__(
            f"closed-loop denominator is singular at theta={theta:.6f} (sigma_min={sigma:.3e})",
            theta=theta,
            sigma_min=sigma,
        )


class FactorizationError(NumericFailure):
    """A computed factorization failed one of its own residual checks."""


# Internal inconsistency


class InternalInconsistency(NugapError):
    exit_code = EXIT_INCONSISTENT


def describe(exc: BaseException, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Diagnostic payload for any exception, library or not."""
    if isinstance(exc, NugapError):
        payload = exc.to_dict()
    else:
        payload = {"error": type(exc).__name__, "message": str(exc)}
    if extra:
        payload.update(extra)
    return payload
