"""
Complex polynomials and scalar rational functions.

Coefficients are stored in ascending order (coeffs[k] multiplies z**k).
Root-based operations (gcd, lcm, cancellation) identify roots that lie within
`tol_root` of each other; exact Euclidean remainders are never trusted.
"""

# built-in imports
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple, Union

# numerical imports
import numpy as np
from numpy.polynomial import polynomial as npoly
import scipy.linalg

from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import DomainError, NotCoprime

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial in z with complex coefficients, ascending degree.

    Exact trailing zeros are stripped on construction, so the leading
    coefficient is nonzero unless the polynomial is identically zero, in
    which case coeffs == [0].
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        nonzero = np.flatnonzero(c)
        c = c[: nonzero[-1] + 1] if nonzero.size else np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls(np.array([value], dtype=complex))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: Scalar = 1.0) -> "Polynomial":
        if len(roots) == 0:
            return cls.constant(lead)
        return cls(lead * npoly.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1])

    @property
    def scale(self) -> float:
        """Largest coefficient modulus."""
        return float(np.max(np.abs(self.coeffs)))

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def __add__(self, other) -> "Polynomial":
        other = _as_polynomial(other)
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        other = _as_polynomial(other)
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __rsub__(self, other) -> "Polynomial":
        return _as_polynomial(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, value: Scalar) -> "Polynomial":
        return Polynomial(self.coeffs / complex(value))

    def divmod(self, divisor: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        if divisor.is_zero:
            raise DomainError("division by the zero polynomial")
        q, r = npoly.polydiv(self.coeffs, divisor.coeffs)
        return Polynomial(q), Polynomial(r)

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise DomainError("the zero polynomial has no monic normalization")
        c = self.coeffs / self.lead
        c[-1] = 1.0
        return Polynomial(c)

    def trimmed(self, rel_tol: float = 1e-13) -> "Polynomial":
        """Drop leading coefficients below rel_tol times the coefficient scale."""
        if self.is_zero:
            return self
        keep = np.flatnonzero(np.abs(self.coeffs) > rel_tol * self.scale)
        return Polynomial(self.coeffs[: keep[-1] + 1])

    def allclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs, (0, n - len(self.coeffs)))
        b = np.pad(other.coeffs, (0, n - len(other.coeffs)))
        return bool(np.max(np.abs(a - b)) <= atol)

    def __repr__(self) -> str:
        return f"Polynomial({np.array2string(self.coeffs, precision=6)})"


def _as_polynomial(value) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial.constant(value)


ONE = Polynomial.constant(1.0)
ZERO = Polynomial.constant(0.0)


@dataclass(frozen=True, eq=False)
class RationalFn:
    """Scalar rational function num/den.

    The reduced form (den monic, no common roots) is produced by
    `rational_simplify`; the constructor only rejects a zero denominator.
    """

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise DomainError("rational function with zero denominator")

    @classmethod
    def constant(cls, value: Scalar) -> "RationalFn":
        return cls(Polynomial.constant(value), ONE)

    @classmethod
    def from_coeffs(cls, num: Sequence[Scalar], den: Sequence[Scalar] = (1.0,)) -> "RationalFn":
        return cls(Polynomial(np.asarray(num, dtype=complex)), Polynomial(np.asarray(den, dtype=complex)))

    def __call__(self, z):
        return self.num(z) / self.den(z)

    @cached_property
    def poles(self) -> np.ndarray:
        return poly_roots(self.den)

    @cached_property
    def zeros(self) -> np.ndarray:
        return np.zeros(0, dtype=complex) if self.num.is_zero else poly_roots(self.num)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __repr__(self) -> str:
        return f"RationalFn(num={self.num!r}, den={self.den!r})"


def poly_roots(p: Polynomial, cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Roots with multiplicity from the eigenvalues of the balanced companion matrix."""
    if p.is_zero:
        raise DomainError("the zero polynomial has no finite root set")
    if p.degree == 0:
        return np.zeros(0, dtype=complex)
    if p.degree == 1:
        return np.array([-p.coeffs[0] / p.coeffs[1]], dtype=complex)

    companion = npoly.polycompanion(p.coeffs)
    balanced, _ = scipy.linalg.matrix_balance(companion, permute=False)
    roots = np.sort_complex(scipy.linalg.eigvals(balanced))

    bound = cfg.tol_eval * p.scale * np.maximum(1.0, np.abs(roots)) ** p.degree
    residual = np.abs(p(roots))
    if np.any(residual > bound):
        logger.debug(
            f"Root residual above bound for degree {p.degree}: max ratio {np.max(residual / bound):.2e}"
        )
    return roots


def match_roots(
    a: Sequence[complex], b: Sequence[complex], tol: float
) -> Tuple[List[Tuple[int, int]], List[int], List[int]]:
    """Greedy nearest matching of two root multisets.

    Returns matched index pairs and the unmatched indices of each side. Two
    roots match when |ra - rb| <= tol * max(1, |ra|).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    used = np.zeros(len(b), dtype=bool)
    pairs: List[Tuple[int, int]] = []
    unmatched_a: List[int] = []
    for i, ra in enumerate(a):
        if len(b) == 0:
            unmatched_a.append(i)
            continue
        dist = np.where(used, np.inf, np.abs(b - ra))
        j = int(np.argmin(dist))
        if dist[j] <= tol * max(1.0, abs(ra)):
            used[j] = True
            pairs.append((i, j))
        else:
            unmatched_a.append(i)
    return pairs, unmatched_a, [j for j in range(len(b)) if not used[j]]


def cluster_roots(roots: Sequence[complex], tol: float) -> List[Tuple[complex, int]]:
    """Group roots within tol of each other; returns (cluster mean, multiplicity).

    The mean of a perturbed multiple root is far more accurate than any of
    its members.
    """
    remaining = list(np.asarray(roots, dtype=complex))
    clusters: List[Tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        rest = []
        for r in remaining:
            (members if abs(r - seed) <= tol * max(1.0, abs(seed)) else rest).append(r)
        remaining = rest
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def poly_gcd(a: Polynomial, b: Polynomial, cfg: NumericConfig = DEFAULT_CONFIG) -> Polynomial:
    """Monic approximate gcd from clustered common roots."""
    if a.is_zero and b.is_zero:
        raise DomainError("gcd of two zero polynomials is undefined")
    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()

    ra, rb = poly_roots(a, cfg), poly_roots(b, cfg)
    pairs, _, _ = match_roots(ra, rb, cfg.tol_root)
    common = [(ra[i] + rb[j]) / 2 for i, j in pairs]
    g = Polynomial.from_roots(common)

    if g.degree > 0:
        for name, p in (("a", a), ("b", b)):
            _, rem = p.divmod(g)
            if rem.scale > cfg.tol_div * p.scale:
                logger.debug(f"gcd division residual for {name}: {rem.scale / p.scale:.2e}")
    return g


def poly_lcm(a: Polynomial, b: Polynomial, cfg: NumericConfig = DEFAULT_CONFIG) -> Polynomial:
    """Monic least common multiple: the clustered union of both root multisets."""
    if a.is_zero or b.is_zero:
        raise DomainError("lcm with the zero polynomial is undefined")
    ra, rb = poly_roots(a, cfg), poly_roots(b, cfg)
    pairs, only_a, only_b = match_roots(ra, rb, cfg.tol_root)
    roots = [(ra[i] + rb[j]) / 2 for i, j in pairs]
    roots += [ra[i] for i in only_a] + [rb[j] for j in only_b]
    return Polynomial.from_roots(roots)


def poly_bezout(
    a: Polynomial, b: Polynomial, cfg: NumericConfig = DEFAULT_CONFIG
) -> Tuple[Polynomial, Polynomial]:
    """Minimal-degree x, y with x*a + y*b = 1 (deg x < deg b, deg y < deg a)."""
    if a.is_zero and b.is_zero:
        raise NotCoprime([], "both operands are zero")
    g = poly_gcd(a, b, cfg)
    if g.degree > 0:
        raise NotCoprime(list(poly_roots(g, cfg)))

    if a.degree == 0:
        return Polynomial.constant(1.0 / a.coeffs[0]), ZERO
    if b.degree == 0:
        return ZERO, Polynomial.constant(1.0 / b.coeffs[0])

    na, nb = a.degree, b.degree
    sylvester = np.zeros((na + nb, na + nb), dtype=complex)
    for k in range(nb):
        sylvester[k : k + na + 1, k] = a.coeffs
    for k in range(na):
        sylvester[k : k + nb + 1, nb + k] = b.coeffs
    rhs = np.zeros(na + nb, dtype=complex)
    rhs[0] = 1.0

    solution = scipy.linalg.solve(sylvester, rhs)
    x, y = Polynomial(solution[:nb]), Polynomial(solution[nb:])

    residual = (x * a + y * b - ONE).scale
    if residual > cfg.tol_bezout:
        raise NotCoprime([], f"Bezout residual {residual:.3e} exceeds tolerance; operands nearly share a root")
    return x, y


def rational_simplify(r: RationalFn, cfg: NumericConfig = DEFAULT_CONFIG) -> RationalFn:
    """Cancel common roots and make the denominator monic.

    An already reduced function is returned unchanged, so the operation is
    idempotent coefficient-for-coefficient.
    """
    num, den = r.num, r.den
    if den.is_zero:
        raise DomainError("rational function with zero denominator")
    if num.is_zero:
        return RationalFn(ZERO, ONE)

    g = poly_gcd(num, den, cfg)
    if g.degree > 0:
        num, _ = num.divmod(g)
        den, _ = den.divmod(g)
        logger.debug(f"Cancelled {g.degree} common root(s)")
    if den.lead != 1.0:
        num, den = num / den.lead, den.monic()
    if num is r.num and den is r.den:
        return r
    return RationalFn(num, den)
