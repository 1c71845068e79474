"""
Transfer matrices over the field of fractions of the stable ring.

A plant is a p x m array of reduced rational functions whose poles stay away
from the unit circle. Right matrix-fraction descriptions Np Dp^-1 are built
from per-column denominator lcms and then stripped of common right divisors
one circle-free root at a time.
"""

# built-in imports
import hashlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import List, Optional, Sequence, Tuple

# numerical imports
import numpy as np

from nugap.algebra.polyalg import (
    ONE,
    Polynomial,
    RationalFn,
    cluster_roots,
    poly_lcm,
    poly_roots,
    rational_simplify,
)
from nugap.algebra.polymatrix import PolyMatrix
from nugap.config import DEFAULT_CONFIG, NumericConfig
from nugap.errors import AmbiguousRank, BoundaryPole, DomainError, PoleProximity

logger = logging.getLogger(__name__)


class Side(str, Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """p x m plant with rational entries.

    Build instances with `from_entries`, which reduces every entry and
    rejects poles on (or within dist_circle_min of) the unit circle.
    """

    entries: Tuple[Tuple[RationalFn, ...], ...]
    label: Optional[str] = None

    @classmethod
    def from_entries(
        cls,
        rows: Sequence[Sequence[RationalFn]],
        cfg: NumericConfig = DEFAULT_CONFIG,
        label: Optional[str] = None,
    ) -> "TransferMatrix":
        if not rows or not rows[0]:
            raise DomainError("a transfer matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise DomainError("transfer matrix rows have unequal lengths")
        reduced = tuple(tuple(rational_simplify(r, cfg) for r in row) for row in rows)
        plant = cls(reduced, label)
        plant.validate(cfg)
        return plant

    @classmethod
    def siso(cls, num: Sequence[complex], den: Sequence[complex] = (1.0,), cfg: NumericConfig = DEFAULT_CONFIG) -> "TransferMatrix":
        return cls.from_entries([[RationalFn.from_coeffs(num, den)]], cfg)

    @classmethod
    def constant(cls, matrix, cfg: NumericConfig = DEFAULT_CONFIG) -> "TransferMatrix":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls.from_entries([[RationalFn.constant(v) for v in row] for row in matrix], cfg)

    @classmethod
    def zeros(cls, p: int, m: int, cfg: NumericConfig = DEFAULT_CONFIG) -> "TransferMatrix":
        return cls.constant(np.zeros((p, m)), cfg)

    @property
    def p(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.p, self.m

    @property
    def is_siso(self) -> bool:
        return self.shape == (1, 1)

    def entry(self, i: int, j: int) -> RationalFn:
        return self.entries[i][j]

    def validate(self, cfg: NumericConfig = DEFAULT_CONFIG) -> None:
        if self.p > cfg.max_dim or self.m > cfg.max_dim:
            raise DomainError(f"plant size {self.shape} exceeds the {cfg.max_dim} x {cfg.max_dim} cap")
        for i, row in enumerate(self.entries):
            for j, r in enumerate(row):
                if max(r.num.degree, r.den.degree) > cfg.max_entry_degree:
                    raise DomainError(
                        f"entry ({i}, {j}) degree exceeds the cap {cfg.max_entry_degree}"
                    )
                if len(r.poles):
                    gaps = np.abs(np.abs(r.poles) - 1.0)
                    k = int(np.argmin(gaps))
                    if gaps[k] < cfg.dist_circle_min:
                        raise BoundaryPole((i, j), complex(r.poles[k]), float(gaps[k]))

    def evaluate(self, z) -> np.ndarray:
        """Values at a point (p, m) or at an array of points (n, p, m); no pole checks."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + self.shape, dtype=complex)
        for i, row in enumerate(self.entries):
            for j, r in enumerate(row):
                out[..., i, j] = r(z)
        return out

    def transpose(self) -> "TransferMatrix":
        return TransferMatrix(tuple(zip(*self.entries)), self.label)

    def content_key(self) -> str:
        """Hash of the coefficient content; identical plants share a key."""
        digest = hashlib.sha256(repr(self.shape).encode())
        for row in self.entries:
            for r in row:
                digest.update(r.num.coeffs.tobytes())
                digest.update(b"/")
                digest.update(r.den.coeffs.tobytes())
                digest.update(b";")
        return digest.hexdigest()

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"TransferMatrix{name}(p={self.p}, m={self.m})"


def tm_eval(P: TransferMatrix, z: complex, cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Entry-wise num(z)/den(z), refusing points within tol_root of a pole."""
    for i, row in enumerate(P.entries):
        for j, r in enumerate(row):
            if len(r.poles):
                distance = float(np.min(np.abs(r.poles - z)))
                if distance < cfg.tol_root * max(1.0, abs(z)):
                    raise PoleProximity((i, j), complex(z), distance)
    return P.evaluate(complex(z))


def tm_eval_grid(P: TransferMatrix, z, cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorized tm_eval over an array of points, shape (n, p, m)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    for i, row in enumerate(P.entries):
        for j, r in enumerate(row):
            if len(r.poles):
                distances = np.min(np.abs(z[:, None] - r.poles[None, :]), axis=1)
                k = int(np.argmin(distances / np.maximum(1.0, np.abs(z))))
                if distances[k] < cfg.tol_root * max(1.0, abs(z[k])):
                    raise PoleProximity((i, j), complex(z[k]), float(distances[k]))
    return P.evaluate(z)


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Polynomial matrix over one shared monic denominator."""

    num: PolyMatrix
    den: Polynomial = field(default_factory=lambda: ONE)

    def __post_init__(self):
        if self.den.is_zero:
            raise DomainError("rational matrix with zero denominator")
        if self.den.lead != 1.0:
            object.__setattr__(self, "num", self.num * (1.0 / self.den.lead))
            object.__setattr__(self, "den", self.den.monic())

    @property
    def shape(self):
        return self.num.shape

    @property
    def poles(self) -> np.ndarray:
        return poly_roots(self.den)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.num(z) / self.den(z)[..., None, None]

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(-self.num, self.den)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.num.transpose(), self.den)

    def _common(self, other: "RationalMatrix") -> Tuple[PolyMatrix, PolyMatrix, Polynomial]:
        if self.den.allclose(other.den, atol=0.0):
            return self.num, other.num, self.den
        d1, d2 = self.den, other.den
        return _scale_poly(self.num, d2), _scale_poly(other.num, d1), d1 * d2

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        a, b, den = self._common(other)
        return RationalMatrix(PolyMatrix.vstack([a, b]), den)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        a, b, den = self._common(other)
        return RationalMatrix(PolyMatrix.hstack([a, b]), den)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix(self.num @ other.num, self.den * other.den)

    def __repr__(self) -> str:
        return f"RationalMatrix(shape={self.shape}, den_degree={self.den.degree})"


def _scale_poly(matrix: PolyMatrix, p: Polynomial) -> PolyMatrix:
    """Multiply every entry of a polynomial matrix by one scalar polynomial."""
    return matrix @ PolyMatrix.diagonal([p] * matrix.shape[1])


@dataclass(frozen=True, eq=False)
class PolyMatrixFraction:
    """Np Dp^-1 (right) or Dp^-1 Np (left) with polynomial matrices."""

    Np: PolyMatrix
    Dp: PolyMatrix
    side: Side = Side.RIGHT
    coprime: bool = False

    def __post_init__(self):
        rows, cols = self.Dp.shape
        if rows != cols:
            raise DomainError(f"denominator matrix must be square, got {self.Dp.shape}")
        if self.Dp.det().is_zero:
            raise DomainError("denominator matrix has identically zero determinant")

    def evaluate(self, z) -> np.ndarray:
        num, den = self.Np(z), self.Dp(z)
        if self.side is Side.RIGHT:
            return np.swapaxes(np.linalg.solve(np.swapaxes(den, -1, -2), np.swapaxes(num, -1, -2)), -1, -2)
        return np.linalg.solve(den, num)

    def stacked(self) -> PolyMatrix:
        return PolyMatrix.vstack([self.Np, self.Dp])


@dataclass
class CoprimeReport:
    """Rank witnesses of [Np; Dp] at the roots of det(Dp)."""

    ok: bool
    witnesses: List[Tuple[complex, float]]


def det_roots(Dp: PolyMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Roots of det(Dp) with multiplicity."""
    if Dp.is_diagonal:
        parts = [poly_roots(Dp.entry(k, k), cfg) for k in range(Dp.shape[0])]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    det = Dp.det().trimmed()
    if det.is_zero:
        raise DomainError("denominator matrix has identically zero determinant")
    return poly_roots(det, cfg)


def check_right_coprime(f: PolyMatrixFraction, cfg: NumericConfig = DEFAULT_CONFIG) -> CoprimeReport:
    """[Np; Dp] keeps full column rank at every root of det(Dp).

    Away from those roots Dp alone already has full rank, so these points
    are the only candidates for a common right divisor.
    """
    if f.side is not Side.RIGHT:
        raise DomainError("right coprimeness check needs a right fraction")
    stacked = f.stacked()
    witnesses = []
    for root, _ in cluster_roots(det_roots(f.Dp, cfg), cfg.tol_root):
        sigma = float(np.linalg.svd(stacked(root), compute_uv=False)[-1])
        witnesses.append((root, sigma))
    return CoprimeReport(all(s >= cfg.tol_rank for _, s in witnesses), witnesses)


def _extract_divisor(stacked: PolyMatrix, root: complex, null_vector: np.ndarray) -> PolyMatrix:
    """Right-multiply by a unitary whose first column spans the kernel, then divide that column by (z - root)."""
    m = stacked.shape[1]
    q, _ = np.linalg.qr(np.column_stack([null_vector, np.eye(m, dtype=complex)]))
    unitary = q[:, :m]
    unitary[:, 0] = null_vector
    return (stacked @ unitary).divide_column(0, root)


def gcrd_reduce(f: PolyMatrixFraction, cfg: NumericConfig = DEFAULT_CONFIG) -> PolyMatrixFraction:
    """Remove greatest common right divisors from a right fraction without changing Np Dp^-1."""
    if f.side is not Side.RIGHT:
        raise DomainError("gcrd reduction needs a right fraction")
    p = f.Np.shape[0]
    stacked = f.stacked()
    removed = 0
    max_steps = max(f.Dp.det().trimmed().degree, 0) + 1

    for _ in range(max_steps):
        Dp = stacked.rows_slice(p, stacked.shape[0])
        deficient = None
        for root, _ in cluster_roots(det_roots(Dp, cfg), cfg.tol_root):
            _, s, vh = np.linalg.svd(stacked(root))
            sigma = float(s[-1])
            if sigma < cfg.tol_rank / 10:
                deficient = (root, vh[-1].conj())
                break
            if sigma < cfg.tol_rank * 10:
                raise AmbiguousRank(root, sigma, cfg.tol_rank)
        if deficient is None:
            break
        stacked = _extract_divisor(stacked, *deficient)
        removed += 1
        logger.debug(f"Removed common right divisor at z={deficient[0]:.6g}")

    reduced = PolyMatrixFraction(
        stacked.rows_slice(0, p), stacked.rows_slice(p, stacked.shape[0]), Side.RIGHT
    )
    report = check_right_coprime(reduced, cfg)
    if removed:
        logger.info(f"GCRD reduction removed {removed} common root(s)")
    return PolyMatrixFraction(reduced.Np, reduced.Dp, Side.RIGHT, coprime=report.ok)


def build_rmfd(P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> PolyMatrixFraction:
    """Coprime right matrix fraction: column lcm denominators, then GCRD reduction."""
    zero = Polynomial.constant(0.0)
    num_rows: List[List[Polynomial]] = [[zero] * P.m for _ in range(P.p)]
    dens: List[Polynomial] = []
    for j in range(P.m):
        column = [P.entry(i, j) for i in range(P.p)]
        lcm = reduce(lambda acc, r: poly_lcm(acc, r.den, cfg), column, ONE)
        for i, r in enumerate(column):
            cofactor, _ = lcm.divmod(r.den)
            num_rows[i][j] = r.num * cofactor
        dens.append(lcm)
    fraction = PolyMatrixFraction(PolyMatrix.from_entries(num_rows), PolyMatrix.diagonal(dens), Side.RIGHT)
    return gcrd_reduce(fraction, cfg)


def poles(P: TransferMatrix, cfg: NumericConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Poles with multiplicity: roots of det(Dp) of the coprime right fraction."""
    return det_roots(build_rmfd(P, cfg).Dp, cfg)
