"""
Polynomial matrices stored as a coefficient stack of shape (degree + 1, rows, cols).

Determinants and adjugates are recovered from values at roots of unity with
an FFT, which is well conditioned for the degrees handled here.
"""

# built-in imports
from dataclasses import dataclass
from typing import Callable, Sequence

# numerical imports
import numpy as np

from nugap.algebra.polyalg import Polynomial
from nugap.errors import DomainError

# Relative size below which interpolated coefficients are rounding noise
INTERPOLATION_NOISE = 1e-13


def interpolate_on_circle(values_at: Callable[[np.ndarray], np.ndarray], degree_bound: int) -> np.ndarray:
    """Coefficients (ascending, along axis 0) of a polynomial of degree <= degree_bound.

    `values_at` maps an array of points to the stacked values there.
    """
    size = 8
    while size < degree_bound + 1:
        size *= 2
    points = np.exp(2j * np.pi * np.arange(size) / size)
    coeffs = np.fft.fft(values_at(points), axis=0)[: degree_bound + 1] / size
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    coeffs[np.abs(coeffs) <= INTERPOLATION_NOISE * scale] = 0.0
    return coeffs


@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """Matrix with polynomial entries; coeffs[k] is the matrix coefficient of z**k."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3:
            raise DomainError(f"polynomial matrix coefficients must be 3-d, got shape {c.shape}")
        nonzero = np.flatnonzero(np.any(c != 0, axis=(1, 2)))
        c = c[: nonzero[-1] + 1] if nonzero.size else np.zeros((1,) + c.shape[1:], dtype=complex)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        n_rows, n_cols = len(rows), len(rows[0])
        degree = max(len(p.coeffs) for row in rows for p in row)
        c = np.zeros((degree, n_rows, n_cols), dtype=complex)
        for i, row in enumerate(rows):
            for j, p in enumerate(row):
                c[: len(p.coeffs), i, j] = p.coeffs
        return cls(c)

    @classmethod
    def constant(cls, matrix) -> "PolyMatrix":
        return cls(np.asarray(matrix, dtype=complex)[None, :, :])

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls.constant(np.eye(n))

    @classmethod
    def diagonal(cls, polys: Sequence[Polynomial]) -> "PolyMatrix":
        n = len(polys)
        zero = Polynomial.constant(0.0)
        return cls.from_entries([[polys[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def vstack(cls, blocks: Sequence["PolyMatrix"]) -> "PolyMatrix":
        degree = max(b.coeffs.shape[0] for b in blocks)
        padded = [np.pad(b.coeffs, ((0, degree - b.coeffs.shape[0]), (0, 0), (0, 0))) for b in blocks]
        return cls(np.concatenate(padded, axis=1))

    @classmethod
    def hstack(cls, blocks: Sequence["PolyMatrix"]) -> "PolyMatrix":
        degree = max(b.coeffs.shape[0] for b in blocks)
        padded = [np.pad(b.coeffs, ((0, degree - b.coeffs.shape[0]), (0, 0), (0, 0))) for b in blocks]
        return cls(np.concatenate(padded, axis=2))

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else self.coeffs.shape[0] - 1

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    @property
    def is_diagonal(self) -> bool:
        rows, cols = self.shape
        if rows != cols:
            return False
        off = ~np.eye(rows, dtype=bool)
        return not np.any(self.coeffs[:, off])

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def entry(self, i: int, j: int) -> Polynomial:
        return Polynomial(self.coeffs[:, i, j])

    def __call__(self, z):
        """Value at a point (rows, cols) or at an array of points (n, rows, cols)."""
        z = np.asarray(z, dtype=complex)
        zz = z[..., None, None]
        out = np.broadcast_to(self.coeffs[-1], z.shape + self.shape).astype(complex)
        for k in range(self.coeffs.shape[0] - 2, -1, -1):
            out = out * zz + self.coeffs[k]
        return out

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(-self.coeffs)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        degree = max(self.coeffs.shape[0], other.coeffs.shape[0])
        a = np.pad(self.coeffs, ((0, degree - self.coeffs.shape[0]), (0, 0), (0, 0)))
        b = np.pad(other.coeffs, ((0, degree - other.coeffs.shape[0]), (0, 0), (0, 0)))
        return PolyMatrix(a + b)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __mul__(self, value) -> "PolyMatrix":
        return PolyMatrix(self.coeffs * complex(value))

    __rmul__ = __mul__

    def __matmul__(self, other) -> "PolyMatrix":
        if not isinstance(other, PolyMatrix):
            other = PolyMatrix.constant(other)
        if self.shape[1] != other.shape[0]:
            raise DomainError(f"cannot multiply {self.shape} by {other.shape}")
        da, db = self.coeffs.shape[0], other.coeffs.shape[0]
        out = np.zeros((da + db - 1, self.shape[0], other.shape[1]), dtype=complex)
        for i in range(da):
            out[i : i + db] += np.einsum("rk,dkc->drc", self.coeffs[i], other.coeffs)
        return PolyMatrix(out)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(np.transpose(self.coeffs, (0, 2, 1)))

    def rows_slice(self, start: int, stop: int) -> "PolyMatrix":
        return PolyMatrix(self.coeffs[:, start:stop, :])

    def det(self) -> Polynomial:
        rows, cols = self.shape
        if rows != cols:
            raise DomainError(f"determinant of a non-square {self.shape} matrix")
        if self.degree <= 0:
            return Polynomial.constant(np.linalg.det(self.coeffs[0]))
        coeffs = interpolate_on_circle(lambda z: np.linalg.det(self(z)), rows * self.degree)
        return Polynomial(coeffs)

    def adjugate(self) -> "PolyMatrix":
        """Classical adjoint from cofactors, so singular values of the matrix are harmless."""
        n = self.shape[0]
        if self.shape[1] != n:
            raise DomainError(f"adjugate of a non-square {self.shape} matrix")
        if n == 1:
            return PolyMatrix.identity(1)

        def cofactors(z: np.ndarray) -> np.ndarray:
            values = self(z)
            adj = np.empty(values.shape, dtype=complex)
            for i in range(n):
                for j in range(n):
                    minor = np.delete(np.delete(values, i, axis=1), j, axis=2)
                    adj[:, j, i] = (-1) ** (i + j) * np.linalg.det(minor)
            return adj

        return PolyMatrix(interpolate_on_circle(cofactors, (n - 1) * max(self.degree, 0)))

    def divide_column(self, j: int, root: complex) -> "PolyMatrix":
        """Divide column j by (z - root), dropping the (numerically zero) remainder."""
        c = np.array(self.coeffs)
        column = c[:, :, j]
        degree = column.shape[0] - 1
        quotient = np.zeros_like(column)
        if degree >= 1:
            quotient[degree - 1] = column[degree]
            for k in range(degree - 1, 0, -1):
                quotient[k - 1] = column[k] + root * quotient[k]
        c[:, :, j] = quotient
        return PolyMatrix(c)

    def __repr__(self) -> str:
        return f"PolyMatrix(shape={self.shape}, degree={self.degree})"
