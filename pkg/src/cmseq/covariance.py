"""Joint covariance of a vector-valued sequence over [0, N].

Uniform block dimension d for every time; block (k1, k2) holds
Cov(x_k1, x_k2). Also hosts the concrete covariance fixtures shared by the
model, classification and oracle layers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ShapeMismatch
from .linalg import SPDMatrix, cholesky

__all__ = [
    "Boundary",
    "BlockCovariance",
    "block_indices",
    "ar1_covariance",
    "random_spd_covariance",
]


class Boundary(Enum):
    """Conditioning endpoint of a CM sequence: the first or the last time."""

    FIRST = "first"
    LAST = "last"

    def time_index(self, horizon: int) -> int:
        """The conditioning time c: 0 for FIRST, N for LAST."""
        return 0 if self is Boundary.FIRST else horizon


def block_indices(k: int, d: int) -> list[int]:
    """Scalar matrix indices covering time block k for block dimension d."""
    return list(range(k * d, (k + 1) * d))


@dataclass(frozen=True, eq=False)
class BlockCovariance:
    """Positive definite joint covariance of [x_0, ..., x_N], x_k in R^d.

    Construction validates positive definiteness, so every instance
    represents a nonsingular Gaussian sequence law. Minimum horizon is
    N = 1; with no interior structure such a sequence is vacuously Markov,
    reciprocal, CM_L and CM_F.
    """

    N: int
    d: int
    matrix: SPDMatrix

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise DomainError(f"horizon must be an integer >= 1, got {self.N!r}")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise DomainError(f"block dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "d", int(self.d))
        expected = (self.N + 1) * self.d
        if self.matrix.dim != expected:
            raise ShapeMismatch(f"matrix dim {self.matrix.dim} != (N + 1) * d = {expected}")
        cholesky(self.matrix)  # nonsingular-Gaussian invariant

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def block(self, k1: int, k2: int) -> np.ndarray:
        """The d x d block Cov(x_k1, x_k2)."""
        for k in (k1, k2):
            if not 0 <= k <= self.N:
                raise IndexError(f"time index {k} out of range [0, {self.N}]")
        d = self.d
        return self.matrix.entries[k1 * d:(k1 + 1) * d, k2 * d:(k2 + 1) * d]


def ar1_covariance(N: int, rho: float, variance: float = 1.0) -> BlockCovariance:
    """Scalar AR(1) covariance C_{k1,k2} = variance * rho^|k1-k2| (d = 1).

    A concrete Markov fixture: its inverse is tridiagonal.
    """
    if not abs(rho) < 1.0:
        raise DomainError(f"ar1 requires |rho| < 1, got {rho}")
    if not variance > 0.0:
        raise DomainError(f"ar1 requires variance > 0, got {variance}")
    k = np.arange(N + 1)
    entries = variance * np.power(float(rho), np.abs(np.subtract.outer(k, k)))
    return BlockCovariance(N, 1, SPDMatrix(entries))


def random_spd_covariance(N: int, d: int, seed: int) -> BlockCovariance:
    """Unstructured random SPD covariance; its inverse is generically dense."""
    n = (N + 1) * d
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    entries = a @ a.T / n + 0.5 * np.eye(n)
    return BlockCovariance(N, d, SPDMatrix(entries))
