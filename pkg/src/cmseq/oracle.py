"""Brute-force property verification straight from the joint covariance.

Each oracle tests a definition of the property via Gaussian conditioning,
comparing conditional-expectation coefficient matrices rather than any
precision-matrix pattern. The output must agree with the pattern-based
classifier on every input; disagreement means a bug in one of the routes.
Oracles are ground truth for tests, not a production path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import BlockCovariance, Boundary, block_indices
from .errors import DomainError
from .linalg import condition

__all__ = [
    "OracleReport",
    "cm_oracle",
    "markov_oracle",
    "reciprocal_oracle",
]

DEFAULT_ORACLE_TOL = 1e-8

PROPERTY_NAMES = ("cm_f", "cm_l", "markov", "reciprocal")


@dataclass(frozen=True)
class OracleReport:
    """Verdict of one property check over all tested index tuples.

    ``worst_violation`` is the largest deviation found and ``witness`` the
    tuple where it occurred (None when every tested tuple was vacuous).
    """

    property: str
    holds: bool
    worst_violation: float
    witness: tuple[int, int] | None
    tolerance: float

    def __post_init__(self) -> None:
        if self.property not in PROPERTY_NAMES:
            raise DomainError(f"property must be one of {PROPERTY_NAMES}, got {self.property!r}")
        if self.holds != (self.worst_violation <= self.tolerance):
            raise DomainError("holds flag inconsistent with worst_violation vs tolerance")


def _report(name: str, worst: float, witness, tol: float) -> OracleReport:
    return OracleReport(name, worst <= tol, worst, witness, tol)


def _coef_block(conditional, times: list[int], t: int, d: int) -> np.ndarray:
    """Columns of the coefficient matrix acting on the block at time t."""
    pos = times.index(t)
    return conditional.coefficients[:, pos * d:(pos + 1) * d]


def cm_oracle(
    cov: BlockCovariance, boundary: Boundary, tol: float = DEFAULT_ORACLE_TOL
) -> OracleReport:
    """Is the sequence Markov once the boundary state is conditioned on?

    For every pair j < k (k not the boundary time c) compares
    E[x_k | x_0..x_j, x_c] with E[x_k | x_j, x_c]: the coefficients on the
    strict past x_0..x_{j-1} (other than x_c) must vanish, the
    coefficients on x_j and on x_c must match the reduced conditional, and
    the two conditional covariances must agree. All deviations are
    entrywise absolute and compared against ``tol``; the worst one and its
    (j, k) pair are reported. When x_c already lies inside x_0..x_j it is
    conditioned on once, not twice.
    """
    joint = cov.matrix
    N, d = cov.N, cov.d
    c = boundary.time_index(N)
    worst = 0.0
    witness: tuple[int, int] | None = None

    for k in range(1, N + 1):
        if k == c:
            continue
        target = block_indices(k, d)
        for j in range(k):
            past_times = list(range(j + 1))
            full_times = past_times if c in past_times else past_times + [c]
            reduced_times = [j] if c == j else [j, c]

            full = condition(joint, target, sum((block_indices(t, d) for t in full_times), []))
            reduced = condition(joint, target, sum((block_indices(t, d) for t in reduced_times), []))

            dev = 0.0
            for t in full_times:
                here = _coef_block(full, full_times, t, d)
                if t in (j, c):
                    dev = max(dev, float(np.max(np.abs(here - _coef_block(reduced, reduced_times, t, d)))))
                else:
                    dev = max(dev, float(np.max(np.abs(here))))
            dev = max(dev, float(np.max(np.abs(full.cond_cov.entries - reduced.cond_cov.entries))))
            if dev > worst or witness is None:
                worst, witness = max(worst, dev), (j, k)

    name = "cm_l" if boundary is Boundary.LAST else "cm_f"
    return _report(name, worst, witness, tol)


def markov_oracle(cov: BlockCovariance, tol: float = DEFAULT_ORACLE_TOL) -> OracleReport:
    """Does each state depend on the whole past only through its predecessor?

    For every pair j < k the coefficients of E[x_k | x_0..x_j] on
    x_0..x_{j-1} must vanish (entrywise, absolute tolerance).
    """
    joint = cov.matrix
    N, d = cov.N, cov.d
    worst = 0.0
    witness: tuple[int, int] | None = None
    for k in range(1, N + 1):
        target = block_indices(k, d)
        for j in range(k):
            full = condition(joint, target, sum((block_indices(t, d) for t in range(j + 1)), []))
            dev = float(np.max(np.abs(full.coefficients[:, : j * d]))) if j > 0 else 0.0
            if dev > worst or witness is None:
                worst, witness = max(worst, dev), (j, k)
    return _report("markov", worst, witness, tol)


def reciprocal_oracle(cov: BlockCovariance, tol: float = DEFAULT_ORACLE_TOL) -> OracleReport:
    """Are the inside and outside of every window independent given its ends?

    For every k1 < k2 with a nonempty interior, conditions the rest of the
    sequence on (x_{k1}, x_{k2}) and requires the conditional
    cross-covariance between [x_k]_{k1+1}^{k2-1} and the exterior states to
    have Frobenius norm at most ``tol``.
    """
    joint = cov.matrix
    N, d = cov.N, cov.d
    worst = 0.0
    witness: tuple[int, int] | None = None
    for k1 in range(N + 1):
        for k2 in range(k1 + 2, N + 1):
            inside = list(range(k1 + 1, k2))
            outside = list(range(k1)) + list(range(k2 + 1, N + 1))
            if not outside:
                continue
            target = sum((block_indices(t, d) for t in inside + outside), [])
            given = block_indices(k1, d) + block_indices(k2, d)
            cond = condition(joint, target, given)
            split = len(inside) * d
            cross = cond.cond_cov.entries[:split, split:]
            dev = float(np.linalg.norm(cross))
            if dev > worst or witness is None:
                worst, witness = max(worst, dev), (k1, k2)
    return _report("reciprocal", worst, witness, tol)
