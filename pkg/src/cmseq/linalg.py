"""Dense symmetric-matrix numerics.

SPD validation, Cholesky factorization, inversion, Gaussian conditioning and
multivariate normal sampling: the computational substrate for the covariance,
model, classification and oracle layers. All operations are pure functions of
immutable inputs; random draws consume a caller-owned
``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, NotPositiveDefinite, ShapeMismatch

__all__ = [
    "SPDMatrix",
    "GaussianConditional",
    "cholesky",
    "invert_spd",
    "condition",
    "sample_mvn",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class SPDMatrix:
    """Symmetric real matrix used as a covariance.

    The input is symmetrized to (M + Mᵀ)/2 on construction, absorbing
    round-off from upstream products. Positive definiteness is not asserted
    here: it is enforced by the pivot test wherever a factorization is
    required, so invalid covariances can be constructed and then rejected
    with :class:`NotPositiveDefinite` by the operation that needs them.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeMismatch(f"expected a nonempty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class GaussianConditional:
    """One block of a zero-mean joint Gaussian conditioned on others.

    The conditional mean is ``coefficients @ given_vector`` and the
    conditional covariance is ``cond_cov``; coefficient columns follow the
    order in which the conditioning indices were supplied.
    """

    coefficients: np.ndarray
    cond_cov: SPDMatrix

    def __post_init__(self) -> None:
        coef = np.array(self.coefficients, dtype=float)
        if coef.ndim != 2:
            raise ShapeMismatch(f"coefficients must be 2-D, got shape {coef.shape}")
        if coef.shape[0] != self.cond_cov.dim:
            raise ShapeMismatch(
                f"coefficient rows {coef.shape[0]} != conditional covariance dim {self.cond_cov.dim}"
            )
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)


def _pivot_threshold(m: np.ndarray) -> float:
    # scale-invariant singularity cutoff: dim * eps * max |diagonal entry|
    return m.shape[0] * _EPS * float(np.max(np.abs(np.diagonal(m))))


def cholesky(m: SPDMatrix) -> np.ndarray:
    """Lower-triangular factor L with L Lᵀ = m.

    Raises :class:`NotPositiveDefinite` if the factorization fails or any
    pivot falls at or below the scale-invariant singularity threshold.
    """
    a = m.entries
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix of dim {m.dim} is not positive definite") from exc
    pivots = np.diagonal(lower) ** 2
    if not np.all(pivots > _pivot_threshold(a)):
        raise NotPositiveDefinite(
            f"matrix of dim {m.dim} has a Cholesky pivot at or below the singularity threshold"
        )
    return lower


def invert_spd(m: SPDMatrix) -> SPDMatrix:
    """Inverse of a positive definite matrix, via its Cholesky factor."""
    lower = cholesky(m)
    inv = scipy.linalg.cho_solve((lower, True), np.eye(m.dim), check_finite=False)
    return SPDMatrix(inv)


def _validated_indices(indices, dim: int, name: str) -> list[int]:
    idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < dim:
            raise IndexError(f"{name} index {i} out of range for dim {dim}")
    if len(set(idx)) != len(idx):
        raise IndexError(f"duplicate index in {name} indices")
    return idx


def condition(joint: SPDMatrix, target_indices, given_indices) -> GaussianConditional:
    """Condition one block of a zero-mean joint Gaussian on another.

    Returns the coefficient matrix C_tg C_g⁻¹ of E[x_t | x_g] (columns
    ordered as ``given_indices``) together with
    Cov(x_t | x_g) = C_t − C_tg C_g⁻¹ C_gt. The conditioning block is
    factored and solved; no explicit inverse is formed.

    Raises IndexError on out-of-range, duplicate or overlapping index sets
    and :class:`NotPositiveDefinite` when the conditioning block is singular.
    """
    tgt = _validated_indices(target_indices, joint.dim, "target")
    giv = _validated_indices(given_indices, joint.dim, "given")
    if set(tgt) & set(giv):
        raise IndexError("target and given index sets overlap")
    c = joint.entries
    c_t = c[np.ix_(tgt, tgt)]
    if not giv:
        return GaussianConditional(np.zeros((len(tgt), 0)), SPDMatrix(c_t))
    c_tg = c[np.ix_(tgt, giv)]
    c_g = c[np.ix_(giv, giv)]
    lower = cholesky(SPDMatrix(c_g))
    coef = scipy.linalg.cho_solve((lower, True), c_tg.T, check_finite=False).T
    cond_cov = c_t - coef @ c_tg.T
    return GaussianConditional(coef, SPDMatrix(cond_cov))


def sample_mvn(mean, cov: SPDMatrix, stream: np.random.Generator) -> np.ndarray:
    """One draw from N(mean, cov) as mean + L z, deterministic given the stream state."""
    mu = np.asarray(mean, dtype=float)
    if mu.shape != (cov.dim,):
        raise ShapeMismatch(f"mean shape {mu.shape} does not match covariance dim {cov.dim}")
    if not np.all(np.isfinite(mu)):
        raise DomainError("mean entries must be finite")
    lower = cholesky(cov)
    z = stream.standard_normal(cov.dim)
    return mu + lower @ z
