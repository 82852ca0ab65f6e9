"""Recursive dynamic models of conditionally-Markov Gaussian sequences.

For a boundary time c in {0, N} the model is

    x_k = G_{k,k-1} x_{k-1} + G_{k,c} x_c + e_k,   k in [1, N] \\ {c}
    x_c = e_c,   and   x_0 = G_{0,N} x_N + e_0   when c = N,

driven by independent zero-mean Gaussian noise e_k with positive definite
covariances G_k. This module constructs the model from a covariance
function, computes the covariance the model implies, simulates it forward
and recovers the driving noise from realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np
import scipy.linalg

from .covariance import BlockCovariance, Boundary, block_indices
from .errors import DomainError, ShapeMismatch
from .linalg import SPDMatrix, cholesky, condition

__all__ = [
    "CMcModel",
    "TrajectoryBatch",
    "construct_model",
    "implied_covariance",
    "simulate",
    "extract_residuals",
    "random_model",
]


def _frozen(values, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ShapeMismatch(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CMcModel:
    """Parameter set of the conditionally-Markov recursion over [0, N].

    ``transitions[k]`` holds G_{k,k-1} and ``couplings[k]`` holds G_{k,c}
    for every interior time k in [1, N] \\ {c}; ``noise_covs[k]`` holds
    Cov(e_k) for all k in [0, N]; ``endpoint_coupling`` holds G_{0,N} and is
    present exactly when the boundary is LAST.

    For boundary FIRST the k = 1 step conditions on x_0 twice, so
    ``transitions[1]`` and ``couplings[1]`` both act on x_0 and only their
    sum is identifiable from the sequence law; construction stores an even
    split.
    """

    boundary: Boundary
    N: int
    d: int
    transitions: Mapping[int, np.ndarray]
    couplings: Mapping[int, np.ndarray]
    noise_covs: Mapping[int, np.ndarray]
    endpoint_coupling: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise DomainError(f"horizon must be an integer >= 1, got {self.N!r}")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise DomainError(f"block dimension must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "d", int(self.d))
        shape = (self.d, self.d)
        interior = self.interior_times

        trans = {int(k): v for k, v in self.transitions.items()}
        coup = {int(k): v for k, v in self.couplings.items()}
        noise = {int(k): v for k, v in self.noise_covs.items()}
        if set(trans) != set(interior):
            raise DomainError(f"transitions must be keyed by exactly {interior}, got {sorted(trans)}")
        if set(coup) != set(interior):
            raise DomainError(f"couplings must be keyed by exactly {interior}, got {sorted(coup)}")
        if set(noise) != set(range(self.N + 1)):
            raise DomainError(f"noise_covs must cover every time in [0, {self.N}], got {sorted(noise)}")

        trans = {k: _frozen(v, shape, f"transitions[{k}]") for k, v in trans.items()}
        coup = {k: _frozen(v, shape, f"couplings[{k}]") for k, v in coup.items()}
        validated_noise = {}
        for k, g in noise.items():
            spd = SPDMatrix(_frozen(g, shape, f"noise_covs[{k}]"))
            cholesky(spd)  # every G_k must be positive definite
            validated_noise[k] = spd.entries

        if self.boundary is Boundary.LAST:
            if self.endpoint_coupling is None:
                raise DomainError("endpoint_coupling is required when boundary is LAST")
            object.__setattr__(
                self, "endpoint_coupling", _frozen(self.endpoint_coupling, shape, "endpoint_coupling")
            )
        elif self.endpoint_coupling is not None:
            raise DomainError("endpoint_coupling must be absent when boundary is FIRST")

        object.__setattr__(self, "transitions", MappingProxyType(trans))
        object.__setattr__(self, "couplings", MappingProxyType(coup))
        object.__setattr__(self, "noise_covs", MappingProxyType(validated_noise))

    @property
    def boundary_time(self) -> int:
        return self.boundary.time_index(self.N)

    @property
    def interior_times(self) -> tuple[int, ...]:
        c = self.boundary.time_index(self.N)
        return tuple(k for k in range(1, self.N + 1) if k != c)


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Realizations of [x_k]_0^N with seed provenance.

    ``states`` has shape (count, N + 1, d); a batch is reproducible from
    the generating model together with (seed, count).
    """

    states: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        arr = np.array(self.states, dtype=float)
        if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 2 or arr.shape[2] < 1:
            raise ShapeMismatch(
                f"states must have shape (count, N + 1, d) with count >= 1, got {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "states", arr)

    @property
    def count(self) -> int:
        return self.states.shape[0]

    @property
    def horizon(self) -> int:
        return self.states.shape[1] - 1

    @property
    def block_dim(self) -> int:
        return self.states.shape[2]


def construct_model(cov: BlockCovariance, boundary: Boundary) -> CMcModel:
    """Build the recursion whose law reproduces ``cov`` when cov is CM_c.

    Interior coefficient pairs [G_{k,k-1}, G_{k,c}] are the Gaussian
    conditional coefficients of x_k given (x_{k-1}, x_c) and the noise
    covariances G_k the matching conditional covariances. Boundary pieces:
    G_0 = C_0 for boundary FIRST; G_N = C_N, G_{0,N} = C_{0,N} C_N^{-1} and
    G_0 = C_0 - C_{0,N} C_N^{-1} C_{N,0} for boundary LAST. For boundary
    FIRST the k = 1 step conditions on x_0 alone and its coefficient
    C_{1,0} C_0^{-1} is split evenly between transition and coupling.

    Raises :class:`NotPositiveDefinite` if a conditioning block or a
    resulting noise covariance fails the pivot test (singular input).
    """
    joint = cov.matrix
    N, d = cov.N, cov.d
    c = boundary.time_index(N)
    transitions: dict[int, np.ndarray] = {}
    couplings: dict[int, np.ndarray] = {}
    noise: dict[int, np.ndarray] = {}
    endpoint = None

    if boundary is Boundary.LAST:
        origin = condition(joint, block_indices(0, d), block_indices(N, d))
        endpoint = origin.coefficients
        noise[0] = origin.cond_cov.entries
        noise[N] = cov.block(N, N)
    else:
        noise[0] = cov.block(0, 0)

    for k in range(1, N + 1):
        if k == c:
            continue
        if c == 0 and k == 1:
            step = condition(joint, block_indices(1, d), block_indices(0, d))
            half = 0.5 * step.coefficients
            transitions[1] = half
            couplings[1] = half.copy()
        else:
            given = block_indices(k - 1, d) + block_indices(c, d)
            step = condition(joint, block_indices(k, d), given)
            transitions[k] = step.coefficients[:, :d]
            couplings[k] = step.coefficients[:, d:]
        noise[k] = step.cond_cov.entries

    return CMcModel(boundary, N, d, transitions, couplings, noise, endpoint)


def implied_covariance(model: CMcModel) -> BlockCovariance:
    """The unique sequence covariance generated by the model.

    Unrolls the recursion into x = L e (resolving e_N, then e_0, then
    e_1..e_{N-1} for boundary LAST; natural order for FIRST) and returns
    L blockdiag(G_0..G_N) Lᵀ. L is a permuted unit triangular matrix, so
    the result is positive definite for every parameter value.
    """
    N, d = model.N, model.d
    n = (N + 1) * d
    rows = np.zeros((N + 1, d, n))
    eye = np.eye(d)

    def add_unit(k: int) -> None:
        rows[k][:, k * d:(k + 1) * d] += eye

    if model.boundary is Boundary.FIRST:
        add_unit(0)
        for k in range(1, N + 1):
            rows[k] = model.transitions[k] @ rows[k - 1] + model.couplings[k] @ rows[0]
            add_unit(k)
    else:
        add_unit(N)
        rows[0] = model.endpoint_coupling @ rows[N]
        add_unit(0)
        for k in range(1, N):
            rows[k] = model.transitions[k] @ rows[k - 1] + model.couplings[k] @ rows[N]
            add_unit(k)

    lmat = rows.reshape(n, n)
    gdiag = scipy.linalg.block_diag(*(model.noise_covs[k] for k in range(N + 1)))
    return BlockCovariance(N, d, SPDMatrix(lmat @ gdiag @ lmat.T))


def _validate_seed(seed) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def simulate(model: CMcModel, seed: int, count: int) -> TrajectoryBatch:
    """Draw ``count`` independent realizations of the model.

    Each realization r consumes its own random stream derived from
    (seed, r), so output is deterministic per realization index and
    independent of batch size or evaluation schedule. Within a realization
    the standard-normal block for e_k is drawn in time order k = 0..N.
    """
    seed = _validate_seed(seed)
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    N, d = model.N, model.d

    factors = np.stack([cholesky(SPDMatrix(model.noise_covs[k])) for k in range(N + 1)])
    z = np.empty((count, N + 1, d))
    for r in range(count):
        stream = np.random.default_rng(np.random.SeedSequence([seed, r]))
        z[r] = stream.standard_normal((N + 1, d))
    noise = np.einsum("kij,rkj->rki", factors, z)

    states = np.empty_like(noise)
    if model.boundary is Boundary.FIRST:
        states[:, 0] = noise[:, 0]
        for k in range(1, N + 1):
            states[:, k] = (
                states[:, k - 1] @ model.transitions[k].T
                + states[:, 0] @ model.couplings[k].T
                + noise[:, k]
            )
    else:
        states[:, N] = noise[:, N]
        states[:, 0] = states[:, N] @ model.endpoint_coupling.T + noise[:, 0]
        for k in range(1, N):
            states[:, k] = (
                states[:, k - 1] @ model.transitions[k].T
                + states[:, N] @ model.couplings[k].T
                + noise[:, k]
            )
    return TrajectoryBatch(states=states, seed=seed)


def extract_residuals(model: CMcModel, batch: TrajectoryBatch) -> TrajectoryBatch:
    """Recover the driving noise e_k = x_k - E[x_k | x_{k-1}, x_c] from states.

    Under the generating model the result is white with covariances G_k;
    e_c = x_c, and e_0 = x_0 - G_{0,N} x_N for boundary LAST.
    """
    if batch.states.shape[1:] != (model.N + 1, model.d):
        raise ShapeMismatch(
            f"batch shape {batch.states.shape[1:]} does not match model (N + 1, d) = "
            f"{(model.N + 1, model.d)}"
        )
    x = batch.states
    res = np.empty_like(x)
    c = model.boundary_time
    res[:, c] = x[:, c]
    if model.boundary is Boundary.LAST:
        res[:, 0] = x[:, 0] - x[:, model.N] @ model.endpoint_coupling.T
    for k in model.interior_times:
        res[:, k] = (
            x[:, k]
            - x[:, k - 1] @ model.transitions[k].T
            - x[:, c] @ model.couplings[k].T
        )
    return TrajectoryBatch(states=res, seed=batch.seed)


def random_model(
    N: int,
    d: int,
    boundary: Boundary,
    seed: int,
    *,
    coupling_scale: float = 0.5,
    noise_cond: float = 1.0,
    noise_spread: float = 1.0,
) -> CMcModel:
    """Random valid parameter set, useful as a sufficiency-direction fixture.

    ``noise_cond`` sets the condition number of each noise covariance
    (effective for d >= 2); ``noise_spread`` sets the ratio between the
    largest and smallest noise scales across times, which stresses d = 1 as
    well. Transition and coupling entries are uniform in
    [-coupling_scale, coupling_scale] / sqrt(d).
    """
    if noise_cond < 1.0 or noise_spread < 1.0:
        raise DomainError("noise_cond and noise_spread must be >= 1")
    rng = np.random.default_rng(seed)
    scale = coupling_scale / np.sqrt(d)

    def coef() -> np.ndarray:
        return rng.uniform(-scale, scale, (d, d))

    def noise_cov() -> np.ndarray:
        level = np.exp(rng.uniform(-np.log(noise_spread), 0.0)) if noise_spread > 1.0 else 1.0
        if d == 1:
            return np.array([[level]])
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        eigs = np.geomspace(1.0, 1.0 / noise_cond, d)
        return level * (q * eigs) @ q.T

    c = boundary.time_index(N)
    interior = [k for k in range(1, N + 1) if k != c]
    transitions = {k: coef() for k in interior}
    couplings = {k: coef() for k in interior}
    noise = {k: noise_cov() for k in range(N + 1)}
    endpoint = coef() if boundary is Boundary.LAST else None
    return CMcModel(boundary, N, d, transitions, couplings, noise, endpoint)
