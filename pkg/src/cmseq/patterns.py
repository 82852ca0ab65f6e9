"""Classification of sequences by inverse-covariance block sparsity.

A nonsingular Gaussian sequence over [0, N] is Markov, reciprocal, CM_L or
CM_F exactly when its precision matrix C⁻¹ is, respectively, block
tridiagonal, cyclic tridiagonal (tridiagonal plus the (0, N) corner), or
tridiagonal plus a filled last (first) block row and column. This module
tests those supports at block level and assembles random matrices on a
chosen support for use as fixtures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .covariance import BlockCovariance, block_indices
from .errors import DomainError, ShapeMismatch
from .linalg import SPDMatrix, invert_spd

__all__ = [
    "PatternForm",
    "CMcPattern",
    "PatternViolation",
    "ClassLabels",
    "pattern_check",
    "classify",
    "random_cm_instance",
]

DEFAULT_CLASSIFY_TOL = 1e-9


class PatternForm(enum.Enum):
    """Allowed block supports, from narrowest to widest."""

    TRIDIAGONAL = "tridiagonal"
    CYCLIC = "cyclic-tridiagonal"
    CM_L = "cm_l"
    CM_F = "cm_f"


def _in_support(form: PatternForm, k1: int, k2: int, N: int) -> bool:
    if abs(k1 - k2) <= 1:
        return True
    if form is PatternForm.TRIDIAGONAL:
        return False
    if form is PatternForm.CYCLIC:
        return {k1, k2} == {0, N}
    if form is PatternForm.CM_L:
        return k1 == N or k2 == N
    return k1 == 0 or k2 == 0


def _block_matrix(values, d: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (d, d):
        raise ShapeMismatch(f"{name} must be {d}x{d}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CMcPattern:
    """Block description of a CM_L or CM_F shaped symmetric matrix.

    ``diagonal`` holds A_0..A_N, ``super_diagonal`` holds B_0..B_{N-1}
    (block (k, k+1)), and ``fringe`` holds the D blocks: for CM_L, D_i at
    block (i, N) with i in [0, N-2]; for CM_F, D_i at block (0, i) with i
    in [2, N]. A cyclic tridiagonal matrix is the CM_L shape with only D_0
    present; tridiagonal is either shape with no fringe.
    """

    form: PatternForm
    N: int
    d: int
    diagonal: tuple[np.ndarray, ...]
    super_diagonal: tuple[np.ndarray, ...]
    fringe: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.form not in (PatternForm.CM_L, PatternForm.CM_F):
            raise DomainError("pattern shape must be CM_L or CM_F; narrower forms use an empty fringe")
        if self.N < 1:
            raise DomainError(f"horizon must be >= 1, got {self.N}")
        d = self.d
        if len(self.diagonal) != self.N + 1:
            raise ShapeMismatch(f"expected {self.N + 1} diagonal blocks, got {len(self.diagonal)}")
        if len(self.super_diagonal) != self.N:
            raise ShapeMismatch(f"expected {self.N} super-diagonal blocks, got {len(self.super_diagonal)}")
        diag = tuple(
            _block_matrix((np.asarray(a, dtype=float) + np.asarray(a, dtype=float).T) / 2.0, d, f"diagonal[{k}]")
            for k, a in enumerate(self.diagonal)
        )
        sup = tuple(_block_matrix(b, d, f"super_diagonal[{k}]") for k, b in enumerate(self.super_diagonal))
        allowed = range(0, self.N - 1) if self.form is PatternForm.CM_L else range(2, self.N + 1)
        fringe = {}
        for i, blk in self.fringe.items():
            if i not in allowed:
                raise DomainError(f"fringe index {i} outside {allowed} for {self.form.value}")
            fringe[int(i)] = _block_matrix(blk, d, f"fringe[{i}]")
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "super_diagonal", sup)
        object.__setattr__(self, "fringe", MappingProxyType(fringe))

    def assemble(self) -> np.ndarray:
        """Full symmetric matrix with the described blocks, zeros elsewhere."""
        N, d = self.N, self.d
        out = np.zeros(((N + 1) * d, (N + 1) * d))

        def put(k1: int, k2: int, blk: np.ndarray) -> None:
            out[k1 * d:(k1 + 1) * d, k2 * d:(k2 + 1) * d] = blk
            if k1 != k2:
                out[k2 * d:(k2 + 1) * d, k1 * d:(k1 + 1) * d] = blk.T

        for k, a in enumerate(self.diagonal):
            put(k, k, a)
        for k, b in enumerate(self.super_diagonal):
            put(k, k + 1, b)
        for i, blk in self.fringe.items():
            if self.form is PatternForm.CM_L:
                put(i, N, blk)
            else:
                put(0, i, blk)
        return out


@dataclass(frozen=True)
class PatternViolation:
    """Largest off-support block: its Frobenius norm and block coordinates.

    ``block`` is None when the support covers the whole matrix (small N).
    """

    magnitude: float
    block: tuple[int, int] | None


@dataclass(frozen=True)
class ClassLabels:
    """Full label set of one covariance, with per-label worst violations.

    The classes are nested, so the flags must satisfy
    markov <= reciprocal <= cm_l and cm_f; construction rejects label
    combinations that break the containment.
    """

    markov: bool
    reciprocal: bool
    cm_l: bool
    cm_f: bool
    violations: Mapping[str, PatternViolation]
    tolerance_used: float

    def __post_init__(self) -> None:
        if self.markov and not self.reciprocal:
            raise DomainError("containment violated: markov implies reciprocal")
        if self.reciprocal and not (self.cm_l and self.cm_f):
            raise DomainError("containment violated: reciprocal implies cm_l and cm_f")
        object.__setattr__(self, "violations", MappingProxyType(dict(self.violations)))

    def as_dict(self) -> dict[str, bool]:
        return {"markov": self.markov, "reciprocal": self.reciprocal, "cm_l": self.cm_l, "cm_f": self.cm_f}


def _worst_off_support(
    entries: np.ndarray, N: int, d: int, form: PatternForm
) -> PatternViolation:
    worst = -1.0
    where: tuple[int, int] | None = None
    for k1 in range(N + 1):
        for k2 in range(k1, N + 1):
            if _in_support(form, k1, k2, N):
                continue
            block = entries[k1 * d:(k1 + 1) * d, k2 * d:(k2 + 1) * d]
            norm = float(np.linalg.norm(block))
            if norm > worst:
                worst, where = norm, (k1, k2)
    return PatternViolation(max(worst, 0.0), where)


def pattern_check(
    m: SPDMatrix, N: int, d: int, form: PatternForm, tol: float = DEFAULT_CLASSIFY_TOL
) -> tuple[bool, float]:
    """Whether every block of ``m`` outside the form's support is negligible.

    A block counts as negligible when its Frobenius norm is at most
    tol · ‖m‖_F / (N + 1); the relative scaling makes the verdict invariant
    under m -> α·m. Returns the verdict and the largest off-support block
    norm found.
    """
    if m.dim != (N + 1) * d:
        raise ShapeMismatch(f"matrix dim {m.dim} != (N + 1) * d = {(N + 1) * d}")
    violation = _worst_off_support(m.entries, N, d, form)
    threshold = tol * float(np.linalg.norm(m.entries)) / (N + 1)
    return violation.magnitude <= threshold, violation.magnitude


def classify(cov: BlockCovariance, tol: float = DEFAULT_CLASSIFY_TOL) -> ClassLabels:
    """Label a covariance by the block support of its precision matrix.

    Inverts the covariance and tests all four supports against the shared
    relative threshold. For N = 1 every support covers the full matrix and
    all labels hold by convention. Raises :class:`NotPositiveDefinite` on a
    singular input.
    """
    prec = invert_spd(cov.matrix)
    threshold = tol * float(np.linalg.norm(prec.entries)) / (cov.N + 1)
    forms = {
        "markov": PatternForm.TRIDIAGONAL,
        "reciprocal": PatternForm.CYCLIC,
        "cm_l": PatternForm.CM_L,
        "cm_f": PatternForm.CM_F,
    }
    violations = {
        name: _worst_off_support(prec.entries, cov.N, cov.d, form)
        for name, form in forms.items()
    }
    flags = {name: violations[name].magnitude <= threshold for name in forms}
    return ClassLabels(
        markov=flags["markov"],
        reciprocal=flags["reciprocal"],
        cm_l=flags["cm_l"],
        cm_f=flags["cm_f"],
        violations=violations,
        tolerance_used=threshold,
    )


def random_cm_instance(
    N: int,
    d: int,
    form: PatternForm,
    seed: int,
    *,
    min_fringe: float = 0.0,
) -> BlockCovariance:
    """Covariance whose precision has a random realization of ``form``.

    Draws blocks on the support, shifts the spectrum to be safely positive
    definite (a diagonal shift, so the support is untouched) and returns
    the inverse as the covariance. ``min_fringe`` rescales any fringe
    block whose norm falls below it, guaranteeing structural nonzeros when
    a fixture must stay OUT of the narrower classes; it applies to the
    corner block for the cyclic form. Forms other than tridiagonal are
    distinguishable only for N >= 2 (N >= 3 to separate CM_L from CM_F).
    """
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(d)

    def draw() -> np.ndarray:
        return scale * rng.standard_normal((d, d))

    def draw_fringe() -> np.ndarray:
        blk = 0.5 * draw()
        norm = float(np.linalg.norm(blk))
        if min_fringe > 0.0 and norm < min_fringe:
            blk = blk * (2.0 * min_fringe / max(norm, 1e-300))
        return blk

    diagonal = tuple(np.eye(d) + 0.3 * draw() for _ in range(N + 1))
    super_diagonal = tuple(0.5 * draw() for _ in range(N))
    if form is PatternForm.TRIDIAGONAL:
        shape, fringe = PatternForm.CM_L, {}
    elif form is PatternForm.CYCLIC:
        if N < 2:
            raise DomainError("cyclic form needs N >= 2 to have a distinct corner block")
        shape, fringe = PatternForm.CM_L, {0: draw_fringe()}
    elif form is PatternForm.CM_L:
        shape, fringe = PatternForm.CM_L, {i: draw_fringe() for i in range(0, N - 1)}
    else:
        shape, fringe = PatternForm.CM_F, {i: draw_fringe() for i in range(2, N + 1)}

    pattern = CMcPattern(shape, N, d, diagonal, super_diagonal, fringe)
    assembled = pattern.assemble()
    low = float(np.linalg.eigvalsh(assembled)[0])
    precision = assembled + (0.5 - min(low, 0.0)) * np.eye(assembled.shape[0])
    return BlockCovariance(N, d, invert_spd(SPDMatrix(precision)))
