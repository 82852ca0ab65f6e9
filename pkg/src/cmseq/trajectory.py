"""Destination-aware trajectory ensembles.

A motion sequence with a known destination density is modeled by taking a
Markov kinematic prior, building its last-boundary recursion, and swapping
in the destination's mean and covariance for the endpoint noise e_N. Since
x_N = e_N, realizations start from the destination draw and the evolution
law between consecutive states is untouched. Nonzero means ride on top of
the zero-mean core as a deterministic offset path.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .covariance import BlockCovariance, Boundary
from .errors import ShapeMismatch
from .linalg import SPDMatrix
from .model import CMcModel, TrajectoryBatch, construct_model, simulate

__all__ = [
    "EnsembleSummary",
    "destination_model",
    "generate_ensemble",
    "render_ensemble_svg",
]


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """Per-time statistics of a generated ensemble.

    ``mean_path`` is the deterministic mean propagated through the
    recursion (exact, no sampling error); ``empirical_mean`` and
    ``empirical_cov`` are the ensemble estimates, which approach it and
    the model covariance at the usual 1/sqrt(count) rate.
    """

    count: int
    seed: int
    mean_path: np.ndarray
    empirical_mean: np.ndarray
    empirical_cov: np.ndarray

    def __post_init__(self) -> None:
        for name in ("mean_path", "empirical_mean", "empirical_cov"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        steps = self.mean_path.shape[0]
        d = self.mean_path.shape[1]
        if self.empirical_mean.shape != (steps, d) or self.empirical_cov.shape != (steps, d, d):
            raise ShapeMismatch("summary arrays disagree on (N + 1, d)")


def destination_model(
    base: BlockCovariance, dest_mean, dest_cov: SPDMatrix
) -> tuple[CMcModel, np.ndarray]:
    """Graft a destination density onto the recursion built from ``base``.

    Replaces the endpoint noise covariance G_N with ``dest_cov`` and
    treats ``dest_mean`` as the mean of e_N; transitions, couplings, the
    endpoint coupling G_{0,N} and G_0 all come from ``base`` unchanged.
    Returns the model together with the offset path it induces,
    offsets[k] = E[x_k], obtained by running the recursion on the means.
    """
    mean = np.asarray(dest_mean, dtype=float)
    if mean.shape != (base.d,):
        raise ShapeMismatch(f"dest_mean must have shape ({base.d},), got {mean.shape}")
    if dest_cov.dim != base.d:
        raise ShapeMismatch(f"dest_cov must be {base.d}x{base.d}, got dim {dest_cov.dim}")

    skeleton = construct_model(base, Boundary.LAST)
    noise = dict(skeleton.noise_covs)
    noise[skeleton.N] = dest_cov.entries
    model = CMcModel(
        Boundary.LAST,
        skeleton.N,
        skeleton.d,
        dict(skeleton.transitions),
        dict(skeleton.couplings),
        noise,
        skeleton.endpoint_coupling,
    )

    offsets = np.zeros((model.N + 1, model.d))
    offsets[model.N] = mean
    offsets[0] = model.endpoint_coupling @ offsets[model.N]
    for k in range(1, model.N):
        offsets[k] = model.transitions[k] @ offsets[k - 1] + model.couplings[k] @ offsets[model.N]
    return model, offsets


def generate_ensemble(
    model: CMcModel, offsets, seed: int, count: int
) -> tuple[TrajectoryBatch, EnsembleSummary]:
    """Simulate ``count`` trajectories with the given mean offsets applied.

    The recursion is linear, so adding the offset path to a zero-mean
    batch is exactly simulation with a nonzero-mean e_N. The summary keeps
    both the exact mean path and the ensemble estimates.
    """
    offs = np.asarray(offsets, dtype=float)
    if offs.shape != (model.N + 1, model.d):
        raise ShapeMismatch(
            f"offsets must have shape {(model.N + 1, model.d)}, got {offs.shape}"
        )
    batch = simulate(model, seed, count)
    states = batch.states + offs[np.newaxis]
    shifted = TrajectoryBatch(states=states, seed=batch.seed)

    emp_mean = states.mean(axis=0)
    if count > 1:
        centered = states - emp_mean
        emp_cov = np.einsum("rki,rkj->kij", centered, centered) / (count - 1)
    else:
        emp_cov = np.zeros((model.N + 1, model.d, model.d))
    summary = EnsembleSummary(
        count=count, seed=batch.seed, mean_path=offs, empirical_mean=emp_mean, empirical_cov=emp_cov
    )
    return shifted, summary


def render_ensemble_svg(summary: EnsembleSummary) -> bytes:
    """SVG plot of per-time ensemble mean with a 2-sigma envelope.

    One curve per state component. Output is byte-deterministic for a
    given summary: fixed hash salt, no embedded timestamps.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    steps, d = summary.empirical_mean.shape
    times = np.arange(steps)
    with plt.rc_context({"svg.hashsalt": "ensemble"}):
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        for i in range(d):
            mean = summary.empirical_mean[:, i]
            sigma = np.sqrt(summary.empirical_cov[:, i, i])
            line, = ax.plot(times, mean, marker="o", label=f"x_{i + 1}")
            ax.fill_between(times, mean - 2 * sigma, mean + 2 * sigma, alpha=0.2, color=line.get_color())
        ax.set_xlabel("k")
        ax.set_ylabel("state")
        ax.set_title(f"ensemble mean ± 2σ ({summary.count} realizations)")
        ax.legend(loc="best")
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()
