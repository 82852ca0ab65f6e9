"""File formats and atomic writers for every artifact the tools exchange.

Matrices travel as JSON objects {"dim": n, "entries": [row-major floats]},
covariances as {"N", "d", "matrix"}, models as a keyed collection of
matrices. Readers reject NaN/Inf; writers go through a temporary file and
an atomic rename so a failed run never leaves a partial artifact, and
never embed timestamps or host details.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .covariance import BlockCovariance, Boundary
from .errors import DomainError, ShapeMismatch
from .linalg import SPDMatrix
from .model import CMcModel, TrajectoryBatch
from .oracle import OracleReport
from .patterns import ClassLabels
from .trajectory import EnsembleSummary

__all__ = [
    "FORMAT_VERSION",
    "read_json",
    "dump_json",
    "atomic_write_text",
    "atomic_write_bytes",
    "matrix_obj",
    "array_from_obj",
    "spd_from_obj",
    "covariance_obj",
    "covariance_from_obj",
    "model_obj",
    "model_from_obj",
    "trajectories_csv",
    "labels_obj",
    "oracle_obj",
    "summary_obj",
    "read_covariance",
    "read_model",
    "read_spd_matrix",
    "write_covariance",
    "write_model",
]

FORMAT_VERSION = 1


def _reject_constant(token: str):
    raise DomainError(f"non-finite value {token!r} is not allowed in input files")


def read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh, parse_constant=_reject_constant)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _atomic_write(path: str, data, mode: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str, text: str) -> None:
    _atomic_write(path, text, "w")


def atomic_write_bytes(path: str, blob: bytes) -> None:
    _atomic_write(path, blob, "wb")


def _require(obj, key: str, context: str):
    if not isinstance(obj, dict):
        raise DomainError(f"{context} must be a JSON object, got {type(obj).__name__}")
    if key not in obj:
        raise DomainError(f"{context} is missing required key {key!r}")
    return obj[key]


def _require_int(obj, key: str, context: str) -> int:
    value = _require(obj, key, context)
    if not isinstance(value, int) or isinstance(value, bool):
        raise DomainError(f"{context}[{key!r}] must be an integer, got {value!r}")
    return value


def matrix_obj(arr: np.ndarray) -> dict:
    arr = np.asarray(arr, dtype=float)
    return {"dim": arr.shape[0], "entries": [float(v) for v in arr.ravel()]}


def array_from_obj(obj, context: str = "matrix") -> np.ndarray:
    """Square matrix from its JSON form, without symmetrizing.

    Model coefficient matrices are generally not symmetric, so the raw
    entries are preserved; covariance readers wrap the result in
    :class:`SPDMatrix` to get symmetrization and validation.
    """
    dim = _require_int(obj, "dim", context)
    entries = _require(obj, "entries", context)
    if dim < 1:
        raise DomainError(f"{context}['dim'] must be positive, got {dim}")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise ShapeMismatch(f"{context}['entries'] must hold {dim * dim} values")
    arr = np.array(entries, dtype=float).reshape(dim, dim)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{context} entries must be finite")
    return arr


def spd_from_obj(obj, context: str = "matrix") -> SPDMatrix:
    return SPDMatrix(array_from_obj(obj, context))


def covariance_obj(cov: BlockCovariance) -> dict:
    return {"N": cov.N, "d": cov.d, "matrix": matrix_obj(cov.matrix.entries)}


def covariance_from_obj(obj) -> BlockCovariance:
    N = _require_int(obj, "N", "covariance")
    d = _require_int(obj, "d", "covariance")
    return BlockCovariance(N, d, spd_from_obj(_require(obj, "matrix", "covariance"), "covariance matrix"))


def model_obj(model: CMcModel) -> dict:
    obj = {
        "boundary": model.boundary.value,
        "N": model.N,
        "d": model.d,
        "transitions": {str(k): matrix_obj(m) for k, m in sorted(model.transitions.items())},
        "couplings": {str(k): matrix_obj(m) for k, m in sorted(model.couplings.items())},
        "noise_covs": {str(k): matrix_obj(m) for k, m in sorted(model.noise_covs.items())},
    }
    if model.endpoint_coupling is not None:
        obj["endpoint_coupling"] = matrix_obj(model.endpoint_coupling)
    return obj


def _keyed_matrices(obj, key: str) -> dict[int, np.ndarray]:
    table = _require(obj, key, "model")
    if not isinstance(table, dict):
        raise DomainError(f"model[{key!r}] must be a JSON object")
    out = {}
    for k, mat in table.items():
        try:
            time = int(k)
        except ValueError:
            raise DomainError(f"model[{key!r}] key {k!r} is not a time index") from None
        out[time] = array_from_obj(mat, f"{key}[{k}]")
    return out


def model_from_obj(obj) -> CMcModel:
    try:
        boundary = Boundary(_require(obj, "boundary", "model"))
    except ValueError:
        raise DomainError(f"model['boundary'] must be 'first' or 'last', got {obj.get('boundary')!r}") from None
    endpoint = obj.get("endpoint_coupling") if isinstance(obj, dict) else None
    return CMcModel(
        boundary,
        _require_int(obj, "N", "model"),
        _require_int(obj, "d", "model"),
        _keyed_matrices(obj, "transitions"),
        _keyed_matrices(obj, "couplings"),
        _keyed_matrices(obj, "noise_covs"),
        array_from_obj(endpoint, "endpoint_coupling") if endpoint is not None else None,
    )


def trajectories_csv(batch: TrajectoryBatch) -> str:
    """CSV text with one row per (realization, time): realization,k,x_1..x_d."""
    d = batch.block_dim
    header = "realization,k," + ",".join(f"x_{i + 1}" for i in range(d))
    lines = [header]
    for r in range(batch.count):
        for k in range(batch.horizon + 1):
            values = ",".join(repr(float(v)) for v in batch.states[r, k])
            lines.append(f"{r},{k},{values}")
    return "\n".join(lines) + "\n"


def labels_obj(labels: ClassLabels) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "labels": labels.as_dict(),
        "violations": {
            name: {"magnitude": v.magnitude, "block": list(v.block) if v.block is not None else None}
            for name, v in sorted(labels.violations.items())
        },
        "tolerance_used": labels.tolerance_used,
    }


def oracle_obj(report: OracleReport) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "property": report.property,
        "holds": report.holds,
        "worst_violation": report.worst_violation,
        "witness": list(report.witness) if report.witness is not None else None,
        "tolerance": report.tolerance,
    }


def summary_obj(summary: EnsembleSummary) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "count": summary.count,
        "seed": summary.seed,
        "mean_path": summary.mean_path.tolist(),
        "empirical_mean": summary.empirical_mean.tolist(),
        "empirical_cov": summary.empirical_cov.tolist(),
    }


def read_covariance(path: str) -> BlockCovariance:
    return covariance_from_obj(read_json(path))


def read_model(path: str) -> CMcModel:
    return model_from_obj(read_json(path))


def read_spd_matrix(path: str) -> SPDMatrix:
    return spd_from_obj(read_json(path))


def write_covariance(path: str, cov: BlockCovariance) -> None:
    atomic_write_text(path, dump_json(covariance_obj(cov)))


def write_model(path: str, model: CMcModel) -> None:
    atomic_write_text(path, dump_json(model_obj(model)))
