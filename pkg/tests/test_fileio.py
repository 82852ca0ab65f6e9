import json
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cmseq import (
    Boundary,
    DomainError,
    ShapeMismatch,
    TrajectoryBatch,
    ar1_covariance,
    cm_oracle,
    classify,
    construct_model,
)
from cmseq import fileio

AR1 = ar1_covariance(2, 0.5)


class TestMatrixFormat:
    def test_round_trip(self):
        arr = np.array([[1.0, 2.0], [3.0, 4.0]])
        again = fileio.array_from_obj(fileio.matrix_obj(arr))
        assert np.array_equal(arr, again)

    def test_asymmetry_preserved(self):
        # model coefficient matrices must not be symmetrized on read
        arr = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(fileio.array_from_obj(fileio.matrix_obj(arr)), arr)

    def test_entry_count_checked(self):
        with pytest.raises(ShapeMismatch):
            fileio.array_from_obj({"dim": 2, "entries": [1.0, 2.0, 3.0]})

    def test_dim_checked(self):
        with pytest.raises(DomainError):
            fileio.array_from_obj({"dim": 0, "entries": []})
        with pytest.raises(DomainError):
            fileio.array_from_obj({"dim": 1.5, "entries": [1.0, 0.0]})

    def test_missing_keys(self):
        with pytest.raises(DomainError):
            fileio.array_from_obj({"entries": [1.0]})

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            fileio.array_from_obj({"dim": 1, "entries": [float("inf")]})


def test_nan_token_rejected_at_parse(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 1, "entries": [NaN]}')
    with pytest.raises(DomainError):
        fileio.read_json(str(path))


def test_covariance_file_round_trip(tmp_path):
    path = tmp_path / "cov.json"
    fileio.write_covariance(str(path), AR1)
    again = fileio.read_covariance(str(path))
    assert (again.N, again.d) == (2, 1)
    assert_allclose(again.matrix.entries, AR1.matrix.entries)


@pytest.mark.parametrize("boundary", list(Boundary))
def test_model_file_round_trip(tmp_path, boundary):
    model = construct_model(AR1, boundary)
    path = tmp_path / "model.json"
    fileio.write_model(str(path), model)
    again = fileio.read_model(str(path))
    assert again.boundary is boundary
    for k in model.interior_times:
        assert_allclose(again.transitions[k], model.transitions[k])
        assert_allclose(again.couplings[k], model.couplings[k])
    for k in range(model.N + 1):
        assert_allclose(again.noise_covs[k], model.noise_covs[k])
    if boundary is Boundary.LAST:
        assert_allclose(again.endpoint_coupling, model.endpoint_coupling)
    else:
        assert "endpoint_coupling" not in json.loads(path.read_text())


def test_model_obj_validation():
    with pytest.raises(DomainError):
        fileio.model_from_obj({"boundary": "middle", "N": 1, "d": 1})
    obj = fileio.model_obj(construct_model(AR1, Boundary.LAST))
    del obj["noise_covs"]
    with pytest.raises(DomainError):
        fileio.model_from_obj(obj)


def test_trajectories_csv_layout():
    batch = TrajectoryBatch(states=np.array([[[1.5], [2.5]], [[0.25], [-1.0]]]), seed=9)
    text = fileio.trajectories_csv(batch)
    assert text == (
        "realization,k,x_1\n"
        "0,0,1.5\n"
        "0,1,2.5\n"
        "1,0,0.25\n"
        "1,1,-1.0\n"
    )


def test_trajectories_csv_vector_header():
    batch = TrajectoryBatch(states=np.zeros((1, 2, 3)), seed=0)
    assert fileio.trajectories_csv(batch).splitlines()[0] == "realization,k,x_1,x_2,x_3"


def test_report_objects_carry_format_version():
    labels = fileio.labels_obj(classify(AR1))
    report = fileio.oracle_obj(cm_oracle(AR1, Boundary.LAST))
    assert labels["format_version"] == 1
    assert report["format_version"] == 1
    assert report["property"] == "cm_l"
    assert labels["labels"]["markov"] is True


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    path = tmp_path / "out.json"
    path.write_text("old")
    fileio.atomic_write_text(str(path), "new contents\n")
    assert path.read_text() == "new contents\n"
    assert [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")] == []


def test_dump_json_refuses_nan():
    with pytest.raises(ValueError):
        fileio.dump_json({"x": float("nan")})
