import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from cmseq import (
    BlockCovariance,
    Boundary,
    DomainError,
    NotPositiveDefinite,
    SPDMatrix,
    ShapeMismatch,
    ar1_covariance,
    random_spd_covariance,
)


def test_boundary_time_index():
    assert Boundary.FIRST.time_index(5) == 0
    assert Boundary.LAST.time_index(5) == 5


def test_block_accessor_identity():
    cov = BlockCovariance(2, 2, SPDMatrix(np.eye(6)))
    assert_allclose(cov.block(1, 1), np.eye(2))
    assert_allclose(cov.block(0, 2), np.zeros((2, 2)))


def test_block_accessor_ar1():
    cov = ar1_covariance(2, 0.5)
    assert_allclose(cov.block(0, 2), [[0.25]])


def test_block_accessor_out_of_range():
    cov = ar1_covariance(2, 0.5)
    with pytest.raises(IndexError):
        cov.block(0, 3)
    with pytest.raises(IndexError):
        cov.block(-1, 0)


def test_blocks_reassemble_exactly():
    cov = random_spd_covariance(3, 2, seed=5)
    rebuilt = np.block([[cov.block(k1, k2) for k2 in range(4)] for k1 in range(4)])
    assert np.array_equal(rebuilt, cov.matrix.entries)


def test_block_symmetry_pairs():
    cov = random_spd_covariance(4, 2, seed=9)
    for k1 in range(5):
        for k2 in range(5):
            assert_allclose(cov.block(k1, k2), cov.block(k2, k1).T)


def test_ar1_independence_limit():
    assert_allclose(ar1_covariance(2, 0.0, 3.0).matrix.entries, 3.0 * np.eye(3))


def test_ar1_frozen_values():
    expected = [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]]
    assert_allclose(ar1_covariance(2, 0.5).matrix.entries, expected)
    assert_allclose(ar1_covariance(1, 0.9, 2.0).matrix.entries, [[2.0, 1.8], [1.8, 2.0]])


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_ar1_rejects_unit_correlation(rho):
    with pytest.raises(DomainError):
        ar1_covariance(3, rho)


@pytest.mark.parametrize("variance", [0.0, -1.0])
def test_ar1_rejects_bad_variance(variance):
    with pytest.raises(DomainError):
        ar1_covariance(3, 0.5, variance)


@given(st.integers(1, 12), st.floats(-0.99, 0.99), st.floats(0.01, 100.0))
def test_ar1_always_positive_definite(N, rho, variance):
    # construction runs the Cholesky pivot test, so surviving is the assertion
    cov = ar1_covariance(N, rho, variance)
    assert cov.dim == N + 1


def test_minimum_horizon():
    with pytest.raises(DomainError):
        BlockCovariance(0, 1, SPDMatrix(np.eye(1)))


def test_dimension_consistency():
    with pytest.raises(ShapeMismatch):
        BlockCovariance(2, 2, SPDMatrix(np.eye(5)))


def test_singular_covariance_rejected():
    with pytest.raises(NotPositiveDefinite):
        BlockCovariance(1, 1, SPDMatrix(np.ones((2, 2))))


def test_random_spd_covariance_reproducible():
    a = random_spd_covariance(3, 2, seed=1)
    b = random_spd_covariance(3, 2, seed=1)
    assert np.array_equal(a.matrix.entries, b.matrix.entries)
