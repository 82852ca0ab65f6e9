import numpy as np
import pytest
from numpy.testing import assert_allclose

from cmseq import (
    Boundary,
    CMcModel,
    ShapeMismatch,
    SPDMatrix,
    ar1_covariance,
    cm_oracle,
    construct_model,
    destination_model,
    generate_ensemble,
    implied_covariance,
    simulate,
)
from cmseq.trajectory import EnsembleSummary, render_ensemble_svg

BASE = ar1_covariance(2, 0.5)


def pinned_model(dest_mean=10.0, dest_var=1e-6):
    return destination_model(BASE, np.array([dest_mean]), SPDMatrix(np.array([[dest_var]])))


def test_noop_substitution_keeps_model():
    plain = construct_model(BASE, Boundary.LAST)
    grafted, offsets = destination_model(BASE, np.zeros(1), SPDMatrix(BASE.block(2, 2)))
    assert_allclose(offsets, np.zeros((3, 1)))
    assert np.array_equal(grafted.endpoint_coupling, plain.endpoint_coupling)
    for k in (0, 1, 2):
        assert np.array_equal(grafted.noise_covs[k], plain.noise_covs[k])
    # with no substitution and zero offsets the draws are bit-identical
    a, _ = generate_ensemble(grafted, np.zeros((3, 1)), seed=3, count=5)
    b = simulate(plain, seed=3, count=5)
    assert np.array_equal(a.states, b.states)


def test_offset_schedule_hand_propagated():
    _, offsets = pinned_model()
    assert_allclose(offsets, [[2.5], [5.0], [10.0]], atol=1e-12)


def test_tight_destination_pins_endpoint():
    model, offsets = destination_model(BASE, np.array([10.0]), SPDMatrix(np.array([[1e-4]])))
    batch, _ = generate_ensemble(model, offsets, seed=1, count=1000)
    spread = np.abs(batch.states[:, 2, 0] - 10.0).max()
    assert spread < 5e-2


def test_mean_path_is_exact_recursion():
    model, offsets = pinned_model()
    _, summary = generate_ensemble(model, offsets, seed=0, count=10)
    assert np.array_equal(summary.mean_path, offsets)
    # re-run the recursion on the means independently
    mu_n = offsets[2]
    mu_0 = model.endpoint_coupling @ mu_n
    mu_1 = model.transitions[1] @ mu_0 + model.couplings[1] @ mu_n
    assert_allclose(summary.mean_path, [mu_0, mu_1, mu_n])


def test_empirical_mean_near_propagated_value():
    model, offsets = pinned_model()
    _, summary = generate_ensemble(model, offsets, seed=2, count=20_000)
    # Var(x_1) ~ 0.75 under the pinned endpoint, 4 sigma / sqrt(M) bound
    assert abs(summary.empirical_mean[1, 0] - 5.0) < 4.0 * np.sqrt(0.75) / np.sqrt(20_000)


def test_zero_destination_mean_keeps_zero_means():
    model, offsets = destination_model(BASE, np.zeros(1), SPDMatrix(np.array([[0.5]])))
    _, summary = generate_ensemble(model, offsets, seed=4, count=20_000)
    sigma = np.sqrt(np.diagonal(implied_covariance(model).matrix.entries))
    bound = 4.0 * sigma / np.sqrt(20_000)
    assert np.all(np.abs(summary.empirical_mean[:, 0]) < bound)


def test_endpoint_covariance_matches_destination():
    model, offsets = destination_model(BASE, np.array([3.0]), SPDMatrix(np.array([[0.25]])))
    _, summary = generate_ensemble(model, offsets, seed=5, count=20_000)
    assert abs(summary.empirical_cov[2, 0, 0] - 0.25) < 0.02


def test_near_degenerate_noise_follows_mean_path():
    model, offsets = pinned_model()
    tiny = {k: 1e-12 * np.eye(1) for k in range(3)}
    ghost = CMcModel(
        Boundary.LAST, 2, 1,
        dict(model.transitions), dict(model.couplings), tiny, model.endpoint_coupling,
    )
    batch, _ = generate_ensemble(ghost, offsets, seed=6, count=1)
    assert np.max(np.abs(batch.states[0] - offsets)) < 1e-5


def test_conditional_markovity_preserved():
    model, _ = pinned_model(dest_mean=0.0, dest_var=0.3)
    assert cm_oracle(implied_covariance(model), Boundary.LAST).holds


def test_shape_validation():
    with pytest.raises(ShapeMismatch):
        destination_model(BASE, np.zeros(2), SPDMatrix(np.eye(1)))
    with pytest.raises(ShapeMismatch):
        destination_model(BASE, np.zeros(1), SPDMatrix(np.eye(2)))
    model, _ = pinned_model()
    with pytest.raises(ShapeMismatch):
        generate_ensemble(model, np.zeros((2, 1)), seed=0, count=1)


def test_summary_shape_validation():
    with pytest.raises(ShapeMismatch):
        EnsembleSummary(
            count=1, seed=0,
            mean_path=np.zeros((3, 1)),
            empirical_mean=np.zeros((2, 1)),
            empirical_cov=np.zeros((3, 1, 1)),
        )


def test_svg_rendering_deterministic():
    model, offsets = pinned_model()
    _, summary = generate_ensemble(model, offsets, seed=7, count=50)
    first = render_ensemble_svg(summary)
    second = render_ensemble_svg(summary)
    assert first == second
    assert first.startswith(b"<?xml")
