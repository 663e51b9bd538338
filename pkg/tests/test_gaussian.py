import numpy as np
import pytest
from numpy.testing import assert_allclose

from lightatom import (
    InvalidStateError,
    Mode,
    Quadrature,
    apply_linear_map,
    condition_on_quadrature,
    is_physical,
    rotate_quadratures,
    scattering_matrix,
    symplectic_eigenvalues,
    two_mode_squeezed,
    vacuum,
    validate_state,
)
from helpers import random_physical_state, random_symplectic


def test_apply_linear_map_identity():
    assert_allclose(apply_linear_map(vacuum(), np.eye(4)), np.eye(4))


def test_apply_linear_map_single_pass_matrix():
    expected = np.array(
        [
            [2.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 2.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
        ]
    )
    assert_allclose(apply_linear_map(vacuum(), scattering_matrix(1.0)), expected)


def test_symplectic_maps_preserve_physicality():
    rng = np.random.default_rng(101)
    for _ in range(200):
        gamma = random_physical_state(rng)
        out = apply_linear_map(gamma, random_symplectic(rng))
        assert np.max(np.abs(out - out.T)) <= 1e-12
        assert symplectic_eigenvalues(out)[1] >= 1.0 - 1e-9


def test_symplectic_eigenvalues_vacuum():
    assert_allclose(symplectic_eigenvalues(vacuum()), (1.0, 1.0))


def test_symplectic_eigenvalues_block_diagonal():
    nu = symplectic_eigenvalues(np.diag([2.0, 2.0, 1.0, 1.0]))
    assert_allclose(nu, (2.0, 1.0), atol=1e-12)


@pytest.mark.parametrize("r", [0.1, 0.7, 1.5])
def test_two_mode_squeezed_is_pure(r):
    nu = symplectic_eigenvalues(two_mode_squeezed(r))
    assert_allclose(nu, (1.0, 1.0), atol=1e-9)


def test_rotation_invariance_of_vacuum():
    rng = np.random.default_rng(3)
    for _ in range(10):
        phi_at, phi_ph = rng.uniform(-np.pi, np.pi, size=2)
        assert_allclose(rotate_quadratures(vacuum(), phi_at, phi_ph), vacuum(), atol=1e-15)


def test_zero_rotation_is_identity():
    gamma = random_physical_state(np.random.default_rng(4))
    assert_allclose(rotate_quadratures(gamma, 0.0, 0.0), gamma)


def test_rotation_preserves_symplectic_eigenvalues():
    rng = np.random.default_rng(5)
    for _ in range(100):
        gamma = random_physical_state(rng)
        before = symplectic_eigenvalues(gamma)
        after = symplectic_eigenvalues(
            rotate_quadratures(gamma, rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi, np.pi))
        )
        assert_allclose(after, before, atol=1e-10)


def test_condition_identity_leaves_partner_untouched():
    out = condition_on_quadrature(vacuum(), Mode.LIGHT, Quadrature.X)
    assert_allclose(out, np.eye(2))


def test_condition_qnd_example():
    gamma = apply_linear_map(vacuum(), scattering_matrix(1.0))
    out = condition_on_quadrature(gamma, Mode.LIGHT, Quadrature.X)
    assert_allclose(out, np.array([[2.0, 0.0], [0.0, 0.5]]), atol=1e-14)


def test_condition_never_increases_kept_variances():
    rng = np.random.default_rng(6)
    for _ in range(200):
        gamma = random_physical_state(rng)
        for mode in Mode:
            for quad in Quadrature:
                kept = condition_on_quadrature(gamma, mode, quad)
                block = gamma[mode.other.block, mode.other.block]
                assert kept[0, 0] <= block[0, 0] + 1e-12
                assert kept[1, 1] <= block[1, 1] + 1e-12


def test_condition_matches_regression_residual():
    # conditioning = linear regression onto the measured quadrature;
    # check against a sampled Gaussian ensemble
    rng = np.random.default_rng(7)
    gamma = random_physical_state(rng)
    n_samples = 400_000
    chol = np.linalg.cholesky(gamma / 2.0)
    samples = rng.standard_normal((n_samples, 4)) @ chol.T
    measured = samples[:, 2]  # light x
    kept = condition_on_quadrature(gamma, Mode.LIGHT, Quadrature.X)
    for i in (0, 1):
        target = samples[:, i]
        slope = np.dot(target, measured) / np.dot(measured, measured)
        residual = target - slope * measured
        sample_var = residual.var()
        se = sample_var * np.sqrt(2.0 / n_samples)
        assert abs(kept[i, i] / 2.0 - sample_var) < 4.0 * se


def test_condition_rejects_nonpositive_variance():
    gamma = vacuum()
    gamma[2, 2] = 0.0
    with pytest.raises(InvalidStateError):
        condition_on_quadrature(gamma, Mode.LIGHT, Quadrature.X)


def test_validate_state_rejects_asymmetric():
    gamma = vacuum()
    gamma[0, 1] = 1e-6
    with pytest.raises(InvalidStateError):
        validate_state(gamma)


def test_validate_state_rejects_unphysical():
    with pytest.raises(InvalidStateError):
        validate_state(np.diag([0.5, 0.5, 1.0, 1.0]))
    assert not is_physical(np.diag([0.5, 0.5, 1.0, 1.0]))
    assert is_physical(vacuum())
