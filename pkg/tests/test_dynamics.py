import numpy as np
import pytest
from numpy.testing import assert_allclose

from lightatom import (
    GAMMA_NOISE,
    ParameterError,
    PassParams,
    Scheme,
    apply_linear_map,
    disentangled_p_variance,
    epr_variance,
    optimal_disentangle_coupling,
    protocol_states,
    rotate_quadratures,
    run_protocol,
    scattering_matrix,
    single_pass,
    switch_rotation_angles,
    symplectic_eigenvalues,
    vacuum,
)
from helpers import random_physical_state


def test_scattering_matrix_entries():
    s = scattering_matrix(0.5)
    expected = np.eye(4)
    expected[0, 3] = 0.5
    expected[2, 1] = 0.5
    assert_allclose(s, expected)
    assert_allclose(scattering_matrix(0.0), np.eye(4))


def test_group_property_exact():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b = rng.uniform(-2.0, 2.0, size=2)
        product = scattering_matrix(a) @ scattering_matrix(b)
        assert np.array_equal(product, scattering_matrix(a + b))
    assert np.array_equal(
        scattering_matrix(0.3) @ scattering_matrix(0.2), scattering_matrix(0.5)
    )


def test_single_pass_lossless():
    expected = np.array(
        [
            [2.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 2.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
        ]
    )
    assert_allclose(single_pass(vacuum(), 1.0, 0.0, 0.0), expected)


def test_single_pass_transposed():
    expected = np.array(
        [
            [1.0, 0.0, 0.0, 1.0],
            [0.0, 2.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 2.0],
        ]
    )
    assert_allclose(single_pass(vacuum(), 1.0, 0.0, 0.0, transposed=True), expected)


def test_single_pass_full_decay_leaves_noise():
    rng = np.random.default_rng(12)
    gamma = random_physical_state(rng)
    out = single_pass(gamma, 0.7, 1.0 - 1e-12, 1.0 - 1e-12)
    assert_allclose(out, GAMMA_NOISE, atol=1e-9)


def test_single_pass_rejects_bad_loss():
    with pytest.raises(ParameterError):
        single_pass(vacuum(), 1.0, -0.1, 0.0)
    with pytest.raises(ParameterError):
        single_pass(vacuum(), 1.0, 0.0, 1.0)


def test_pass_params_validation():
    with pytest.raises(ParameterError):
        PassParams(kappa=-1.0, eta=0.0)
    with pytest.raises(ParameterError):
        PassParams(kappa=1.0, eta=0.5, epsilon=0.6, r=0.5)
    params = PassParams.from_optical_density(25.0, 0.04)
    assert params.kappa == pytest.approx(1.0)
    assert params.zeta == 0.0


def test_run_protocol_single_pass_case():
    state = run_protocol(1, PassParams(kappa=1.0, eta=0.0), Scheme.UNSWITCHED)
    assert state.pass_count == 1
    assert_allclose(state.gamma, single_pass(vacuum(), 1.0, 0.0, 0.0))


def test_coupling_decay_per_pass():
    # second pass must run at kappa * sqrt((1-eta)(1-zeta))
    params = PassParams(kappa=1.0, eta=0.1, epsilon=0.01)
    states = list(protocol_states(2, params, Scheme.UNSWITCHED))
    kappa2 = np.sqrt(0.9 * 0.99)
    assert kappa2 == pytest.approx(0.94393, abs=1e-5)
    by_hand = single_pass(
        single_pass(vacuum(), 1.0, 0.1, 0.01), kappa2, 0.1, 0.01
    )
    assert_allclose(states[-1].gamma, by_hand, atol=1e-14)
    assert states[-1].jx_factor == pytest.approx(0.9**2)
    assert states[-1].sx_factor == pytest.approx(0.99**2)


def test_lossless_collapse_to_single_big_pass():
    for kappa in (0.05, 0.2, 1.0):
        for n in (1, 2, 5, 13, 20):
            state = run_protocol(n, PassParams(kappa=kappa, eta=0.0))
            expected = apply_linear_map(vacuum(), scattering_matrix(n * kappa))
            assert np.max(np.abs(state.gamma - expected)) <= 1e-12


def test_switched_scheme_transposes_even_passes():
    params = PassParams(kappa=0.8, eta=0.0)
    state = run_protocol(2, params, Scheme.SWITCHED)
    m2 = scattering_matrix(0.8).T
    expected = apply_linear_map(apply_linear_map(vacuum(), scattering_matrix(0.8)), m2)
    assert_allclose(state.gamma, expected, atol=1e-14)


def test_physicality_through_random_protocols():
    rng = np.random.default_rng(13)
    schemes = list(Scheme)
    for _ in range(150):
        params = PassParams(
            kappa=rng.uniform(0.0, 1.5),
            eta=rng.uniform(0.0, 0.3),
            epsilon=rng.uniform(0.0, 0.3),
        )
        scheme = schemes[int(rng.integers(0, len(schemes)))]
        n = int(rng.integers(1, 15))
        for state in protocol_states(n, params, scheme):
            assert symplectic_eigenvalues(state.gamma)[1] >= 1.0 - 1e-9


def test_unswitched_epr_floor():
    for kappa in (0.05, 0.2, 1.0):
        for n in range(1, 21):
            state = run_protocol(n, PassParams(kappa=kappa, eta=0.0))
            value = epr_variance(state.gamma)
            expected = (1.0 + (1.0 - n * kappa) ** 2) / 2.0
            assert value == pytest.approx(expected, abs=1e-12)
            assert value >= 0.5 - 1e-12


def test_disentangled_variance_formula():
    assert disentangled_p_variance(3, 0.0) == 1.0
    assert disentangled_p_variance(4, np.sqrt(3.5) / 4.0) == pytest.approx(
        0.234375, abs=1e-12
    )
    assert disentangled_p_variance(2, np.sqrt(1.5) / 2.0) == pytest.approx(
        0.4375, abs=1e-12
    )


def test_optimal_disentangle_coupling_values():
    assert optimal_disentangle_coupling(2) == pytest.approx(np.sqrt(1.5) / 2.0)
    n = 7
    kappa0 = optimal_disentangle_coupling(n)
    assert disentangled_p_variance(n, kappa0) == pytest.approx(
        1.0 / n - 1.0 / (4.0 * n * n), abs=1e-12
    )


def test_lossless_decoupling_run_matches_formula():
    for n in (1, 2, 5, 12, 30, 50):
        kappa0 = optimal_disentangle_coupling(n)
        params = PassParams(kappa=kappa0, eta=0.0)
        state = run_protocol(n, params, Scheme.UNSWITCHED_THEN_DISENTANGLE)
        assert state.pass_count == n + 1
        assert state.gamma[1, 1] == pytest.approx(1.0 / n - 1.0 / (4 * n * n), abs=1e-9)
        # the decoupling pass squeezes a light quadrature at the same time
        assert state.gamma[3, 3] < 1.0
        assert state.gamma[3, 3] == pytest.approx(state.gamma[1, 1], abs=1e-9)


def test_decoupling_removes_correlations_at_decoupling_point():
    # with n kappa^2 = 1 - 1/n the final pass decouples light from atoms
    n = 5
    kappa = np.sqrt((n - 1.0) / n**2)
    state = run_protocol(n, PassParams(kappa=kappa, eta=0.0), Scheme.UNSWITCHED_THEN_DISENTANGLE)
    assert np.max(np.abs(state.gamma[:2, 2:])) <= 1e-12


def test_switch_rotation_equivalence():
    phi_at, phi_ph = switch_rotation_angles()
    rng = np.random.default_rng(14)
    gamma = random_physical_state(rng)
    direct = single_pass(gamma, 0.6, 0.0, 0.0, transposed=True)
    conjugated = rotate_quadratures(
        single_pass(rotate_quadratures(gamma, -phi_at, -phi_ph), 0.6, 0.0, 0.0),
        phi_at,
        phi_ph,
    )
    assert np.max(np.abs(direct - conjugated)) <= 1e-12


def test_run_protocol_rejects_bad_n():
    with pytest.raises(ParameterError):
        run_protocol(0, PassParams(kappa=1.0, eta=0.0))
