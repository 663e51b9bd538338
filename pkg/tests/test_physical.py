import warnings

import numpy as np
import pytest

from lightatom import (
    ExperimentalSetup,
    ParameterError,
    derive_model_params,
    photons_for_target_eta,
    rubidium_example,
)


def test_rubidium_optical_density():
    model = derive_model_params(rubidium_example())
    assert 24.0 <= model.alpha0 <= 27.0
    assert model.alpha0 == pytest.approx(2e6 * 1e-9 / (np.pi * (50e-4) ** 2), rel=1e-12)


def test_coupling_identity_holds_exactly():
    rng = np.random.default_rng(31)
    for _ in range(50):
        setup = ExperimentalSetup(
            sigma=rng.uniform(1e-10, 1e-8),
            gamma_hwhm=rng.uniform(1e6, 1e7),
            detuning=rng.uniform(1e8, 1e10),
            area=rng.uniform(1e-5, 1e-3),
            n_atoms=rng.uniform(1e5, 1e8),
            n_photons=rng.uniform(1e6, 1e9),
        )
        model = derive_model_params(setup)
        assert model.kappa**2 == pytest.approx(model.eta * model.alpha0, rel=1e-12)
        assert model.epsilon == pytest.approx(
            model.alpha0 * (setup.gamma_hwhm / setup.detuning) ** 2, rel=1e-12
        )
        assert model.eta_over_epsilon == pytest.approx(
            setup.n_photons / setup.n_atoms, rel=1e-12
        )


def test_alpha0_independent_of_photons_and_detuning():
    base = rubidium_example()
    a = derive_model_params(base).alpha0
    b = derive_model_params(rubidium_example(detuning=1e9, n_photons=3e8)).alpha0
    assert a == b


def test_photon_ratio_example():
    setup = rubidium_example(n_photons=1e7)
    model = derive_model_params(setup)
    assert model.eta_over_epsilon == pytest.approx(5.0, rel=1e-12)


def test_photons_for_target_eta_round_trip():
    setup = rubidium_example()
    for eta in (0.01, 0.05, 0.2):
        n_ph = photons_for_target_eta(setup, eta)
        recovered = derive_model_params(
            rubidium_example(n_photons=n_ph)
        ).eta
        assert recovered == pytest.approx(eta, rel=1e-6)


def test_photon_budget_decade():
    # a detuning exists for which the eta range [0.01, 0.1] maps onto
    # photon numbers spanning exactly the 1e7..1e8 decade
    base = rubidium_example()
    detuning = np.sqrt(1e7 * base.sigma * base.gamma_hwhm**2 / (base.area * 0.01))
    setup = rubidium_example(detuning=detuning)
    assert detuning > 1e8  # somewhat above 100 MHz
    for eta in (0.01, 0.02, 0.05, 0.1):
        n_ph = photons_for_target_eta(setup, eta)
        assert 1e7 * (1 - 1e-9) <= n_ph <= 1e8 * (1 + 1e-9)


def test_photons_rejects_bad_target():
    with pytest.raises(ParameterError):
        photons_for_target_eta(rubidium_example(), 0.0)
    with pytest.raises(ParameterError):
        photons_for_target_eta(rubidium_example(), 0.7)


def test_setup_validation():
    with pytest.raises(ParameterError):
        rubidium_example(n_photons=-1.0)
    with pytest.raises(ParameterError):
        rubidium_example(reflectivity=1.0)


def test_small_detuning_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rubidium_example(detuning=1e7)  # four linewidths
    assert any("detuning" in str(w.message) for w in caught)


def test_pass_params_export():
    params = derive_model_params(rubidium_example()).pass_params
    assert params.zeta == pytest.approx(params.epsilon + 0.02)
