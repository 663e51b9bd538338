"""Mapping between laboratory quantities and the model parameters.

The dimensionless couplings of the pass dynamics derive from a handful
of lab numbers: the resonant cross-section sigma of the probed
transition, its natural linewidth Gamma (HWHM), the detuning Delta of
the probe, the illuminated sample cross-section A, and the atom and
photon numbers.  With the initial classical polarizations J_x = N_at/2
and S_x = N_ph/2,

    kappa   = sqrt(N_at N_ph) * sigma Gamma / (A Delta)
    eta     = N_ph * sigma Gamma^2 / (A Delta^2)
    epsilon = N_at * sigma Gamma^2 / (A Delta^2)
    alpha0  = N_at * sigma / A        (resonant optical density)

which satisfy kappa^2 = eta * alpha0 and epsilon = alpha0 (Gamma/Delta)^2
identically, and eta / epsilon = N_ph / N_at.  Only the ratio
Gamma/Delta enters, so any common frequency unit works.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import pi, sqrt

from .dynamics import PassParams
from .errors import ParameterError


@dataclass(frozen=True)
class ExperimentalSetup:
    """Laboratory quantities defining one experimental configuration.

    sigma       -- resonant atomic cross-section, cm^2
    gamma_hwhm  -- natural linewidth of the transition (HWHM), Hz
    detuning    -- probe detuning from resonance, Hz
    area        -- illuminated cross-section of the sample, cm^2
    n_atoms     -- atoms in the interaction volume
    n_photons   -- photons per pulse
    reflectivity -- total reflection loss per pass (mirrors, windows)
    """

    sigma: float
    gamma_hwhm: float
    detuning: float
    area: float
    n_atoms: float
    n_photons: float
    reflectivity: float = 0.0

    def __post_init__(self) -> None:
        for name in ("sigma", "gamma_hwhm", "detuning", "area", "n_atoms", "n_photons"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be positive")
        if not 0.0 <= self.reflectivity < 1.0:
            raise ParameterError("reflectivity must be in [0, 1)")
        if self.detuning < 10.0 * self.gamma_hwhm:
            warnings.warn(
                "detuning is less than 10 linewidths; the dispersive "
                "far-detuned description becomes questionable",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ModelParams:
    """Model parameters derived from an :class:`ExperimentalSetup`."""

    kappa: float
    eta: float
    epsilon: float
    r: float
    alpha0: float

    @property
    def eta_over_epsilon(self) -> float:
        return self.eta / self.epsilon

    @property
    def pass_params(self) -> PassParams:
        return PassParams(kappa=self.kappa, eta=self.eta, epsilon=self.epsilon, r=self.r)


def derive_model_params(setup: ExperimentalSetup) -> ModelParams:
    """Compute (kappa, eta, epsilon, r, alpha0) from laboratory numbers.

    The two dimensional identities kappa^2 = eta alpha0 and
    epsilon = alpha0 (Gamma/Delta)^2 are asserted to 1e-12 relative as an
    internal consistency check of the computed values.
    """
    ratio = setup.gamma_hwhm / setup.detuning
    depth = setup.sigma / setup.area
    alpha0 = setup.n_atoms * depth
    kappa = sqrt(setup.n_atoms * setup.n_photons) * depth * ratio
    eta = setup.n_photons * depth * ratio**2
    epsilon = setup.n_atoms * depth * ratio**2

    if abs(kappa**2 - eta * alpha0) > 1e-12 * kappa**2:
        raise ParameterError("internal inconsistency: kappa^2 != eta * alpha0")
    if abs(epsilon - alpha0 * ratio**2) > 1e-12 * epsilon:
        raise ParameterError("internal inconsistency: epsilon != alpha0 (Gamma/Delta)^2")
    expected_ratio = setup.n_photons / setup.n_atoms
    if abs(eta / epsilon - expected_ratio) > 1e-12 * expected_ratio:
        raise ParameterError("internal inconsistency: eta/epsilon != N_ph/N_at")

    return ModelParams(
        kappa=kappa, eta=eta, epsilon=epsilon, r=setup.reflectivity, alpha0=alpha0
    )


def photons_for_target_eta(setup: ExperimentalSetup, eta_target: float) -> int:
    """Photon number per pulse realizing a wanted depumping probability.

    Inverts eta = N_ph sigma Gamma^2 / (A Delta^2); the result is rounded
    to the nearest whole photon.  ``setup.n_photons`` is ignored.
    """
    if not 0.0 < eta_target <= 0.5:
        raise ParameterError(
            f"eta_target must be in (0, 0.5], got {eta_target}"
        )
    ratio = setup.gamma_hwhm / setup.detuning
    return round(eta_target * setup.area / (setup.sigma * ratio**2))


def rubidium_example(
    detuning: float = 2.8e8,
    n_photons: float = 1e7,
    reflectivity: float = 0.02,
) -> ExperimentalSetup:
    """A cold Rb-87 dipole-trap configuration with optical density ~25.

    2e6 atoms in a 100 um diameter cylinder probed on the D1 line
    (HWHM linewidth 2.5 MHz, resonant cross-section 1e-9 cm^2).  The
    default detuning of 280 MHz keeps absorption well below depumping and
    puts the photon budget for eta in [0.01, 0.1] into the 1e7 to 1e8
    decade.
    """
    diameter_cm = 100e-4
    return ExperimentalSetup(
        sigma=1e-9,
        gamma_hwhm=2.5e6,
        detuning=detuning,
        area=pi * (diameter_cm / 2.0) ** 2,
        n_atoms=2e6,
        n_photons=n_photons,
        reflectivity=reflectivity,
    )
