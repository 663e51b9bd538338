"""Multipass dynamics of a light pulse crossing an atomic ensemble.

One lossless pass acts on the quadrature vector as the scattering matrix

    S(kappa) = [[1, 0, 0, kappa],
                [0, 1, 0, 0    ],
                [0, kappa, 1, 0],
                [0, 0, 0, 1    ]]

which adds each mode's p into the other's x and leaves both p's alone
(the QND signature).  S obeys the group law S(a) S(b) = S(a + b), so n
ideal passes with coupling kappa equal one pass with coupling n * kappa.

A real pass also depumps atoms with probability eta and loses a fraction
zeta = epsilon + r of the photons (absorption plus mirror/cell
reflection), which mixes in noise:

    gamma_out = Dbar M gamma_in M^T Dbar + D gamma_noise

with M = S(kappa) or S(kappa)^T, D = diag(eta, eta, zeta, zeta),
Dbar = sqrt(1 - D) and gamma_noise = diag(2, 2, 1, 1).  The doubled
atomic entry accounts for depumped atoms staying in the sample and
breaking collective correlations; the light entry is plain vacuum noise.

Pass-to-pass the classical polarizations decay, so pass m runs at the
reduced coupling kappa_m = [(1 - eta)(1 - zeta)]^((m-1)/2) * kappa (the
first pass sees the undecayed ensemble and pulse).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import sqrt
from typing import Iterator

import numpy as np

from .errors import ParameterError
from .gaussian import Matrix, rotation2, symmetrize, vacuum

#: noise covariance fed in by one lossy pass (atoms doubled, light vacuum)
GAMMA_NOISE = np.diag([2.0, 2.0, 1.0, 1.0])


def scattering_matrix(kappa: float) -> Matrix:
    """The single-pass quadrature map S(kappa)."""
    s = np.eye(4)
    s[0, 3] = kappa
    s[2, 1] = kappa
    return s


class Scheme(Enum):
    """Which multipass protocol variant to run.

    UNSWITCHED applies S(kappa) on every pass.  SWITCHED conjugates every
    second pass by polarization rotations, turning it into S(kappa)^T and
    the accumulated interaction into an effective two-mode squeezer.  The
    *_THEN_DISENTANGLE variants append one extra pass with S(-kappa_d)^T,
    which decouples light from atoms and leaves both unconditionally
    squeezed when kappa_d is tuned well.
    """

    UNSWITCHED = "unswitched"
    SWITCHED = "switched"
    UNSWITCHED_THEN_DISENTANGLE = "unswitched-disentangle"
    SWITCHED_THEN_DISENTANGLE = "switched-disentangle"

    @property
    def switched(self) -> bool:
        return self in (Scheme.SWITCHED, Scheme.SWITCHED_THEN_DISENTANGLE)

    @property
    def disentangles(self) -> bool:
        return self in (
            Scheme.UNSWITCHED_THEN_DISENTANGLE,
            Scheme.SWITCHED_THEN_DISENTANGLE,
        )

    @property
    def base(self) -> "Scheme":
        """The entangling-only scheme underlying a disentangle variant."""
        return Scheme.SWITCHED if self.switched else Scheme.UNSWITCHED


@dataclass(frozen=True)
class PassParams:
    """Per-pass physics: coupling and loss probabilities.

    kappa    -- dimensionless coupling strength of the first pass, >= 0
    eta      -- atomic depumping probability per pass, in [0, 1)
    epsilon  -- photon absorption probability per pass, in [0, 1)
    r        -- reflection loss per pass (mirrors, cell windows), in [0, 1)

    The total light loss per pass is zeta = epsilon + r.
    """

    kappa: float
    eta: float
    epsilon: float = 0.0
    r: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ParameterError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 <= self.eta < 1.0:
            raise ParameterError(f"eta must be in [0, 1), got {self.eta}")
        if self.epsilon < 0.0 or self.r < 0.0:
            raise ParameterError("loss probabilities must be non-negative")
        if self.zeta >= 1.0:
            raise ParameterError(
                f"total light loss zeta = epsilon + r = {self.zeta} must be < 1"
            )

    @property
    def zeta(self) -> float:
        return self.epsilon + self.r

    @classmethod
    def from_optical_density(
        cls, alpha0: float, eta: float, epsilon: float = 0.0, r: float = 0.0
    ) -> "PassParams":
        """Build parameters with the coupling tied to the optical density.

        kappa^2 = eta * alpha0 is an identity of the underlying physics:
        stronger coupling is bought with more spontaneous emission.
        """
        if alpha0 <= 0.0:
            raise ParameterError(f"optical density must be positive, got {alpha0}")
        params = cls(kappa=sqrt(alpha0 * eta), eta=eta, epsilon=epsilon, r=r)
        assert abs(params.kappa**2 - eta * alpha0) <= 1e-12 * max(1.0, eta * alpha0)
        return params


@dataclass(frozen=True)
class ProtocolState:
    """State of a protocol run after some number of passes.

    jx_factor and sx_factor track the decay of the classical atomic and
    light polarizations, (1 - eta)^n and (1 - zeta)^n after n passes; the
    coupling available to the *next* pass is kappa * sqrt(jx * sx).
    """

    gamma: Matrix
    pass_count: int
    jx_factor: float
    sx_factor: float

    @property
    def coupling_scale(self) -> float:
        return sqrt(self.jx_factor * self.sx_factor)


def single_pass(
    gamma: Matrix,
    kappa_eff: float,
    eta: float,
    zeta: float,
    transposed: bool = False,
) -> Matrix:
    """One pass of the pulse through the sample, with losses and noise.

    ``kappa_eff`` is the coupling actually seen on this pass (decay
    already applied; may be negative for the decoupling pass).  With
    ``transposed`` the pass acts as S(kappa_eff)^T, which is what the
    polarization-rotated geometry realizes.
    """
    if not 0.0 <= eta < 1.0:
        raise ParameterError(f"eta must be in [0, 1), got {eta}")
    if not 0.0 <= zeta < 1.0:
        raise ParameterError(f"zeta must be in [0, 1), got {zeta}")
    m = scattering_matrix(kappa_eff)
    if transposed:
        m = m.T
    damping = np.array([eta, eta, zeta, zeta])
    dbar = np.sqrt(1.0 - damping)
    coherent = (dbar[:, None] * dbar[None, :]) * (m @ gamma @ m.T)
    noise = damping * np.diag(GAMMA_NOISE)
    return symmetrize(coherent + np.diag(noise))


def protocol_states(
    n: int,
    params: PassParams,
    scheme: Scheme = Scheme.UNSWITCHED,
    disentangle_kappa: float | None = None,
) -> Iterator[ProtocolState]:
    """Yield the state after every pass of an n-pass protocol.

    Yields n states for the entangling schemes and n + 1 for the
    disentangle variants (the extra one after the decoupling pass).
    Switched schemes use the transposed scattering matrix on
    even-numbered passes.  The decoupling pass runs at coupling
    ``disentangle_kappa`` (defaulting to ``params.kappa``), subject to
    the same polarization decay and loss noise as any other pass.
    """
    if n < 1:
        raise ParameterError(f"need at least one pass, got n = {n}")
    eta, zeta = params.eta, params.zeta
    gamma = vacuum()
    jx, sx = 1.0, 1.0
    for m in range(1, n + 1):
        kappa_m = params.kappa * sqrt(jx * sx)
        gamma = single_pass(
            gamma, kappa_m, eta, zeta, transposed=scheme.switched and m % 2 == 0
        )
        jx *= 1.0 - eta
        sx *= 1.0 - zeta
        yield ProtocolState(gamma=gamma, pass_count=m, jx_factor=jx, sx_factor=sx)
    if scheme.disentangles:
        kappa_d = params.kappa if disentangle_kappa is None else disentangle_kappa
        gamma = single_pass(
            gamma, -kappa_d * sqrt(jx * sx), eta, zeta, transposed=True
        )
        jx *= 1.0 - eta
        sx *= 1.0 - zeta
        yield ProtocolState(gamma=gamma, pass_count=n + 1, jx_factor=jx, sx_factor=sx)


def run_protocol(
    n: int,
    params: PassParams,
    scheme: Scheme = Scheme.UNSWITCHED,
    disentangle_kappa: float | None = None,
) -> ProtocolState:
    """Run the full protocol and return the final state."""
    state = None
    for state in protocol_states(n, params, scheme, disentangle_kappa):
        pass
    assert state is not None
    return state


def disentangled_p_variance(n: int, kappa: float) -> float:
    """Lossless atomic p variance after n passes plus the decoupling pass.

    After n ideal passes at coupling kappa the extra S(-kappa)^T pass
    gives p_at_out = (1 - n kappa^2) p_at - kappa x_ph, hence a variance
    of (1 - n kappa^2)^2 + kappa^2 relative to the coherent level.
    Serves as the analytic oracle for the simulated lossless protocol.
    """
    if n < 1:
        raise ParameterError(f"need at least one pass, got n = {n}")
    if kappa < 0.0:
        raise ParameterError(f"kappa must be >= 0, got {kappa}")
    return (1.0 - n * kappa**2) ** 2 + kappa**2


def optimal_disentangle_coupling(n: int) -> float:
    """Coupling sqrt(n - 1/2) / n minimizing :func:`disentangled_p_variance`.

    At this value the residual variance is 1/n - 1/(4 n^2), marginally
    above the 1/(n + 1/2) a measurement-based QND protocol reaches with
    the same coupling.
    """
    if n < 1:
        raise ParameterError(f"need at least one pass, got n = {n}")
    return sqrt(n - 0.5) / n


def switch_rotation_angles() -> tuple[float, float]:
    """Quadrature rotation angles that turn a plain pass into a transposed one.

    Returns (phi_at, phi_ph) from {+pi/2, -pi/2}^2 such that conjugating
    S(kappa) with R(phi_at) (+) R(phi_ph) yields S(kappa)^T exactly; this
    is the rotation a quarter-wave plate plus a 90-degree change of the
    light propagation direction implements between passes.
    """
    s = scattering_matrix(1.0)
    half_pi = np.pi / 2.0
    for phi_at in (half_pi, -half_pi):
        for phi_ph in (half_pi, -half_pi):
            g = np.zeros((4, 4))
            g[:2, :2] = rotation2(phi_at)
            g[2:, 2:] = rotation2(phi_ph)
            if np.allclose(g @ s @ g.T, s.T, atol=1e-12):
                return phi_at, phi_ph
    raise AssertionError("no rotation pair reproduces the transposed pass")
