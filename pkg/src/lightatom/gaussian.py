"""Covariance-matrix toolbox for the joint atom + light Gaussian state.

The state of the collective atomic spin mode and the light polarization
mode is a zero-mean Gaussian, fully described by a real symmetric 4x4
covariance matrix gamma over the quadrature vector
(x_at, p_at, x_ph, p_ph).  The normalization puts the joint vacuum /
coherent state at gamma = identity, so Var(q) = gamma_qq / 2 and a
diagonal entry of 1 means "at the coherent-state level".

All operations are pure functions: they never mutate their inputs and
return freshly allocated, re-symmetrized matrices.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidStateError, NumericalFailureError

Matrix = NDArray[np.float64]

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9
#: variances below this are treated as exactly zero when pseudo-inverting
#: the measured block of a homodyne conditioning step
PINV_ZERO_TOL = 1e-12

#: symplectic form for two modes in (x1, p1, x2, p2) ordering
OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


class Mode(Enum):
    """Which of the two oscillator modes a row/column pair belongs to."""

    ATOMS = 0
    LIGHT = 1

    @property
    def block(self) -> slice:
        """Row/column slice of this mode's 2x2 block."""
        return slice(2 * self.value, 2 * self.value + 2)

    @property
    def other(self) -> "Mode":
        return Mode.LIGHT if self is Mode.ATOMS else Mode.ATOMS


class Quadrature(Enum):
    X = 0
    P = 1


def vacuum() -> Matrix:
    """Covariance of the joint coherent/vacuum input state."""
    return np.eye(4)


def symmetrize(gamma: Matrix) -> Matrix:
    """Return (gamma + gamma.T) / 2, suppressing round-off asymmetry."""
    return (gamma + gamma.T) / 2.0


def apply_linear_map(gamma: Matrix, m: Matrix) -> Matrix:
    """Propagate a covariance matrix through a linear quadrature map.

    For a (noiseless) map R -> M R of the quadrature vector the
    covariance transforms as the congruence M gamma M^T.  The result is
    re-symmetrized to keep floating-point drift out of later steps.
    """
    return symmetrize(m @ gamma @ m.T)


def symplectic_eigenvalues(gamma: Matrix) -> tuple[float, float]:
    """Symplectic spectrum (nu_1, nu_2) with nu_1 >= nu_2 >= 0.

    The symplectic eigenvalues are the moduli of the eigenvalues of
    i * Omega * gamma; each appears twice in the ordinary spectrum and is
    reported once here.  Physical states have nu >= 1, pure states nu = 1.
    """
    try:
        eigs = np.linalg.eigvals(OMEGA @ gamma)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolve failed: {exc}") from exc
    mods = np.sort(np.abs(eigs))
    # pairs (mods[0], mods[1]) and (mods[2], mods[3]) are degenerate copies
    return (mods[2] + mods[3]) / 2.0, (mods[0] + mods[1]) / 2.0


def is_physical(gamma: Matrix, tol: float = PHYSICALITY_TOL) -> bool:
    """Whether gamma is a valid quantum covariance matrix (nu_min >= 1 - tol)."""
    if not np.all(np.abs(gamma - gamma.T) <= SYMMETRY_TOL):
        return False
    return symplectic_eigenvalues(gamma)[1] >= 1.0 - tol


def validate_state(gamma: Matrix, tol: float = PHYSICALITY_TOL) -> None:
    """Raise :class:`InvalidStateError` unless gamma is a physical state."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 matrix, got shape {gamma.shape}")
    if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL:
        raise InvalidStateError("covariance matrix is not symmetric")
    if np.any(np.linalg.eigvalsh(gamma) <= 0.0):
        raise InvalidStateError("covariance matrix is not positive definite")
    nu_min = symplectic_eigenvalues(gamma)[1]
    if nu_min < 1.0 - tol:
        raise InvalidStateError(
            f"unphysical state: smallest symplectic eigenvalue {nu_min:.12g} < 1"
        )


def rotation2(phi: float) -> NDArray[np.float64]:
    """Single-mode quadrature rotation x -> cos(phi) x + sin(phi) p."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def mode_rotation(phi_at: float, phi_ph: float) -> Matrix:
    """Block-diagonal rotation R(phi_at) (+) R(phi_ph) on the full state."""
    out = np.zeros((4, 4))
    out[:2, :2] = rotation2(phi_at)
    out[2:, 2:] = rotation2(phi_ph)
    return out


def rotate_quadratures(gamma: Matrix, phi_at: float, phi_ph: float) -> Matrix:
    """Apply independent quadrature rotations to the atomic and light modes."""
    return apply_linear_map(gamma, mode_rotation(phi_at, phi_ph))


def condition_on_quadrature(gamma: Matrix, mode: Mode, quad: Quadrature) -> Matrix:
    """Covariance of the kept mode after homodyne detection of one quadrature.

    Detecting quadrature ``quad`` of ``mode`` projects the Gaussian state;
    the remaining mode's covariance is the Schur complement
    A - C (pi B pi)^+ C^T, where A is the kept block, B the measured block,
    C their coupling and pi the projector onto the measured quadrature.
    For Gaussian states this is independent of the measurement outcome.

    Returns the kept mode's 2x2 covariance.
    """
    gamma = np.asarray(gamma, dtype=float)
    kept = mode.other
    a = gamma[kept.block, kept.block]
    b = gamma[mode.block, mode.block]
    c = gamma[kept.block, mode.block]

    variance = b[quad.value, quad.value]
    if variance <= 0.0:
        raise InvalidStateError(
            f"measured quadrature variance {variance:.6g} is not positive"
        )
    if variance <= PINV_ZERO_TOL:
        # the measured quadrature carries no noise: pseudoinverse is zero
        return symmetrize(a.copy())
    column = c[:, quad.value]
    return symmetrize(a - np.outer(column, column) / variance)


def two_mode_squeezed(r: float) -> Matrix:
    """Covariance of the ideal two-mode squeezed state with parameter r.

    Correlations are oriented so that x1 - x2 and p1 + p2 are squeezed to
    e^(-2r) of the coherent level.
    """
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )
