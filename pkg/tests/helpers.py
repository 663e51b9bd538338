"""Shared builders for randomized test states.

Kept independent of the library internals on purpose: random symplectics
and covariances are assembled here from first principles so they can act
as oracles for the package code.
"""

import numpy as np

OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def random_local_symplectic(rng: np.random.Generator, squeeze_scale: float = 0.6):
    """Random element of SL(2, R) as rotation * squeeze * rotation."""
    theta, phi = rng.uniform(-np.pi, np.pi, size=2)
    s = rng.normal(0.0, squeeze_scale)
    return rotation(theta) @ np.diag([np.exp(s), np.exp(-s)]) @ rotation(phi)


def tms_symplectic(r: float) -> np.ndarray:
    """Two-mode squeezing symplectic in (x1, p1, x2, p2) ordering."""
    c, s = np.cosh(r), np.sinh(r)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def random_symplectic(rng: np.random.Generator) -> np.ndarray:
    """Random two-mode symplectic: locals, a squeezer, locals again."""
    m = np.zeros((4, 4))
    m[:2, :2] = random_local_symplectic(rng)
    m[2:, 2:] = random_local_symplectic(rng)
    out = m @ tms_symplectic(rng.normal(0.0, 0.5))
    m2 = np.zeros((4, 4))
    m2[:2, :2] = random_local_symplectic(rng)
    m2[2:, 2:] = random_local_symplectic(rng)
    return out @ m2


def random_physical_state(rng: np.random.Generator, noise_scale: float = 0.5):
    """Random physical covariance: M M^T plus non-negative diagonal noise."""
    m = random_symplectic(rng)
    noise = rng.uniform(0.0, noise_scale, size=4)
    return m @ m.T + np.diag(noise)


def is_symplectic(m: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.allclose(m @ OMEGA @ m.T, OMEGA, atol=tol))
