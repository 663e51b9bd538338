"""Entanglement and squeezing figures of merit for two-mode Gaussian states.

Three quantities characterize the states the multipass protocols produce:

* the EPR variance, 1/2 [Var(x_at - p_ph) + Var(p_at - x_ph)], which is 1
  for coherent states and tends to 0 for a maximally entangled EPR pair;
* the Gaussian entanglement of formation (GEOF), the minimal entanglement
  entropy over pure two-mode Gaussian states gamma_p <= gamma;
* quadrature squeezing, simply the diagonal covariance entries relative
  to the coherent level.

Logarithmic negativity is included as an independent cross-check measure
(it is an entanglement monotone computed from the partial transpose, not
used by the protocols themselves).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2, sqrt

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidStateError, NumericalFailureError
from .gaussian import (
    Matrix,
    Mode,
    Quadrature,
    rotation2,
    symmetrize,
    symplectic_eigenvalues,
    two_mode_squeezed,
)

#: blocks closer to degeneracy than this cannot be brought to standard form
DEGENERACY_TOL = 1e-9
#: allowed violation of gamma - gamma_p >= 0 in the GEOF minimizer
GEOF_FEASIBILITY_SLACK = 1e-9
GEOF_RESTARTS = 8


def epr_variance(gamma: Matrix) -> float:
    """Combined EPR variance; 1 for coherent inputs, -> 0 for an EPR pair."""
    g = np.asarray(gamma, dtype=float)
    return 0.25 * (g[0, 0] + g[3, 3] - 2.0 * g[0, 3]) + 0.25 * (
        g[1, 1] + g[2, 2] - 2.0 * g[1, 2]
    )


def squeezing(gamma: Matrix, mode: Mode, quad: Quadrature) -> float:
    """Variance of one quadrature relative to the coherent level (= 1)."""
    i = 2 * mode.value + quad.value
    return float(np.asarray(gamma)[i, i])


def partial_transpose(gamma: Matrix) -> Matrix:
    """Covariance of the partially transposed state (light p negated)."""
    p = np.diag([1.0, 1.0, 1.0, -1.0])
    return p @ np.asarray(gamma, dtype=float) @ p


def log_negativity(gamma: Matrix) -> float:
    """Logarithmic negativity in bits: max(0, -log2 nu_tilde_min)."""
    nu_min = symplectic_eigenvalues(partial_transpose(gamma))[1]
    if nu_min <= 0.0:
        raise InvalidStateError("partial transpose has a zero symplectic eigenvalue")
    return max(0.0, -log2(nu_min))


@dataclass(frozen=True)
class StandardForm:
    """Two-mode covariance reduced by local symplectics.

    The reduced matrix is diag-block: A = diag(a, a), B = diag(b, b),
    C = diag(c_x, c_p) with the convention c_x >= |c_p| and the sign of
    c_p matching det C.  a, b, c_x, c_p are computed from the four local
    symplectic invariants det A, det B, det C, det gamma, all of which
    the reduction preserves.
    """

    a: float
    b: float
    c_x: float
    c_p: float


def standard_form(gamma: Matrix) -> StandardForm:
    """Reduce a two-mode covariance to its (a, b, c_x, c_p) standard form.

    The reduction diagonalizes each mode block by a rotation, equalizes
    its diagonal by a squeeze, and diagonalizes the coupling block by a
    final rotation pair (a singular value decomposition); all steps are
    local symplectics, so det A, det B, det C and det gamma survive.
    """
    g = symmetrize(np.asarray(gamma, dtype=float))
    det_a = float(np.linalg.det(g[:2, :2]))
    det_b = float(np.linalg.det(g[2:, 2:]))
    if det_a < 1.0 - DEGENERACY_TOL or det_b < 1.0 - DEGENERACY_TOL:
        raise InvalidStateError(
            f"degenerate mode block: det A = {det_a:.12g}, det B = {det_b:.12g}"
        )
    _, reduced = standard_form_transform(g)
    return StandardForm(
        a=(reduced[0, 0] + reduced[1, 1]) / 2.0,
        b=(reduced[2, 2] + reduced[3, 3]) / 2.0,
        c_x=reduced[0, 2],
        c_p=reduced[1, 3],
    )


def entanglement_from_epr_uncertainty(delta: float) -> float:
    """Entanglement (ebits) of the pure two-mode squeezed state with
    minimized EPR uncertainty delta = e^(-2r); zero for delta >= 1."""
    if delta >= 1.0:
        return 0.0
    if delta <= 0.0:
        raise InvalidStateError(f"EPR uncertainty must be positive, got {delta}")
    c_plus = (delta**-0.5 + delta**0.5) ** 2 / 4.0
    c_minus = (delta**-0.5 - delta**0.5) ** 2 / 4.0
    return c_plus * log2(c_plus) - c_minus * log2(c_minus)


def _tms_entropy(r: float) -> float:
    """Entanglement entropy (ebits) of a two-mode squeezed state."""
    c_minus = np.sinh(r) ** 2
    if c_minus < 1e-300:
        return 0.0
    c_plus = np.cosh(r) ** 2
    return c_plus * log2(c_plus) - c_minus * log2(c_minus)


def _minimized_epr_uncertainty(a: float, c_x: float, c_p: float) -> float:
    """Smallest EPR uncertainty reachable by local squeezing from the
    symmetric standard form (a, a, c_x, c_p)."""
    return sqrt(max(a - c_x, 0.0) * max(a + c_p, 0.0))


def geof_symmetric(gamma: Matrix, asymmetry_tol: float = 1e-6) -> float:
    """Closed-form GEOF for states whose standard form has a = b.

    For symmetric states the optimal pure state is the two-mode squeezed
    state matching the locally minimized EPR uncertainty, giving an exact
    expression.  Raises if the state is asymmetric beyond ``asymmetry_tol``.
    """
    sf = standard_form(gamma)
    if abs(sf.a - sf.b) > asymmetry_tol * max(sf.a, sf.b):
        raise InvalidStateError(
            f"closed form needs a symmetric state, got a = {sf.a:.6g}, b = {sf.b:.6g}"
        )
    a = (sf.a + sf.b) / 2.0
    return entanglement_from_epr_uncertainty(
        _minimized_epr_uncertainty(a, sf.c_x, sf.c_p)
    )


def _local_symplectic(theta: float, s: float, phi: float) -> np.ndarray:
    """Euler-form single-mode symplectic: rotation, squeeze, rotation."""
    return rotation2(theta) @ np.diag([np.exp(s), np.exp(-s)]) @ rotation2(phi)


def _pure_candidate(params: np.ndarray) -> Matrix:
    """Pure two-mode covariance from the 7-parameter family
    (r, theta_a, s_a, phi_a, theta_b, s_b, phi_b)."""
    r = abs(params[0])
    locals4 = np.zeros((4, 4))
    locals4[:2, :2] = _local_symplectic(*params[1:4])
    locals4[2:, 2:] = _local_symplectic(*params[4:7])
    return locals4 @ two_mode_squeezed(r) @ locals4.T


def _principal_rotation(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Proper rotation O with O block O^T diagonal; returns (O, eigenvalues)."""
    w, vecs = np.linalg.eigh(block)
    o = vecs.T.copy()
    if np.linalg.det(o) < 0.0:
        o[1] = -o[1]
    return o, w


def standard_form_transform(gamma: Matrix) -> tuple[Matrix, Matrix]:
    """Local symplectic T (block diagonal) with T gamma T^T in standard form.

    Returns (T, T gamma T^T).  The transformed matrix has blocks
    diag(a, a), diag(b, b) and diagonal coupling diag(c_x, c_p) with
    c_x >= |c_p|, matching :func:`standard_form` up to round-off.
    """
    g = symmetrize(np.asarray(gamma, dtype=float))
    t = np.zeros((4, 4))
    for lo in (0, 2):
        o, w = _principal_rotation(g[lo : lo + 2, lo : lo + 2])
        if np.any(w <= 0.0):
            raise InvalidStateError("mode block is not positive definite")
        squeeze = np.diag([(w[1] / w[0]) ** 0.25, (w[0] / w[1]) ** 0.25])
        t[lo : lo + 2, lo : lo + 2] = squeeze @ o
    c = t[:2, :2] @ g[:2, 2:] @ t[2:, 2:].T
    u, sv, vt = np.linalg.svd(c)
    if np.linalg.det(u) < 0.0:
        u[:, 1] = -u[:, 1]
        sv = np.array([sv[0], -sv[1]])
    if np.linalg.det(vt) < 0.0:
        vt[1, :] = -vt[1, :]
        sv = np.array([sv[0], -sv[1]])
    full = np.zeros((4, 4))
    full[:2, :2] = u.T @ t[:2, :2]
    full[2:, 2:] = vt @ t[2:, 2:]
    return full, symmetrize(full @ g @ full.T)


def _simplex_around(x0: np.ndarray, step: np.ndarray) -> np.ndarray:
    sim = np.tile(x0, (len(x0) + 1, 1))
    for k in range(len(x0)):
        sim[k + 1, k] += step[k]
    return sim


#: Nelder-Mead step sizes for (r, theta_a, s_a, phi_a, theta_b, s_b, phi_b)
_GEOF_STEPS = np.array([0.15, 0.3, 0.15, 0.3, 0.3, 0.15, 0.3])


def geof_numerical(
    gamma: Matrix,
    seed: int = 0,
    restarts: int = GEOF_RESTARTS,
    return_details: bool = False,
):
    """GEOF by direct minimization over pure states gamma_p <= gamma.

    The candidate pure states are two-mode squeezed states dressed with
    one local symplectic per mode (7 parameters: the squeezing plus an
    Euler triple per mode).  The state is first rotated to its standard
    form frame, which leaves the measure invariant and keeps the optimal
    local parameters of order one.  The positivity constraint
    gamma - gamma_p >= -slack enters as a linear penalty and the
    candidate's entanglement entropy is minimized with Nelder-Mead:
    first on the rotation-free slice (squeezed pair dressed with diagonal
    squeezers, which is where the optimum of a standard-form target
    lives), then from ``restarts`` seeded-random full-parameter starts
    plus one start at the closed form of the symmetrized state.  The
    incumbent is refined by alternating an exact bisection of the minimal
    feasible squeezing (locals held fixed) with a tight simplex polish.
    The running best over all feasible evaluations is returned, so the
    reported value never goes up as the search proceeds.
    """
    _, g = standard_form_transform(gamma)
    a = (g[0, 0] + g[1, 1]) / 2.0
    b = (g[2, 2] + g[3, 3]) / 2.0
    c_x, c_p = g[0, 2], g[1, 3]
    penalty_weight = 30.0

    best = np.inf
    best_params: np.ndarray | None = None
    history: list[float] = []
    evaluations = 0

    def objective(params: np.ndarray) -> float:
        nonlocal best, best_params, evaluations
        evaluations += 1
        value = _tms_entropy(abs(params[0]))
        lam_min = np.linalg.eigvalsh(g - _pure_candidate(params))[0]
        violation = -(lam_min + GEOF_FEASIBILITY_SLACK)
        if violation > 0.0:
            return value + penalty_weight * violation
        if value < best:
            best = value
            best_params = params.copy()
            history.append(best)
        return value

    def feasible(params: np.ndarray) -> bool:
        lam_min = np.linalg.eigvalsh(g - _pure_candidate(params))[0]
        return lam_min >= -GEOF_FEASIBILITY_SLACK

    def bisect_squeezing(params: np.ndarray) -> None:
        """Push r down to the feasibility boundary with locals fixed."""
        probe = params.copy()
        r_hi = abs(probe[0])
        probe[0] = 0.0
        if feasible(probe):
            objective(probe)
            return
        r_lo = 0.0
        while r_hi - r_lo > 1e-13 * (1.0 + r_hi):
            probe[0] = (r_hi + r_lo) / 2.0
            if feasible(probe):
                r_hi = probe[0]
            else:
                r_lo = probe[0]
        probe[0] = r_hi
        objective(probe)

    # seed at the symmetric closed form of the symmetrized state: the
    # matching squeezed pair, locally squeezed to meet the EPR-minimizing
    # frame of the target
    a_mean = sqrt(a * b)
    delta = _minimized_epr_uncertainty(a_mean, c_x, c_p)
    r_seed = max(-0.5 * np.log(delta), 0.0) if delta > 0.0 else 0.5
    s_seed = 0.0
    if a_mean - c_x > 0.0 and a_mean + c_p > 0.0:
        s_seed = 0.25 * np.log((a_mean - c_x) / (a_mean + c_p))

    # stage 1: rotation-free slice (r, s_a, s_b)
    def slice_objective(q: np.ndarray) -> float:
        return objective(np.array([q[0], 0.0, q[1], 0.0, 0.0, q[2], 0.0]))

    q0 = np.array([max(r_seed, 0.02), s_seed, s_seed])
    minimize(
        slice_objective,
        q0,
        method="Nelder-Mead",
        options={
            "xatol": 1e-8,
            "fatol": 1e-11,
            "maxfev": 400,
            "initial_simplex": _simplex_around(q0, np.array([0.15, 0.15, 0.15])),
        },
    )
    if best_params is not None:
        bisect_squeezing(best_params)

    # stage 2: full 7-parameter battery
    starts = [np.array([max(r_seed, 0.02), 0.0, s_seed, 0.0, 0.0, s_seed, 0.0])]
    if best_params is not None:
        starts.append(best_params.copy())
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        starts.append(
            np.concatenate(
                [
                    [abs(rng.normal(r_seed, 0.3 * r_seed + 0.2))],
                    rng.uniform(-np.pi, np.pi, size=1),
                    rng.normal(s_seed, 0.3, size=1),
                    rng.uniform(-np.pi, np.pi, size=1),
                    rng.uniform(-np.pi, np.pi, size=1),
                    rng.normal(s_seed, 0.3, size=1),
                    rng.uniform(-np.pi, np.pi, size=1),
                ]
            )
        )
    for i, x0 in enumerate(starts):
        minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "xatol": 1e-6,
                "fatol": 1e-9,
                "maxfev": 300 if i < 2 else 140,
                "initial_simplex": _simplex_around(x0, _GEOF_STEPS),
            },
        )

    # stage 3: alternate exact r bisection with a tight local polish
    for _ in range(3):
        if best_params is None:
            break
        previous = best
        bisect_squeezing(best_params)
        minimize(
            objective,
            best_params,
            method="Nelder-Mead",
            options={
                "xatol": 1e-8,
                "fatol": 1e-11,
                "maxfev": 250,
                "initial_simplex": _simplex_around(best_params, _GEOF_STEPS * 0.02),
            },
        )
        if previous - best < 1e-9:
            break

    if not np.isfinite(best):
        raise NumericalFailureError(
            "no feasible pure state found below the target covariance",
            best_bound=None,
        )
    value = max(float(best), 0.0)
    if return_details:
        return value, {
            "r": abs(float(best_params[0])),
            "params": best_params,
            "history": history,
            "evaluations": evaluations,
        }
    return value


def geof(gamma: Matrix, seed: int = 0, method: str = "auto") -> float:
    """Gaussian entanglement of formation in ebits.

    ``method`` selects the route: "closed" forces the symmetric closed
    form, "numerical" the minimizer, and "auto" (default) uses the closed
    form when the standard form is symmetric to within 1e-9 and the
    minimizer otherwise.
    """
    if method == "closed":
        return geof_symmetric(gamma)
    if method == "numerical":
        return geof_numerical(gamma, seed=seed)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    sf = standard_form(gamma)
    if abs(sf.a - sf.b) <= 1e-9 * max(sf.a, sf.b):
        return entanglement_from_epr_uncertainty(
            _minimized_epr_uncertainty((sf.a + sf.b) / 2.0, sf.c_x, sf.c_p)
        )
    return geof_numerical(gamma, seed=seed)
