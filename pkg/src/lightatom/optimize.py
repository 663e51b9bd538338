"""Scalar optimizations of the protocol parameters.

Every figure of merit trades coupling strength against accumulated loss
noise, so for each pass count there is an optimal depumping probability
eta (equivalently an optimal coupling kappa = sqrt(alpha0 * eta)) and,
for the decoupling protocols, an optimal decoupling strength.  The
searches are one-dimensional golden-section minimizations backed by a
coarse-grid cross-check, since unimodality is assumed rather than proven.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import sqrt
from typing import Callable

from .dynamics import PassParams, Scheme, run_protocol
from .errors import ParameterError
from .gaussian import Matrix, Mode, Quadrature, condition_on_quadrature
from .measures import epr_variance, geof, squeezing

GOLDEN_RATIO = (1.0 + sqrt(5.0)) / 2.0
ETA_BRACKET = (1e-6, 0.5)
ETA_TOL = 1e-7
GRID_POINTS = 64
#: an optimum closer than this to a bracket end is flagged as untrusted
EDGE_MARGIN = 1e-5


class Objective(Enum):
    MAXIMIZE_GEOF = "geof"
    MINIMIZE_EPR = "epr"
    MINIMIZE_ATOMIC_P = "atomic-p"
    MINIMIZE_LIGHT_X = "light-x"

    @property
    def maximize(self) -> bool:
        return self is Objective.MAXIMIZE_GEOF


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a one-dimensional parameter search.

    ``at_bracket_edge`` flags an optimum sitting at either end of the
    search interval, where the true optimum may lie outside it.
    """

    eta_star: float
    kappa_star: float
    value: float
    evaluations: int
    at_bracket_edge: bool


def golden_section_minimize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    cache: dict[float, float] | None = None,
) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal f on [lo, hi].

    Returns (x_min, f(x_min)).  ``cache`` maps already-evaluated points to
    their values and is updated in place, so repeated probes are free.
    """
    if cache is None:
        cache = {}

    def eval_cached(x: float) -> float:
        if x not in cache:
            cache[x] = f(x)
        return cache[x]

    a, b = lo, hi
    c = b - (b - a) / GOLDEN_RATIO
    d = a + (b - a) / GOLDEN_RATIO
    while abs(b - a) > tol:
        if eval_cached(c) < eval_cached(d):
            b = d
        else:
            a = c
        c = b - (b - a) / GOLDEN_RATIO
        d = a + (b - a) / GOLDEN_RATIO
    x = (a + b) / 2.0
    return x, eval_cached(x)


@dataclass(frozen=True)
class CrudeSinglePassModel:
    """Analytic single-pass estimate of conditional atomic squeezing.

    For one pass at optical density alpha0 the squeezing reachable by
    detecting the light scales like delta(eta) = 1/(alpha0 eta) + 2 eta
    once the coupling term dominates: the first term is the measurement
    back-action gain, the second the depumping noise.  Its exact minimum
    sits at eta0 = 1/sqrt(2 alpha0) with value delta_min = 2 sqrt(2/alpha0).
    """

    alpha0: float
    eta0: float
    delta_min: float

    def delta(self, eta: float) -> float:
        return 1.0 / (self.alpha0 * eta) + 2.0 * eta


def crude_single_pass(alpha0: float) -> CrudeSinglePassModel:
    """Analytic optimum of the crude single-pass squeezing estimate."""
    if alpha0 <= 0.0:
        raise ParameterError(f"optical density must be positive, got {alpha0}")
    return CrudeSinglePassModel(
        alpha0=alpha0, eta0=1.0 / sqrt(2.0 * alpha0), delta_min=2.0 * sqrt(2.0 / alpha0)
    )


def crude_conditional_variance(eta: float, alpha0: float) -> float:
    """Small-eta model of the post-detection atomic variance,
    1/(1 + alpha0 eta) + 2 eta; equals 1 for a coherent state at eta = 0."""
    return 1.0 / (1.0 + alpha0 * eta) + 2.0 * eta


def conditional_atomic_p(gamma: Matrix) -> float:
    """Atomic p variance left after homodyne detection of the light x
    quadrature (the QND readout)."""
    kept = condition_on_quadrature(gamma, Mode.LIGHT, Quadrature.X)
    return float(kept[1, 1])


def evaluate_objective(
    n: int,
    params: PassParams,
    scheme: Scheme,
    objective: Objective,
    disentangle_kappa: float | None = None,
    geof_seed: int = 0,
) -> float:
    """Figure of merit of an n-pass run (sign as defined, not negated).

    Squeezing objectives read the unconditional variances after a
    decoupling pass, and the homodyne-conditioned ones otherwise.  The
    light variance reported is the quadrature the decoupling pass
    squeezes (p in the unrotated frame).
    """
    state = run_protocol(n, params, scheme, disentangle_kappa)
    if objective is Objective.MAXIMIZE_GEOF:
        return geof(state.gamma, seed=geof_seed)
    if objective is Objective.MINIMIZE_EPR:
        return epr_variance(state.gamma)
    if objective is Objective.MINIMIZE_ATOMIC_P:
        if scheme.disentangles:
            return squeezing(state.gamma, Mode.ATOMS, Quadrature.P)
        return conditional_atomic_p(state.gamma)
    if objective is Objective.MINIMIZE_LIGHT_X:
        return squeezing(state.gamma, Mode.LIGHT, Quadrature.P)
    raise ParameterError(f"unknown objective {objective}")


def optimize_eta(
    n: int,
    alpha0: float,
    r: float,
    scheme: Scheme,
    objective: Objective,
    geof_seed: int = 0,
    bracket: tuple[float, float] = ETA_BRACKET,
) -> OptimizationResult:
    """Best depumping probability eta for a given pass count.

    The coupling is tied to eta through kappa = sqrt(alpha0 * eta) and the
    light loss is fixed at zeta = r (absorption made negligible by large
    detuning).  Golden-section search over eta, cross-checked on a
    64-point grid: if some grid point beats the golden-section result the
    bracket around it is re-searched, guarding against non-unimodality.
    """
    if n < 1:
        raise ParameterError(f"need at least one pass, got n = {n}")
    if alpha0 <= 0.0:
        raise ParameterError(f"optical density must be positive, got {alpha0}")
    if not 0.0 <= r < 1.0:
        raise ParameterError(f"reflectivity must be in [0, 1), got {r}")
    lo, hi = bracket

    sign = -1.0 if objective.maximize else 1.0
    cache: dict[float, float] = {}

    def signed_value(eta: float) -> float:
        params = PassParams.from_optical_density(alpha0, eta, epsilon=0.0, r=r)
        return sign * evaluate_objective(
            n, params, scheme, objective, geof_seed=geof_seed
        )

    eta_star, f_star = golden_section_minimize(signed_value, lo, hi, ETA_TOL, cache)

    step = (hi - lo) / (GRID_POINTS - 1)
    grid = [lo + i * step for i in range(GRID_POINTS)]
    grid_values = []
    for eta in grid:
        if eta not in cache:
            cache[eta] = signed_value(eta)
        grid_values.append(cache[eta])
    i_best = min(range(GRID_POINTS), key=grid_values.__getitem__)
    if grid_values[i_best] < f_star - 1e-6:
        re_lo = grid[max(i_best - 1, 0)]
        re_hi = grid[min(i_best + 1, GRID_POINTS - 1)]
        eta_re, f_re = golden_section_minimize(signed_value, re_lo, re_hi, ETA_TOL, cache)
        if f_re < f_star:
            eta_star, f_star = eta_re, f_re

    return OptimizationResult(
        eta_star=eta_star,
        kappa_star=sqrt(alpha0 * eta_star),
        value=sign * f_star,
        evaluations=len(cache),
        at_bracket_edge=(eta_star - lo < EDGE_MARGIN or hi - eta_star < EDGE_MARGIN),
    )


def optimize_disentangle_kappa(
    n: int,
    eta: float = 0.0,
    epsilon: float = 0.0,
    r: float = 0.0,
    scheme: Scheme = Scheme.UNSWITCHED_THEN_DISENTANGLE,
    objective: Objective = Objective.MINIMIZE_ATOMIC_P,
    kappa_max: float = 1.5,
    tol: float = 1e-9,
) -> OptimizationResult:
    """Best shared coupling for an n-pass run ending in a decoupling pass.

    All n entangling passes and the final decoupling pass use the same
    coupling kappa, which is the experimentally tunable knob.  In the
    lossless case the atomic-p optimum is kappa = sqrt(n - 1/2) / n with
    residual variance 1/n - 1/(4 n^2).
    """
    if not scheme.disentangles:
        raise ParameterError("optimize_disentangle_kappa needs a disentangle scheme")
    if objective not in (Objective.MINIMIZE_ATOMIC_P, Objective.MINIMIZE_LIGHT_X):
        raise ParameterError("decoupling optimizes a squeezing objective")

    cache: dict[float, float] = {}

    def value_at(kappa: float) -> float:
        params = PassParams(kappa=kappa, eta=eta, epsilon=epsilon, r=r)
        return evaluate_objective(n, params, scheme, objective)

    kappa_star, value = golden_section_minimize(value_at, 0.0, kappa_max, tol, cache)
    return OptimizationResult(
        eta_star=eta,
        kappa_star=kappa_star,
        value=value,
        evaluations=len(cache),
        at_bracket_edge=(kappa_star < EDGE_MARGIN or kappa_max - kappa_star < EDGE_MARGIN),
    )
