"""Experiment orchestration: parameter sweeps, figure data, check battery.

A sweep produces one :class:`SweepRecord` per pass count and objective,
each holding the optimized working point and the figures of merit there.
Records are written as flat CSV with a stable, documented column set;
metrics that are not computed for a given protocol variant are left
empty rather than filled with zeros.

The number of parallel workers is capped by the INTERFACE_SIM_THREADS
environment variable (0 means run sequentially); records are sorted
before writing, so the output does not depend on the execution order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dynamics import (
    PassParams,
    Scheme,
    optimal_disentangle_coupling,
    protocol_states,
    run_protocol,
    scattering_matrix,
    single_pass,
    switch_rotation_angles,
)
from .errors import ParameterError
from .gaussian import (
    Mode,
    Quadrature,
    apply_linear_map,
    condition_on_quadrature,
    mode_rotation,
    rotate_quadratures,
    symplectic_eigenvalues,
    vacuum,
)
from .gaussian import two_mode_squeezed
from .measures import epr_variance, geof, geof_symmetric, squeezing
from .optimize import (
    Objective,
    OptimizationResult,
    conditional_atomic_p,
    crude_single_pass,
    evaluate_objective,
    golden_section_minimize,
    optimize_disentangle_kappa,
    optimize_eta,
)
from .physical import derive_model_params, photons_for_target_eta, rubidium_example


class ConfigError(ParameterError):
    """A run configuration field failed validation."""

    def __init__(self, fld: str, message: str):
        super().__init__(f"config field '{fld}': {message}")
        self.field = fld


@dataclass(frozen=True)
class RunConfig:
    """Validated sweep configuration.

    ``eta = None`` optimizes the depumping per pass count; a fixed value
    skips the optimization.  ``reflectivity``/``scheme``/``objectives``
    left as None fall back to the per-figure presets.
    """

    alpha0: float = 25.0
    reflectivity: float | None = None
    scheme: Scheme | None = None
    n_min: int = 1
    n_max: int = 40
    objectives: tuple[Objective, ...] | None = None
    eta: float | None = None
    output_path: str = ""
    seed: int = 0

    def validate(self) -> None:
        if self.alpha0 <= 0.0:
            raise ConfigError("alpha0", f"must be positive, got {self.alpha0}")
        if self.reflectivity is not None and not 0.0 <= self.reflectivity < 1.0:
            raise ConfigError("r", f"must be in [0, 1), got {self.reflectivity}")
        if self.n_min < 1:
            raise ConfigError("n_min", f"must be >= 1, got {self.n_min}")
        if self.n_min > self.n_max:
            raise ConfigError(
                "n_max", f"must be >= n_min = {self.n_min}, got {self.n_max}"
            )
        if self.eta is not None and not 0.0 < self.eta < 1.0:
            raise ConfigError("eta", f"must be in (0, 1), got {self.eta}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed", f"must be a non-negative integer, got {self.seed!r}")


@dataclass(frozen=True)
class SweepRecord:
    """One row of figure data: the working point for one pass count."""

    figure: str
    scheme: Scheme
    r: float
    objective: Objective
    n: int
    eta_star: float
    kappa: float
    objective_value: float
    geof: float | None = None
    epr: float | None = None
    atomic_p_sq: float | None = None
    light_x_sq: float | None = None
    kappa0: float | None = None
    qnd_atomic_p: float | None = None
    at_bracket_edge: bool = False


CSV_COLUMNS = (
    "figure",
    "scheme",
    "r",
    "objective",
    "n",
    "eta_star",
    "kappa",
    "objective_value",
    "geof",
    "epr",
    "epr_db",
    "atomic_p_sq",
    "atomic_p_db",
    "light_x_sq",
    "light_x_db",
    "kappa0",
    "qnd_atomic_p",
    "qnd_atomic_p_db",
    "at_bracket_edge",
)


@dataclass(frozen=True)
class RecordTask:
    figure: str
    scheme: Scheme
    r: float
    objective: Objective
    n: int
    alpha0: float
    eta: float | None
    seed: int


def _record_seed(task: RecordTask) -> int:
    """Stable per-record seed, independent of execution order."""
    mix = np.random.SeedSequence(
        entropy=(
            task.seed,
            task.n,
            list(Objective).index(task.objective),
            list(Scheme).index(task.scheme),
            int(round(task.r * 1e12)),
        )
    )
    return int(mix.generate_state(1)[0])


def _decibel(value: float | None) -> float | None:
    if value is None or value <= 0.0:
        return None
    return -10.0 * math.log10(value)


def compute_record(task: RecordTask) -> SweepRecord:
    """Optimize (or fix) eta for one pass count and collect the metrics."""
    seed = _record_seed(task)
    if task.eta is None:
        result = optimize_eta(
            task.n, task.alpha0, task.r, task.scheme, task.objective, geof_seed=seed
        )
    else:
        params = PassParams.from_optical_density(
            task.alpha0, task.eta, epsilon=0.0, r=task.r
        )
        result = OptimizationResult(
            eta_star=task.eta,
            kappa_star=params.kappa,
            value=evaluate_objective(
                task.n, params, task.scheme, task.objective, geof_seed=seed
            ),
            evaluations=1,
            at_bracket_edge=False,
        )

    params = PassParams.from_optical_density(
        task.alpha0, result.eta_star, epsilon=0.0, r=task.r
    )
    state = run_protocol(task.n, params, task.scheme)
    epr = epr_variance(state.gamma)

    geof_val = atomic = light = kappa0 = qnd = None
    if task.scheme.disentangles:
        atomic = squeezing(state.gamma, Mode.ATOMS, Quadrature.P)
        light = squeezing(state.gamma, Mode.LIGHT, Quadrature.P)
        kappa0 = optimal_disentangle_coupling(task.n)
        reference = run_protocol(task.n, params, task.scheme.base)
        qnd = conditional_atomic_p(reference.gamma)
    else:
        geof_val = geof(state.gamma, seed=seed)
        atomic = conditional_atomic_p(state.gamma)

    return SweepRecord(
        figure=task.figure,
        scheme=task.scheme,
        r=task.r,
        objective=task.objective,
        n=task.n,
        eta_star=result.eta_star,
        kappa=result.kappa_star,
        objective_value=result.value,
        geof=geof_val,
        epr=epr,
        atomic_p_sq=atomic,
        light_x_sq=light,
        kappa0=kappa0,
        qnd_atomic_p=qnd,
        at_bracket_edge=result.at_bracket_edge,
    )


def _worker_count() -> int:
    raw = os.environ.get("INTERFACE_SIM_THREADS")
    available = os.cpu_count() or 1
    if raw is None:
        return available
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError("INTERFACE_SIM_THREADS", f"not an integer: {raw!r}") from exc
    if cap <= 0:
        return 1
    return min(cap, available)


def compute_records(tasks: Sequence[RecordTask]) -> list[SweepRecord]:
    """Evaluate tasks (in parallel when allowed) and sort by pass count."""
    workers = _worker_count()
    if workers <= 1 or len(tasks) <= 1:
        records = [compute_record(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(compute_record, tasks, chunksize=1))
    records.sort(key=lambda rec: (rec.n, rec.scheme.value, rec.r, rec.objective.value))
    return records


@dataclass(frozen=True)
class FigurePreset:
    schemes: tuple[Scheme, ...]
    r_values: tuple[float, ...]
    objectives: tuple[Objective, ...]


FIGURE_PRESETS: dict[str, FigurePreset] = {
    # entanglement growth without polarization rotations
    "1": FigurePreset(
        schemes=(Scheme.UNSWITCHED,),
        r_values=(0.0, 0.02),
        objectives=(Objective.MAXIMIZE_GEOF, Objective.MINIMIZE_EPR),
    ),
    # same with rotations in between the passes
    "2": FigurePreset(
        schemes=(Scheme.SWITCHED,),
        r_values=(0.0, 0.02),
        objectives=(Objective.MAXIMIZE_GEOF, Objective.MINIMIZE_EPR),
    ),
    # atomic squeezing after homodyne detection of the light
    "3": FigurePreset(
        schemes=(Scheme.UNSWITCHED, Scheme.SWITCHED),
        r_values=(0.02,),
        objectives=(Objective.MINIMIZE_ATOMIC_P,),
    ),
    # unconditional squeezing from a final decoupling pass
    "4": FigurePreset(
        schemes=(Scheme.UNSWITCHED_THEN_DISENTANGLE,),
        r_values=(0.02,),
        objectives=(Objective.MINIMIZE_ATOMIC_P, Objective.MINIMIZE_LIGHT_X),
    ),
}


def figure_tasks(which: str, config: RunConfig) -> list[RecordTask]:
    if which not in FIGURE_PRESETS:
        raise ConfigError("figure", f"must be one of 1-4, got {which!r}")
    config.validate()
    preset = FIGURE_PRESETS[which]
    schemes = (config.scheme,) if config.scheme is not None else preset.schemes
    r_values = (
        (config.reflectivity,) if config.reflectivity is not None else preset.r_values
    )
    objectives = config.objectives if config.objectives is not None else preset.objectives
    return [
        RecordTask(
            figure=f"fig{which}",
            scheme=scheme,
            r=r,
            objective=objective,
            n=n,
            alpha0=config.alpha0,
            eta=config.eta,
            seed=config.seed,
        )
        for scheme in schemes
        for r in r_values
        for objective in objectives
        for n in range(config.n_min, config.n_max + 1)
    ]


def run_figure(which: str | int, config: RunConfig | None = None) -> list[SweepRecord]:
    """Produce the sweep records behind one of the four standard figures."""
    return compute_records(figure_tasks(str(which), config or RunConfig()))


def run_sweep(config: RunConfig) -> list[SweepRecord]:
    """Free-form sweep: explicit scheme/objectives, single reflectivity."""
    config.validate()
    if config.scheme is None:
        raise ConfigError("scheme", "a sweep needs an explicit scheme")
    objectives = config.objectives or (Objective.MINIMIZE_EPR,)
    r = config.reflectivity if config.reflectivity is not None else 0.0
    tasks = [
        RecordTask(
            figure="sweep",
            scheme=config.scheme,
            r=r,
            objective=objective,
            n=n,
            alpha0=config.alpha0,
            eta=config.eta,
            seed=config.seed,
        )
        for objective in objectives
        for n in range(config.n_min, config.n_max + 1)
    ]
    return compute_records(tasks)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParameterError(f"refusing to write non-finite value {value}")
        return f"{value:.12g}"
    return str(value)


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    """Render records as CSV text with the documented stable columns."""
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        row = {
            "figure": rec.figure,
            "scheme": rec.scheme.value,
            "r": rec.r,
            "objective": rec.objective.value,
            "n": rec.n,
            "eta_star": rec.eta_star,
            "kappa": rec.kappa,
            "objective_value": rec.objective_value,
            "geof": rec.geof,
            "epr": rec.epr,
            "epr_db": _decibel(rec.epr),
            "atomic_p_sq": rec.atomic_p_sq,
            "atomic_p_db": _decibel(rec.atomic_p_sq),
            "light_x_sq": rec.light_x_sq,
            "light_x_db": _decibel(rec.light_x_sq),
            "kappa0": rec.kappa0,
            "qnd_atomic_p": rec.qnd_atomic_p,
            "qnd_atomic_p_db": _decibel(rec.qnd_atomic_p),
            "at_bracket_edge": rec.at_bracket_edge,
        }
        lines.append(",".join(_format_cell(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_records(records: Sequence[SweepRecord], path: str | Path) -> Path:
    """Write records to CSV; nothing is written if rendering fails."""
    text = records_to_csv(records)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# analytic check battery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class CheckReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(res.passed for res in self.results)

    def render(self) -> str:
        lines = []
        for res in self.results:
            status = "PASS" if res.passed else "FAIL"
            lines.append(f"{status} {res.name}: {res.detail}")
        verdict = "all checks passed" if self.all_passed else "CHECK FAILURES PRESENT"
        lines.append(f"== {verdict} ({sum(r.passed for r in self.results)}/"
                     f"{len(self.results)}) ==")
        return "\n".join(lines) + "\n"


def _check_group_property() -> CheckResult:
    rng = np.random.default_rng(20240)
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(-2.0, 2.0, size=2)
        diff = scattering_matrix(a) @ scattering_matrix(b) - scattering_matrix(a + b)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult(
        "scattering-group-property",
        worst == 0.0,
        f"max |S(a)S(b) - S(a+b)| = {worst:.3g} over 100 random pairs",
    )


def _check_lossless_collapse() -> CheckResult:
    worst = 0.0
    for kappa in (0.05, 0.2, 1.0):
        for n in range(1, 21):
            params = PassParams(kappa=kappa, eta=0.0)
            state = run_protocol(n, params, Scheme.UNSWITCHED)
            expected = apply_linear_map(vacuum(), scattering_matrix(n * kappa))
            worst = max(worst, float(np.max(np.abs(state.gamma - expected))))
    return CheckResult(
        "lossless-collapse",
        worst <= 1e-12,
        f"n passes vs single S(n kappa): max deviation {worst:.3g}",
    )


def _check_epr_floor() -> CheckResult:
    worst = 0.0
    floor_ok = True
    for kappa in (0.05, 0.2, 1.0):
        for n in range(1, 21):
            state = run_protocol(n, PassParams(kappa=kappa, eta=0.0))
            value = epr_variance(state.gamma)
            expected = (1.0 + (1.0 - n * kappa) ** 2) / 2.0
            worst = max(worst, abs(value - expected))
            floor_ok = floor_ok and value >= 0.5 - 1e-12
    state = run_protocol(5, PassParams(kappa=0.2, eta=0.0))
    at_unity = abs(epr_variance(state.gamma) - 0.5)
    ok = worst <= 1e-12 and floor_ok and at_unity <= 1e-12
    return CheckResult(
        "unswitched-epr-floor",
        ok,
        f"formula deviation {worst:.3g}, floor respected: {floor_ok}, "
        f"value at n*kappa = 1 off by {at_unity:.3g}",
    )


def _check_noise_model() -> CheckResult:
    # independent hand-coded single lossy pass; catches any drift in the
    # noise matrix or damping convention
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(25):
        kappa = rng.uniform(0.0, 1.5)
        eta = rng.uniform(0.0, 0.5)
        zeta = rng.uniform(0.0, 0.5)
        s = np.eye(4)
        s[0, 3] = kappa
        s[2, 1] = kappa
        d = np.diag([eta, eta, zeta, zeta])
        dbar = np.sqrt(np.eye(4) - d)
        expected = dbar @ s @ s.T @ dbar + d @ np.diag([2.0, 2.0, 1.0, 1.0])
        got = single_pass(vacuum(), kappa, eta, zeta)
        worst = max(worst, float(np.max(np.abs(got - expected))))
    return CheckResult(
        "single-pass-noise-model",
        worst <= 1e-12,
        f"lossy pass vs hand formula: max deviation {worst:.3g}",
    )


def _check_qnd_benchmark() -> CheckResult:
    worst = 0.0
    for n in range(1, 51):
        kappa = optimal_disentangle_coupling(n)
        state = run_protocol(n, PassParams(kappa=kappa, eta=0.0))
        value = conditional_atomic_p(state.gamma)
        worst = max(worst, abs(value - 1.0 / (n + 0.5)))
    return CheckResult(
        "qnd-benchmark",
        worst <= 1e-9,
        f"conditional atomic p vs 1/(n + 1/2): max deviation {worst:.3g}",
    )


def _check_disentangling() -> CheckResult:
    from .dynamics import disentangled_p_variance

    worst_formula = 0.0
    for n in (1, 2, 3, 5, 10, 25, 50):
        for kappa in np.linspace(0.0, 1.2, 13)[1:]:
            params = PassParams(kappa=float(kappa), eta=0.0)
            state = run_protocol(n, params, Scheme.UNSWITCHED_THEN_DISENTANGLE)
            value = squeezing(state.gamma, Mode.ATOMS, Quadrature.P)
            worst_formula = max(
                worst_formula, abs(value - disentangled_p_variance(n, float(kappa)))
            )
    worst_kappa = 0.0
    worst_value = 0.0
    light_ok = True
    for n in range(1, 51):
        result = optimize_disentangle_kappa(n)
        worst_kappa = max(worst_kappa, abs(result.kappa_star - optimal_disentangle_coupling(n)))
        worst_value = max(
            worst_value, abs(result.value - (1.0 / n - 1.0 / (4.0 * n**2)))
        )
        params = PassParams(kappa=optimal_disentangle_coupling(n), eta=0.0)
        state = run_protocol(n, params, Scheme.UNSWITCHED_THEN_DISENTANGLE)
        light_ok = light_ok and squeezing(state.gamma, Mode.LIGHT, Quadrature.P) < 1.0
    ok = worst_formula <= 1e-12 and worst_kappa <= 1e-6 and worst_value <= 1e-9 and light_ok
    return CheckResult(
        "decoupling-pass",
        ok,
        f"variance formula off {worst_formula:.3g}, kappa* off {worst_kappa:.3g}, "
        f"optimum off {worst_value:.3g}, light squeezed: {light_ok}",
    )


def _check_crude_model() -> CheckResult:
    model = crude_single_pass(25.0)
    eta_ok = abs(model.eta0 - 0.1414213562373095) <= 1e-12
    delta_ok = abs(model.delta_min - 0.565685424949238) <= 1e-12
    eta_gss, delta_gss = golden_section_minimize(model.delta, 1e-4, 0.5, 1e-10)
    gss_ok = abs(eta_gss - model.eta0) <= 1e-8 and abs(delta_gss - model.delta_min) <= 1e-8
    return CheckResult(
        "crude-single-pass",
        eta_ok and delta_ok and gss_ok,
        f"eta0 = {model.eta0:.9g}, delta_min = {model.delta_min:.9g} "
        f"(about 3 dB at optical density 25), golden-section agrees: {gss_ok}",
    )


def _check_physicality() -> CheckResult:
    rng = np.random.default_rng(321)
    schemes = list(Scheme)
    worst = np.inf
    for _ in range(200):
        params = PassParams(
            kappa=rng.uniform(0.0, 1.5),
            eta=rng.uniform(0.0, 0.3),
            epsilon=rng.uniform(0.0, 0.15),
            r=rng.uniform(0.0, 0.15),
        )
        scheme = schemes[int(rng.integers(0, len(schemes)))]
        n = int(rng.integers(1, 31))
        for state in protocol_states(n, params, scheme):
            worst = min(worst, symplectic_eigenvalues(state.gamma)[1])
    return CheckResult(
        "pass-physicality",
        worst >= 1.0 - 1e-9,
        f"smallest symplectic eigenvalue over 200 random runs: {worst:.12g}",
    )


def _check_switch_rotation() -> CheckResult:
    phi_at, phi_ph = switch_rotation_angles()
    g = mode_rotation(phi_at, phi_ph)
    s = scattering_matrix(0.7)
    identity_ok = bool(np.allclose(g @ s @ g.T, s.T, atol=1e-12))
    gamma = apply_linear_map(vacuum(), scattering_matrix(0.4))
    direct = single_pass(gamma, 0.7, 0.0, 0.0, transposed=True)
    rotated = rotate_quadratures(
        single_pass(rotate_quadratures(gamma, -phi_at, -phi_ph), 0.7, 0.0, 0.0),
        phi_at,
        phi_ph,
    )
    equiv = float(np.max(np.abs(direct - rotated)))
    return CheckResult(
        "switch-rotation",
        identity_ok and equiv <= 1e-12,
        f"angles ({phi_at:+.3f}, {phi_ph:+.3f}), rotated-pass deviation {equiv:.3g}",
    )


def _check_rubidium() -> CheckResult:
    setup = rubidium_example()
    model = derive_model_params(setup)
    alpha_ok = 24.0 <= model.alpha0 <= 27.0
    ratio_ok = model.eta_over_epsilon == setup.n_photons / setup.n_atoms
    photons = [photons_for_target_eta(setup, eta) for eta in (0.01, 0.03, 0.1)]
    decade_ok = all(9.9e6 <= n_ph <= 1.01e8 for n_ph in photons)
    return CheckResult(
        "rubidium-example",
        alpha_ok and ratio_ok and decade_ok,
        f"alpha0 = {model.alpha0:.4g}, eta/epsilon = {model.eta_over_epsilon:.4g}, "
        f"photons for eta in [0.01, 0.1]: {photons[0]:.3g} to {photons[-1]:.3g}",
    )


def two_mode_squeezed_with_noise(r: float, noise: float):
    """Symmetric mixed test state: squeezed pair plus equal thermal noise."""
    return two_mode_squeezed(r) + noise * np.eye(4)


def _check_geof_routes() -> CheckResult:
    rng = np.random.default_rng(9)
    worst = 0.0
    for i in range(5):
        r = rng.uniform(0.2, 1.0)
        noise = rng.uniform(0.0, 0.4)
        gamma = two_mode_squeezed_with_noise(r, noise)
        closed = geof_symmetric(gamma)
        numeric = geof(gamma, seed=i, method="numerical")
        worst = max(worst, abs(closed - numeric))
    return CheckResult(
        "geof-closed-vs-numerical",
        worst <= 1e-4,
        f"max |closed - numerical| = {worst:.3g} ebits over 5 symmetric states",
    )


CHECKS = (
    _check_group_property,
    _check_lossless_collapse,
    _check_epr_floor,
    _check_noise_model,
    _check_qnd_benchmark,
    _check_disentangling,
    _check_crude_model,
    _check_physicality,
    _check_switch_rotation,
    _check_rubidium,
    _check_geof_routes,
)


def run_checks() -> CheckReport:
    """Run the analytic check battery and collect a deterministic report."""
    report = CheckReport()
    for check in CHECKS:
        report.results.append(check())
    return report
