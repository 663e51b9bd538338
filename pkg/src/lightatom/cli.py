"""Command-line entry point.

Subcommands:

* ``figure <1|2|3|4>`` -- emit the sweep data behind one standard figure
* ``sweep``            -- free-form n-sweep for one scheme/objective set
* ``optimize``         -- single-point parameter optimization
* ``physical``         -- derive model parameters from laboratory numbers
* ``check``            -- run the analytic check battery

Options can come from a flat JSON config file (``--config``); explicit
command-line flags win over the file.  Exit codes: 0 success, 1 check
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from .dynamics import Scheme
from .errors import ParameterError
from .optimize import Objective, optimize_disentangle_kappa, optimize_eta
from .physical import (
    ExperimentalSetup,
    derive_model_params,
    photons_for_target_eta,
    rubidium_example,
)
from .runner import (
    ConfigError,
    RunConfig,
    run_checks,
    run_figure,
    run_sweep,
    write_records,
)

SCHEME_NAMES = {scheme.value: scheme for scheme in Scheme}
OBJECTIVE_NAMES = {objective.value: objective for objective in Objective}


def _parse_objectives(raw: str) -> tuple[Objective, ...]:
    names = [token.strip() for token in raw.split(",") if token.strip()]
    try:
        return tuple(OBJECTIVE_NAMES[name] for name in names)
    except KeyError as exc:
        raise ConfigError(
            "objective",
            f"unknown objective {exc.args[0]!r}; choose from {sorted(OBJECTIVE_NAMES)}",
        ) from None


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Merge JSON config file and CLI overrides into a RunConfig."""
    values: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be a JSON object")
        known = {f.name for f in dataclass_fields(RunConfig)} | {"r", "objective", "out"}
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown config key")
        values.update(raw)

    # normalize aliases used in the file format
    if "r" in values:
        values["reflectivity"] = values.pop("r")
    if "out" in values:
        values["output_path"] = values.pop("out")
    if "objective" in values:
        values["objectives"] = values.pop("objective")

    overrides = {
        "alpha0": getattr(args, "alpha0", None),
        "reflectivity": getattr(args, "r", None),
        "n_min": getattr(args, "n_min", None),
        "n_max": getattr(args, "n_max", None),
        "eta": getattr(args, "eta", None),
        "output_path": getattr(args, "out", None),
        "seed": getattr(args, "seed", None),
    }
    if getattr(args, "scheme", None) is not None:
        overrides["scheme"] = args.scheme
    if getattr(args, "objective", None) is not None:
        overrides["objectives"] = args.objective
    values.update({k: v for k, v in overrides.items() if v is not None})

    if isinstance(values.get("scheme"), str):
        name = values["scheme"]
        if name not in SCHEME_NAMES:
            raise ConfigError(
                "scheme", f"unknown scheme {name!r}; choose from {sorted(SCHEME_NAMES)}"
            )
        values["scheme"] = SCHEME_NAMES[name]
    if isinstance(values.get("objectives"), str):
        values["objectives"] = _parse_objectives(values["objectives"])
    elif isinstance(values.get("objectives"), (list, tuple)):
        values["objectives"] = _parse_objectives(",".join(values["objectives"]))

    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from exc
    config.validate()
    return config


def _add_sweep_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--alpha0", type=float, help="resonant optical density")
    parser.add_argument("--r", type=float, help="reflection loss per pass")
    parser.add_argument(
        "--scheme", choices=sorted(SCHEME_NAMES), help="protocol variant"
    )
    parser.add_argument("--n-min", dest="n_min", type=int, help="first pass count")
    parser.add_argument("--n-max", dest="n_max", type=int, help="last pass count")
    parser.add_argument(
        "--objective",
        help="comma-separated objectives: " + ",".join(sorted(OBJECTIVE_NAMES)),
    )
    parser.add_argument(
        "--eta", type=float, help="fix the depumping instead of optimizing it"
    )
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--seed", type=int, help="seed for the GEOF minimizer restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lightatom",
        description="Multipass light-atom interface simulation and optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", help="emit the data behind a standard figure")
    p_fig.add_argument("which", choices=["1", "2", "3", "4"])
    _add_sweep_options(p_fig)

    p_sweep = sub.add_parser("sweep", help="free-form sweep over pass counts")
    _add_sweep_options(p_sweep)

    p_opt = sub.add_parser("optimize", help="optimize parameters for one pass count")
    _add_sweep_options(p_opt)
    p_opt.add_argument("--n", type=int, required=True, help="number of passes")
    p_opt.add_argument(
        "--vary",
        choices=["eta", "kappa"],
        default="eta",
        help="search over the depumping eta or over a shared decoupling kappa",
    )

    p_phys = sub.add_parser("physical", help="lab quantities to model parameters")
    p_phys.add_argument("--sigma", type=float, help="resonant cross-section, cm^2")
    p_phys.add_argument("--linewidth", type=float, help="natural linewidth (HWHM), Hz")
    p_phys.add_argument("--detuning", type=float, help="detuning from resonance, Hz")
    p_phys.add_argument("--area", type=float, help="illuminated cross-section, cm^2")
    p_phys.add_argument("--n-atoms", dest="n_atoms", type=float)
    p_phys.add_argument("--n-photons", dest="n_photons", type=float)
    p_phys.add_argument("--r", type=float, help="reflection loss per pass")
    p_phys.add_argument(
        "--target-eta",
        dest="target_eta",
        type=float,
        help="also report the photon number realizing this depumping",
    )

    p_check = sub.add_parser("check", help="run the analytic check battery")
    p_check.add_argument("--out", default="checks.txt", help="report file path")

    return parser


def _cmd_figure(args: argparse.Namespace) -> int:
    config = _load_config(args)
    records = run_figure(args.which, config)
    out = config.output_path or f"figure{args.which}.csv"
    path = write_records(records, out)
    print(f"wrote {len(records)} records to {path}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    records = run_sweep(config)
    out = config.output_path or "sweep.csv"
    path = write_records(records, out)
    print(f"wrote {len(records)} records to {path}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if args.n < 1:
        raise ConfigError("n", f"must be >= 1, got {args.n}")
    scheme = config.scheme or Scheme.UNSWITCHED
    objectives = config.objectives or (Objective.MINIMIZE_EPR,)
    objective = objectives[0]
    r = config.reflectivity if config.reflectivity is not None else 0.0
    if args.vary == "kappa":
        result = optimize_disentangle_kappa(
            args.n,
            eta=config.eta or 0.0,
            r=r,
            scheme=scheme if scheme.disentangles else Scheme.UNSWITCHED_THEN_DISENTANGLE,
            objective=objective
            if objective in (Objective.MINIMIZE_ATOMIC_P, Objective.MINIMIZE_LIGHT_X)
            else Objective.MINIMIZE_ATOMIC_P,
        )
        print(f"n = {args.n}, scheme = {scheme.value}")
        print(f"kappa* = {result.kappa_star:.9g}")
    else:
        result = optimize_eta(
            args.n, config.alpha0, r, scheme, objective, geof_seed=config.seed
        )
        print(f"n = {args.n}, scheme = {scheme.value}, objective = {objective.value}")
        print(f"eta* = {result.eta_star:.9g}  kappa* = {result.kappa_star:.9g}")
    print(f"value = {result.value:.9g}  ({result.evaluations} evaluations)")
    if result.at_bracket_edge:
        print("warning: optimum sits at the edge of the search bracket")
    return 0


def _cmd_physical(args: argparse.Namespace) -> int:
    defaults = rubidium_example()
    setup = ExperimentalSetup(
        sigma=args.sigma if args.sigma is not None else defaults.sigma,
        gamma_hwhm=args.linewidth if args.linewidth is not None else defaults.gamma_hwhm,
        detuning=args.detuning if args.detuning is not None else defaults.detuning,
        area=args.area if args.area is not None else defaults.area,
        n_atoms=args.n_atoms if args.n_atoms is not None else defaults.n_atoms,
        n_photons=args.n_photons if args.n_photons is not None else defaults.n_photons,
        reflectivity=args.r if args.r is not None else defaults.reflectivity,
    )
    model = derive_model_params(setup)
    print(f"alpha0  = {model.alpha0:.6g}   (resonant optical density)")
    print(f"kappa   = {model.kappa:.6g}")
    print(f"eta     = {model.eta:.6g}")
    print(f"epsilon = {model.epsilon:.6g}")
    print(f"zeta    = {model.pass_params.zeta:.6g}   (epsilon + r, r = {model.r:.6g})")
    print(f"eta/epsilon = {model.eta_over_epsilon:.6g} = N_ph/N_at")
    if args.target_eta is not None:
        n_ph = photons_for_target_eta(setup, args.target_eta)
        print(f"photons for eta = {args.target_eta:g}: {n_ph:.6g}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    report = run_checks()
    text = report.render()
    print(text, end="")
    Path(args.out).write_text(text, encoding="utf-8")
    return 0 if report.all_passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "figure": _cmd_figure,
        "sweep": _cmd_sweep,
        "optimize": _cmd_optimize,
        "physical": _cmd_physical,
        "check": _cmd_check,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
