"""Config-driven command line front end.

Subcommands: bound, sweep, min-time, relax, trajectory, check, closed-compare.
Configs are JSON with a versioned schema (see docs/config_schema.md); sweep
and trajectory commands emit CSV files with a stable column contract (see
docs/csv_format.md).  Exit codes: 0 success, 1 check failure, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import sys as _sys
from pathlib import Path

import numpy as np

from .bounds import (
    UNIT_NUMERATOR,
    NormKind,
    UnreachableTargetError,
    bound_schedule_independent,
    closed_system_report,
    single_qubit_analytic_bound,
    single_qubit_denominator,
)
from .checks import run_all
from .control import (
    DynamicsError,
    OptimizerConfig,
    Schedule,
    find_min_time,
    uncontrolled_first_passage,
)
from .lindblad import ControlSystem, propagate
from .models import BathSpec, IsingSpec, make_bell, make_ising_davies, make_single_qubit
from .norms import induced_11_bracket

SCHEMA_VERSION = 1

SWEEP_COLUMNS = (
    "param_name", "param_value", "bound_definitional", "bound_paper_variant",
    "t_uncontrolled", "t_controlled", "achieved_distance", "restarts_used",
    "seed", "status",
)


class ConfigError(ValueError):
    """Invalid or malformed configuration."""


def _fmt(value) -> str:
    """Format one CSV cell: floats with 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return cfg


def normalize_model_config(model: dict) -> dict:
    """Fill defaults and validate; the result serializes back unchanged."""
    if not isinstance(model, dict) or "kind" not in model:
        raise ConfigError("model config must be an object with a 'kind' field")
    kind = model["kind"]
    if kind == "single_qubit":
        out = {"kind": kind,
               "omega": float(model.get("omega", 1.0)),
               "gamma": float(model.get("gamma", 1.0))}
    elif kind == "bell":
        out = {"kind": kind,
               "omega": float(model.get("omega", 1.0)),
               "gamma": float(model.get("gamma", 1.0)),
               "extended_controls": bool(model.get("extended_controls", False))}
    elif kind == "ising_davies":
        n = int(model.get("n_spins", 4))
        fields = model.get("fields", 1.0)
        if isinstance(fields, (int, float)):
            fields = [float(fields)] * n
        couplings = model.get("couplings")
        if couplings is None:
            couplings = [[1.0 / n] * n for _ in range(n)]
        elif isinstance(couplings, (int, float)):
            couplings = [[float(couplings)] * n for _ in range(n)]
        out = {"kind": kind, "n_spins": n, "fields": [float(f) for f in fields],
               "couplings": [[float(x) for x in row] for row in couplings],
               "include_diagonal": bool(model.get("include_diagonal", True)),
               "beta": float(model.get("beta", 1.0)),
               "omega_c": float(model.get("omega_c", 8.0 * math.pi)),
               "eta_g2": float(model.get("eta_g2", 1e-3))}
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    unknown = set(model) - set(out)
    if unknown:
        raise ConfigError(f"unknown model fields: {sorted(unknown)}")
    return out


def build_model(model: dict) -> ControlSystem:
    cfg = normalize_model_config(model)
    try:
        if cfg["kind"] == "single_qubit":
            return make_single_qubit(cfg["omega"], cfg["gamma"])
        if cfg["kind"] == "bell":
            return make_bell(cfg["omega"], cfg["gamma"], cfg["extended_controls"])
        spec = IsingSpec(n_spins=cfg["n_spins"], fields=tuple(cfg["fields"]),
                         couplings=np.array(cfg["couplings"]),
                         include_diagonal=cfg["include_diagonal"])
        bath = BathSpec(beta=cfg["beta"], omega_c=cfg["omega_c"], eta_g2=cfg["eta_g2"])
        return make_ising_davies(spec, bath)
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc


_SWEEPABLE = {
    "single_qubit": {"gamma", "omega"},
    "bell": {"gamma", "omega"},
    "ising_davies": {"beta", "temperature", "eta_g2", "omega_c"},
}


def apply_sweep_value(model: dict, parameter: str, value: float) -> dict:
    cfg = normalize_model_config(model)
    if parameter not in _SWEEPABLE[cfg["kind"]]:
        raise ConfigError(
            f"parameter {parameter!r} is not sweepable on model {cfg['kind']!r}")
    if parameter == "temperature":
        if value <= 0:
            raise ConfigError("temperature values must be positive")
        cfg["beta"] = 1.0 / float(value)
    else:
        cfg[parameter] = float(value)
    return cfg


def optimizer_from_config(cfg: dict, seed: int | None = None) -> OptimizerConfig:
    opt = dict(cfg.get("optimizer", {}))
    if seed is not None:
        opt["seed"] = seed
    known = {"target_distance", "restarts", "max_iterations", "fd_step", "seed",
             "n_intervals", "amplitude_cap", "stop_at_target"}
    unknown = set(opt) - known
    if unknown:
        raise ConfigError(f"unknown optimizer fields: {sorted(unknown)}")
    try:
        return OptimizerConfig(**opt)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid optimizer config: {exc}") from exc


def point_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence((int(master_seed), int(index)))
               .generate_state(1, np.uint64)[0])


def _published_variant_bound(model_cfg: dict):
    """Published-form bound variant: unit numerator with the coherence-sector
    denominator for the single qubit; identical to the definitional value for
    the other models."""
    if model_cfg["kind"] == "single_qubit":
        value = single_qubit_analytic_bound(model_cfg["omega"], model_cfg["gamma"],
                                            UNIT_NUMERATOR)
        _, regime = single_qubit_denominator(model_cfg["omega"], model_cfg["gamma"])
        return value, regime
    return None, ""


def _sweep_worker(payload: dict) -> dict:
    """Evaluate one sweep point; exceptions become status text, not crashes."""
    model_cfg = apply_sweep_value(payload["model"], payload["parameter"], payload["value"])
    row = {c: None for c in SWEEP_COLUMNS}
    row["param_name"] = payload["parameter"]
    row["param_value"] = float(payload["value"])
    row["seed"] = payload["seed"]
    try:
        system = build_model(model_cfg)
        report = bound_schedule_independent(system, NormKind.SQRT_D_INDUCED_22)
        row["bound_definitional"] = report.bound
        variant_value, regime = _published_variant_bound(model_cfg)
        row["bound_paper_variant"] = report.bound if variant_value is None else variant_value
        status = regime or "ok"
        if payload["mode"] == "bounds_only":
            row["status"] = status + "+bound_only" if regime else "bound_only"
            return row
        cfg = optimizer_from_config(payload["config"], seed=payload["seed"])
        row["t_uncontrolled"] = uncontrolled_first_passage(
            system, cfg.target_distance, horizon=payload["horizon"])
        result = find_min_time(system, cfg)
        row["t_controlled"] = result.t_min
        row["achieved_distance"] = result.achieved_distance
        row["restarts_used"] = result.restarts_used
        row["status"] = status
    except (DynamicsError, UnreachableTargetError) as exc:
        row["status"] = f"failed: {exc}"
    return row


def run_sweep(config: dict, jobs: int = 1, master_seed: int | None = None) -> list[dict]:
    sweep = config.get("sweep")
    if not isinstance(sweep, dict) or "parameter" not in sweep:
        raise ConfigError("config needs a sweep object with 'parameter' and 'values'")
    values = sweep.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a nonempty list")
    mode = sweep.get("mode", "full")
    if mode not in ("full", "bounds_only"):
        raise ConfigError(f"unknown sweep mode {mode!r}")
    model = config.get("model")
    if model is None:
        raise ConfigError("config needs a model")
    seed0 = config.get("master_seed", 0) if master_seed is None else master_seed
    # validate the parameter and optimizer once up front
    apply_sweep_value(model, sweep["parameter"], float(values[0]))
    optimizer_from_config(config)
    payloads = [
        {"model": model, "parameter": sweep["parameter"], "value": float(v),
         "mode": mode, "config": config, "seed": point_seed(seed0, i),
         "horizon": config.get("relax_horizon")}
        for i, v in enumerate(values)
    ]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, payloads))
    else:
        rows = [_sweep_worker(p) for p in payloads]
    return rows


def write_csv(path: Path, columns, rows: list[dict]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def _bound_json(system: ControlSystem, model_cfg: dict) -> dict:
    report = bound_schedule_independent(system, NormKind.SQRT_D_INDUCED_22)
    est, upper = induced_11_bracket(system.generator)
    out = {
        "numerator": report.numerator,
        "sqrt_d_induced_22": {
            "denominator": report.denominator,
            "bound": report.bound,
        },
        "induced_11_estimate": {
            "denominator": est.value,
            "bound": report.numerator / est.value if est.value > 0 else None,
            "probes": est.probes,
            "upper_bound": upper,
        },
    }
    variant_value, regime = _published_variant_bound(model_cfg)
    if variant_value is not None:
        out["bound_paper_variant"] = variant_value
        out["regime"] = regime
    return out


def cmd_bound(args) -> int:
    config = load_config(args.config)
    model_cfg = normalize_model_config(config.get("model", {}))
    system = build_model(model_cfg)
    out = {"model": model_cfg, **_bound_json(system, model_cfg)}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    rows = run_sweep(config, jobs=args.jobs, master_seed=args.seed)
    out_dir = Path(args.out or config.get("outputs", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"sweep_{rows[0]['param_name']}.csv"
    write_csv(path, SWEEP_COLUMNS, rows)
    print(path)
    return 0


def cmd_min_time(args) -> int:
    config = load_config(args.config)
    system = build_model(config.get("model", {}))
    seed = args.seed if args.seed is not None else config.get("master_seed")
    cfg = optimizer_from_config(config, seed=seed)
    report = bound_schedule_independent(system, NormKind.SQRT_D_INDUCED_22)
    result = find_min_time(system, cfg, upper_bracket=config.get("upper_bracket"))
    out = {
        "t_min": result.t_min,
        "achieved_distance": result.achieved_distance,
        "restarts_used": result.restarts_used,
        "seed": result.seed,
        "bound_definitional": report.bound,
        "bracket_history": [list(pair) for pair in result.bracket_history],
        "schedule": {
            "total_time": result.schedule.total_time,
            "amplitudes": result.schedule.amplitudes.tolist(),
        },
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_relax(args) -> int:
    config = load_config(args.config)
    system = build_model(config.get("model", {}))
    cfg = optimizer_from_config(config)
    t = uncontrolled_first_passage(system, cfg.target_distance,
                                   horizon=config.get("relax_horizon"))
    print(json.dumps({"first_passage": t, "target_distance": cfg.target_distance},
                     indent=2, sort_keys=True))
    return 0


def cmd_trajectory(args) -> int:
    config = load_config(args.config)
    system = build_model(config.get("model", {}))
    sched_cfg = config.get("schedule", {})
    if "total_time" not in sched_cfg:
        raise ConfigError("trajectory needs schedule.total_time")
    total_time = float(sched_cfg["total_time"])
    n_intervals = int(sched_cfg.get("n_intervals", 20))
    samples = int(sched_cfg.get("samples", 201))
    amps = sched_cfg.get("amplitudes")
    cap = float(sched_cfg.get("amplitude_cap", 20.0))
    if amps is None:
        schedule = Schedule.zero(total_time, n_intervals, len(system.controls), cap)
    else:
        schedule = Schedule(total_time, np.array(amps, dtype=float), cap)
    states = propagate(system, schedule, samples=samples)
    times = np.linspace(0.0, total_time, samples)
    d = system.dim
    if d == 2:
        columns = ("t", "sigma_x", "sigma_y", "sigma_z")
        paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]),
                  np.array([[1, 0], [0, -1]])]
        rows = [{"t": float(t),
                 "sigma_x": float(np.real(np.trace(rho @ paulis[0]))),
                 "sigma_y": float(np.real(np.trace(rho @ paulis[1]))),
                 "sigma_z": float(np.real(np.trace(rho @ paulis[2])))}
                for t, rho in zip(times, states)]
    else:
        columns = ("t", *[f"p_{k}" for k in range(d)])
        rows = [{"t": float(t), **{f"p_{k}": float(np.real(rho[k, k])) for k in range(d)}}
                for t, rho in zip(times, states)]
    out_dir = Path(args.out or config.get("outputs", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "trajectory.csv"
    write_csv(path, columns, rows)
    print(path)
    return 0


def cmd_check(args) -> int:
    results = run_all(seed=args.seed if args.seed is not None else 12345,
                      corrupt_convention=args.corrupt_convention)
    all_passed = True
    for res in results:
        flag = "PASS" if res.passed else "FAIL"
        all_passed &= res.passed
        print(f"{flag} {res.name}: residual {res.residual:.3e} <= {res.tolerance:.1e} "
              f"(count={res.count})")
    total = sum(r.count for r in results)
    print(f"{'PASS' if all_passed else 'FAIL'} total checks: {total}")
    return 0 if all_passed else 1


def cmd_closed_compare(args) -> int:
    config = load_config(args.config) if args.config else {"schema_version": 1}
    instances = int(config.get("instances", 100))
    seed = args.seed if args.seed is not None else config.get("master_seed", 2026)
    rng = np.random.default_rng(seed)
    dims = (2, 4, 8)
    summary = {"instances": 0, "chain_holds": 0, "popoviciu_holds": 0,
               "comparison_holds": 0, "reference_divergent": 0}
    for i in range(instances):
        d = dims[i % len(dims)]
        psi0 = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi_t = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi0 /= np.linalg.norm(psi0)
        psi_t /= np.linalg.norm(psi_t)
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        report = closed_system_report(psi0, psi_t, 0.5 * (m + m.conj().T))
        summary["instances"] += 1
        for key in ("chain_holds", "popoviciu_holds", "comparison_holds",
                    "reference_divergent"):
            summary[key] += int(getattr(report, key))
    summary["all_hold"] = (summary["chain_holds"] == instances
                           and summary["popoviciu_holds"] == instances
                           and summary["comparison_holds"] == instances)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["all_hold"] else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslab",
        description="Speed-limit bounds and minimal-time control for Lindblad systems")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_config=True, **extra):
        p = sub.add_parser(name, **extra)
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.set_defaults(fn=fn)
        return p

    add("bound", cmd_bound, help="print the schedule-independent bound report")
    add("sweep", cmd_sweep, help="run a parameter sweep and write a CSV")
    add("min-time", cmd_min_time, help="binary-search the minimal feasible time")
    add("relax", cmd_relax, help="uncontrolled first-passage time")
    add("trajectory", cmd_trajectory, help="emit a time-series CSV for a schedule")
    check = add("check", cmd_check, needs_config=False, help="run the invariant suite")
    check.add_argument("--corrupt-convention", action="store_true",
                       help=argparse.SUPPRESS)  # test hook
    compare = add("closed-compare", cmd_closed_compare, needs_config=False,
                  help="closed-system bound comparison on random instances")
    compare.add_argument("--config", default=None, help="optional JSON config path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except (DynamicsError, UnreachableTargetError) as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
