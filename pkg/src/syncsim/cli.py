"""Command-line front end.

Four subcommands share one JSON config format (see README):

* ``oracle-check``  exhaustive generator identities on random configurations
* ``simulate``      Monte Carlo estimates against the exact curves
* ``analytic``      exact curve and asymptote tables, no simulation
* ``phase-sweep``   Monte Carlo sweep over N inside one regime

Exit codes: 0 success, 1 a statistical or identity check failed, 2 invalid
configuration or guard violation.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .dynamics import NumericFailureError
from .experiments import (
    ExperimentSpec,
    ExplicitInit,
    IIDInit,
    InitSpec,
    PointInit,
    SpreadInit,
    estimate_records,
    expected_initial_mean,
    expected_initial_variance,
    phase_sweep,
    run_experiment,
    sweep_records,
    write_records_csv,
    write_records_json,
)
from .model import (
    DiscreteJumps,
    JumpDistribution,
    ModelFamily,
    Signature,
    SyncTerm,
    UniformJumps,
    sample_variance,
)
from .moments import MomentCurve, PhaseRegime, phase_asymptote
from .oracle import (
    sync_mean_drift_enumerated,
    sync_variance_drift_enumerated,
)

Z_THRESHOLD = 4.0
VARIANCE_IDENTITY_TOL = 1e-9
MEAN_IDENTITY_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid run configuration."""


def _check_keys(obj: dict, allowed: set[str], section: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {section!r}")


def _as_number(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return value


def _get_number(obj: dict, key: str, section: str, default=None):
    if key not in obj:
        if default is None:
            raise ConfigError(f"section {section!r} needs key {key!r}")
        return default
    return _as_number(obj[key], f"{section}.{key}")


def _parse_jump(obj, where: str) -> JumpDistribution:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    _check_keys(obj, {"atoms", "uniform"}, where)
    if ("atoms" in obj) == ("uniform" in obj):
        raise ConfigError(f"{where} must define exactly one of 'atoms' or 'uniform'")
    try:
        if "atoms" in obj:
            atoms = obj["atoms"]
            if not isinstance(atoms, list) or not all(
                isinstance(p, list) and len(p) == 2 for p in atoms
            ):
                raise ConfigError(
                    f"{where}.atoms must be a list of [displacement, probability]"
                )
            return DiscreteJumps([(z, p) for z, p in atoms])
        lo_hi = obj["uniform"]
        if not isinstance(lo_hi, list) or len(lo_hi) != 2:
            raise ConfigError(f"{where}.uniform must be [lo, hi]")
        return UniformJumps(lo_hi[0], lo_hi[1])
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_sync_terms(obj: dict) -> tuple[SyncTerm, ...]:
    has_single = "signature" in obj or "delta" in obj
    has_list = "sync_terms" in obj
    if has_single == has_list:
        raise ConfigError(
            "model must define either 'signature' plus 'delta' or 'sync_terms'"
        )
    try:
        if has_single:
            if "signature" not in obj or "delta" not in obj:
                raise ConfigError("model needs both 'signature' and 'delta'")
            return (SyncTerm(Signature(obj["signature"]), obj["delta"]),)
        terms = obj["sync_terms"]
        if not isinstance(terms, list) or not terms:
            raise ConfigError("model.sync_terms must be a nonempty list")
        parsed = []
        for i, term in enumerate(terms):
            if not isinstance(term, dict):
                raise ConfigError(f"model.sync_terms[{i}] must be an object")
            _check_keys(term, {"signature", "delta"}, f"model.sync_terms[{i}]")
            if "signature" not in term or "delta" not in term:
                raise ConfigError(
                    f"model.sync_terms[{i}] needs 'signature' and 'delta'"
                )
            parsed.append(SyncTerm(Signature(term["signature"]), term["delta"]))
        return tuple(parsed)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model: {exc}") from exc


def _parse_init(obj, jump: JumpDistribution) -> InitSpec:
    if obj is None:
        return PointInit(0.0)
    if not isinstance(obj, dict):
        raise ConfigError("init must be an object")
    _check_keys(obj, {"kind", "value", "width", "coords", "rho"}, "init")
    kind = obj.get("kind")
    try:
        if kind == "point":
            _check_keys(obj, {"kind", "value"}, "init")
            return PointInit(_get_number(obj, "value", "init", default=0.0))
        if kind == "iid":
            _check_keys(obj, {"kind", "rho"}, "init")
            law = _parse_jump(obj["rho"], "init.rho") if "rho" in obj else jump
            return IIDInit(law)
        if kind == "spread":
            _check_keys(obj, {"kind", "width"}, "init")
            return SpreadInit(_get_number(obj, "width", "init"))
        if kind == "explicit":
            _check_keys(obj, {"kind", "coords"}, "init")
            coords = obj.get("coords")
            if not isinstance(coords, list) or len(coords) < 2:
                raise ConfigError("init.coords must be a list of >= 2 numbers")
            return ExplicitInit(coords)
    except ValueError as exc:
        raise ConfigError(f"init: {exc}") from exc
    raise ConfigError(
        f"init.kind must be one of point/iid/spread/explicit, got {kind!r}"
    )


def _parse_regime(obj) -> PhaseRegime:
    if not isinstance(obj, dict):
        raise ConfigError("run.regime must be an object")
    _check_keys(obj, {"kind", "c"}, "run.regime")
    try:
        return PhaseRegime(obj.get("kind", ""), obj.get("c"))
    except ValueError as exc:
        raise ConfigError(f"run.regime: {exc}") from exc


@dataclass
class RunConfig:
    """Validated run configuration shared by all subcommands."""

    family: ModelFamily
    n_particles: int | None
    init: InitSpec
    checkpoints: list[float] = field(default_factory=list)
    steps: list[int] = field(default_factory=list)
    replicas: int = 200
    seed: int = 0
    threads: int = 1
    configs: int = 20
    coord_range: float = 10.0
    regime: PhaseRegime | None = None
    n_values: list[int] = field(default_factory=list)
    out_path: str | None = None
    out_format: str = "csv"
    verbosity: int = 1

    def model(self):
        if self.n_particles is None:
            raise ConfigError("model.N is required for this command")
        try:
            return self.family.at(self.n_particles)
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(raw, {"model", "init", "run", "output"}, "config")
    model_obj = raw.get("model")
    if not isinstance(model_obj, dict):
        raise ConfigError("config needs a 'model' section")
    _check_keys(
        model_obj,
        {"N", "alpha", "signature", "delta", "sync_terms", "rho"},
        "model",
    )
    if "rho" not in model_obj:
        raise ConfigError("model needs a 'rho' jump law")
    jump = _parse_jump(model_obj["rho"], "model.rho")
    terms = _parse_sync_terms(model_obj)
    alpha = _get_number(model_obj, "alpha", "model")
    try:
        family = ModelFamily(alpha, terms, jump)
        if family.alpha <= 0 or not math.isfinite(family.alpha):
            raise ConfigError(f"model.alpha must be > 0, got {alpha}")
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc
    n_particles = None
    if "N" in model_obj:
        n_raw = model_obj["N"]
        if isinstance(n_raw, bool) or not isinstance(n_raw, int) or n_raw < 2:
            raise ConfigError(f"model.N must be an integer >= 2, got {n_raw!r}")
        n_particles = n_raw

    cfg = RunConfig(
        family=family,
        n_particles=n_particles,
        init=_parse_init(raw.get("init"), jump),
    )

    run_obj = raw.get("run", {})
    if not isinstance(run_obj, dict):
        raise ConfigError("run must be an object")
    _check_keys(
        run_obj,
        {
            "checkpoints",
            "steps",
            "replicas",
            "seed",
            "threads",
            "configs",
            "coord_range",
            "regime",
            "n_values",
        },
        "run",
    )
    if "checkpoints" in run_obj:
        ck = run_obj["checkpoints"]
        if not isinstance(ck, list) or not ck:
            raise ConfigError("run.checkpoints must be a nonempty list of times")
        cfg.checkpoints = [float(_as_number(t, "run.checkpoints")) for t in ck]
        if any(t < 0 for t in cfg.checkpoints):
            raise ConfigError("run.checkpoints must be >= 0")
        if sorted(cfg.checkpoints) != cfg.checkpoints:
            raise ConfigError("run.checkpoints must be nondecreasing")
    if "steps" in run_obj:
        steps = run_obj["steps"]
        if not isinstance(steps, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in steps
        ):
            raise ConfigError("run.steps must be a list of integers >= 0")
        cfg.steps = list(steps)
    cfg.replicas = int(_get_number(run_obj, "replicas", "run", default=cfg.replicas))
    if cfg.replicas < 2:
        raise ConfigError(f"run.replicas must be >= 2, got {cfg.replicas}")
    seed = _get_number(run_obj, "seed", "run", default=cfg.seed)
    if isinstance(seed, float) or seed < 0:
        raise ConfigError(f"run.seed must be a nonnegative integer, got {seed!r}")
    cfg.seed = int(seed)
    cfg.threads = int(_get_number(run_obj, "threads", "run", default=cfg.threads))
    if cfg.threads < 1:
        raise ConfigError(f"run.threads must be >= 1, got {cfg.threads}")
    cfg.configs = int(_get_number(run_obj, "configs", "run", default=cfg.configs))
    if cfg.configs < 1:
        raise ConfigError(f"run.configs must be >= 1, got {cfg.configs}")
    cfg.coord_range = float(
        _get_number(run_obj, "coord_range", "run", default=cfg.coord_range)
    )
    if cfg.coord_range <= 0:
        raise ConfigError(f"run.coord_range must be > 0, got {cfg.coord_range}")
    if "regime" in run_obj:
        cfg.regime = _parse_regime(run_obj["regime"])
    if "n_values" in run_obj:
        nv = run_obj["n_values"]
        if (
            not isinstance(nv, list)
            or not nv
            or not all(
                isinstance(n, int) and not isinstance(n, bool) and n >= 2 for n in nv
            )
        ):
            raise ConfigError("run.n_values must be a nonempty list of integers >= 2")
        cfg.n_values = list(nv)

    out_obj = raw.get("output", {})
    if not isinstance(out_obj, dict):
        raise ConfigError("output must be an object")
    _check_keys(out_obj, {"path", "format", "verbosity"}, "output")
    if "path" in out_obj:
        if not isinstance(out_obj["path"], str):
            raise ConfigError("output.path must be a string")
        cfg.out_path = out_obj["path"]
    fmt = out_obj.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    cfg.out_format = fmt
    cfg.verbosity = int(
        _get_number(out_obj, "verbosity", "output", default=cfg.verbosity)
    )
    if cfg.n_particles is not None:
        try:
            cfg.model()  # fail fast on infeasible N / signature combinations
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def _resolved_header(cfg: RunConfig, command: str, extra: dict | None = None) -> dict:
    """Reproducibility header: everything needed to rerun the command."""
    terms = [
        {"signature": list(t.signature.parts), "delta": t.delta}
        for t in cfg.family.sync_terms
    ]
    jump = cfg.family.jump
    if isinstance(jump, DiscreteJumps):
        rho = {"atoms": [[z, p] for z, p in jump.atoms]}
    else:
        rho = {"uniform": [jump.lo, jump.hi]}
    init = cfg.init
    if isinstance(init, PointInit):
        init_doc = {"kind": "point", "value": init.value}
    elif isinstance(init, IIDInit):
        init_doc = {"kind": "iid"}
    elif isinstance(init, SpreadInit):
        init_doc = {"kind": "spread", "width": init.width}
    else:
        init_doc = {"kind": "explicit", "coords": list(init.coords)}
    doc = {
        "command": command,
        "model": {
            "N": cfg.n_particles,
            "alpha": cfg.family.alpha,
            "sync_terms": terms,
            "rho": rho,
        },
        "init": init_doc,
        "seed": cfg.seed,
        "replicas": cfg.replicas,
        "threads": cfg.threads,
    }
    if extra:
        doc.update(extra)
    return doc


def _write_records(cfg: RunConfig, records: list[dict], header: dict) -> None:
    if cfg.out_path is None:
        return
    if cfg.out_format == "csv":
        write_records_csv(records, cfg.out_path, header)
    else:
        write_records_json(records, cfg.out_path, header)
    if cfg.verbosity >= 1:
        print(f"wrote {cfg.out_path}")


def _print_records(records: list[dict]) -> None:
    if not records:
        return
    columns = list(records[0].keys())
    print(",".join(columns))
    for rec in records:
        print(",".join(
            f"{rec[c]:.6g}" if isinstance(rec[c], float) else str(rec[c])
            for c in columns
        ))


def cmd_oracle_check(cfg: RunConfig) -> int:
    """Check the exact generator identities on random configurations.

    For each random configuration the enumerated action of the
    synchronization part on the variance must equal
    ``-contraction_rate * V`` to within ``1e-9 * max(1, |V|)``, and its
    action on the mean must vanish to within
    ``1e-12 * max(1, max |x|)``.
    """
    spec = cfg.model()
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 982451653)))
    records = []
    worst = 0.0
    failures = 0
    for i in range(cfg.configs):
        x = rng.uniform(-cfg.coord_range, cfg.coord_range, size=spec.n_particles)
        v = sample_variance(x)
        drift = sync_variance_drift_enumerated(spec, x)
        residual_v = abs(drift + spec.contraction_rate * v)
        tol_v = VARIANCE_IDENTITY_TOL * max(1.0, abs(v))
        residual_m = abs(sync_mean_drift_enumerated(spec, x))
        tol_m = MEAN_IDENTITY_TOL * max(1.0, float(np.abs(x).max()))
        ok = residual_v <= tol_v and residual_m <= tol_m
        failures += 0 if ok else 1
        worst = max(worst, residual_v / tol_v, residual_m / tol_m)
        records.append(
            {
                "config": i,
                "V": float(v),
                "variance_residual": float(residual_v),
                "variance_tol": tol_v,
                "mean_residual": float(residual_m),
                "mean_tol": tol_m,
                "ok": int(ok),
            }
        )
        if cfg.verbosity >= 2:
            print(
                f"config {i}: variance residual {residual_v:.3e} "
                f"(tol {tol_v:.1e}), mean residual {residual_m:.3e} "
                f"(tol {tol_m:.1e}) {'ok' if ok else 'FAIL'}"
            )
    header = _resolved_header(
        cfg, "oracle-check", {"configs": cfg.configs, "coord_range": cfg.coord_range}
    )
    _write_records(cfg, records, header)
    if cfg.verbosity >= 1:
        print(
            f"oracle-check: {cfg.configs - failures}/{cfg.configs} configurations "
            f"within tolerance (worst residual/tol = {worst:.3e})"
        )
    return 0 if failures == 0 else 1


def cmd_simulate(cfg: RunConfig) -> int:
    """Monte Carlo run; exits 1 if any variance z-score exceeds 4."""
    spec = cfg.model()
    if not cfg.checkpoints:
        raise ConfigError("simulate needs run.checkpoints")
    exp = ExperimentSpec(
        model=spec,
        init=cfg.init,
        checkpoints=cfg.checkpoints,
        replicas=cfg.replicas,
        base_seed=cfg.seed,
    )
    rows = run_experiment(exp, threads=cfg.threads)
    records = estimate_records(rows, spec, cfg.replicas)
    header = _resolved_header(cfg, "simulate", {"checkpoints": cfg.checkpoints})
    _write_records(cfg, records, header)
    if cfg.verbosity >= 1:
        _print_records(records)
    worst = max(abs(r.z_score) for r in rows)
    if worst > Z_THRESHOLD:
        if cfg.verbosity >= 1:
            print(f"check failed: max |z| = {worst:.2f} > {Z_THRESHOLD}")
        return 1
    if cfg.verbosity >= 1:
        print(f"max |z| = {worst:.2f} (threshold {Z_THRESHOLD})")
    return 0


def cmd_analytic(cfg: RunConfig) -> int:
    """Exact curves: continuous/embedded grids, plateau, regime asymptotes."""
    columns = ("kind", "N", "at", "mean", "variance", "theorem_value")
    records: list[dict] = []

    def add(kind, n, at, mean, variance, theorem=math.nan):
        records.append(
            {
                "kind": kind,
                "N": n,
                "at": float(at),
                "mean": float(mean),
                "variance": float(variance),
                "theorem_value": float(theorem),
            }
        )

    if cfg.n_particles is not None:
        spec = cfg.model()
        curve = MomentCurve(
            spec,
            initial_mean=expected_initial_mean(cfg.init, spec.n_particles),
            initial_variance=expected_initial_variance(cfg.init, spec.n_particles),
        )
        for t in cfg.checkpoints:
            add("continuous", spec.n_particles, t, curve.mean_at(t),
                curve.variance_at(t))
        for n_steps in cfg.steps:
            add("embedded", spec.n_particles, n_steps,
                curve.mean_after_steps(n_steps),
                curve.variance_after_steps(n_steps))
        late = phase_asymptote(spec, PhaseRegime.late(), 0.0)
        add("plateau", spec.n_particles, math.inf, math.nan, curve.plateau,
            theorem=late)
    if cfg.regime is not None:
        if not cfg.n_values:
            raise ConfigError("run.regime needs run.n_values for asymptote rows")
        for n in cfg.n_values:
            spec_n = cfg.family.at(n)
            t = cfg.regime.default_time(n, spec_n.delta_kappa)
            curve_n = MomentCurve(
                spec_n,
                initial_mean=expected_initial_mean(cfg.init, n),
                initial_variance=expected_initial_variance(cfg.init, n),
            )
            add("asymptote", n, t, curve_n.mean_at(t), curve_n.variance_at(t),
                theorem=phase_asymptote(spec_n, cfg.regime, t))
    if not records:
        raise ConfigError(
            "analytic needs model.N with run.checkpoints/run.steps, or "
            "run.regime with run.n_values"
        )
    ordered = [{c: rec[c] for c in columns} for rec in records]
    header = _resolved_header(
        cfg,
        "analytic",
        {
            "checkpoints": cfg.checkpoints,
            "steps": cfg.steps,
            "regime": None if cfg.regime is None else
            {"kind": cfg.regime.kind, "c": cfg.regime.c},
            "n_values": cfg.n_values,
        },
    )
    _write_records(cfg, ordered, header)
    if cfg.verbosity >= 1:
        _print_records(ordered)
    return 0


def cmd_phase_sweep(cfg: RunConfig) -> int:
    """Sweep N in one regime; exits 1 if any variance z-score exceeds 4."""
    if cfg.regime is None:
        raise ConfigError("phase-sweep needs run.regime")
    if not cfg.n_values:
        raise ConfigError("phase-sweep needs run.n_values")
    try:
        rows = phase_sweep(
            cfg.family,
            cfg.regime,
            cfg.n_values,
            replicas=cfg.replicas,
            base_seed=cfg.seed,
            init=cfg.init,
            threads=cfg.threads,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    records = sweep_records(rows)
    header = _resolved_header(
        cfg,
        "phase-sweep",
        {
            "regime": {"kind": cfg.regime.kind, "c": cfg.regime.c},
            "n_values": cfg.n_values,
        },
    )
    _write_records(cfg, records, header)
    if cfg.verbosity >= 1:
        _print_records(records)
        for row in rows:
            print(
                f"N={row.n_particles}: measured/theorem = {row.ratio:.4f}, "
                f"z = {row.z_score:.2f}"
            )
    worst = max(abs(r.z_score) for r in rows)
    if worst > Z_THRESHOLD:
        if cfg.verbosity >= 1:
            print(f"check failed: max |z| = {worst:.2f} > {Z_THRESHOLD}")
        return 1
    return 0


_COMMANDS = {
    "oracle-check": cmd_oracle_check,
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "phase-sweep": cmd_phase_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syncsim",
        description="simulator and exact analytics for synchronizing random walks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in _COMMANDS.items():
        p = sub.add_parser(name, help=func.__doc__.splitlines()[0].lower())
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument(
            "--replicas", type=int, default=None, help="override run.replicas"
        )
        p.add_argument("--out", default=None, help="override output.path")
        p.add_argument(
            "--format", choices=("csv", "json"), default=None,
            help="override output.format",
        )
        p.add_argument(
            "--threads", type=int, default=None, help="override run.threads"
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = parse_config(text)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            cfg.seed = args.seed
        if args.replicas is not None:
            if args.replicas < 2:
                raise ConfigError("--replicas must be >= 2")
            cfg.replicas = args.replicas
        if args.out is not None:
            cfg.out_path = args.out
        if args.format is not None:
            cfg.out_format = args.format
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            cfg.threads = args.threads
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericFailureError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
