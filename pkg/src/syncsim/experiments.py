"""Monte Carlo harness: replicated runs, estimates, and phase sweeps.

Replica r of an experiment gets its own generator seeded from
``(base_seed, seed_salt, r)``, so results are reproducible, replicas are
independent, and a later batch started at a ``replica_offset`` extends an
earlier one without overlapping streams.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .dynamics import simulate
from .model import (
    JumpDistribution,
    ModelFamily,
    ModelSpec,
    as_configuration,
    sample_mean,
    sample_variance,
)
from .moments import MomentCurve, PhaseRegime, phase_asymptote

__all__ = [
    "PointInit",
    "IIDInit",
    "SpreadInit",
    "ExplicitInit",
    "InitSpec",
    "ExperimentSpec",
    "EstimateRow",
    "PhaseSweepRow",
    "DriftCheck",
    "init_configuration",
    "expected_initial_mean",
    "expected_initial_variance",
    "replica_observables",
    "run_experiment",
    "drift_check",
    "phase_sweep",
    "moment_curve_for",
    "estimate_records",
    "sweep_records",
    "write_records_csv",
    "write_records_json",
    "CSV_COLUMNS",
]


@dataclass(frozen=True)
class PointInit:
    """All particles start at the same coordinate."""

    value: float = 0.0


@dataclass(frozen=True)
class IIDInit:
    """Coordinates drawn independently from a jump law."""

    jump: JumpDistribution


@dataclass(frozen=True)
class SpreadInit:
    """Evenly spaced coordinates spanning ``[0, width]`` endpoints included."""

    width: float

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError(f"spread width must be > 0, got {self.width}")


@dataclass(frozen=True)
class ExplicitInit:
    """A fixed configuration, one coordinate per particle."""

    coords: tuple[float, ...]

    def __init__(self, coords: Sequence[float]):
        object.__setattr__(self, "coords", tuple(float(c) for c in coords))


InitSpec = Union[PointInit, IIDInit, SpreadInit, ExplicitInit]


def init_configuration(
    init: InitSpec, n_particles: int, rng: np.random.Generator
) -> np.ndarray:
    """Materialize an initial configuration (only ``IIDInit`` consumes rng)."""
    n = int(n_particles)
    if isinstance(init, PointInit):
        return np.full(n, float(init.value), dtype=np.float64)
    if isinstance(init, IIDInit):
        return np.asarray(init.jump.sample(rng, size=n), dtype=np.float64)
    if isinstance(init, SpreadInit):
        return init.width * np.arange(n, dtype=np.float64) / (n - 1)
    if isinstance(init, ExplicitInit):
        return as_configuration(init.coords, n)
    raise TypeError(f"unknown init spec {init!r}")


def expected_initial_mean(init: InitSpec, n_particles: int) -> float:
    if isinstance(init, PointInit):
        return float(init.value)
    if isinstance(init, IIDInit):
        return init.jump.mean
    if isinstance(init, SpreadInit):
        return 0.5 * init.width
    if isinstance(init, ExplicitInit):
        return sample_mean(init.coords)
    raise TypeError(f"unknown init spec {init!r}")


def expected_initial_variance(init: InitSpec, n_particles: int) -> float:
    """Expected sample variance at time zero.

    For the evenly spaced start the closed form is
    ``width**2 * N * (N + 1) / (12 * (N - 1)**2)``; for iid draws the
    sample variance is unbiased, so the expectation is the law's variance
    ``b2 - a**2``.
    """
    n = int(n_particles)
    if isinstance(init, PointInit):
        return 0.0
    if isinstance(init, IIDInit):
        a, b2 = init.jump.mean, init.jump.second_moment
        return b2 - a * a
    if isinstance(init, SpreadInit):
        return init.width**2 * n * (n + 1) / (12.0 * (n - 1) ** 2)
    if isinstance(init, ExplicitInit):
        return sample_variance(init.coords)
    raise TypeError(f"unknown init spec {init!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """A replicated simulation: model, start, checkpoint grid, seeding."""

    model: ModelSpec
    init: InitSpec
    checkpoints: tuple[float, ...]
    replicas: int
    base_seed: int
    seed_salt: int = 0

    def __init__(
        self,
        model: ModelSpec,
        init: InitSpec,
        checkpoints: Sequence[float],
        replicas: int,
        base_seed: int,
        seed_salt: int = 0,
    ):
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "init", init)
        object.__setattr__(
            self, "checkpoints", tuple(float(t) for t in checkpoints)
        )
        object.__setattr__(self, "replicas", int(replicas))
        object.__setattr__(self, "base_seed", int(base_seed))
        object.__setattr__(self, "seed_salt", int(seed_salt))
        if not self.checkpoints:
            raise ValueError("need at least one checkpoint")
        if any(t < 0 for t in self.checkpoints):
            raise ValueError("checkpoint times must be >= 0")
        if any(
            b < a for a, b in zip(self.checkpoints, self.checkpoints[1:])
        ):
            raise ValueError("checkpoint times must be nondecreasing")
        if self.replicas < 2:
            raise ValueError("need at least 2 replicas for stderr estimates")
        if isinstance(init, ExplicitInit) and len(init.coords) != model.n_particles:
            raise ValueError(
                f"explicit init has {len(init.coords)} coordinates, model "
                f"expects {model.n_particles}"
            )


def _replica_rng(base_seed: int, salt: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((base_seed, salt, index)))


def replica_observables(
    exp: ExperimentSpec,
    replica_offset: int = 0,
    threads: int = 1,
    free_dynamics_only: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-replica observables on the checkpoint grid.

    Returns ``(means, variances, events)``, each of shape
    ``(replicas, len(checkpoints))``, with row r produced by the stream
    seeded from ``(base_seed, seed_salt, replica_offset + r)``.
    """
    n_ck = len(exp.checkpoints)
    means = np.empty((exp.replicas, n_ck), dtype=np.float64)
    variances = np.empty((exp.replicas, n_ck), dtype=np.float64)
    events = np.empty((exp.replicas, n_ck), dtype=np.int64)

    def one(r: int) -> None:
        rng = _replica_rng(exp.base_seed, exp.seed_salt, replica_offset + r)
        x0 = init_configuration(exp.init, exp.model.n_particles, rng)
        res = simulate(
            exp.model,
            x0,
            exp.checkpoints,
            rng,
            free_dynamics_only=free_dynamics_only,
        )
        for i, ck in enumerate(res.checkpoints):
            means[r, i] = ck.mean
            variances[r, i] = ck.variance
            events[r, i] = ck.events

    if threads <= 1:
        for r in range(exp.replicas):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(one, range(exp.replicas)))
    return means, variances, events


def _stderr(samples: np.ndarray) -> float:
    return float(samples.std(ddof=1) / math.sqrt(samples.size))


def _z_score(estimate: float, stderr: float, target: float) -> float:
    diff = estimate - target
    if stderr == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / stderr


@dataclass(frozen=True)
class EstimateRow:
    """Monte Carlo estimates at one checkpoint, with the exact curve value."""

    t: float
    m_mean: float
    m_stderr: float
    v_mean: float
    v_stderr: float
    v_analytic: float
    z_score: float


def moment_curve_for(model: ModelSpec, init: InitSpec) -> MomentCurve:
    """Exact moment curve matching an experiment's initial condition."""
    n = model.n_particles
    return MomentCurve(
        model,
        initial_mean=expected_initial_mean(init, n),
        initial_variance=expected_initial_variance(init, n),
    )


def run_experiment(
    exp: ExperimentSpec,
    replica_offset: int = 0,
    threads: int = 1,
) -> list[EstimateRow]:
    """Run all replicas and reduce to one estimate row per checkpoint.

    ``v_analytic`` is the exact expected sample variance for the
    experiment's initial condition, and ``z_score`` measures the variance
    estimate against it in stderr units.
    """
    means, variances, _ = replica_observables(
        exp, replica_offset=replica_offset, threads=threads
    )
    curve = moment_curve_for(exp.model, exp.init)
    rows = []
    for i, t in enumerate(exp.checkpoints):
        v_mean = float(variances[:, i].mean())
        v_stderr = _stderr(variances[:, i])
        v_exact = curve.variance_at(t)
        rows.append(
            EstimateRow(
                t=float(t),
                m_mean=float(means[:, i].mean()),
                m_stderr=_stderr(means[:, i]),
                v_mean=v_mean,
                v_stderr=v_stderr,
                v_analytic=v_exact,
                z_score=_z_score(v_mean, v_stderr, v_exact),
            )
        )
    return rows


@dataclass(frozen=True)
class DriftCheck:
    """Fitted drift of the sample mean against the exact slope."""

    slope: float
    slope_stderr: float
    target: float

    @property
    def z_score(self) -> float:
        return _z_score(self.slope, self.slope_stderr, self.target)


def drift_check(
    exp: ExperimentSpec,
    replica_offset: int = 0,
    threads: int = 1,
) -> DriftCheck:
    """Least-squares slope of the mean trajectory versus ``alpha * a``.

    A slope is fitted per replica and the replica slopes are averaged, so
    the stderr comes from genuinely independent samples.  Needs at least
    two distinct checkpoint times.
    """
    t = np.asarray(exp.checkpoints, dtype=np.float64)
    t_centered = t - t.mean()
    denom = float(t_centered @ t_centered)
    if denom == 0.0:
        raise ValueError("drift fit needs at least two distinct checkpoint times")
    means, _, _ = replica_observables(
        exp, replica_offset=replica_offset, threads=threads
    )
    slopes = (means - means.mean(axis=1, keepdims=True)) @ t_centered / denom
    target = exp.model.alpha * exp.model.jump.mean
    return DriftCheck(
        slope=float(slopes.mean()),
        slope_stderr=_stderr(slopes),
        target=float(target),
    )


@dataclass(frozen=True)
class PhaseSweepRow:
    """One (N, t) cell of a phase sweep."""

    n_particles: int
    t: float
    replicas: int
    m_mean: float
    m_stderr: float
    v_mean: float
    v_stderr: float
    v_analytic: float
    theorem_value: float
    z_score: float

    @property
    def ratio(self) -> float:
        """Measured variance over the regime's limit expression."""
        return self.v_mean / self.theorem_value


def phase_sweep(
    family: ModelFamily,
    regime: PhaseRegime,
    n_values: Sequence[int],
    replicas: int,
    base_seed: int,
    init: InitSpec | None = None,
    times: Sequence[float] | None = None,
    threads: int = 1,
) -> list[PhaseSweepRow]:
    """Monte Carlo sweep over N inside one regime.

    For each N the checkpoint time defaults to the regime's representative
    time; pass ``times`` (one per N) to override.  Each row compares the
    variance estimate against both the exact curve (``z_score``) and the
    regime's limit expression (``theorem_value``).  Rows use disjoint
    streams because the particle count is mixed into the seed.
    """
    if init is None:
        init = PointInit(0.0)
    ns = [int(n) for n in n_values]
    if times is not None and len(times) != len(ns):
        raise ValueError("times must match n_values in length")
    rows = []
    for i, n in enumerate(ns):
        spec = family.at(n)
        t = float(times[i]) if times is not None else regime.default_time(
            n, spec.delta_kappa
        )
        exp = ExperimentSpec(
            model=spec,
            init=init,
            checkpoints=(t,),
            replicas=replicas,
            base_seed=base_seed,
            seed_salt=n,
        )
        est = run_experiment(exp, threads=threads)[0]
        rows.append(
            PhaseSweepRow(
                n_particles=n,
                t=t,
                replicas=replicas,
                m_mean=est.m_mean,
                m_stderr=est.m_stderr,
                v_mean=est.v_mean,
                v_stderr=est.v_stderr,
                v_analytic=est.v_analytic,
                theorem_value=phase_asymptote(spec, regime, t),
                z_score=est.z_score,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# output records

CSV_COLUMNS = (
    "N",
    "t",
    "replicas",
    "M_mean",
    "M_stderr",
    "V_mean",
    "V_stderr",
    "V_analytic",
    "theorem_value",
    "z_score",
)


def estimate_records(
    rows: Iterable[EstimateRow], model: ModelSpec, replicas: int
) -> list[dict]:
    """Estimate rows as records with the fixed output columns.

    Plain runs have no regime, so ``theorem_value`` is NaN.
    """
    return [
        {
            "N": model.n_particles,
            "t": row.t,
            "replicas": int(replicas),
            "M_mean": row.m_mean,
            "M_stderr": row.m_stderr,
            "V_mean": row.v_mean,
            "V_stderr": row.v_stderr,
            "V_analytic": row.v_analytic,
            "theorem_value": math.nan,
            "z_score": row.z_score,
        }
        for row in rows
    ]


def sweep_records(rows: Iterable[PhaseSweepRow]) -> list[dict]:
    return [
        {
            "N": row.n_particles,
            "t": row.t,
            "replicas": row.replicas,
            "M_mean": row.m_mean,
            "M_stderr": row.m_stderr,
            "V_mean": row.v_mean,
            "V_stderr": row.v_stderr,
            "V_analytic": row.v_analytic,
            "theorem_value": row.theorem_value,
            "z_score": row.z_score,
        }
        for row in rows
    ]


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records: Sequence[Mapping], path, header: Mapping) -> None:
    """Write records as CSV with a single ``#`` comment line holding the
    resolved run configuration.  Output bytes are a pure function of the
    inputs, so identical runs produce identical files."""
    columns = list(records[0].keys()) if records else list(CSV_COLUMNS)
    lines = ["# " + json.dumps(dict(header), sort_keys=True)]
    lines.append(",".join(columns))
    for rec in records:
        lines.append(",".join(_format_cell(rec[c]) for c in columns))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_records_json(records: Sequence[Mapping], path, header: Mapping) -> None:
    """Write records as JSON with the resolved configuration as the leading
    member.  NaN cells become nulls so the output stays standard JSON."""
    columns = list(records[0].keys()) if records else list(CSV_COLUMNS)

    def cell(value):
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value

    doc = {
        "config": dict(header),
        "columns": columns,
        "rows": [[cell(rec[c]) for c in columns] for rec in records],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")
