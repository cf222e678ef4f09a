"""Event-driven simulation of the synchronizing walk.

The process is simulated exactly: every event is a draw from the embedded
chain (one exponential holding time at the total rate, then a categorical
choice between a single-particle jump and each synchronization channel).
``simulate`` runs against a grid of checkpoint times, ``simulate_embedded``
against a grid of event counts; both share the compiled event loop.

``next_event`` / ``apply_event`` expose a single step in pure Python so
the event distribution can be tested directly against the compiled path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _kernel
from .maps import apply_sync, sample_uniform_tuple
from .model import ModelSpec, as_configuration, sample_jump

__all__ = [
    "FreeJump",
    "SyncJump",
    "SimEvent",
    "Checkpoint",
    "ConfigDigest",
    "TrajectoryResult",
    "NumericFailureError",
    "next_event",
    "apply_event",
    "simulate",
    "simulate_embedded",
]

SeedLike = Union[int, Sequence[int], np.random.SeedSequence, np.random.Generator]


class NumericFailureError(RuntimeError):
    """A checkpoint observable came out non-finite.

    Carries ``events`` (events applied when the failure was detected) and
    ``checkpoint`` (index of the failing checkpoint).
    """

    def __init__(self, message: str, events: int, checkpoint: int):
        super().__init__(message)
        self.events = events
        self.checkpoint = checkpoint


@dataclass(frozen=True)
class FreeJump:
    """A single particle (1-based label) jumps by ``displacement``."""

    particle: int
    displacement: float


@dataclass(frozen=True)
class SyncJump:
    """Channel ``term_index`` (0-based into ``spec.sync_terms``) fires on
    the ordered label tuple ``indices``."""

    term_index: int
    indices: tuple[int, ...]


@dataclass(frozen=True)
class SimEvent:
    action: Union[FreeJump, SyncJump]
    holding_time: float


@dataclass(frozen=True)
class Checkpoint:
    """Observables recorded at one checkpoint.

    ``at`` is the checkpoint coordinate: a time for timed runs, an event
    count for embedded runs.  ``events`` counts all events applied up to
    and including the checkpoint.
    """

    at: float
    mean: float
    variance: float
    events: int


@dataclass(frozen=True)
class ConfigDigest:
    """Cheap summary of a configuration."""

    lo: float
    hi: float
    mean: float
    variance: float


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    checkpoints: tuple[Checkpoint, ...]
    final_coords: np.ndarray = field(repr=False)

    @property
    def final(self) -> ConfigDigest:
        x = self.final_coords
        return ConfigDigest(
            lo=float(x.min()),
            hi=float(x.max()),
            mean=float(x.mean()),
            variance=float(np.var(x, ddof=1)),
        )


def _as_rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def next_event(spec: ModelSpec, rng: np.random.Generator) -> SimEvent:
    """Draw one event of the embedded chain.

    The holding time is exponential at the total rate; the event is a free
    jump with probability ``alpha N / total`` and otherwise one of the
    synchronization channels, each proportionally to its rate.
    """
    n = spec.n_particles
    total = spec.total_event_rate
    dt = float(rng.exponential(spec.mean_holding_time))
    u = float(rng.random())
    if u < spec.alpha * n / total:
        particle = 1 + int(rng.integers(0, n))
        action: Union[FreeJump, SyncJump] = FreeJump(
            particle=particle, displacement=sample_jump(spec.jump, rng)
        )
    else:
        u2 = float(rng.random()) * spec.total_sync_rate
        term_index = len(spec.sync_terms) - 1
        acc = 0.0
        for r, term in enumerate(spec.sync_terms):
            acc += term.delta
            if u2 < acc:
                term_index = r
                break
        k = spec.sync_terms[term_index].signature.size
        action = SyncJump(
            term_index=term_index,
            indices=sample_uniform_tuple(k, n, rng),
        )
    return SimEvent(action=action, holding_time=dt)


def apply_event(
    spec: ModelSpec, event: SimEvent, coords, in_place: bool = False
) -> np.ndarray:
    """Apply one event to a configuration; returns the updated array."""
    x = np.asarray(coords, dtype=np.float64)
    if not in_place:
        x = x.copy()
    action = event.action
    if isinstance(action, FreeJump):
        if not 1 <= action.particle <= x.size:
            raise ValueError(f"particle label {action.particle} outside 1..{x.size}")
        x[action.particle - 1] += action.displacement
        return x
    sig = spec.sync_terms[action.term_index].signature
    return apply_sync(sig, action.indices, x, in_place=True)


def _checkpoint_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("checkpoints must be a 1-d sequence")
    if arr.size and not np.all(arr[:-1] <= arr[1:]):
        raise ValueError("checkpoints must be nondecreasing")
    if arr.size and arr[0] < 0:
        raise ValueError("checkpoints must be >= 0")
    if dtype == np.float64 and arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("checkpoint times must be finite")
    return arr


def _run(
    spec: ModelSpec,
    init_coords,
    grid: np.ndarray,
    rng: np.random.Generator,
    kernel,
    free_dynamics_only: bool,
) -> TrajectoryResult:
    x = as_configuration(init_coords, spec.n_particles).copy()
    perm = np.arange(spec.n_particles, dtype=np.int64)
    packed = _kernel.pack_model(spec, free_dynamics_only=free_dynamics_only)
    m, v, ev, fail_at = kernel(x, perm, grid, *packed, rng)
    if fail_at >= 0:
        raise NumericFailureError(
            f"non-finite observable at checkpoint {grid[fail_at]} after "
            f"{ev[fail_at]} events (coordinates overflowed)",
            events=int(ev[fail_at]),
            checkpoint=int(fail_at),
        )
    checkpoints = tuple(
        Checkpoint(at=float(grid[i]), mean=float(m[i]), variance=float(v[i]),
                   events=int(ev[i]))
        for i in range(grid.size)
    )
    return TrajectoryResult(checkpoints=checkpoints, final_coords=x)


def simulate(
    spec: ModelSpec,
    init_coords,
    checkpoint_times: Sequence[float],
    seed: SeedLike,
    free_dynamics_only: bool = False,
) -> TrajectoryResult:
    """Simulate one trajectory, recording observables at the given times.

    A checkpoint reflects every event with occurrence time <= its time
    (right-continuous sampling).  ``free_dynamics_only`` disables the
    synchronization channels, leaving independent walks; it exists so
    tests can isolate the two halves of the dynamics.
    """
    grid = _checkpoint_array(checkpoint_times, np.float64)
    rng = _as_rng(seed)
    return _run(spec, init_coords, grid, rng, _kernel.run_timed, free_dynamics_only)


def simulate_embedded(
    spec: ModelSpec,
    init_coords,
    checkpoint_steps: Sequence[int],
    seed: SeedLike,
    free_dynamics_only: bool = False,
) -> TrajectoryResult:
    """Simulate the embedded event chain, recording at given event counts.

    No holding times are drawn: checkpoint ``n`` is the state after
    exactly n events.
    """
    grid = _checkpoint_array(checkpoint_steps, np.int64)
    rng = _as_rng(seed)
    return _run(spec, init_coords, grid, rng, _kernel.run_stepped, free_dynamics_only)
