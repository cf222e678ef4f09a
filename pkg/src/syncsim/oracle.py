"""Exact generator action on the mean and variance observables.

Two routes are provided on purpose:

* brute force: average the observable change over every ordered tuple the
  synchronization channel can draw (and over every single-particle jump
  for the free part), weighting each channel by its rate.  This is the
  definition of the generator applied to the observable, with no algebra
  in between.
* closed form: the algebraic reductions
  ``sync part of dE[V] = -(delta_kappa / (N (N - 1))) * V``,
  ``free part of dE[V] = alpha * b2`` and ``dE[M] = alpha * a``.

The brute-force functions exist so the closed forms can be checked against
them on small N; they must stay independent of the closed-form code paths.
"""
from __future__ import annotations

import math

import numpy as np

from .maps import enumerate_tuples, falling_factorial
from .model import ModelSpec, as_configuration, sample_variance

__all__ = [
    "sync_variance_drift_enumerated",
    "sync_mean_drift_enumerated",
    "free_variance_drift_enumerated",
    "variance_drift",
    "mean_drift",
]

_CHUNK = 16384


def _tuple_chunks(k: int, n: int):
    """Ordered k-tuples from 1..n as int64 arrays of shape (<=_CHUNK, k)."""
    block: list[tuple[int, ...]] = []
    for tup in enumerate_tuples(k, n):
        block.append(tup)
        if len(block) == _CHUNK:
            yield np.asarray(block, dtype=np.int64)
            block = []
    if block:
        yield np.asarray(block, dtype=np.int64)


def _synced_chunk(x: np.ndarray, parts: tuple[int, ...], tuples: np.ndarray) -> np.ndarray:
    """Apply the synchronization map for every tuple row, vectorized.

    Returns an array of shape (rows, N): row r is the configuration after
    synchronizing ``x`` along ``tuples[r]``.
    """
    rows = tuples.shape[0]
    out = np.repeat(x[np.newaxis, :], rows, axis=0)
    row_ix = np.arange(rows)[:, np.newaxis]
    start = 0
    for part in parts:
        leaders = tuples[:, start] - 1
        members = tuples[:, start + 1 : start + part] - 1
        out[row_ix, members] = x[leaders][:, np.newaxis]
        start += part
    return out


def sync_variance_drift_enumerated(spec: ModelSpec, coords) -> float:
    """Exact synchronization contribution to the drift of the sample variance.

    For each channel, averages ``V(mapped x) - V(x)`` over all ordered
    tuples and multiplies by the channel rate; channels are summed.  Uses
    compensated summation so the result is deterministic and exact to
    roundoff regardless of chunking.
    """
    x = as_configuration(coords, spec.n_particles)
    n = spec.n_particles
    v0 = float(np.var(x, ddof=1))
    total = 0.0
    for term in spec.sync_terms:
        k = term.signature.size
        parts = term.signature.parts
        pieces = []
        for tuples in _tuple_chunks(k, n):
            mapped = _synced_chunk(x, parts, tuples)
            dv = np.var(mapped, axis=1, ddof=1) - v0
            pieces.append(math.fsum(dv.tolist()))
        count = falling_factorial(n, k)
        total += term.delta * math.fsum(pieces) / count
    return total


def sync_mean_drift_enumerated(spec: ModelSpec, coords) -> float:
    """Exact synchronization contribution to the drift of the sample mean.

    Zero in exact arithmetic for every configuration: within a group each
    label is equally likely to lead, so coordinate exchanges balance out.
    Kept brute force so that cancellation is verified, not assumed.
    """
    x = as_configuration(coords, spec.n_particles)
    n = spec.n_particles
    m0 = float(x.mean())
    total = 0.0
    for term in spec.sync_terms:
        k = term.signature.size
        parts = term.signature.parts
        pieces = []
        for tuples in _tuple_chunks(k, n):
            mapped = _synced_chunk(x, parts, tuples)
            dm = mapped.mean(axis=1) - m0
            pieces.append(math.fsum(dm.tolist()))
        count = falling_factorial(n, k)
        total += term.delta * math.fsum(pieces) / count
    return total


def free_variance_drift_enumerated(spec: ModelSpec, coords) -> float:
    """Exact free-motion contribution to the drift of the sample variance.

    Averages ``V(x with particle i displaced by z) - V(x)`` over every
    particle and every atom of the jump law, times ``alpha``.  Only defined
    for discrete jump laws, where the displacement average is a finite sum.
    Equals ``alpha * b2`` for every configuration.
    """
    x = as_configuration(coords, spec.n_particles)
    jump = spec.jump
    if not hasattr(jump, "atoms"):
        raise ValueError(
            "brute-force free drift needs a discrete jump law; continuous laws "
            "have no finite atom sum to enumerate"
        )
    v0 = sample_variance(x)
    pieces = []
    for i in range(spec.n_particles):
        for z, p in jump.atoms:
            y = x.copy()
            y[i] += z
            pieces.append(p * (sample_variance(y) - v0))
    return spec.alpha * math.fsum(pieces)


def variance_drift(spec: ModelSpec, variance: float) -> float:
    """Closed-form drift of the expected sample variance at level ``variance``:
    ``alpha * b2 - contraction_rate * variance``."""
    return spec.alpha * spec.jump.second_moment - spec.contraction_rate * float(
        variance
    )


def mean_drift(spec: ModelSpec) -> float:
    """Closed-form drift of the expected sample mean: ``alpha * a``,
    independent of the configuration."""
    return spec.alpha * spec.jump.mean
