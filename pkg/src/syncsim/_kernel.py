"""Compiled event loops. Internal module.

The simulator draws a single exponential holding time per event (rate
``alpha * N + sum of sync rates``), classifies the event, applies it, and
records the sample mean and variance whenever the clock passes a
checkpoint.  Checkpoint semantics are right-continuous: the recorded state
includes every event with occurrence time <= the checkpoint.

The synchronization tuple is drawn with a partial Fisher-Yates shuffle of
a persistent label buffer.  Starting each draw from the buffer left by the
previous event is fine: the first k swap targets are uniform over the
remaining labels whatever order the buffer is in, so every ordered k-tuple
stays equally likely.

Both kernels release the GIL so replicas can run on worker threads.
"""
from __future__ import annotations

import numpy as np
from numba import njit

JUMP_DISCRETE = 0
JUMP_UNIFORM = 1


def pack_model(spec, free_dynamics_only: bool = False):
    """Flatten a ModelSpec into the plain arrays the kernels consume.

    With ``free_dynamics_only`` the synchronization channels are dropped,
    leaving a pure independent-walk process at total rate ``alpha * N``.
    """
    if free_dynamics_only:
        deltas = np.empty(0, dtype=np.float64)
        k_per_term = np.empty(0, dtype=np.int64)
        parts_flat = np.empty(0, dtype=np.int64)
        parts_off = np.zeros(1, dtype=np.int64)
    else:
        deltas = np.array([t.delta for t in spec.sync_terms], dtype=np.float64)
        k_per_term = np.array(
            [t.signature.size for t in spec.sync_terms], dtype=np.int64
        )
        parts_flat = np.array(
            [p for t in spec.sync_terms for p in t.signature.parts], dtype=np.int64
        )
        counts = [t.signature.group_count for t in spec.sync_terms]
        parts_off = np.concatenate(
            ([0], np.cumsum(counts, dtype=np.int64))
        ).astype(np.int64)
    jump = spec.jump
    if hasattr(jump, "atoms"):
        jump_kind = JUMP_DISCRETE
        atoms_z = jump.displacements()
        atoms_cum = np.cumsum(jump.probabilities())
        atoms_cum[-1] = 1.0
        lo = 0.0
        hi = 0.0
    else:
        jump_kind = JUMP_UNIFORM
        atoms_z = np.empty(0, dtype=np.float64)
        atoms_cum = np.empty(0, dtype=np.float64)
        lo = jump.lo
        hi = jump.hi
    return (
        spec.alpha,
        deltas,
        k_per_term,
        parts_flat,
        parts_off,
        jump_kind,
        atoms_z,
        atoms_cum,
        lo,
        hi,
    )


@njit(cache=True, nogil=True, inline="always")
def _apply_one_event(
    x,
    perm,
    p_free,
    deltas,
    k_per_term,
    parts_flat,
    parts_off,
    jump_kind,
    atoms_z,
    atoms_cum,
    lo,
    hi,
    rng,
):
    n = x.shape[0]
    u = rng.random()
    if u < p_free:
        i = rng.integers(0, n)
        if jump_kind == JUMP_DISCRETE:
            ai = np.searchsorted(atoms_cum, rng.random(), side="right")
            if ai >= atoms_z.shape[0]:
                ai = atoms_z.shape[0] - 1
            x[i] += atoms_z[ai]
        else:
            x[i] += lo + (hi - lo) * rng.random()
    else:
        # pick the synchronization channel proportionally to its rate
        total_sync = 0.0
        for r in range(deltas.shape[0]):
            total_sync += deltas[r]
        u2 = rng.random() * total_sync
        term = deltas.shape[0] - 1
        acc = 0.0
        for r in range(deltas.shape[0]):
            acc += deltas[r]
            if u2 < acc:
                term = r
                break
        k = k_per_term[term]
        for j in range(k):
            swap = j + rng.integers(0, n - j)
            tmp = perm[j]
            perm[j] = perm[swap]
            perm[swap] = tmp
        pos = 0
        for g in range(parts_off[term], parts_off[term + 1]):
            size = parts_flat[g]
            lead_val = x[perm[pos]]
            for j in range(pos + 1, pos + size):
                x[perm[j]] = lead_val
            pos += size


@njit(cache=True, nogil=True, inline="always")
def _record(x, m_out, v_out, ci):
    n = x.shape[0]
    mean = 0.0
    for i in range(n):
        mean += x[i]
    mean /= n
    ssd = 0.0
    for i in range(n):
        d = x[i] - mean
        ssd += d * d
    m_out[ci] = mean
    v_out[ci] = ssd / (n - 1)
    return np.isfinite(mean) and np.isfinite(v_out[ci])


@njit(cache=True, nogil=True)
def run_timed(
    x,
    perm,
    checkpoint_times,
    alpha,
    deltas,
    k_per_term,
    parts_flat,
    parts_off,
    jump_kind,
    atoms_z,
    atoms_cum,
    lo,
    hi,
    rng,
):
    n = x.shape[0]
    total_rate = alpha * n
    for r in range(deltas.shape[0]):
        total_rate += deltas[r]
    mean_dt = 1.0 / total_rate
    p_free = alpha * n * mean_dt
    n_ck = checkpoint_times.shape[0]
    m_out = np.zeros(n_ck, dtype=np.float64)
    v_out = np.zeros(n_ck, dtype=np.float64)
    ev_out = np.zeros(n_ck, dtype=np.int64)
    events = 0
    fail_at = -1
    t_next = rng.exponential(mean_dt)
    for ci in range(n_ck):
        tc = checkpoint_times[ci]
        while t_next <= tc:
            _apply_one_event(
                x, perm, p_free, deltas, k_per_term, parts_flat, parts_off,
                jump_kind, atoms_z, atoms_cum, lo, hi, rng,
            )
            events += 1
            t_next += rng.exponential(mean_dt)
        ev_out[ci] = events
        if not _record(x, m_out, v_out, ci):
            fail_at = ci
            break
    return m_out, v_out, ev_out, fail_at


@njit(cache=True, nogil=True)
def run_stepped(
    x,
    perm,
    checkpoint_steps,
    alpha,
    deltas,
    k_per_term,
    parts_flat,
    parts_off,
    jump_kind,
    atoms_z,
    atoms_cum,
    lo,
    hi,
    rng,
):
    n = x.shape[0]
    total_rate = alpha * n
    for r in range(deltas.shape[0]):
        total_rate += deltas[r]
    p_free = alpha * n / total_rate
    n_ck = checkpoint_steps.shape[0]
    m_out = np.zeros(n_ck, dtype=np.float64)
    v_out = np.zeros(n_ck, dtype=np.float64)
    ev_out = np.zeros(n_ck, dtype=np.int64)
    events = 0
    fail_at = -1
    for ci in range(n_ck):
        target = checkpoint_steps[ci]
        while events < target:
            _apply_one_event(
                x, perm, p_free, deltas, k_per_term, parts_flat, parts_off,
                jump_kind, atoms_z, atoms_cum, lo, hi, rng,
            )
            events += 1
        ev_out[ci] = events
        if not _record(x, m_out, v_out, ci):
            fail_at = ci
            break
    return m_out, v_out, ev_out, fail_at
