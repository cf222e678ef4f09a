"""Synchronization maps on index tuples.

Particle labels are 1-based in every public interface of this module.
A signature with parts ``(k_1, ..., k_l)`` splits an ordered tuple of
``k = k_1 + ... + k_l`` distinct labels into consecutive groups; the first
label of each group is the group leader and the remaining members adopt
the leader's coordinate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .model import Signature

__all__ = [
    "SyncGroup",
    "EnumerationTooLargeError",
    "TUPLE_ENUMERATION_GUARD",
    "partition_tuple",
    "apply_sync",
    "mean_shift",
    "sample_uniform_tuple",
    "enumerate_tuples",
    "falling_factorial",
]

# Refuse to enumerate ordered-tuple spaces larger than this.
TUPLE_ENUMERATION_GUARD = 10**7


class EnumerationTooLargeError(ValueError):
    """Raised when an exhaustive tuple enumeration would be too large."""


def falling_factorial(n: int, k: int) -> int:
    """Number of ordered k-tuples of distinct labels from n: n (n-1) ... (n-k+1)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _check_tuple(signature: Signature, indices: Sequence[int], n_particles: int):
    k = signature.size
    if len(indices) != k:
        raise ValueError(
            f"signature expects a tuple of {k} labels, got {len(indices)}"
        )
    seen = set()
    for i in indices:
        if not 1 <= i <= n_particles:
            raise ValueError(f"label {i} outside 1..{n_particles}")
        if i in seen:
            raise ValueError(f"labels must be distinct, {i} repeats")
        seen.add(i)


@dataclass(frozen=True)
class SyncGroup:
    """One group of a partitioned tuple: a leader and its followers."""

    leader: int
    followers: tuple[int, ...]

    @property
    def members(self) -> tuple[int, ...]:
        return (self.leader,) + self.followers


def partition_tuple(
    signature: Signature, indices: Sequence[int]
) -> tuple[SyncGroup, ...]:
    """Split an ordered tuple of distinct labels into the signature's groups.

    Group boundaries follow tuple order: the first ``k_1`` labels form the
    first group, the next ``k_2`` the second, and so on.  Within a group
    the first label is the leader; it is never listed among the followers.
    """
    idx = tuple(int(i) for i in indices)
    _check_tuple(signature, idx, max(idx) if idx else 0)
    groups = []
    start = 0
    for part in signature.parts:
        block = idx[start : start + part]
        groups.append(SyncGroup(leader=block[0], followers=block[1:]))
        start += part
    return tuple(groups)


def apply_sync(
    signature: Signature,
    indices: Sequence[int],
    coords,
    in_place: bool = False,
) -> np.ndarray:
    """Apply one synchronization event to a configuration.

    Every follower in every group gets its leader's coordinate; all other
    coordinates are untouched.  Returns the updated configuration (a copy
    unless ``in_place``).
    """
    x = np.asarray(coords, dtype=np.float64)
    idx = tuple(int(i) for i in indices)
    _check_tuple(signature, idx, x.size)
    out = x if in_place else x.copy()
    start = 0
    for part in signature.parts:
        lead_val = out[idx[start] - 1]
        for j in range(start + 1, start + part):
            out[idx[j] - 1] = lead_val
        start += part
    return out


def mean_shift(signature: Signature, indices: Sequence[int], coords) -> float:
    """Change of the configuration mean caused by one synchronization event.

    Accumulated directly from leader/follower differences without building
    the mapped configuration, so tests can cross-check this route against
    ``apply_sync`` followed by a mean.
    """
    x = np.asarray(coords, dtype=np.float64)
    idx = tuple(int(i) for i in indices)
    _check_tuple(signature, idx, x.size)
    shift = 0.0
    start = 0
    for part in signature.parts:
        lead_val = x[idx[start] - 1]
        for j in range(start + 1, start + part):
            shift += lead_val - x[idx[j] - 1]
        start += part
    return shift / x.size


def sample_uniform_tuple(
    k: int, n_particles: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """Draw an ordered k-tuple of distinct labels uniformly from 1..N.

    Uses a partial Fisher-Yates shuffle, so every one of the
    ``n (n-1) ... (n-k+1)`` ordered tuples has equal probability.
    """
    if k < 1:
        raise ValueError(f"tuple length must be >= 1, got {k}")
    if k > n_particles:
        raise ValueError(
            f"cannot draw {k} distinct labels from {n_particles} particles"
        )
    labels = np.arange(1, n_particles + 1, dtype=np.int64)
    for j in range(k):
        swap = j + int(rng.integers(0, n_particles - j))
        labels[j], labels[swap] = labels[swap], labels[j]
    return tuple(int(v) for v in labels[:k])


def enumerate_tuples(k: int, n_particles: int) -> Iterator[tuple[int, ...]]:
    """Yield every ordered k-tuple of distinct labels from 1..N exactly once.

    Raises :class:`EnumerationTooLargeError` when the tuple space exceeds
    ``TUPLE_ENUMERATION_GUARD``.
    """
    if k < 1 or k > n_particles:
        raise ValueError(
            f"cannot enumerate {k}-tuples of distinct labels from {n_particles}"
        )
    count = falling_factorial(n_particles, k)
    if count > TUPLE_ENUMERATION_GUARD:
        raise EnumerationTooLargeError(
            f"{count} ordered tuples exceeds the enumeration guard "
            f"({TUPLE_ENUMERATION_GUARD})"
        )
    return iter(itertools.permutations(range(1, n_particles + 1), k))
