"""Core types for the synchronizing random-walk model.

The model is a continuous-time Markov process for N labelled particles on
the real line.  Two kinds of transitions compete:

* free motion: each particle independently jumps by a random displacement
  at rate ``alpha``; displacements are drawn from a fixed jump law with
  first moment ``a`` and second moment ``b2 > 0``;
* synchronization: at rate ``delta`` an ordered tuple of distinct
  particles is drawn uniformly, split into consecutive groups according to
  a fixed signature, and every particle in a group adopts the coordinate
  of its group leader.

A configuration is a plain 1-d ``float64`` numpy array of coordinates.
The observables of interest are the sample mean and the sample variance
(``ddof=1``) of the coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Signature",
    "DiscreteJumps",
    "UniformJumps",
    "JumpDistribution",
    "SyncTerm",
    "ModelSpec",
    "ModelFamily",
    "sample_mean",
    "sample_variance",
    "distribution_moments",
    "sample_jump",
    "as_configuration",
]


@dataclass(frozen=True)
class Signature:
    """Group sizes for one synchronization channel.

    ``parts`` lists the sizes of the consecutive groups a drawn index
    tuple is split into.  Every part must be at least 2, since a group of
    one particle would synchronize nothing.
    """

    parts: tuple[int, ...]

    def __init__(self, parts: Sequence[int]):
        object.__setattr__(self, "parts", tuple(int(p) for p in parts))
        if not self.parts:
            raise ValueError("signature needs at least one group")
        for p in self.parts:
            if p < 2:
                raise ValueError(f"signature group sizes must be >= 2, got {p}")

    @property
    def size(self) -> int:
        """Total number of participating particles."""
        return sum(self.parts)

    @property
    def group_count(self) -> int:
        return len(self.parts)

    @property
    def kappa(self) -> int:
        """Contraction constant of the channel: sum of squared group sizes
        minus the number of participants.  Always positive."""
        return sum(p * p for p in self.parts) - self.size


@dataclass(frozen=True)
class DiscreteJumps:
    """Jump law concentrated on finitely many displacement atoms.

    ``atoms`` is a sequence of ``(displacement, probability)`` pairs.
    Probabilities must be positive and sum to 1; the second moment must be
    positive (a point mass at zero is rejected because a walk that never
    moves makes the long-time spread degenerate).
    """

    atoms: tuple[tuple[float, float], ...]

    def __init__(self, atoms: Sequence[tuple[float, float]]):
        canon = tuple((float(z), float(p)) for z, p in atoms)
        object.__setattr__(self, "atoms", canon)
        if not canon:
            raise ValueError("jump law needs at least one atom")
        total = math.fsum(p for _, p in canon)
        for z, p in canon:
            if not math.isfinite(z):
                raise ValueError(f"displacement atom must be finite, got {z}")
            if p <= 0.0:
                raise ValueError(f"atom probabilities must be > 0, got {p}")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom probabilities must sum to 1, got {total}")
        if self.second_moment <= 0.0:
            raise ValueError(
                "jump law must have positive second moment; a point mass at 0 "
                "gives a degenerate walk"
            )

    @property
    def mean(self) -> float:
        return math.fsum(z * p for z, p in self.atoms)

    @property
    def second_moment(self) -> float:
        return math.fsum(z * z * p for z, p in self.atoms)

    def displacements(self) -> np.ndarray:
        return np.array([z for z, _ in self.atoms], dtype=np.float64)

    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms], dtype=np.float64)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw one displacement (or ``size`` of them)."""
        z = self.displacements()
        idx = rng.choice(z.size, size=size, p=self.probabilities())
        picked = z[idx]
        return float(picked) if size is None else picked


@dataclass(frozen=True)
class UniformJumps:
    """Jump law uniform on the interval ``[lo, hi)``."""

    lo: float
    hi: float

    def __init__(self, lo: float, hi: float):
        object.__setattr__(self, "lo", float(lo))
        object.__setattr__(self, "hi", float(hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{lo}, {hi})")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def second_moment(self) -> float:
        # integral of x^2 / (hi - lo) over [lo, hi)
        return (self.lo * self.lo + self.lo * self.hi + self.hi * self.hi) / 3.0

    def sample(self, rng: np.random.Generator, size=None):
        picked = rng.uniform(self.lo, self.hi, size=size)
        return float(picked) if size is None else picked


JumpDistribution = Union[DiscreteJumps, UniformJumps]


def distribution_moments(jump: JumpDistribution) -> tuple[float, float]:
    """First and second moment ``(a, b2)`` of a jump law."""
    return jump.mean, jump.second_moment


def sample_jump(jump: JumpDistribution, rng: np.random.Generator) -> float:
    """Draw a single displacement from a jump law."""
    return jump.sample(rng)


@dataclass(frozen=True)
class SyncTerm:
    """One synchronization channel: a signature firing at rate ``delta``."""

    signature: Signature
    delta: float

    def __init__(self, signature: Signature, delta: float):
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "delta", float(delta))
        if not math.isfinite(self.delta) or self.delta <= 0.0:
            raise ValueError(f"synchronization rate must be > 0, got {delta}")


@dataclass(frozen=True)
class ModelSpec:
    """Full parameter set of an N-particle model.

    ``sync_terms`` may hold several channels; the process applies each at
    its own rate, so the effective contraction weight is the sum of
    ``delta * kappa`` over channels.
    """

    n_particles: int
    alpha: float
    sync_terms: tuple[SyncTerm, ...]
    jump: JumpDistribution

    def __init__(
        self,
        n_particles: int,
        alpha: float,
        sync_terms: Sequence[SyncTerm],
        jump: JumpDistribution,
    ):
        object.__setattr__(self, "n_particles", int(n_particles))
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "sync_terms", tuple(sync_terms))
        object.__setattr__(self, "jump", jump)
        if self.n_particles < 2:
            raise ValueError("need at least 2 particles")
        if not math.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ValueError(f"free jump rate alpha must be > 0, got {alpha}")
        if not self.sync_terms:
            raise ValueError("need at least one synchronization channel")
        for term in self.sync_terms:
            k = term.signature.size
            if k > self.n_particles:
                raise ValueError(
                    f"signature needs {k} distinct particles but the model "
                    f"has only {self.n_particles}"
                )

    @classmethod
    def single(
        cls,
        n_particles: int,
        alpha: float,
        delta: float,
        parts: Sequence[int],
        jump: JumpDistribution,
    ) -> "ModelSpec":
        """Convenience constructor for the common one-channel case."""
        return cls(n_particles, alpha, (SyncTerm(Signature(parts), delta),), jump)

    @property
    def total_sync_rate(self) -> float:
        return math.fsum(t.delta for t in self.sync_terms)

    @property
    def total_event_rate(self) -> float:
        """Rate of the embedded event clock: ``alpha * N`` plus all sync rates."""
        return self.alpha * self.n_particles + self.total_sync_rate

    @property
    def mean_holding_time(self) -> float:
        return 1.0 / self.total_event_rate

    @property
    def delta_kappa(self) -> float:
        """Sum of ``delta * kappa`` over channels; the numerator of the
        variance contraction rate."""
        return math.fsum(t.delta * t.signature.kappa for t in self.sync_terms)

    @property
    def contraction_rate(self) -> float:
        """Exponential rate at which the expected sample variance relaxes
        toward its plateau: ``delta_kappa / (N (N - 1))``."""
        n = self.n_particles
        return self.delta_kappa / (n * (n - 1))


@dataclass(frozen=True)
class ModelFamily:
    """A model with the particle count left open, for sweeps over N."""

    alpha: float
    sync_terms: tuple[SyncTerm, ...]
    jump: JumpDistribution

    def __init__(
        self, alpha: float, sync_terms: Sequence[SyncTerm], jump: JumpDistribution
    ):
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "sync_terms", tuple(sync_terms))
        object.__setattr__(self, "jump", jump)

    @classmethod
    def single(
        cls, alpha: float, delta: float, parts: Sequence[int], jump: JumpDistribution
    ) -> "ModelFamily":
        return cls(alpha, (SyncTerm(Signature(parts), delta),), jump)

    def at(self, n_particles: int) -> ModelSpec:
        return ModelSpec(n_particles, self.alpha, self.sync_terms, self.jump)


def as_configuration(coords, n_particles: int | None = None) -> np.ndarray:
    """Validate and convert coordinates to a 1-d float64 array."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"configuration must be 1-d, got shape {x.shape}")
    if n_particles is not None and x.size != n_particles:
        raise ValueError(
            f"configuration has {x.size} coordinates, model expects {n_particles}"
        )
    if not np.all(np.isfinite(x)):
        raise ValueError("configuration coordinates must be finite")
    return x


def sample_mean(coords) -> float:
    """Arithmetic mean of the coordinates."""
    x = as_configuration(coords)
    if x.size == 0:
        raise ValueError("configuration is empty")
    return float(x.mean())


def sample_variance(coords) -> float:
    """Sample variance of the coordinates with ``ddof=1``.

    Computed in centered two-pass form.  Equals the average squared
    pairwise difference ``sum_{m<n} (x_m - x_n)^2 / (N (N - 1))``, which is
    the natural measure of configuration spread, but the centered form is
    the one used everywhere because it is O(N) and numerically stable.
    """
    x = as_configuration(coords)
    if x.size < 2:
        raise ValueError("sample variance needs at least 2 coordinates")
    return float(np.var(x, ddof=1))
