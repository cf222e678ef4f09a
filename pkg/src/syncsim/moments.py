"""Exact moment curves and long-time asymptotics.

The expected sample mean and expected sample variance obey closed linear
equations, so both the embedded event chain and the continuous-time curves
can be evaluated exactly:

* per event (embedded chain, mean holding time ``gamma``):
  ``mean(n) = mean(0) + n * gamma * alpha * a`` and
  ``var(n) = plateau + (var(0) - plateau) * q**n`` with
  ``q = 1 - gamma * contraction_rate``;
* in continuous time:
  ``mean(t) = mean(0) + alpha * a * t`` and
  ``var(t) = plateau + (var(0) - plateau) * exp(-contraction_rate * t)``;
* ``plateau = alpha * b2 * N * (N - 1) / delta_kappa``.

The variance curve passes through three regimes as t grows with N:
linear growth ``alpha * b2 * t`` while ``t << N**2``, a bounded multiple
of ``N**2`` when ``t = c * N**2``, and the plateau once
``t >> N**2``.  ``phase_asymptote`` evaluates the corresponding limit
expressions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .model import ModelFamily, ModelSpec

__all__ = [
    "MomentCurve",
    "PhaseRegime",
    "GrowingSpreadCheck",
    "phase_asymptote",
    "check_growing_initial_spread",
]


@dataclass(frozen=True)
class MomentCurve:
    """Exact mean/variance curves for a model and an initial condition.

    ``initial_mean`` and ``initial_variance`` are the expectations of the
    sample mean and sample variance at time zero.
    """

    model: ModelSpec
    initial_mean: float = 0.0
    initial_variance: float = 0.0

    def __init__(
        self,
        model: ModelSpec,
        initial_mean: float = 0.0,
        initial_variance: float = 0.0,
    ):
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "initial_mean", float(initial_mean))
        object.__setattr__(self, "initial_variance", float(initial_variance))
        if not math.isfinite(self.initial_mean):
            raise ValueError("initial mean must be finite")
        if not (math.isfinite(self.initial_variance) and self.initial_variance >= 0):
            raise ValueError("initial variance must be finite and >= 0")

    @property
    def mean_holding_time(self) -> float:
        return self.model.mean_holding_time

    @property
    def contraction_rate(self) -> float:
        return self.model.contraction_rate

    @property
    def plateau(self) -> float:
        """Fixed point of the variance drift: ``alpha * b2 / contraction_rate``."""
        return self.model.alpha * self.model.jump.second_moment / self.contraction_rate

    @property
    def step_factor(self) -> float:
        """Variance contraction per event, ``q = 1 - gamma * contraction_rate``.

        Always strictly inside (0, 1): ``kappa <= k (k - 1) <= N (N - 1)``
        gives ``gamma * contraction_rate <= delta_kappa / (N (N - 1) * Lambda)
        < 1``.
        """
        return 1.0 - self.mean_holding_time * self.contraction_rate

    def mean_after_steps(self, n: int) -> float:
        """Expected sample mean after n events of the embedded chain."""
        if n < 0:
            raise ValueError("step count must be >= 0")
        drift = self.model.alpha * self.model.jump.mean
        return self.initial_mean + n * self.mean_holding_time * drift

    def variance_after_steps(self, n: int) -> float:
        """Expected sample variance after n events of the embedded chain.

        Evaluated as the convex combination
        ``initial * q**n + plateau * (1 - q**n)`` with ``q**n`` and
        ``1 - q**n`` computed via ``log1p``/``expm1``, so there is no
        cancellation for tiny ``1 - q`` or huge ``n``.
        """
        if n < 0:
            raise ValueError("step count must be >= 0")
        log_q = math.log1p(-self.mean_holding_time * self.contraction_rate)
        qn = math.exp(n * log_q)
        one_minus_qn = -math.expm1(n * log_q)
        return self.initial_variance * qn + self.plateau * one_minus_qn

    def mean_at(self, t: float) -> float:
        """Expected sample mean at continuous time t."""
        if t < 0:
            raise ValueError("time must be >= 0")
        return self.initial_mean + self.model.alpha * self.model.jump.mean * t

    def variance_at(self, t: float) -> float:
        """Expected sample variance at continuous time t.

        Same convex-combination evaluation as :meth:`variance_after_steps`,
        with weight ``exp(-contraction_rate * t)``.
        """
        if t < 0:
            raise ValueError("time must be >= 0")
        w = math.exp(-self.contraction_rate * t)
        one_minus_w = -math.expm1(-self.contraction_rate * t)
        return self.initial_variance * w + self.plateau * one_minus_w


@dataclass(frozen=True)
class PhaseRegime:
    """One of the three long-time regimes of the variance curve.

    ``kind`` is ``"early"`` (t much smaller than N**2), ``"critical"``
    (t = c * N**2 for a fixed c > 0), or ``"late"`` (t much larger than
    N**2).  ``c`` is only meaningful for the critical regime.
    """

    kind: str
    c: float | None = None

    def __init__(self, kind: str, c: float | None = None):
        object.__setattr__(self, "kind", str(kind))
        object.__setattr__(self, "c", None if c is None else float(c))
        if self.kind not in ("early", "critical", "late"):
            raise ValueError(f"unknown regime kind {kind!r}")
        if self.kind == "critical":
            if self.c is None or not (math.isfinite(self.c) and self.c > 0):
                raise ValueError("critical regime needs a constant c > 0")
        elif self.c is not None:
            raise ValueError(f"regime {self.kind!r} takes no constant")

    @classmethod
    def early(cls) -> "PhaseRegime":
        return cls("early")

    @classmethod
    def critical(cls, c: float) -> "PhaseRegime":
        return cls("critical", c)

    @classmethod
    def late(cls) -> "PhaseRegime":
        return cls("late")

    def default_time(self, n_particles: int, delta_kappa: float) -> float:
        """Representative checkpoint time for the regime at a given N.

        Early uses ``t = N`` (far below N**2 yet rich in events); critical
        uses ``t = c * N**2``; late uses ``t = 10 N**2 log(N) / delta_kappa``,
        deep enough that the residual mode ``exp(-contraction_rate * t)`` is
        below ``N**-20``.
        """
        n = int(n_particles)
        if self.kind == "early":
            return float(n)
        if self.kind == "critical":
            return self.c * n * n
        return 10.0 * n * n * max(1.0, math.log(n)) / delta_kappa


def phase_asymptote(model: ModelSpec, regime: PhaseRegime, t: float) -> float:
    """Leading-order variance predicted by the regime's limit expression.

    For ``early`` this is ``alpha * b2 * t``; for ``critical`` with
    ``t = c * N**2`` it is
    ``alpha * b2 * (1 - exp(-delta_kappa * c)) / delta_kappa * N**2``;
    for ``late`` it is ``alpha * b2 * N**2 / delta_kappa``.  These are the
    limit values; the exact finite-N curve (with ``N (N - 1)`` in place of
    ``N**2``) lives on :class:`MomentCurve`, so the gap between the two is
    always visible.  A critical regime rejects a time that is not
    ``c * N**2`` for the model's N.
    """
    n = model.n_particles
    ab2 = model.alpha * model.jump.second_moment
    dk = model.delta_kappa
    if t < 0:
        raise ValueError("time must be >= 0")
    if regime.kind == "early":
        return ab2 * t
    if regime.kind == "critical":
        expected_t = regime.c * n * n
        if abs(t - expected_t) > 1e-9 * max(1.0, expected_t):
            raise ValueError(
                f"critical regime with c={regime.c} expects t = {expected_t} "
                f"at N={n}, got t={t}"
            )
        return ab2 * -math.expm1(-dk * regime.c) / dk * n * n
    return ab2 * n * n / dk


@dataclass(frozen=True)
class GrowingSpreadCheck:
    """Outcome of :func:`check_growing_initial_spread`."""

    condition_holds: bool
    n_values: tuple[int, ...]
    ratios: tuple[float, ...]
    regime: PhaseRegime
    asymptote_at_largest: float


def check_growing_initial_spread(
    model: ModelSpec | ModelFamily,
    initial_variance_of_n: Callable[[int], float],
    time_of_n: Callable[[int], float],
    n_values: Sequence[int],
) -> GrowingSpreadCheck:
    """Decide whether an N-dependent initial spread is asymptotically free.

    The initial spread drops out of the long-time behaviour whenever
    ``initial_variance(N) * exp(-contraction_rate * t(N))`` is negligible
    against the regime value, which for the polynomially growing inputs of
    interest reduces to ``initial_variance(N) / t(N) -> 0``.  The check
    evaluates that ratio along ``n_values`` (which must be increasing),
    requires it to be nonincreasing and overall decreasing, classifies the
    regime of ``time_of_n`` from how ``t(N) / N**2`` moves, and reports the
    regime's asymptote at the largest N.
    """
    ns = tuple(int(n) for n in n_values)
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("need at least two strictly increasing N values")
    if isinstance(model, ModelSpec):
        family = ModelFamily(model.alpha, model.sync_terms, model.jump)
    else:
        family = model

    ratios = []
    for n in ns:
        t = float(time_of_n(n))
        d0 = float(initial_variance_of_n(n))
        if t <= 0:
            raise ValueError(f"time_of_n must be positive, got {t} at N={n}")
        if d0 < 0:
            raise ValueError(f"initial variance must be >= 0, got {d0} at N={n}")
        ratios.append(d0 / t)
    tiny = 1e-12
    nonincreasing = all(
        later <= earlier * (1 + tiny) + tiny
        for earlier, later in zip(ratios, ratios[1:])
    )
    decreasing = ratios[-1] < ratios[0] * (1 - 1e-9) or ratios[0] == 0.0
    holds = nonincreasing and decreasing

    scaled_first = time_of_n(ns[0]) / ns[0] ** 2
    scaled_last = time_of_n(ns[-1]) / ns[-1] ** 2
    if scaled_last <= 0.5 * scaled_first:
        regime = PhaseRegime.early()
    elif scaled_last >= 2.0 * scaled_first:
        regime = PhaseRegime.late()
    else:
        regime = PhaseRegime.critical(scaled_last)

    spec_big = family.at(ns[-1])
    t_big = float(time_of_n(ns[-1]))
    if regime.kind == "critical":
        value = phase_asymptote(spec_big, regime, regime.c * ns[-1] ** 2)
    else:
        value = phase_asymptote(spec_big, regime, t_big)
    return GrowingSpreadCheck(
        condition_holds=holds,
        n_values=ns,
        ratios=tuple(ratios),
        regime=regime,
        asymptote_at_largest=value,
    )
