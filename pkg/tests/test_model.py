import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncsim.model import (
    DiscreteJumps,
    ModelSpec,
    Signature,
    SyncTerm,
    UniformJumps,
    distribution_moments,
    sample_jump,
    sample_mean,
    sample_variance,
)

RADEMACHER = DiscreteJumps([(-1.0, 0.5), (1.0, 0.5)])


def pairwise_variance(x):
    # independent route: sum of squared pairwise differences over N(N-1)
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    total = 0.0
    for m in range(n):
        for k in range(m + 1, n):
            d = x[m] - x[k]
            total += d * d
    return total / (n * (n - 1))


class TestSignature:
    def test_kappa_values(self):
        assert Signature((2,)).kappa == 2
        assert Signature((3,)).kappa == 6
        assert Signature((2, 2)).kappa == 4
        assert Signature((2, 3)).kappa == 8
        assert Signature((4,)).kappa == 12

    def test_size_and_groups(self):
        sig = Signature((2, 3))
        assert sig.size == 5
        assert sig.group_count == 2

    @given(st.lists(st.integers(min_value=2, max_value=6), min_size=1, max_size=5))
    def test_kappa_positive_and_order_free(self, parts):
        sig = Signature(parts)
        assert sig.kappa > 0
        assert Signature(tuple(reversed(parts))).kappa == sig.kappa

    @pytest.mark.parametrize("parts", [(), (1,), (2, 1), (0,), (-3,)])
    def test_rejects_bad_parts(self, parts):
        with pytest.raises(ValueError):
            Signature(parts)


class TestObservables:
    def test_mean_examples(self):
        assert sample_mean([1.0, 2.0, 3.0]) == 2.0
        assert sample_mean([5.0]) == 5.0

    def test_variance_examples(self):
        assert sample_variance([1.0, 1.0, 1.0]) == 0.0
        assert sample_variance([0.0, 2.0]) == 2.0
        assert sample_variance([0.0, 1.0, 2.0, 3.0]) == pytest.approx(
            5.0 / 3.0, rel=1e-15
        )

    def test_variance_needs_two(self):
        with pytest.raises(ValueError):
            sample_variance([1.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            sample_variance([0.0, math.inf])
        with pytest.raises(ValueError):
            sample_mean([math.nan])

    @given(
        st.lists(
            st.floats(min_value=-100.0, max_value=100.0),
            min_size=2,
            max_size=50,
        )
    )
    def test_pairwise_and_centered_forms_agree(self, coords):
        v = sample_variance(coords)
        w = pairwise_variance(coords)
        assert v == pytest.approx(w, rel=1e-9, abs=1e-12)

    @given(
        st.lists(st.floats(-50.0, 50.0), min_size=2, max_size=30),
        st.floats(-1e6, 1e6),
    )
    def test_variance_translation_invariant(self, coords, shift):
        x = np.asarray(coords)
        assert sample_variance(x + shift) == pytest.approx(
            sample_variance(x), rel=1e-9, abs=1e-9
        )

    @given(st.lists(st.integers(-1000, 1000).map(float), min_size=2, max_size=30))
    def test_variance_nonnegative_zero_iff_flat(self, coords):
        # integer-valued coordinates keep squared deviations away from the
        # subnormal underflow regime, where the "zero implies flat" direction
        # genuinely breaks down in floating point
        v = sample_variance(coords)
        assert v >= 0.0
        assert (v == 0.0) == (len(set(coords)) == 1)


class TestJumpLaws:
    def test_symmetric_two_atom_moments(self):
        a, b2 = distribution_moments(RADEMACHER)
        assert a == 0.0
        assert b2 == 1.0

    def test_shifted_two_atom_moments(self):
        a, b2 = distribution_moments(DiscreteJumps([(0.0, 0.5), (2.0, 0.5)]))
        assert a == 1.0
        assert b2 == 2.0

    def test_uniform_moments(self):
        a, b2 = distribution_moments(UniformJumps(-1.0, 1.0))
        assert a == 0.0
        assert b2 == pytest.approx(1.0 / 3.0, rel=1e-15)

    @given(st.floats(min_value=0.01, max_value=100.0))
    def test_point_mass_moments(self, z):
        a, b2 = distribution_moments(DiscreteJumps([(z, 1.0)]))
        assert a == pytest.approx(z)
        assert b2 == pytest.approx(z * z)

    def test_rejects_zero_point_mass(self):
        # a walk that never moves has no spread growth
        with pytest.raises(ValueError, match="second moment"):
            DiscreteJumps([(0.0, 1.0)])

    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError):
            DiscreteJumps([(1.0, 0.5), (2.0, 0.6)])
        with pytest.raises(ValueError):
            DiscreteJumps([(1.0, 1.5), (2.0, -0.5)])
        with pytest.raises(ValueError):
            DiscreteJumps([])

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            UniformJumps(1.0, 1.0)
        with pytest.raises(ValueError):
            UniformJumps(2.0, -2.0)

    def test_point_mass_samples_constant(self):
        rng = np.random.default_rng(0)
        law = DiscreteJumps([(5.0, 1.0)])
        assert all(sample_jump(law, rng) == 5.0 for _ in range(50))

    @settings(deadline=None, max_examples=5)
    @given(st.integers(0, 2**32 - 1))
    def test_discrete_sampler_mean(self, seed):
        rng = np.random.default_rng(seed)
        draws = RADEMACHER.sample(rng, size=10**5)
        # mean of 1e5 draws from a unit-variance law: 4 sigma band
        assert abs(draws.mean()) <= 4.0 / math.sqrt(10**5)

    def test_uniform_sampler_range_and_mean(self):
        rng = np.random.default_rng(7)
        law = UniformJumps(2.0, 6.0)
        draws = law.sample(rng, size=10**5)
        assert draws.min() >= 2.0 and draws.max() < 6.0
        sd = math.sqrt((6.0 - 2.0) ** 2 / 12.0)
        assert abs(draws.mean() - 4.0) <= 4.0 * sd / math.sqrt(10**5)


class TestModelSpec:
    def test_rates_and_contraction(self):
        spec = ModelSpec.single(20, 1.0, 1.0, (2,), RADEMACHER)
        assert spec.total_event_rate == 21.0
        assert spec.mean_holding_time == pytest.approx(1.0 / 21.0)
        assert spec.delta_kappa == 2.0
        assert spec.contraction_rate == pytest.approx(2.0 / 380.0)

    def test_mixture_rates(self):
        spec = ModelSpec(
            20,
            1.0,
            (SyncTerm(Signature((2,)), 1.0), SyncTerm(Signature((3,)), 2.0)),
            RADEMACHER,
        )
        assert spec.total_event_rate == 23.0
        assert spec.delta_kappa == 1.0 * 2 + 2.0 * 6

    def test_rejects_infeasible_signature(self):
        with pytest.raises(ValueError, match="distinct particles"):
            ModelSpec.single(3, 1.0, 1.0, (2, 2), RADEMACHER)

    def test_rejects_bad_rates(self):
        with pytest.raises(ValueError):
            ModelSpec.single(5, 0.0, 1.0, (2,), RADEMACHER)
        with pytest.raises(ValueError):
            ModelSpec.single(5, 1.0, -2.0, (2,), RADEMACHER)
        with pytest.raises(ValueError):
            ModelSpec(5, 1.0, (), RADEMACHER)
