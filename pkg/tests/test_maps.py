import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncsim.maps import (
    EnumerationTooLargeError,
    SyncGroup,
    apply_sync,
    enumerate_tuples,
    falling_factorial,
    mean_shift,
    partition_tuple,
    sample_uniform_tuple,
)
from syncsim.model import Signature, sample_mean


def test_partition_single_group():
    groups = partition_tuple(Signature((3,)), (4, 1, 7))
    assert groups == (SyncGroup(leader=4, followers=(1, 7)),)


def test_partition_two_groups():
    groups = partition_tuple(Signature((2, 2)), (3, 5, 2, 8))
    assert groups == (
        SyncGroup(leader=3, followers=(5,)),
        SyncGroup(leader=2, followers=(8,)),
    )
    assert groups[0].members == (3, 5)


def test_partition_mixed_sizes():
    groups = partition_tuple(Signature((2, 3)), (1, 2, 3, 4, 5))
    assert groups == (
        SyncGroup(leader=1, followers=(2,)),
        SyncGroup(leader=3, followers=(4, 5)),
    )


def test_partition_rejects_wrong_length_and_repeats():
    with pytest.raises(ValueError):
        partition_tuple(Signature((2, 2)), (1, 2, 3))
    with pytest.raises(ValueError):
        partition_tuple(Signature((2,)), (4, 4))


class TestApplySync:
    def test_pair_copy(self):
        x = np.array([10.0, 20.0, 30.0, 40.0])
        out = apply_sync(Signature((2,)), (3, 1), x)
        assert out.tolist() == [30.0, 20.0, 30.0, 40.0]
        # input untouched
        assert x.tolist() == [10.0, 20.0, 30.0, 40.0]

    def test_two_groups(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        out = apply_sync(Signature((2, 2)), (2, 5, 4, 1), x)
        assert out.tolist() == [4.0, 2.0, 3.0, 4.0, 2.0]

    def test_triple(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        out = apply_sync(Signature((3,)), (4, 2, 1), x)
        assert out.tolist() == [3.0, 3.0, 2.0, 3.0]

    def test_in_place(self):
        x = np.array([1.0, 2.0])
        out = apply_sync(Signature((2,)), (1, 2), x, in_place=True)
        assert out is x
        assert x.tolist() == [1.0, 1.0]

    def test_rejects_out_of_range_label(self):
        with pytest.raises(ValueError):
            apply_sync(Signature((2,)), (1, 5), np.zeros(3))

    @settings(deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_idempotent_and_value_subset(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 12))
        sig = Signature((2, 3))
        x = rng.normal(size=n)
        idx = sample_uniform_tuple(sig.size, n, rng)
        once = apply_sync(sig, idx, x)
        twice = apply_sync(sig, idx, once)
        assert np.array_equal(once, twice)
        assert set(once.tolist()) <= set(x.tolist())
        untouched = [i for i in range(n) if (i + 1) not in idx]
        assert np.array_equal(once[untouched], x[untouched])

    def test_flat_configuration_fixed(self):
        x = np.full(6, 3.25)
        out = apply_sync(Signature((2, 2)), (1, 4, 2, 6), x)
        assert np.array_equal(out, x)


class TestMeanShift:
    def test_pair_formula(self):
        # leader 3 pulls particle 1: mean moves by (x3 - x1)/N
        x = np.array([10.0, 20.0, 30.0, 40.0])
        assert mean_shift(Signature((2,)), (3, 1), x) == pytest.approx(
            (30.0 - 10.0) / 4.0
        )

    def test_matches_apply_route_on_random_triples(self):
        rng = np.random.default_rng(42)
        sig = Signature((2, 3))
        for _ in range(1000):
            n = int(rng.integers(5, 10))
            x = rng.uniform(-1e3, 1e3, size=n)
            idx = sample_uniform_tuple(sig.size, n, rng)
            direct = mean_shift(sig, idx, x)
            via_map = sample_mean(apply_sync(sig, idx, x)) - sample_mean(x)
            assert direct == pytest.approx(via_map, abs=1e-12 * max(1.0, abs(direct)))


class TestTupleSampling:
    def test_exhaustive_small_case_frequencies(self):
        rng = np.random.default_rng(123)
        counts = {}
        draws = 10**5
        for _ in range(draws):
            t = sample_uniform_tuple(2, 3, rng)
            counts[t] = counts.get(t, 0) + 1
        assert len(counts) == 6
        p = 1.0 / 6.0
        sigma = (draws * p * (1 - p)) ** 0.5
        for t, c in counts.items():
            assert abs(c - draws * p) <= 5 * sigma, (t, c)

    def test_both_orders_equally_likely(self):
        rng = np.random.default_rng(9)
        draws = 10**5
        hits = sum(sample_uniform_tuple(2, 2, rng) == (1, 2) for _ in range(draws))
        sigma = (draws * 0.25) ** 0.5
        assert abs(hits - draws / 2) <= 5 * sigma

    def test_full_permutation_case(self):
        rng = np.random.default_rng(77)
        seen = set()
        for _ in range(2000):
            t = sample_uniform_tuple(3, 3, rng)
            assert sorted(t) == [1, 2, 3]
            seen.add(t)
        assert len(seen) == 6

    def test_labels_distinct_and_in_range(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            t = sample_uniform_tuple(4, 9, rng)
            assert len(set(t)) == 4
            assert all(1 <= i <= 9 for i in t)

    def test_rejects_infeasible(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="distinct"):
            sample_uniform_tuple(5, 4, rng)


class TestEnumeration:
    def test_counts(self):
        assert falling_factorial(3, 2) == 6
        assert falling_factorial(5, 3) == 60
        assert falling_factorial(6, 4) == 360
        assert len(list(enumerate_tuples(2, 3))) == 6
        assert len(list(enumerate_tuples(3, 5))) == 60

    def test_tuples_unique_and_distinct(self):
        tuples = list(enumerate_tuples(3, 6))
        assert len(tuples) == len(set(tuples)) == falling_factorial(6, 3)
        assert all(len(set(t)) == 3 for t in tuples)

    def test_guard_trips_before_materializing(self):
        with pytest.raises(EnumerationTooLargeError):
            enumerate_tuples(7, 30)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            enumerate_tuples(4, 3)
