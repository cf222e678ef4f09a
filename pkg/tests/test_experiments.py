import json
import math

import numpy as np
import pytest

from syncsim.experiments import (
    CSV_COLUMNS,
    ExperimentSpec,
    ExplicitInit,
    IIDInit,
    PointInit,
    SpreadInit,
    drift_check,
    estimate_records,
    expected_initial_mean,
    expected_initial_variance,
    init_configuration,
    moment_curve_for,
    phase_sweep,
    replica_observables,
    run_experiment,
    sweep_records,
    write_records_csv,
    write_records_json,
)
from syncsim.model import DiscreteJumps, ModelFamily, ModelSpec
from syncsim.moments import PhaseRegime, phase_asymptote

RADEMACHER = DiscreteJumps([(-1.0, 0.5), (1.0, 0.5)])


def single(n, parts=(2,), alpha=1.0, delta=1.0, jump=RADEMACHER):
    return ModelSpec.single(n, alpha, delta, parts, jump)


class TestInitSpecs:
    def test_point(self):
        rng = np.random.default_rng(0)
        x = init_configuration(PointInit(2.5), 6, rng)
        assert np.array_equal(x, np.full(6, 2.5))
        assert expected_initial_mean(PointInit(2.5), 6) == 2.5
        assert expected_initial_variance(PointInit(2.5), 6) == 0.0

    def test_spread_two_particles(self):
        rng = np.random.default_rng(0)
        x = init_configuration(SpreadInit(1.0), 2, rng)
        assert x.tolist() == [0.0, 1.0]
        assert expected_initial_variance(SpreadInit(1.0), 2) == pytest.approx(0.5)

    def test_spread_formula_matches_direct_computation(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 5, 10, 41):
            for width in (1.0, 7.5):
                x = init_configuration(SpreadInit(width), n, rng)
                direct = float(np.var(x, ddof=1))
                formula = expected_initial_variance(SpreadInit(width), n)
                assert formula == pytest.approx(direct, rel=1e-12), (n, width)
                assert expected_initial_mean(SpreadInit(width), n) == pytest.approx(
                    float(x.mean())
                )

    def test_iid_moments(self):
        law = DiscreteJumps([(0.0, 0.5), (2.0, 0.5)])
        init = IIDInit(law)
        assert expected_initial_mean(init, 9) == 1.0
        assert expected_initial_variance(init, 9) == pytest.approx(1.0)  # b2 - a^2

    def test_iid_sample_variance_is_unbiased(self):
        init = IIDInit(RADEMACHER)
        reps = 4000
        vals = np.array(
            [
                float(np.var(init_configuration(init, 5, np.random.default_rng((1, r))),
                             ddof=1))
                for r in range(reps)
            ]
        )
        stderr = vals.std(ddof=1) / math.sqrt(reps)
        assert abs(vals.mean() - 1.0) <= 4 * stderr

    def test_explicit(self):
        rng = np.random.default_rng(0)
        init = ExplicitInit((1.0, 2.0, 6.0))
        assert init_configuration(init, 3, rng).tolist() == [1.0, 2.0, 6.0]
        assert expected_initial_mean(init, 3) == 3.0
        with pytest.raises(ValueError):
            init_configuration(init, 4, rng)

    def test_spread_needs_positive_width(self):
        with pytest.raises(ValueError):
            SpreadInit(0.0)


class TestExperimentSpec:
    def test_validation(self):
        spec = single(5)
        with pytest.raises(ValueError, match="replicas"):
            ExperimentSpec(spec, PointInit(), (1.0,), replicas=1, base_seed=0)
        with pytest.raises(ValueError, match="checkpoint"):
            ExperimentSpec(spec, PointInit(), (), replicas=10, base_seed=0)
        with pytest.raises(ValueError, match="nondecreasing"):
            ExperimentSpec(spec, PointInit(), (2.0, 1.0), replicas=10, base_seed=0)
        with pytest.raises(ValueError, match="explicit"):
            ExperimentSpec(
                spec, ExplicitInit((0.0, 1.0)), (1.0,), replicas=10, base_seed=0
            )


class TestRunExperiment:
    def test_time_zero_is_exact(self):
        exp = ExperimentSpec(
            single(8), PointInit(4.0), (0.0,), replicas=16, base_seed=3
        )
        row = run_experiment(exp)[0]
        assert row.m_mean == 4.0
        assert row.v_mean == 0.0
        assert row.m_stderr == 0.0 and row.v_stderr == 0.0
        assert row.z_score == 0.0

    def test_deterministic_rows(self):
        exp = ExperimentSpec(
            single(10), PointInit(), (1.0, 3.0), replicas=50, base_seed=7
        )
        assert run_experiment(exp) == run_experiment(exp)

    def test_batches_extend_without_overlap(self):
        # replicas [0..8) in one batch == two batches [0..4) and [4..8)
        exp8 = ExperimentSpec(
            single(6), PointInit(), (2.0,), replicas=8, base_seed=11
        )
        exp4 = ExperimentSpec(
            single(6), PointInit(), (2.0,), replicas=4, base_seed=11
        )
        m8, v8, e8 = replica_observables(exp8)
        m4a, v4a, _ = replica_observables(exp4)
        m4b, v4b, _ = replica_observables(exp4, replica_offset=4)
        assert np.array_equal(np.vstack([m4a, m4b]), m8)
        assert np.array_equal(np.vstack([v4a, v4b]), v8)

    def test_threads_do_not_change_results(self):
        exp = ExperimentSpec(
            single(10), PointInit(), (1.0, 5.0), replicas=40, base_seed=13
        )
        assert run_experiment(exp, threads=1) == run_experiment(exp, threads=4)

    def test_z_scores_against_exact_curve(self):
        exp = ExperimentSpec(
            single(20), PointInit(), (1.0, 10.0), replicas=400, base_seed=29
        )
        for row in run_experiment(exp):
            assert abs(row.z_score) <= 4.0, row

    def test_iid_init_analytic_uses_expected_start(self):
        init = IIDInit(RADEMACHER)
        exp = ExperimentSpec(single(12), init, (0.0,), replicas=600, base_seed=31)
        row = run_experiment(exp)[0]
        assert row.v_analytic == pytest.approx(1.0)
        assert abs(row.z_score) <= 4.0

    def test_curve_matches_expected_init(self):
        curve = moment_curve_for(single(9), SpreadInit(3.0))
        assert curve.initial_variance == pytest.approx(
            expected_initial_variance(SpreadInit(3.0), 9)
        )


class TestDriftCheck:
    def test_zero_drift_law(self):
        exp = ExperimentSpec(
            single(10),
            PointInit(),
            tuple(float(t) for t in range(1, 6)),
            replicas=400,
            base_seed=37,
        )
        res = drift_check(exp)
        assert res.target == 0.0
        assert abs(res.z_score) <= 4.0

    def test_negative_drift_law(self):
        law = DiscreteJumps([(-2.0, 0.5), (0.0, 0.5)])  # a = -1
        exp = ExperimentSpec(
            single(10, alpha=3.0, jump=law),
            PointInit(),
            (1.0, 2.0, 3.0, 4.0, 5.0),
            replicas=600,
            base_seed=41,
        )
        res = drift_check(exp)
        assert res.target == -3.0
        assert abs(res.z_score) <= 4.0
        assert res.slope == pytest.approx(-3.0, abs=5 * res.slope_stderr)

    def test_needs_two_distinct_times(self):
        exp = ExperimentSpec(
            single(4), PointInit(), (2.0, 2.0), replicas=10, base_seed=0
        )
        with pytest.raises(ValueError, match="distinct"):
            drift_check(exp)


class TestPhaseSweep:
    def test_rows_structure_and_theorem_values(self):
        family = ModelFamily.single(1.0, 1.0, (2,), RADEMACHER)
        regime = PhaseRegime.critical(1.0)
        rows = phase_sweep(family, regime, [6, 8], replicas=200, base_seed=43)
        assert [r.n_particles for r in rows] == [6, 8]
        for row in rows:
            spec = family.at(row.n_particles)
            assert row.t == row.n_particles**2
            assert row.replicas == 200
            assert row.theorem_value == pytest.approx(
                phase_asymptote(spec, regime, row.t)
            )
            assert row.ratio == pytest.approx(row.v_mean / row.theorem_value)
            assert abs(row.z_score) <= 6.0

    def test_sweep_deterministic(self):
        family = ModelFamily.single(1.0, 1.0, (2,), RADEMACHER)
        rows1 = phase_sweep(
            family, PhaseRegime.early(), [6, 8], replicas=100, base_seed=5
        )
        rows2 = phase_sweep(
            family, PhaseRegime.early(), [6, 8], replicas=100, base_seed=5
        )
        assert rows1 == rows2

    def test_explicit_times_override(self):
        family = ModelFamily.single(1.0, 1.0, (2,), RADEMACHER)
        rows = phase_sweep(
            family,
            PhaseRegime.early(),
            [6, 8],
            replicas=64,
            base_seed=5,
            times=[3.0, 4.0],
        )
        assert [r.t for r in rows] == [3.0, 4.0]
        with pytest.raises(ValueError, match="length"):
            phase_sweep(
                family, PhaseRegime.early(), [6], replicas=64, base_seed=5,
                times=[1.0, 2.0],
            )


class TestWriters:
    def _records(self):
        exp = ExperimentSpec(
            single(6), PointInit(), (0.0, 1.0), replicas=12, base_seed=2
        )
        rows = run_experiment(exp)
        return estimate_records(rows, exp.model, exp.replicas)

    def test_csv_layout_and_roundtrip(self, tmp_path):
        records = self._records()
        path = tmp_path / "out.csv"
        write_records_csv(records, path, {"seed": 2, "note": "layout"})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# ")
        header = json.loads(lines[0][2:])
        assert header == {"seed": 2, "note": "layout"}
        assert lines[1] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2 + len(records)
        cells = lines[2].split(",")
        # numeric cells round-trip exactly through repr
        assert int(cells[0]) == 6
        assert float(cells[3]) == records[0]["M_mean"]
        assert cells[8] == "nan"  # no regime in a plain run

    def test_csv_bytes_deterministic(self, tmp_path):
        records = self._records()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(records, a, {"seed": 2})
        write_records_csv(records, b, {"seed": 2})
        assert a.read_bytes() == b.read_bytes()

    def test_json_layout(self, tmp_path):
        records = self._records()
        path = tmp_path / "out.json"
        write_records_json(records, path, {"seed": 2})
        doc = json.loads(path.read_text())
        assert list(doc) == ["config", "columns", "rows"]
        assert doc["config"] == {"seed": 2}
        assert doc["columns"] == list(CSV_COLUMNS)
        assert len(doc["rows"]) == len(records)
        # NaN must be encoded as null, not as nonstandard JSON
        theorem_col = doc["columns"].index("theorem_value")
        assert doc["rows"][0][theorem_col] is None

    def test_sweep_records_carry_theorem(self):
        family = ModelFamily.single(1.0, 1.0, (2,), RADEMACHER)
        rows = phase_sweep(
            family, PhaseRegime.late(), [6], replicas=50, base_seed=19
        )
        recs = sweep_records(rows)
        assert list(recs[0]) == list(CSV_COLUMNS)
        assert math.isfinite(recs[0]["theorem_value"])
