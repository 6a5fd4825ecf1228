import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from notesort.core import Provenance, SampleSet
from notesort.head import HeadParams, forward
from notesort.rejector import (
    SWEEP_CSV_HEADER,
    apply,
    build_ecdf,
    calibrate_threshold,
    legacy_recognized_max_probs,
    max_prob,
    sweep_to_csv,
    sweep_to_text,
    threshold_sweep,
)

from oracles import ecdf_value, lower_quantile

probability_vectors = st.lists(
    st.floats(min_value=1e-6, max_value=1.0), min_size=2, max_size=8
).map(lambda raw: np.array(raw) / np.sum(raw))


class TestApply:
    def test_boundary_rejects(self):
        assert apply(np.array([0.5, 0.5]), 0.6) == 0

    def test_exact_threshold_rejects(self):
        assert apply(np.array([0.5, 0.5]), 0.5) == 0

    def test_threshold_one_rejects_everything(self):
        assert apply(np.array([1.0, 0.0]), 1.0) == 0

    def test_threshold_zero_accepts_everything(self):
        y = np.full(40, 1.0 / 40)
        assert apply(y, 0.0) == 1

    @given(probability_vectors, st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_threshold(self, y, t1, t2):
        t1, t2 = min(t1, t2), max(t1, t2)
        if apply(y, t2) != 0:
            assert apply(y, t1) == apply(y, t2)

    @given(probability_vectors, st.floats(0, 1))
    def test_never_relabels(self, y, t):
        assert apply(y, t) in (0, int(np.argmax(y)) + 1)


class TestMaxProb:
    def test_uniform_over_forty(self):
        assert max_prob(np.full(40, 1.0 / 40)) == pytest.approx(0.025)

    def test_dominant_entry(self):
        y = np.full(40, (1.0 - 0.9986) / 39)
        y[17] = 0.9986
        assert max_prob(y) == pytest.approx(0.9986)

    def test_near_one(self):
        y = np.array([1.0 - 1e-9, 1e-9])
        assert max_prob(y) == 1.0 - 1e-9


class TestEcdf:
    def test_direct_counts(self):
        f = build_ecdf([0.2, 0.4, 0.6])
        assert f(0.4) == pytest.approx(2.0 / 3.0)
        assert f(0.1) == 0.0
        assert f(0.7) == 1.0

    def test_atom(self):
        f = build_ecdf([0.5, 0.5, 0.5])
        assert f(0.5) == 1.0
        assert f(0.4999) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_ecdf([])

    def test_sample_points_hit_k_over_n(self):
        values = [0.11, 0.25, 0.4, 0.83, 0.97]
        f = build_ecdf(values)
        for k, v in enumerate(sorted(values), start=1):
            assert f(v) == pytest.approx(k / len(values))

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.floats(-0.5, 1.5))
    def test_matches_counting_oracle(self, values, x):
        assert build_ecdf(values)(x) == pytest.approx(ecdf_value(values, x))

    def test_csv_shape(self):
        text = build_ecdf([0.3, 0.1]).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "value,cumulative_probability"
        assert len(lines) == 3
        assert lines[1] == "0.1,0.5"
        assert lines[2] == "0.3,1.0"


class TestCalibrateThreshold:
    def test_median_of_three(self):
        assert calibrate_threshold([0.2, 0.4, 0.6], 0.5) == pytest.approx(
            lower_quantile([0.2, 0.4, 0.6], 0.5)
        )
        assert calibrate_threshold([0.2, 0.4, 0.6], 0.5) == 0.4

    def test_high_quantile_of_three(self):
        assert calibrate_threshold([0.2, 0.4, 0.6], 0.99) == 0.6

    def test_singleton(self):
        assert calibrate_threshold([0.37], 0.01) == 0.37
        assert calibrate_threshold([0.37], 0.99) == 0.37

    def test_rejects_empty_and_bad_quantile(self):
        with pytest.raises(ValueError):
            calibrate_threshold([], 0.5)
        with pytest.raises(ValueError):
            calibrate_threshold([0.5], 0.0)
        with pytest.raises(ValueError):
            calibrate_threshold([0.5], 1.0)

    @given(
        st.lists(st.floats(0.01, 0.999), min_size=1, max_size=40),
        st.floats(0.01, 0.99),
    )
    def test_order_statistic_guarantee(self, values, q):
        t = calibrate_threshold(values, q)
        assert t in values
        assert sum(1 for v in values if v <= t) >= int(np.ceil(q * len(values)))
        assert t == pytest.approx(lower_quantile(values, q))


def tiny_world():
    """Two well-separated classes plus background objects near the origin."""
    params = HeadParams(np.array([[4.0, 0.0], [0.0, 4.0]]), np.zeros(2))
    genuine = SampleSet(
        np.array(
            [[2.0, 0.0], [1.5, 0.1], [0.2, 0.1], [0.0, 2.0], [0.1, 1.4], [0.3, 0.2]],
            dtype=np.float32,
        ),
        [1, 1, 1, 2, 2, 2],
        [0, 0, 1, 0, 0, 1],
        n_classes=2,
    )
    cat1 = SampleSet(
        np.array([[0.05, 0.0], [0.0, 0.1], [0.9, 0.0]], dtype=np.float32),
        [0, 0, 0],
        [2, 2, 2],
        n_classes=2,
    )
    return params, genuine, cat1


class TestThresholdSweep:
    def test_threshold_one_rejects_all(self):
        params, genuine, cat1 = tiny_world()
        (row,) = threshold_sweep(params, [1.0], genuine, cat1)
        assert row.reject_rate_pct == 100.0
        assert row.cat1_accepted == 0
        assert row.genuine_wrong_class == 0

    def test_threshold_zero_reduces_to_argmax(self):
        params, genuine, cat1 = tiny_world()
        (row,) = threshold_sweep(params, [0.0], genuine, cat1)
        assert row.reject_rate_pct == 0.0
        assert row.cat1_accepted == len(cat1)
        predicted = np.argmax(forward(genuine.features, params), axis=1) + 1
        assert row.genuine_wrong_class == int(np.sum(predicted != genuine.labels))

    def test_monotone_over_thresholds(self):
        params, genuine, cat1 = tiny_world()
        thresholds = [0.999, 0.9, 0.7, 0.5, 0.0]
        rows = threshold_sweep(params, thresholds, genuine, cat1)
        for hi, lo in zip(rows, rows[1:]):
            assert hi.reject_rate_pct >= lo.reject_rate_pct
            assert hi.cat1_accepted <= lo.cat1_accepted

    def test_empty_sets_rejected(self):
        params, genuine, cat1 = tiny_world()
        empty = genuine.subset(np.array([], dtype=int))
        with pytest.raises(ValueError):
            threshold_sweep(params, [0.5], empty, cat1)
        with pytest.raises(ValueError):
            threshold_sweep(params, [0.5], genuine, cat1.subset(np.array([], dtype=int)))

    def test_csv_header(self):
        params, genuine, cat1 = tiny_world()
        rows = threshold_sweep(params, [0.5], genuine, cat1)
        text = sweep_to_csv(rows)
        assert text.splitlines()[0] == SWEEP_CSV_HEADER
        assert SWEEP_CSV_HEADER == "threshold,reject_rate_pct,cat1_accepted,genuine_wrong_class"
        assert "threshold" in sweep_to_text(rows)


class TestCalibrationPopulation:
    def test_selects_legacy_and_correct_only(self):
        params, genuine, _ = tiny_world()
        values = legacy_recognized_max_probs(params, genuine)
        legacy = genuine.with_provenance(Provenance.LEGACY_REJECTED_GENUINE)
        probs = forward(legacy.features, params)
        correct = (np.argmax(probs, axis=1) + 1) == legacy.labels
        assert values.size == int(np.sum(correct))

    def test_empty_without_legacy_samples(self):
        params, genuine, _ = tiny_world()
        accepted_only = genuine.with_provenance(Provenance.ACCEPTED_GENUINE)
        assert legacy_recognized_max_probs(params, accepted_only).size == 0
