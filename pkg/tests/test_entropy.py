import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosfilter import (
    DistributionVector,
    EventLog,
    UndefinedDistributionError,
    activity_entropy,
    adaptive_alpha,
    augment,
    build_follow_stats,
    categorical_entropy,
    count_subsequence,
    dfr_vector,
    dpr_vector,
    entropy_report,
    log_entropy,
    smoothed_log_entropy,
)
from chaosfilter.eventlog import END, END_APPENDED, START, START_PREPENDED

small_logs = st.lists(
    st.lists(st.sampled_from("abcd"), min_size=1, max_size=6),
    min_size=1,
    max_size=8,
).map(EventLog.from_traces)


class TestFollowStats:
    def test_worked_log_counts(self, worked_log):
        stats = build_follow_stats(worked_log)
        a = worked_log.id_of("a")
        b = worked_log.id_of("b")
        x = worked_log.id_of("x")
        assert stats.activity_count[a] == 30
        assert stats.follow[a][b] == 20
        assert stats.follow[a][x] == 10
        assert stats.precede[a][START] == 30

    def test_single_event_trace(self):
        log = EventLog.from_traces([("a",)])
        stats = build_follow_stats(log)
        assert stats.follow[0][END] == 1
        assert stats.precede[0][START] == 1

    def test_counts_sum_to_occurrences(self, worked_log):
        stats = build_follow_stats(worked_log)
        for aid in stats.order:
            assert sum(stats.follow[aid].values()) == stats.activity_count[aid]
            assert sum(stats.precede[aid].values()) == stats.activity_count[aid]

    def test_matches_subsequence_counts_on_augmented_views(self, worked_log):
        # Dual route: the one-pass counters must agree with brute-force
        # pattern counting over the augmented views.
        stats = build_follow_stats(worked_log)
        end_view = augment(worked_log, END_APPENDED)
        start_view = augment(worked_log, START_PREPENDED)
        for a in stats.order:
            for b in list(stats.order) + [END]:
                assert stats.follow[a].get(b, 0) == count_subsequence((a, b), end_view)
            for b in list(stats.order) + [START]:
                assert stats.precede[a].get(b, 0) == count_subsequence((b, a), start_view)


class TestVectors:
    def test_dfr_of_a_unsmoothed(self, worked_log):
        stats = build_follow_stats(worked_log)
        vector = dfr_vector(stats, worked_log.id_of("a"))
        assert vector.labels == ("a", "b", "c", "x", "⌋")
        assert vector.probs == pytest.approx((0, 20 / 30, 0, 10 / 30, 0))

    def test_dfr_smoothed_quarter(self, worked_log):
        stats = build_follow_stats(worked_log)
        vector = dfr_vector(stats, worked_log.id_of("a"), alpha=0.25)
        by_label = dict(zip(vector.labels, vector.probs))
        assert by_label["b"] == pytest.approx(20.25 / 31.25)
        assert by_label["b"] == pytest.approx(0.648)

    def test_large_alpha_approaches_uniform(self, worked_log):
        stats = build_follow_stats(worked_log)
        vector = dfr_vector(stats, worked_log.id_of("a"), alpha=1e9)
        assert all(p == pytest.approx(1 / 5, abs=1e-6) for p in vector.probs)

    def test_dpr_of_a_is_start_one_hot(self, worked_log):
        stats = build_follow_stats(worked_log)
        vector = dpr_vector(stats, worked_log.id_of("a"))
        assert vector.labels == ("a", "b", "c", "x", "⌊")
        assert vector.probs == (0, 0, 0, 0, 1)

    def test_dpr_of_x_uniform_over_abc(self, worked_log):
        stats = build_follow_stats(worked_log)
        vector = dpr_vector(stats, worked_log.id_of("x"))
        assert vector.probs == pytest.approx((1 / 3, 1 / 3, 1 / 3, 0, 0))

    def test_unseen_activity_with_zero_alpha(self, worked_log):
        stats = build_follow_stats(worked_log)
        with pytest.raises(UndefinedDistributionError):
            dfr_vector(stats, 99, alpha=0.0)

    @settings(max_examples=40, deadline=None)
    @given(small_logs, st.sampled_from([0.0, None, 1.0]))
    def test_vectors_sum_to_one(self, log, alpha):
        stats = build_follow_stats(log)
        if alpha is None:
            alpha = adaptive_alpha(log)
        for aid in stats.order:
            assert abs(sum(dfr_vector(stats, aid, alpha).probs) - 1.0) <= 1e-9
            assert abs(sum(dpr_vector(stats, aid, alpha).probs) - 1.0) <= 1e-9


class TestEntropy:
    def test_known_distribution(self):
        vector = DistributionVector(("a", "b", "c", "x", "e"), (0, 2 / 3, 0, 1 / 3, 0))
        assert categorical_entropy(vector) == pytest.approx(0.918, abs=1e-3)

    def test_one_hot_is_zero(self):
        vector = DistributionVector(("a", "b"), (1.0, 0.0))
        assert categorical_entropy(vector) == 0.0

    def test_uniform_four(self):
        vector = DistributionVector(tuple("abcd"), (0.25,) * 4)
        assert categorical_entropy(vector) == pytest.approx(2.0)

    def test_worked_log_activity_entropies(self, worked_log):
        stats = build_follow_stats(worked_log)
        values = {
            name: activity_entropy(stats, worked_log.id_of(name))
            for name in ("a", "b", "c", "x")
        }
        assert values["a"] == pytest.approx(0.918, abs=1e-3)
        assert values["b"] == pytest.approx(1.837, abs=1e-3)
        assert values["c"] == pytest.approx(1.837, abs=1e-3)
        assert values["x"] == pytest.approx(3.170, abs=1e-3)

    def test_single_occurrence_zero_unsmoothed(self):
        log = EventLog.from_traces([("a", "b"), ("c", "c")])
        stats = build_follow_stats(log)
        assert activity_entropy(stats, log.id_of("a")) == 0.0
        assert activity_entropy(stats, log.id_of("a"), alpha=adaptive_alpha(log)) > 0.0

    def test_structured_activity_entropy_is_exactly_zero(self):
        # Same predecessor and same successor everywhere: both one-hot.
        log = EventLog.from_variants({("a", "b", "c"): 4})
        stats = build_follow_stats(log)
        assert activity_entropy(stats, log.id_of("b")) == 0.0


class TestLogEntropy:
    def test_worked_log_total(self, worked_log):
        assert log_entropy(worked_log) == pytest.approx(0.918 + 1.837 + 1.837 + 3.170, abs=4e-3)

    def test_deterministic_log_is_zero(self):
        log = EventLog.from_variants({("a", "b"): 17})
        assert log_entropy(log) == 0.0

    def test_alpha_zero_matches_default_bit_for_bit(self, worked_log):
        assert log_entropy(worked_log) == log_entropy(worked_log, alpha=0.0)

    def test_smoothed_uses_adaptive_alpha(self, worked_log):
        assert smoothed_log_entropy(worked_log) == log_entropy(
            worked_log, adaptive_alpha(worked_log)
        )

    @settings(max_examples=30, deadline=None)
    @given(small_logs, st.integers(min_value=2, max_value=5))
    def test_duplication_invariance(self, log, factor):
        duplicated = EventLog.from_variants(
            {trace: mult * factor for trace, mult in log.iter_name_variants()}
        )
        assert log_entropy(duplicated) == pytest.approx(log_entropy(log), abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(small_logs)
    def test_activity_entropy_bounds(self, log):
        stats = build_follow_stats(log)
        bound = 2 * math.log2(len(stats.order) + 1)
        for aid in stats.order:
            value = activity_entropy(stats, aid)
            assert 0.0 <= value <= bound + 1e-12


class TestReport:
    def test_rows_and_totals(self, worked_log):
        report = entropy_report(worked_log)
        assert report.total("x") == pytest.approx(3.170, abs=1e-3)
        rows = report.to_rows()
        assert [r["activity"] for r in rows] == ["a", "b", "c", "x"]
        for row in rows:
            assert row["h_total"] == row["h_dfr"] + row["h_dpr"]

    def test_csv_header(self, worked_log):
        text = entropy_report(worked_log, alpha=0.25).to_csv()
        assert text.splitlines()[0] == "activity,h_dfr,h_dpr,h_total,alpha"
        assert len(text.splitlines()) == 5
