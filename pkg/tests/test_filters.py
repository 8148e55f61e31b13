import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from chaosfilter import (
    ChaoticActivityFilter,
    EventLog,
    FilterMethod,
    LogError,
    StaleScheduleError,
    activity_entropy,
    adaptive_alpha,
    build_follow_stats,
    full_ranking,
    log_entropy,
    materialize,
    run_filter,
    standard_methods,
)

small_logs = st.lists(
    st.lists(st.sampled_from("abcde"), min_size=1, max_size=6),
    min_size=2,
    max_size=10,
).map(EventLog.from_traces)

all_method_specs = st.sampled_from(
    [
        ("direct-entropy", False),
        ("direct-entropy", True),
        ("indirect-entropy", False),
        ("indirect-entropy", True),
        ("least-frequent-first", False),
        ("most-frequent-first", False),
        ("random", False),
    ]
)


def make_method(kind, laplace, seed=1234):
    return FilterMethod(kind, laplace=laplace, seed=seed if kind == "random" else None)


class TestFilterMethod:
    def test_laplace_only_for_entropy_kinds(self):
        with pytest.raises(LogError):
            FilterMethod("least-frequent-first", laplace=True)

    def test_random_requires_seed(self):
        with pytest.raises(LogError):
            FilterMethod("random")
        with pytest.raises(LogError):
            FilterMethod("direct-entropy", seed=3)

    def test_unknown_kind(self):
        with pytest.raises(LogError):
            FilterMethod("entropy-ish")

    def test_key_parse_round_trip(self):
        for method in standard_methods(seed=9):
            assert FilterMethod.parse(method.key()) == method


class TestRunFilter:
    def test_worked_log_direct_removes_x_first(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        assert schedule.removal_order[0][0] == "x"
        assert schedule.removal_order[0][1] == pytest.approx(3.170, abs=1e-3)
        # After x is gone the log is deterministic: entropies all zero and
        # the tie breaks to the lexicographically smallest name.
        assert schedule.removal_order[1] == ("a", 0.0)
        assert [name for name, _ in schedule.retained] == ["b", "c"]

    def test_worked_log_direct_with_smoothing_still_starts_with_x(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy", laplace=True))
        assert schedule.removal_order[0][0] == "x"

    def test_worked_log_indirect_removes_x_first(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("indirect-entropy"))
        assert schedule.removal_order[0][0] == "x"
        assert schedule.removal_order[0][1] == pytest.approx(0.0, abs=1e-9)

    def test_least_frequent_first_removes_minimum(self):
        log = EventLog.from_variants({("a",): 1, ("b", "b"): 1, ("c", "c", "c"): 1})
        schedule = run_filter(log, FilterMethod("least-frequent-first"))
        assert schedule.removal_order[0] == ("a", 1.0)
        counts = log.name_counts()
        assert schedule.removal_order[0][1] == min(counts.values())

    def test_random_is_deterministic_per_seed(self, worked_log):
        one = run_filter(worked_log, FilterMethod("random", seed=42))
        two = run_filter(worked_log, FilterMethod("random", seed=42))
        assert one == two
        other = run_filter(worked_log, FilterMethod("random", seed=43))
        assert other.removal_order != one.removal_order or other.retained != one.retained

    def test_small_log_yields_empty_schedule_with_note(self):
        log = EventLog.from_variants({("a", "b"): 2})
        schedule = run_filter(log, FilterMethod("direct-entropy"))
        assert schedule.removal_order == ()
        assert "nothing to remove" in schedule.note
        assert [name for name, _ in schedule.retained] == ["a", "b"]

    def test_all_equal_entropy_breaks_ties_lexicographically(self):
        log = EventLog.from_variants({("a", "b", "c", "d"): 5})
        schedule = run_filter(log, FilterMethod("direct-entropy"))
        assert [name for name, _ in schedule.removal_order] == ["a", "b"]

    @settings(max_examples=30, deadline=None)
    @given(small_logs, all_method_specs)
    def test_schedule_shape(self, log, spec):
        method = make_method(*spec)
        schedule = run_filter(log, method)
        names = set(log.activity_names())
        listed = [n for n, _ in schedule.removal_order] + [n for n, _ in schedule.retained]
        assert len(listed) == len(set(listed)) == len(names)
        assert set(listed) == names
        expected = max(len(names) - 2, 0)
        assert len(schedule.removal_order) == expected

    @settings(max_examples=15, deadline=None)
    @given(small_logs, all_method_specs)
    def test_variant_order_invariance(self, log, spec):
        method = make_method(*spec)
        shuffled_items = list(log.iter_name_variants())
        random.Random(0).shuffle(shuffled_items)
        reordered = EventLog.from_variants(dict(shuffled_items))
        assert run_filter(log, method) == run_filter(reordered, method)

    def test_direct_step_criterion_matches_independent_recompute(self, worked_log):
        for laplace in (False, True):
            schedule = run_filter(worked_log, FilterMethod("direct-entropy", laplace=laplace))
            for steps, (name, criterion) in enumerate(schedule.removal_order):
                before = materialize(worked_log, schedule, steps)
                stats = build_follow_stats(before)
                alpha = adaptive_alpha(before) if laplace else 0.0
                recomputed = activity_entropy(stats, before.id_of(name), alpha)
                assert criterion == pytest.approx(recomputed, abs=1e-9)

    @settings(max_examples=10, deadline=None)
    @given(small_logs, st.booleans())
    def test_indirect_steps_match_brute_force_argmin(self, log, laplace):
        method = FilterMethod("indirect-entropy", laplace=laplace)
        schedule = run_filter(log, method)
        for steps, (name, criterion) in enumerate(schedule.removal_order):
            before = materialize(log, schedule, steps)
            occurring = before.activities()
            best_value = None
            best_names = []
            for aid in occurring:
                candidate = before.project(occurring - {aid})
                alpha = adaptive_alpha(candidate) if laplace else 0.0
                value = log_entropy(candidate, alpha)
                if best_value is None or value < best_value - 1e-12:
                    best_value, best_names = value, [before.name_of(aid)]
                elif abs(value - best_value) <= 1e-12:
                    best_names.append(before.name_of(aid))
            assert name == min(best_names)
            assert criterion == pytest.approx(best_value, abs=1e-9)

    def test_frequency_filters_are_entropy_blind(self):
        log = EventLog.from_variants({("a", "b", "c"): 3, ("a", "c", "b"): 2, ("b", "a", "c"): 1})
        permuted = EventLog.from_variants(
            {("c", "b", "a"): 3, ("c", "a", "b"): 2, ("a", "b", "c"): 1}
        )
        # Same per-activity counts, different orders.
        assert log.name_counts() == permuted.name_counts()
        for kind in ("least-frequent-first", "most-frequent-first"):
            one = run_filter(log, FilterMethod(kind))
            other = run_filter(permuted, FilterMethod(kind))
            assert one.removal_order == other.removal_order
            assert one.retained == other.retained
        direct = run_filter(log, FilterMethod("direct-entropy"))
        direct_permuted = run_filter(permuted, FilterMethod("direct-entropy"))
        assert direct.removal_order != direct_permuted.removal_order


class TestMaterialize:
    def test_zero_steps_is_identity(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        assert materialize(worked_log, schedule, 0) == worked_log

    def test_one_step_removes_x(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        step1 = materialize(worked_log, schedule, 1)
        assert sorted(step1.activity_names()) == ["a", "b", "c"]

    def test_full_schedule_leaves_two(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        final = materialize(worked_log, schedule, len(schedule.removal_order))
        assert len(final.activities()) == 2

    def test_each_step_removes_exactly_one_activity(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        previous = materialize(worked_log, schedule, 0)
        for steps in range(1, len(schedule.removal_order) + 1):
            current = materialize(worked_log, schedule, steps)
            assert len(current.activities()) == len(previous.activities()) - 1
            removed = schedule.removal_order[steps - 1][0]
            assert current == previous.project_names(
                set(previous.activity_names()) - {removed}
            )
            previous = current

    def test_digest_mismatch(self, worked_log, two_variant_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        with pytest.raises(StaleScheduleError):
            materialize(two_variant_log, schedule, 1)

    def test_steps_out_of_range(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        with pytest.raises(LogError):
            materialize(worked_log, schedule, 3)


class TestFullRanking:
    def test_least_frequent_ranking(self):
        log = EventLog.from_variants({("a",): 1, ("b", "b"): 1, ("c", "c", "c"): 1})
        schedule = run_filter(log, FilterMethod("least-frequent-first"))
        assert full_ranking(schedule) == ["a", "b", "c"]

    @settings(max_examples=20, deadline=None)
    @given(small_logs, all_method_specs)
    def test_ranking_covers_alphabet(self, log, spec):
        schedule = run_filter(log, make_method(*spec))
        ranking = full_ranking(schedule)
        assert sorted(ranking) == log.activity_names()

    def test_csv_rows(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        lines = schedule.to_csv().splitlines()
        assert lines[0] == "step,activity,criterion,method,alpha,retained"
        assert len(lines) == 5
        assert lines[1].startswith("1,x,3.169")

    def test_step_alpha_matches_measured_log(self, worked_log):
        # Direct: alpha of the pre-step log; indirect: of the candidate
        # projection, which has one activity fewer.
        for kind, offset in (("direct-entropy", 0), ("indirect-entropy", 1)):
            schedule = run_filter(worked_log, FilterMethod(kind, laplace=True))
            for steps in range(len(schedule.removal_order)):
                before = materialize(worked_log, schedule, steps)
                expected = 1.0 / (len(before.activities()) - offset)
                assert schedule.step_alpha(steps + 1) == pytest.approx(expected)
        plain = run_filter(worked_log, FilterMethod("direct-entropy"))
        assert all(row["alpha"] == 0.0 for row in plain.to_rows())


class TestEstimator:
    def test_fit_transform_drops_learned_activities(self, worked_log):
        estimator = ChaoticActivityFilter(method="direct-entropy", steps=1)
        filtered = estimator.fit_transform(worked_log)
        assert sorted(filtered.activity_names()) == ["a", "b", "c"]
        assert estimator.ranking_[0] == "x"
        assert estimator.n_activities_ == 4

    def test_accepts_raw_traces(self):
        estimator = ChaoticActivityFilter(steps=0)
        estimator.fit([("a", "b"), ("a", "b"), ("b", "a", "c")])
        assert estimator.n_activities_ == 3

    def test_transform_on_other_logs_is_lenient(self, worked_log):
        estimator = ChaoticActivityFilter(steps=1).fit(worked_log)
        other = EventLog.from_traces([("x", "y"), ("y", "x")])
        assert sorted(estimator.transform(other).activity_names()) == ["y"]

    def test_unfitted_transform_fails(self, worked_log):
        with pytest.raises(LogError, match="not fitted"):
            ChaoticActivityFilter().transform(worked_log)

    def test_sklearn_clone_and_params(self):
        estimator = ChaoticActivityFilter(method="random", seed=5, steps=2)
        cloned = clone(estimator)
        assert cloned.get_params() == estimator.get_params()
        estimator.set_params(steps=None)
        assert estimator.get_params()["steps"] is None
