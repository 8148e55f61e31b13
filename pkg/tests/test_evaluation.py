import itertools
import random

import pytest
import scipy.stats

from chaosfilter import (
    DiscoveryConfig,
    EventLog,
    FilterMethod,
    LogError,
    discover,
    explained_activity_curve,
    f_score,
    flower,
    flower_baseline,
    kendall_tau_b,
    replay_nondeterminism,
    run_filter,
    simulate,
    winning_number,
    random_tree,
)
from chaosfilter.evaluation import ReplayResult, ranking_positions, records_to_csv, replay_trace
from chaosfilter.processtree import act, par, seq, xor


def brute_force_winning_numbers(matrix):
    n_methods = len(matrix)
    n_logs = len(matrix[0])
    totals = [0] * n_methods
    for i in range(n_methods):
        for j in range(n_logs):
            for k in range(n_methods):
                if k != i and matrix[i][j] < matrix[k][j]:
                    totals[i] += 1
    return totals


class TestReplay:
    def test_sequence_is_fully_deterministic(self):
        tree = seq(act("a"), act("b"), act("c"))
        log = EventLog.from_variants({("a", "b", "c"): 7})
        assert replay_nondeterminism(tree, log) == ReplayResult(1.0, 1.0)

    def test_flower_enables_everything(self):
        tree = flower({"a", "b", "c"})
        log = EventLog.from_traces([("a", "b"), ("c", "c", "a")])
        assert replay_nondeterminism(tree, log) == ReplayResult(3.0, 1.0)

    def test_choice_before_single_step(self):
        tree = xor(act("a"), act("b"))
        log = EventLog.from_variants({("a",): 1})
        assert replay_nondeterminism(tree, log) == ReplayResult(2.0, 1.0)

    def test_unfitting_traces_excluded(self):
        tree = seq(act("a"), act("b"))
        log = EventLog.from_variants({("a", "b"): 1, ("b", "a"): 3})
        result = replay_nondeterminism(tree, log)
        assert result.fitness_fraction == 0.25
        assert result.nondeterminism == 1.0

    def test_nothing_fits(self):
        tree = seq(act("a"), act("b"))
        log = EventLog.from_variants({("b",): 2})
        assert replay_nondeterminism(tree, log) == ReplayResult(None, 0.0)

    def test_pooled_versus_per_trace(self):
        tree = xor(act("a"), seq(act("b"), act("c")))
        log = EventLog.from_variants({("a",): 1, ("b", "c"): 1})
        per_trace = replay_nondeterminism(tree, log)
        pooled = replay_nondeterminism(tree, log, pooled=True)
        assert per_trace.nondeterminism == pytest.approx((2 + 1.5) / 2)
        assert pooled.nondeterminism == pytest.approx(5 / 3)

    def test_replay_trace_counts(self):
        tree = par(act("a"), act("b"))
        assert replay_trace(tree, ("a", "b")) == [2, 1]
        assert replay_trace(tree, ("b", "b")) is None

    def test_bounds_against_flower_baseline(self):
        for seed in range(5):
            tree = random_tree(n_activities=4 + seed, seed=seed)
            log = simulate(tree, 8, seed=seed)
            discovered = discover(log)
            result = replay_nondeterminism(discovered, log)
            assert 1.0 <= result.nondeterminism <= flower_baseline(log.activity_names())


class TestFlowerBaseline:
    def test_matches_replayed_flower(self):
        log = EventLog.from_traces([("a", "b", "c"), ("b", "a", "a")])
        names = log.activity_names()
        replayed = replay_nondeterminism(flower(names), log).nondeterminism
        assert flower_baseline(names) == replayed == 3.0

    def test_empty_rejected(self):
        with pytest.raises(LogError):
            flower_baseline([])


class TestFScore:
    def test_harmonic_mean(self):
        assert f_score(1.0, 1.0) == 1.0
        assert f_score(0.5, 1.0) == pytest.approx(2 / 3)

    def test_zero_edge(self):
        assert f_score(0.0, 0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(LogError):
            f_score(-0.1, 0.5)


class TestCurve:
    def test_shape_and_head(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        records = explained_activity_curve(worked_log, schedule, log_id="worked")
        assert len(records) == len(schedule.removal_order) + 1
        head = records[0]
        direct = replay_nondeterminism(discover(worked_log), worked_log)
        assert head.steps == 0
        assert head.explained_ratio == 1.0
        assert head.nondeterminism == direct.nondeterminism
        assert head.fitness_fraction == direct.fitness_fraction
        ratios = [r.explained_ratio for r in records]
        assert ratios == sorted(ratios, reverse=True)

    def test_csv_rendering(self, worked_log):
        schedule = run_filter(worked_log, FilterMethod("direct-entropy"))
        text = records_to_csv(explained_activity_curve(worked_log, schedule))
        lines = text.splitlines()
        assert lines[0] == (
            "log_id,method,steps,explained_ratio,nondeterminism,"
            "fitness_fraction,flower_baseline"
        )
        assert len(lines) == len(schedule.removal_order) + 2


class TestWinningNumber:
    def test_single_log(self):
        totals, averages = winning_number([[1.0], [2.0], [3.0]])
        assert totals == [2, 1, 0]
        assert averages == [2.0, 1.0, 0.0]

    def test_ties_win_nothing(self):
        totals, _ = winning_number([[5.0, 5.0], [5.0, 5.0]])
        assert totals == [0, 0]

    def test_two_log_example(self):
        totals, averages = winning_number([[1, 3], [2, 2], [3, 1]])
        assert totals == brute_force_winning_numbers([[1, 3], [2, 2], [3, 1]]) == [2, 2, 2]
        assert averages == [1.0, 1.0, 1.0]

    def test_matches_brute_force_on_random_matrices(self):
        rng = random.Random(0)
        for _ in range(25):
            matrix = [[rng.randint(0, 5) for _ in range(5)] for _ in range(4)]
            totals, _ = winning_number(matrix)
            assert totals == brute_force_winning_numbers(matrix)
            # Each log contributes at most one win per method pair; ties
            # forfeit both directions.
            bound = 5 * 4 * 3
            has_ties = any(
                matrix[i][j] == matrix[k][j]
                for j in range(5)
                for i in range(4)
                for k in range(i + 1, 4)
            )
            assert sum(totals) <= bound
            assert (sum(totals) == bound) == (not has_ties)

    def test_missing_cells_listed(self):
        with pytest.raises(LogError, match=r"\(1, 0\)"):
            winning_number([[1.0, 2.0], [None, 3.0]])

    def test_ragged_matrix(self):
        with pytest.raises(LogError, match="ragged"):
            winning_number([[1.0, 2.0], [1.0]])


class TestKendallTau:
    def test_identical_rankings(self):
        ranks = {chr(97 + i): i for i in range(10)}
        result = kendall_tau_b(ranks, dict(ranks))
        assert result.tau_b == pytest.approx(1.0)
        assert result.reject_at_0_05 is True
        assert result.method == "normal"

    def test_reversed_rankings(self):
        ranks = {chr(97 + i): i for i in range(10)}
        reverse = {k: -v for k, v in ranks.items()}
        result = kendall_tau_b(ranks, reverse)
        assert result.tau_b == pytest.approx(-1.0)

    def test_four_item_worked_pair(self):
        one = {"w": 1, "x": 2, "y": 3, "z": 4}
        two = {"w": 1, "x": 3, "y": 2, "z": 4}
        result = kendall_tau_b(one, two)
        assert result.tau_b == pytest.approx(2 / 3)
        assert result.method == "exact"

    def test_antisymmetry_without_ties(self):
        rng = random.Random(3)
        items = [f"i{j}" for j in range(9)]
        one = {i: float(r) for i, r in zip(items, rng.sample(range(9), 9))}
        two = {i: float(r) for i, r in zip(items, rng.sample(range(9), 9))}
        reverse_two = {k: -v for k, v in two.items()}
        forward = kendall_tau_b(one, two)
        backward = kendall_tau_b(one, reverse_two)
        assert backward.tau_b == pytest.approx(-forward.tau_b)

    def test_matches_scipy_with_ties(self):
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randint(8, 14)
            items = [f"i{j}" for j in range(n)]
            one = {i: float(rng.randint(0, 5)) for i in items}
            two = {i: float(rng.randint(0, 5)) for i in items}
            result = kendall_tau_b(one, two)
            x = [one[i] for i in sorted(one)]
            y = [two[i] for i in sorted(two)]
            expected = scipy.stats.kendalltau(x, y)
            if result.tau_b is None:
                assert expected.statistic != expected.statistic  # NaN
                continue
            assert result.tau_b == pytest.approx(expected.statistic, abs=1e-12)
            assert result.p_value == pytest.approx(expected.pvalue, abs=1e-9)

    def test_all_tied_is_undefined(self):
        one = {"a": 1, "b": 1, "c": 1}
        two = {"a": 1, "b": 2, "c": 3}
        result = kendall_tau_b(one, two)
        assert result.tau_b is None
        assert result.method == "undefined"

    def test_item_mismatch(self):
        with pytest.raises(LogError):
            kendall_tau_b({"a": 1}, {"b": 1})

    def test_shuffled_rankings_mostly_fail_to_reject(self):
        rng = random.Random(21)
        items = [f"i{j}" for j in range(10)]
        base = {i: float(j) for j, i in enumerate(items)}
        rejections = 0
        for _ in range(40):
            shuffled = list(range(10))
            rng.shuffle(shuffled)
            other = {i: float(r) for i, r in zip(items, shuffled)}
            if kendall_tau_b(base, other).reject_at_0_05:
                rejections += 1
        assert rejections <= 4

    def test_ranking_positions(self):
        assert ranking_positions(["x", "a", "b"]) == {"x": 1.0, "a": 2.0, "b": 3.0}
