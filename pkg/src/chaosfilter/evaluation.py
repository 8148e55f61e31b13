"""Model-quality metrics and cross-method rank statistics.

Nondeterminism measures how behaviorally specific a model is: replaying a
fitting trace, it averages the number of distinct visible labels that could
have come next at each visible step.  A purely sequential model scores 1,
the flower model scores the full alphabet size.  Unfitting traces are
excluded from the average and reported through the fitness fraction.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from collections.abc import Mapping, Sequence
from typing import NamedTuple

from .discovery import DiscoveryConfig, discover
from .eventlog import EventLog, LogError
from .filters import FilterSchedule, materialize
from .processtree import ProcessTree, enabled_labels, initial_state, is_accepting, step


class ReplayResult(NamedTuple):
    nondeterminism: float | None
    fitness_fraction: float


def replay_trace(tree: ProcessTree, trace: Sequence[str]) -> list[int] | None:
    """Enabled-visible-label counts before each step of an accepting run.

    Returns None when the tree does not accept the trace.  Among accepting
    runs the walk deterministically follows the first continuation (in the
    tree's child order) that still accepts the remaining suffix.
    """
    memo: dict[tuple[object, int], bool] = {}

    def can_accept(state: object, index: int) -> bool:
        key = (state, index)
        if key in memo:
            return memo[key]
        if index == len(trace):
            result = is_accepting(tree, state)
        else:
            result = any(can_accept(s, index + 1) for s in step(tree, state, trace[index]))
        memo[key] = result
        return result

    state = initial_state(tree)
    if not can_accept(state, 0):
        return None
    counts: list[int] = []
    for index, label in enumerate(trace):
        counts.append(len(enabled_labels(tree, state)))
        state = next(s for s in step(tree, state, label) if can_accept(s, index + 1))
    return counts


def replay_nondeterminism(
    tree: ProcessTree, log: EventLog, pooled: bool = False
) -> ReplayResult:
    """Average nondeterminism and fitness fraction of a log on a tree.

    By default each accepted trace contributes the mean over its visible
    steps and traces are averaged with multiplicity weights; ``pooled``
    instead averages over all visible steps of all accepted traces.
    """
    accepted_weight = 0
    total_weight = 0
    weighted_trace_means = 0.0
    pooled_steps = 0
    pooled_sum = 0.0
    for names, mult in log.iter_name_variants():
        total_weight += mult
        counts = replay_trace(tree, names)
        if counts is None:
            continue
        accepted_weight += mult
        weighted_trace_means += mult * (sum(counts) / len(counts))
        pooled_steps += mult * len(counts)
        pooled_sum += mult * sum(counts)
    fitness = accepted_weight / total_weight if total_weight else 0.0
    if accepted_weight == 0:
        return ReplayResult(None, fitness)
    if pooled:
        return ReplayResult(pooled_sum / pooled_steps, fitness)
    return ReplayResult(weighted_trace_means / accepted_weight, fitness)


def flower_baseline(activities: Sequence[str] | frozenset[str]) -> float:
    """Nondeterminism of the flower model: every label enabled at every step."""
    n = len(set(activities))
    if n == 0:
        raise LogError("flower baseline needs at least one activity")
    return float(n)


def f_score(fitness: float, precision: float) -> float:
    """Harmonic mean of externally measured fitness and precision."""
    if fitness < 0 or precision < 0:
        raise LogError("fitness and precision must be non-negative")
    if fitness + precision == 0:
        return 0.0
    return 2.0 * fitness * precision / (fitness + precision)


@dataclass(frozen=True)
class QualityRecord:
    """One point on an explained-activity curve."""

    log_id: str
    method: str
    steps: int
    explained_ratio: float
    nondeterminism: float | None
    fitness_fraction: float
    flower_baseline: float


def records_to_csv(records: Sequence[QualityRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "log_id",
            "method",
            "steps",
            "explained_ratio",
            "nondeterminism",
            "fitness_fraction",
            "flower_baseline",
        ]
    )
    for r in records:
        writer.writerow(
            [
                r.log_id,
                r.method,
                r.steps,
                r.explained_ratio,
                "" if r.nondeterminism is None else r.nondeterminism,
                r.fitness_fraction,
                r.flower_baseline,
            ]
        )
    return buffer.getvalue()


def explained_activity_curve(
    log: EventLog,
    schedule: FilterSchedule,
    config: DiscoveryConfig | None = None,
    log_id: str = "log",
    pooled: bool = False,
) -> list[QualityRecord]:
    """Discover and replay after each removal step of a schedule."""
    config = config or DiscoveryConfig()
    total = len(log.activities())
    records = []
    for steps in range(len(schedule.removal_order) + 1):
        current = materialize(log, schedule, steps)
        tree = discover(current, config)
        result = replay_nondeterminism(tree, current, pooled=pooled)
        records.append(
            QualityRecord(
                log_id=log_id,
                method=schedule.method.key(),
                steps=steps,
                explained_ratio=(total - steps) / total,
                nondeterminism=result.nondeterminism,
                fitness_fraction=result.fitness_fraction,
                flower_baseline=flower_baseline(current.activity_names()),
            )
        )
    return records


# -- cross-method statistics ---------------------------------------------------


def winning_number(matrix: Sequence[Sequence[float | None]]) -> tuple[list[int], list[float]]:
    """Pairwise strict wins per method over a method x log value matrix.

    Lower values are better; entry (i, j) holds method i's metric on log j.
    Returns per-method totals and totals averaged over the number of logs.
    """
    if not matrix or not matrix[0]:
        raise LogError("winning number needs a non-empty matrix")
    n_logs = len(matrix[0])
    holes = []
    for i, row in enumerate(matrix):
        if len(row) != n_logs:
            raise LogError(f"matrix is ragged: row {i} has {len(row)} cells, expected {n_logs}")
        holes.extend((i, j) for j, value in enumerate(row) if value is None)
    if holes:
        raise LogError(f"matrix has missing cells at (method, log) positions {holes}")
    totals = []
    for i, row in enumerate(matrix):
        wins = 0
        for j in range(n_logs):
            wins += sum(1 for k, other in enumerate(matrix) if k != i and row[j] < other[j])
        totals.append(wins)
    averages = [t / n_logs for t in totals]
    return totals, averages


class TauResult(NamedTuple):
    tau_b: float | None
    z: float | None
    p_value: float | None
    reject_at_0_05: bool | None
    n_items: int
    method: str


_EXACT_MAX_ITEMS = 8  # permutation enumeration below, normal approximation from here


def _tau_b_statistic(x: Sequence[float], y: Sequence[float]) -> float | None:
    n = len(x)
    concordant = discordant = 0
    for i, j in itertools.combinations(range(n), 2):
        dx = x[i] - x[j]
        dy = y[i] - y[j]
        product = dx * dy
        if product > 0:
            concordant += 1
        elif product < 0:
            discordant += 1
    n0 = n * (n - 1) // 2

    def tie_pairs(values: Sequence[float]) -> int:
        groups: dict[float, int] = {}
        for v in values:
            groups[v] = groups.get(v, 0) + 1
        return sum(t * (t - 1) // 2 for t in groups.values())

    n1 = tie_pairs(x)
    n2 = tie_pairs(y)
    denominator = math.sqrt((n0 - n1) * (n0 - n2))
    if denominator == 0:
        return None
    return (concordant - discordant) / denominator


def kendall_tau_b(
    ranking1: Mapping[str, float], ranking2: Mapping[str, float]
) -> TauResult:
    """Tie-corrected Kendall rank correlation with a two-sided significance test.

    The null hypothesis is that the two rankings are uncorrelated; for eight
    or more items the test uses the normal approximation of the statistic
    with tie corrections, below that it enumerates rank permutations
    exactly.  When every item is tied in either ranking the coefficient is
    undefined and reported as such.
    """
    if set(ranking1) != set(ranking2):
        raise LogError("rankings must cover the same item set")
    items = sorted(ranking1)
    n = len(items)
    if n < 2:
        raise LogError("rankings need at least two items")
    x = [float(ranking1[i]) for i in items]
    y = [float(ranking2[i]) for i in items]
    tau = _tau_b_statistic(x, y)
    if tau is None:
        return TauResult(None, None, None, None, n, "undefined")

    if n < _EXACT_MAX_ITEMS:
        observed = abs(tau)
        at_least = 0
        total = 0
        for perm in itertools.permutations(y):
            total += 1
            tau_perm = _tau_b_statistic(x, perm)
            if tau_perm is not None and abs(tau_perm) >= observed - 1e-12:
                at_least += 1
        p = at_least / total
        return TauResult(tau, None, p, p < 0.05, n, "exact")

    def tie_groups(values: Sequence[float]) -> list[int]:
        groups: dict[float, int] = {}
        for v in values:
            groups[v] = groups.get(v, 0) + 1
        return [t for t in groups.values() if t > 1]

    concordant = discordant = 0
    for i, j in itertools.combinations(range(n), 2):
        product = (x[i] - x[j]) * (y[i] - y[j])
        if product > 0:
            concordant += 1
        elif product < 0:
            discordant += 1
    s = concordant - discordant
    tx = tie_groups(x)
    ty = tie_groups(y)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(u * (u - 1) * (2 * u + 5) for u in ty)
    v1 = (
        sum(t * (t - 1) for t in tx)
        * sum(u * (u - 1) for u in ty)
        / (2.0 * n * (n - 1))
    )
    v2 = (
        sum(t * (t - 1) * (t - 2) for t in tx)
        * sum(u * (u - 1) * (u - 2) for u in ty)
        / (9.0 * n * (n - 1) * (n - 2))
    )
    variance = (v0 - vt - vu) / 18.0 + v1 + v2
    if variance <= 0:
        return TauResult(tau, None, None, None, n, "undefined")
    z = s / math.sqrt(variance)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return TauResult(tau, z, p, p < 0.05, n, "normal")


def ranking_positions(order: Sequence[str]) -> dict[str, float]:
    """Positions of a removal order as a rank mapping (first removed = 1)."""
    return {name: float(i + 1) for i, name in enumerate(order)}
