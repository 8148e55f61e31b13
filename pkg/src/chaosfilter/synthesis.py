"""Log simulation from process trees and the chaos-injection benchmark.

The benchmark protocol: simulate a clean log from a model, insert k
artificial activities at uniformly random gap positions (so they are
chaotic by construction), run a filtering strategy until every inserted
activity is gone, and count how many original activities were removed
along the way.  Inserted activities come in three frequency modes measured
against the pre-injection log: ``frequent`` (the maximum activity count),
``infrequent`` (the minimum), and ``uniform`` (drawn between the two).
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from collections.abc import Iterable, Mapping, Sequence

from .eventlog import EventLog, LogError
from .filters import FilterMethod, FilterSchedule, run_filter
from .processtree import ACT, LOOP, PAR, SEQ, TAU, XOR, ProcessTree, act, loop, par, seq, xor

FREQUENT = "frequent"
INFREQUENT = "infrequent"
UNIFORM = "uniform"
MODES = (FREQUENT, INFREQUENT, UNIFORM)

_MAX_EMPTY_RETRIES = 1000


def _playout(tree: ProcessTree, rng: random.Random, loop_continue_p: float) -> list[str]:
    if tree.op == ACT:
        return [tree.label]  # type: ignore[list-item]
    if tree.op == TAU:
        return []
    if tree.op == SEQ:
        events: list[str] = []
        for child in tree.children:
            events.extend(_playout(child, rng, loop_continue_p))
        return events
    if tree.op == XOR:
        child = tree.children[rng.randrange(len(tree.children))]
        return _playout(child, rng, loop_continue_p)
    if tree.op == PAR:
        pools = [_playout(child, rng, loop_continue_p) for child in tree.children]
        pools = [p for p in pools if p]
        merged: list[str] = []
        remaining = sum(len(p) for p in pools)
        while remaining:
            # Uniform random merge: pick the next source proportionally to
            # its remaining length, which makes every interleaving equally
            # likely.
            pick = rng.randrange(remaining)
            for pool in pools:
                if pick < len(pool):
                    merged.append(pool.pop(0))
                    break
                pick -= len(pool)
            pools = [p for p in pools if p]
            remaining -= 1
        return merged
    body, redo = tree.children
    events = _playout(body, rng, loop_continue_p)
    while rng.random() < loop_continue_p:
        events.extend(_playout(redo, rng, loop_continue_p))
        events.extend(_playout(body, rng, loop_continue_p))
    return events


def simulate(
    tree: ProcessTree,
    n_traces: int,
    seed: int,
    loop_continue_p: float = 0.5,
) -> EventLog:
    """Sample ``n_traces`` independent play-outs of the tree.

    Exclusive choices pick a child uniformly, parallel play-outs are merged
    by a uniform random interleaving, and loops continue with probability
    ``loop_continue_p`` per round.  Empty play-outs are resampled.
    """
    if n_traces < 1:
        raise LogError("n_traces must be at least 1")
    rng = random.Random(seed)
    traces: list[list[str]] = []
    for _ in range(n_traces):
        for _ in range(_MAX_EMPTY_RETRIES):
            events = _playout(tree, rng, loop_continue_p)
            if events:
                traces.append(events)
                break
        else:
            raise LogError(
                f"no non-empty play-out found in {_MAX_EMPTY_RETRIES} attempts; "
                "the tree may only produce silent behavior"
            )
    return EventLog.from_traces(traces)


def random_tree(n_activities: int, seed: int, parallel_weight: float = 1.0) -> ProcessTree:
    """A random block-structured tree over ``n_activities`` fresh labels.

    Used for randomized miner tests; trees contain no silent leaves, so
    every play-out is non-empty.
    """
    if n_activities < 1:
        raise LogError("n_activities must be at least 1")
    rng = random.Random(seed)
    names = [f"act{i:02d}" for i in range(n_activities)]

    def build(labels: list[str]) -> ProcessTree:
        if len(labels) == 1:
            return act(labels[0])
        operators = [SEQ, SEQ, XOR, LOOP] + ([PAR] if parallel_weight > 0 else [])
        op = operators[rng.randrange(len(operators))]
        n_parts = 2 if op == LOOP else min(len(labels), rng.randint(2, 3))
        # Split labels into contiguous non-empty parts.
        cut_points = sorted(rng.sample(range(1, len(labels)), n_parts - 1))
        parts = []
        last = 0
        for point in cut_points + [len(labels)]:
            parts.append(labels[last:point])
            last = point
        children = [build(part) for part in parts]
        if op == SEQ:
            return seq(*children)
        if op == XOR:
            return xor(*children)
        if op == PAR:
            return par(*children)
        return loop(children[0], children[1])

    return build(names)


@dataclass(frozen=True)
class ChaosInsertionSpec:
    """How many artificial activities to insert, at which frequency, where."""

    k: int
    mode: str
    seed: int
    name_prefix: str = "CHAOS_"

    def __post_init__(self):
        if self.k < 1:
            raise LogError("k must be at least 1")
        if self.mode not in MODES:
            raise LogError(f"unknown insertion mode {self.mode!r}; expected one of {MODES}")


def inject_chaos(log: EventLog, spec: ChaosInsertionSpec) -> tuple[EventLog, frozenset[str]]:
    """Insert ``spec.k`` artificial activities at random gap positions.

    Per activity, the event count is fixed by the mode against the
    pre-injection log; each event then lands in a gap drawn uniformly with
    replacement over all gaps of the log (a trace of length m has m+1 gaps,
    weighted by variant multiplicity).  Original events keep their relative
    order, so projecting the result back onto the original alphabet returns
    the input log exactly.
    """
    if log.trace_count == 0:
        raise LogError("cannot inject into an empty log")
    rng = random.Random(spec.seed)
    names = [f"{spec.name_prefix}{i}" for i in range(spec.k)]
    for name in names:
        if name in log:
            raise LogError(f"chaotic activity name {name!r} collides with the log alphabet")
    counts = log.activity_counts()
    low = min(counts.values())
    high = max(counts.values())
    if spec.mode == FREQUENT:
        events_per_activity = [high] * spec.k
    elif spec.mode == INFREQUENT:
        events_per_activity = [low] * spec.k
    else:
        events_per_activity = [rng.randint(low, high) for _ in range(spec.k)]

    instances: list[tuple[str, ...]] = []
    for trace, mult in sorted(log.iter_name_variants()):
        instances.extend([trace] * mult)
    offsets: list[int] = []
    total_gaps = 0
    for trace in instances:
        offsets.append(total_gaps)
        total_gaps += len(trace) + 1

    inserted: dict[tuple[int, int], list[str]] = {}
    for name, n_events in zip(names, events_per_activity):
        for _ in range(n_events):
            slot = rng.randrange(total_gaps)
            instance = bisect_right(offsets, slot) - 1
            gap = slot - offsets[instance]
            inserted.setdefault((instance, gap), []).append(name)

    new_traces: list[list[str]] = []
    for index, trace in enumerate(instances):
        events: list[str] = []
        for gap in range(len(trace) + 1):
            events.extend(inserted.get((index, gap), ()))
            if gap < len(trace):
                events.append(trace[gap])
        new_traces.append(events)

    alphabet = list(log.alphabet) + names
    index_of = {name: i for i, name in enumerate(alphabet)}
    variants: dict[tuple[int, ...], int] = {}
    for events in new_traces:
        ids = tuple(index_of[e] for e in events)
        variants[ids] = variants.get(ids, 0) + 1
    return EventLog(alphabet, variants), frozenset(names)


@dataclass(frozen=True)
class ChaosReport:
    """Outcome of one filter run against known injected activities."""

    inserted: Mapping[str, int]
    schedule: FilterSchedule
    removed_walk: tuple[str, ...]
    incorrect_removals: int
    truth_cleared: bool


def score_filter_against_ground_truth(
    log_with_chaos: EventLog,
    truth: Iterable[str],
    method: FilterMethod,
) -> ChaosReport:
    """Walk a filter's removal order until every injected activity is gone.

    ``incorrect_removals`` counts the original activities removed up to and
    including that point.  If an injected activity survives into the
    retained pair, the filter failed outright and every original activity
    counts as incorrectly removed.
    """
    truth_set = set(truth)
    if not truth_set:
        raise LogError("ground truth must name at least one activity")
    for name in truth_set:
        if name not in log_with_chaos:
            raise LogError(f"ground-truth activity {name!r} is not in the log alphabet")
    schedule = run_filter(log_with_chaos, method)
    name_counts = log_with_chaos.name_counts()
    occurring = set(name_counts)
    remaining = truth_set & occurring
    walk: list[str] = []
    incorrect = 0
    for name, _ in schedule.removal_order:
        walk.append(name)
        if name in remaining:
            remaining.discard(name)
            if not remaining:
                break
        else:
            incorrect += 1
    cleared = not remaining
    if not cleared:
        incorrect = len(occurring - truth_set)
    return ChaosReport(
        inserted={n: name_counts.get(n, 0) for n in sorted(truth_set)},
        schedule=schedule,
        removed_walk=tuple(walk),
        incorrect_removals=incorrect,
        truth_cleared=cleared,
    )


def _cell_seed(base_seed: int, k: int, mode: str) -> int:
    return base_seed * 100_000 + k * 10 + MODES.index(mode)


def chaos_grid(
    log: EventLog,
    ks: Sequence[int],
    modes: Sequence[str],
    methods: Sequence[FilterMethod],
    seed: int,
) -> list[dict[str, object]]:
    """Evaluate every method on every (k, mode) injection of the same log.

    One injected log is shared by all methods per cell, mirroring how the
    strategies are compared; the injection seed is derived deterministically
    from ``seed``, ``k`` and the mode.
    """
    rows: list[dict[str, object]] = []
    for k in ks:
        for mode in modes:
            spec = ChaosInsertionSpec(k=k, mode=mode, seed=_cell_seed(seed, k, mode))
            chaos_log, truth = inject_chaos(log, spec)
            for method in methods:
                report = score_filter_against_ground_truth(chaos_log, truth, method)
                rows.append(
                    {
                        "method": method.key(),
                        "k": k,
                        "mode": mode,
                        "incorrect_removals": report.incorrect_removals,
                        "truth_cleared": report.truth_cleared,
                    }
                )
    return rows
