"""Successor/predecessor statistics and entropy measures for event logs.

For every occurring activity the log induces two categorical distributions:
which activity directly follows it (with an artificial end event closing
each trace) and which directly precedes it (with an artificial start event).
The entropy of an activity is the sum of the entropies of those two
distributions; chaotic activities score high on both.  Laplace smoothing
with an additive ``alpha`` pulls the distributions toward uniform so that
rarely seen activities are not trusted at face value.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from collections.abc import Mapping

from .eventlog import END, END_LABEL, START, START_LABEL, EventLog, LogError

SUM_TOLERANCE = 1e-9


class UndefinedDistributionError(LogError):
    """Requested a distribution for an activity with no observations and alpha=0."""


@dataclass(frozen=True)
class FollowStats:
    """Per-activity successor/predecessor counts, multiplicity-weighted.

    ``order`` lists the occurring activity ids in a fixed (name-sorted)
    order; successor counts include the END sentinel and predecessor counts
    the START sentinel as extra keys.
    """

    order: tuple[int, ...]
    names: tuple[str, ...]
    activity_count: Mapping[int, int]
    follow: Mapping[int, Mapping[int, int]]
    precede: Mapping[int, Mapping[int, int]]

    @property
    def n_activities(self) -> int:
        return len(self.order)

    def name_of(self, aid: int) -> str:
        if aid == START:
            return START_LABEL
        if aid == END:
            return END_LABEL
        return self.names[self.order.index(aid)]


def build_follow_stats(log: EventLog) -> FollowStats:
    """Count, for every occurring activity, its successors and predecessors.

    Every event has exactly one successor (possibly the artificial end) and
    one predecessor (possibly the artificial start), so each activity's
    successor and predecessor counts both sum to its occurrence count.
    """
    if log.trace_count == 0:
        raise LogError("cannot build follow statistics for an empty log")
    counts = log.activity_counts()
    follow: dict[int, Counter[int]] = {a: Counter() for a in counts}
    precede: dict[int, Counter[int]] = {a: Counter() for a in counts}
    for trace, mult in log.iter_variants():
        previous = START
        for aid in trace:
            if previous != START:
                follow[previous][aid] += mult
            precede[aid][previous] += mult
            previous = aid
        follow[trace[-1]][END] += mult
    order = tuple(sorted(counts, key=log.name_of))
    names = tuple(log.name_of(a) for a in order)
    return FollowStats(
        order=order,
        names=names,
        activity_count=dict(counts),
        follow={a: dict(c) for a, c in follow.items()},
        precede={a: dict(c) for a, c in precede.items()},
    )


@dataclass(frozen=True)
class DistributionVector:
    """A categorical distribution over the activity order plus one sentinel."""

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        total = sum(self.probs)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise LogError(f"distribution sums to {total!r}, expected 1")
        if any(p < 0.0 or p > 1.0 for p in self.probs):
            raise LogError("distribution entries must lie in [0, 1]")


def _ratio_vector(
    stats: FollowStats,
    aid: int,
    counts: Mapping[int, int],
    sentinel: int,
    sentinel_label: str,
    alpha: float,
) -> DistributionVector:
    if alpha < 0:
        raise LogError("alpha must be non-negative")
    occurrences = stats.activity_count.get(aid, 0)
    if occurrences == 0 and alpha == 0:
        raise UndefinedDistributionError(
            f"activity id {aid} does not occur and alpha is 0"
        )
    categories = list(stats.order) + [sentinel]
    labels = stats.names + (sentinel_label,)
    denominator = alpha * len(categories) + occurrences
    probs = tuple((alpha + counts.get(b, 0)) / denominator for b in categories)
    return DistributionVector(labels=labels, probs=probs)


def dfr_vector(stats: FollowStats, aid: int, alpha: float = 0.0) -> DistributionVector:
    """Directly-follows ratio vector of an activity over order + end sentinel."""
    return _ratio_vector(stats, aid, stats.follow.get(aid, {}), END, END_LABEL, alpha)


def dpr_vector(stats: FollowStats, aid: int, alpha: float = 0.0) -> DistributionVector:
    """Directly-precedes ratio vector of an activity over order + start sentinel."""
    return _ratio_vector(stats, aid, stats.precede.get(aid, {}), START, START_LABEL, alpha)


def categorical_entropy(vector: DistributionVector) -> float:
    """Shannon entropy in bits; zero-probability entries contribute zero."""
    return -sum(p * math.log2(p) for p in vector.probs if p > 0.0) + 0.0


def activity_entropy(stats: FollowStats, aid: int, alpha: float = 0.0) -> float:
    """Entropy of an activity: successor entropy plus predecessor entropy."""
    return categorical_entropy(dfr_vector(stats, aid, alpha)) + categorical_entropy(
        dpr_vector(stats, aid, alpha)
    )


def adaptive_alpha(log: EventLog) -> float:
    """The smoothing weight 1/|occurring activities| used by the smoothed filters."""
    n = len(log.activities())
    if n == 0:
        raise LogError("log has no occurring activities")
    return 1.0 / n


def log_entropy(log: EventLog, alpha: float = 0.0) -> float:
    """Total entropy: sum of activity entropies over all occurring activities."""
    stats = build_follow_stats(log)
    return sum(activity_entropy(stats, a, alpha) for a in stats.order)


def smoothed_log_entropy(log: EventLog) -> float:
    """Total entropy with the adaptive alpha of the measured log."""
    return log_entropy(log, adaptive_alpha(log))


@dataclass(frozen=True)
class EntropyReport:
    """Per-activity entropy table for one log and one smoothing weight."""

    alpha: float
    rows: tuple[tuple[str, float, float], ...]  # (name, h_dfr, h_dpr)

    def total(self, name: str) -> float:
        for row_name, h_dfr, h_dpr in self.rows:
            if row_name == name:
                return h_dfr + h_dpr
        raise LogError(f"unknown activity {name!r}")

    def to_rows(self) -> list[dict[str, object]]:
        return [
            {
                "activity": name,
                "h_dfr": h_dfr,
                "h_dpr": h_dpr,
                "h_total": h_dfr + h_dpr,
                "alpha": self.alpha,
            }
            for name, h_dfr, h_dpr in self.rows
        ]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["activity", "h_dfr", "h_dpr", "h_total", "alpha"])
        for row in self.to_rows():
            writer.writerow(
                [row["activity"], row["h_dfr"], row["h_dpr"], row["h_total"], row["alpha"]]
            )
        return buffer.getvalue()


def entropy_report(log: EventLog, alpha: float = 0.0) -> EntropyReport:
    stats = build_follow_stats(log)
    rows = tuple(
        (
            stats.names[i],
            categorical_entropy(dfr_vector(stats, aid, alpha)),
            categorical_entropy(dpr_vector(stats, aid, alpha)),
        )
        for i, aid in enumerate(stats.order)
    )
    return EntropyReport(alpha=alpha, rows=rows)
