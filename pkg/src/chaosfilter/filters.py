"""Activity-filtering strategies and the removal schedules they produce.

Five strategy kinds are supported: greedy removal of the highest-entropy
activity (``direct-entropy``), greedy removal of the activity whose deletion
minimizes total log entropy (``indirect-entropy``), the two frequency
baselines, and a seeded random order.  The entropy kinds optionally apply
Laplace smoothing with an adaptive alpha of 1/|occurring activities|,
recomputed for whichever log is being measured at each step.

Every strategy removes activities one at a time until two remain; the
result is a :class:`FilterSchedule` that can re-materialize any intermediate
log and extends to a full ranking for presentation.
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from collections.abc import Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .entropy import (
    activity_entropy,
    adaptive_alpha,
    build_follow_stats,
    log_entropy,
)
from .eventlog import EventLog, LogError
from .validation import check_event_log

DIRECT_ENTROPY = "direct-entropy"
INDIRECT_ENTROPY = "indirect-entropy"
LEAST_FREQUENT_FIRST = "least-frequent-first"
MOST_FREQUENT_FIRST = "most-frequent-first"
RANDOM = "random"

KINDS = (DIRECT_ENTROPY, INDIRECT_ENTROPY, LEAST_FREQUENT_FIRST, MOST_FREQUENT_FIRST, RANDOM)
ENTROPY_KINDS = (DIRECT_ENTROPY, INDIRECT_ENTROPY)

# Criterion direction per kind: activities removed earlier have the "worse"
# value; +1 means higher criterion is removed first, -1 the opposite.
_DIRECTION = {
    DIRECT_ENTROPY: +1,
    INDIRECT_ENTROPY: -1,
    LEAST_FREQUENT_FIRST: -1,
    MOST_FREQUENT_FIRST: +1,
    RANDOM: +1,
}


class StaleScheduleError(LogError):
    """A schedule was applied to a log other than the one it was computed from."""


@dataclass(frozen=True)
class FilterMethod:
    """A filtering strategy: kind, optional smoothing, optional seed."""

    kind: str
    laplace: bool = False
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LogError(f"unknown filter kind {self.kind!r}; expected one of {KINDS}")
        if self.laplace and self.kind not in ENTROPY_KINDS:
            raise LogError(f"laplace smoothing is only valid for entropy kinds, not {self.kind!r}")
        if self.kind == RANDOM and self.seed is None:
            raise LogError("the random filter requires a seed")
        if self.kind != RANDOM and self.seed is not None:
            raise LogError(f"seed is only valid for the random filter, not {self.kind!r}")

    def key(self) -> str:
        """Stable textual identifier, used for caching and CSV output."""
        parts = [self.kind]
        if self.laplace:
            parts.append("laplace")
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        return "+".join(parts)

    @classmethod
    def parse(cls, text: str) -> "FilterMethod":
        parts = text.split("+")
        kind = parts[0]
        laplace = False
        seed = None
        for part in parts[1:]:
            if part == "laplace":
                laplace = True
            elif part.startswith("seed="):
                seed = int(part[len("seed="):])
            else:
                raise LogError(f"unknown method modifier {part!r}")
        return cls(kind=kind, laplace=laplace, seed=seed)


def standard_methods(seed: int) -> list[FilterMethod]:
    """The seven methods compared in the evaluation experiments."""
    return [
        FilterMethod(DIRECT_ENTROPY),
        FilterMethod(DIRECT_ENTROPY, laplace=True),
        FilterMethod(INDIRECT_ENTROPY),
        FilterMethod(INDIRECT_ENTROPY, laplace=True),
        FilterMethod(LEAST_FREQUENT_FIRST),
        FilterMethod(MOST_FREQUENT_FIRST),
        FilterMethod(RANDOM, seed=seed),
    ]


@dataclass(frozen=True)
class FilterSchedule:
    """Ordered removal sequence with per-step criterion values.

    ``removal_order`` runs from first-removed to last-removed and has
    exactly |occurring activities| - 2 entries; ``retained`` holds the final
    two activities with the criterion evaluated on the two-activity remnant,
    ordered in the same direction the method removes in.
    """

    method: FilterMethod
    removal_order: tuple[tuple[str, float], ...]
    retained: tuple[tuple[str, float], ...]
    source_digest: str
    note: str = ""

    def removed_names(self, steps: int | None = None) -> list[str]:
        if steps is None:
            steps = len(self.removal_order)
        return [name for name, _ in self.removal_order[:steps]]

    def step_alpha(self, step: int) -> float:
        """Smoothing weight the criterion of 1-based ``step`` was computed with.

        The adaptive alpha is 1/|activities| of whichever log is measured:
        the pre-step log for the direct filter, the candidate projection
        (one activity smaller) for the indirect one.
        """
        if not self.method.laplace:
            return 0.0
        n_before = len(self.removal_order) + len(self.retained) - (step - 1)
        if self.method.kind == INDIRECT_ENTROPY:
            n_before -= 1
        return 1.0 / max(n_before, 1)

    def to_rows(self) -> list[dict[str, object]]:
        rows = []
        entries = list(self.removal_order) + list(self.retained)
        for step, (name, criterion) in enumerate(entries, start=1):
            retained = step > len(self.removal_order)
            # Retained activities carry the criterion of the two-activity
            # remnant, so their alpha is the final step's.
            alpha_step = min(step, len(self.removal_order) + 1)
            rows.append(
                {
                    "step": step,
                    "activity": name,
                    "criterion": criterion,
                    "method": self.method.key(),
                    "alpha": self.step_alpha(alpha_step),
                    "retained": retained,
                }
            )
        return rows

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["step", "activity", "criterion", "method", "alpha", "retained"])
        for row in self.to_rows():
            writer.writerow(
                [
                    row["step"],
                    row["activity"],
                    row["criterion"],
                    row["method"],
                    row["alpha"],
                    row["retained"],
                ]
            )
        return buffer.getvalue()


def _entropy_criteria(log: EventLog, laplace: bool) -> dict[str, float]:
    stats = build_follow_stats(log)
    alpha = adaptive_alpha(log) if laplace else 0.0
    return {
        stats.names[i]: activity_entropy(stats, aid, alpha)
        for i, aid in enumerate(stats.order)
    }


def _indirect_criteria(log: EventLog, laplace: bool) -> dict[str, float]:
    occurring = log.activities()
    criteria = {}
    for aid in occurring:
        candidate = log.project(occurring - {aid})
        alpha = adaptive_alpha(candidate) if laplace else 0.0
        criteria[log.name_of(aid)] = log_entropy(candidate, alpha)
    return criteria


def _frequency_criteria(log: EventLog) -> dict[str, float]:
    return {log.name_of(a): float(c) for a, c in log.activity_counts().items()}


def _step_criteria(log: EventLog, method: FilterMethod) -> dict[str, float]:
    if method.kind == DIRECT_ENTROPY:
        return _entropy_criteria(log, method.laplace)
    if method.kind == INDIRECT_ENTROPY:
        return _indirect_criteria(log, method.laplace)
    return _frequency_criteria(log)


def _select(criteria: dict[str, float], direction: int) -> tuple[str, float]:
    # Ties break toward the lexicographically smallest name.
    best = min(criteria.items(), key=lambda item: (-direction * item[1], item[0]))
    return best


def run_filter(log: EventLog, method: FilterMethod) -> FilterSchedule:
    """Compute the removal schedule of ``method`` on ``log``.

    The criterion is recomputed on the current filtered log at every step;
    the loop stops when two activities remain.
    """
    digest = log.digest()
    occurring_names = log.activity_names()
    if len(occurring_names) < 3:
        retained = tuple((name, 0.0) for name in occurring_names)
        return FilterSchedule(
            method=method,
            removal_order=(),
            retained=retained,
            source_digest=digest,
            note=f"log has {len(occurring_names)} occurring activities; nothing to remove",
        )

    if method.kind == RANDOM:
        names = sorted(occurring_names)
        rng = random.Random(method.seed)
        rng.shuffle(names)
        removal = tuple((name, 0.0) for name in names[: len(names) - 2])
        retained = tuple((name, 0.0) for name in names[len(names) - 2 :])
        return FilterSchedule(method, removal, retained, digest)

    direction = _DIRECTION[method.kind]
    current = log
    removal: list[tuple[str, float]] = []
    while len(current.activities()) > 2:
        criteria = _step_criteria(current, method)
        name, criterion = _select(criteria, direction)
        removal.append((name, criterion))
        current = current.project(current.activities() - {current.id_of(name)})
    final_criteria = _step_criteria(current, method)
    retained = tuple(
        sorted(final_criteria.items(), key=lambda item: (-direction * item[1], item[0]))
    )
    return FilterSchedule(method, tuple(removal), retained, digest)


def materialize(log: EventLog, schedule: FilterSchedule, steps: int) -> EventLog:
    """Reconstruct the log after the first ``steps`` removals of a schedule."""
    if schedule.source_digest != log.digest():
        raise StaleScheduleError(
            "schedule was computed from a different log (digest mismatch)"
        )
    if not 0 <= steps <= len(schedule.removal_order):
        raise LogError(
            f"steps must be in [0, {len(schedule.removal_order)}], got {steps}"
        )
    if steps == 0:
        return log
    removed = set(schedule.removed_names(steps))
    keep = {a for a in log.activities() if log.name_of(a) not in removed}
    return log.project(keep)


def full_ranking(schedule: FilterSchedule) -> list[str]:
    """Removal order extended over the retained pair, for presentation."""
    return [name for name, _ in schedule.removal_order] + [
        name for name, _ in schedule.retained
    ]


class ChaoticActivityFilter(BaseEstimator, TransformerMixin):
    """Estimator wrapper around :func:`run_filter`.

    Fitting computes the removal schedule on the training log; transforming
    projects a log onto the activities that survive ``steps`` removals
    (every occurring activity but two when ``steps`` is None).  Unlike
    :func:`materialize`, ``transform`` accepts any log and simply drops the
    learned removal set wherever present, so fitted filters compose with
    pipelines over related logs.

    Parameters
    ----------
    method : str, default "direct-entropy"
        One of the five strategy kinds.
    laplace : bool, default False
        Apply adaptive Laplace smoothing (entropy kinds only).
    seed : int or None
        Seed for the random strategy.
    steps : int or None
        How many removals to apply on transform; None applies all.
    """

    def __init__(
        self,
        method: str = DIRECT_ENTROPY,
        laplace: bool = False,
        seed: int | None = None,
        steps: int | None = None,
    ):
        self.method = method
        self.laplace = laplace
        self.seed = seed
        self.steps = steps

    def fit(self, X, y=None) -> "ChaoticActivityFilter":
        log = check_event_log(X)
        spec = FilterMethod(kind=self.method, laplace=self.laplace, seed=self.seed)
        self.schedule_ = run_filter(log, spec)
        self.ranking_ = full_ranking(self.schedule_)
        self.n_activities_ = len(self.ranking_)
        return self

    def transform(self, X) -> EventLog:
        if not hasattr(self, "schedule_"):
            raise LogError("filter is not fitted yet; call fit first")
        log = check_event_log(X)
        steps = self.steps if self.steps is not None else len(self.schedule_.removal_order)
        if not 0 <= steps <= len(self.schedule_.removal_order):
            raise LogError(f"steps must be in [0, {len(self.schedule_.removal_order)}]")
        removed = set(self.schedule_.removed_names(steps))
        keep = {a for a in log.activities() if log.name_of(a) not in removed}
        return log.project(keep)
