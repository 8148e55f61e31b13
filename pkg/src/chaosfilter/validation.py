"""Input-validation helpers shared by the estimator-style interfaces."""
from __future__ import annotations

from collections.abc import Iterable, Mapping

from .eventlog import EventLog, LogError


def check_event_log(X) -> EventLog:
    """Coerce estimator input to an :class:`EventLog`.

    Accepts an EventLog, a mapping of name sequences to multiplicities, or
    an iterable of name sequences (one trace per element).
    """
    if isinstance(X, EventLog):
        return X
    if isinstance(X, Mapping):
        return EventLog.from_variants(X)
    if isinstance(X, Iterable) and not isinstance(X, (str, bytes)):
        return EventLog.from_traces(X)
    raise LogError(
        f"expected an EventLog, a mapping of traces to counts, or an iterable "
        f"of traces; got {type(X).__name__}"
    )


def check_min_activities(log: EventLog, minimum: int) -> None:
    occurring = len(log.activities())
    if occurring < minimum:
        raise LogError(
            f"operation requires at least {minimum} occurring activities, log has {occurring}"
        )
