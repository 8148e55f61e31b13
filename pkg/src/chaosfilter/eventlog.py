"""Event-log data model: interned activities, trace variants, ingestion.

An event log is a multiset of trace variants over an interned activity
alphabet.  All statistics downstream are multiplicity-aware, so identical
traces are stored once with a count.
"""
from __future__ import annotations

import csv
import hashlib
import io
import xml.etree.ElementTree as ET
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from types import MappingProxyType
from typing import BinaryIO, Union

START_LABEL = "⌊"  # artificial start event, rendered as a left floor bracket
END_LABEL = "⌋"    # artificial end event, rendered as a right floor bracket

START = -2  # virtual activity id of the artificial start event
END = -1    # virtual activity id of the artificial end event

END_APPENDED = "end-appended"
START_PREPENDED = "start-prepended"

Source = Union[bytes, str, BinaryIO, io.TextIOBase]


class LogError(ValueError):
    """Invalid event-log content or an invalid operation on a log."""


class LogParseError(LogError):
    """Malformed input while ingesting a log."""


def _read_source(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


class EventLog:
    """Immutable multiset of trace variants over an interned alphabet.

    Variants are keyed by tuples of dense activity ids; the alphabet maps
    ids to names.  ``dropped_traces`` records traces that were omitted
    during ingestion or projection (empty traces are not representable).
    """

    __slots__ = ("_names", "_index", "_variants", "_dropped", "_counts", "_digest")

    def __init__(
        self,
        alphabet: Sequence[str],
        variants: Mapping[tuple[int, ...], int],
        dropped_traces: int = 0,
    ):
        names = tuple(alphabet)
        index: dict[str, int] = {}
        for i, name in enumerate(names):
            if not name:
                raise LogError("activity names must be non-empty")
            if name in (START_LABEL, END_LABEL):
                raise LogError(f"activity name {name!r} is reserved for artificial events")
            if name in index:
                raise LogError(f"duplicate activity name {name!r} in alphabet")
            index[name] = i
        store: dict[tuple[int, ...], int] = {}
        for trace, count in variants.items():
            trace = tuple(trace)
            if not trace:
                raise LogError("traces must be non-empty")
            if count <= 0:
                raise LogError(f"variant multiplicity must be positive, got {count}")
            for aid in trace:
                if not 0 <= aid < len(names):
                    raise LogError(f"event id {aid} outside alphabet of size {len(names)}")
            store[trace] = store.get(trace, 0) + count
        self._names = names
        self._index = index
        self._variants = store
        self._dropped = dropped_traces
        self._counts: Counter[int] | None = None
        self._digest: str | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_traces(cls, traces: Iterable[Sequence[str]], dropped_traces: int = 0) -> "EventLog":
        """Build a log from name sequences, interning activities in first-seen order."""
        names: list[str] = []
        index: dict[str, int] = {}
        variants: Counter[tuple[int, ...]] = Counter()
        for trace in traces:
            ids = []
            for name in trace:
                if name not in index:
                    index[name] = len(names)
                    names.append(name)
                ids.append(index[name])
            variants[tuple(ids)] += 1
        return cls(names, variants, dropped_traces)

    @classmethod
    def from_variants(cls, variants: Mapping[Sequence[str], int]) -> "EventLog":
        """Build a log from a mapping of name sequences to multiplicities."""
        names: list[str] = []
        index: dict[str, int] = {}
        store: Counter[tuple[int, ...]] = Counter()
        for trace, count in variants.items():
            ids = []
            for name in trace:
                if name not in index:
                    index[name] = len(names)
                    names.append(name)
                ids.append(index[name])
            store[tuple(ids)] += count
        return cls(names, store)

    # -- basic accessors ------------------------------------------------------

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self._names

    @property
    def variants(self) -> Mapping[tuple[int, ...], int]:
        return MappingProxyType(self._variants)

    @property
    def dropped_traces(self) -> int:
        return self._dropped

    def id_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LogError(f"unknown activity {name!r}") from None

    def name_of(self, aid: int) -> str:
        if aid == START:
            return START_LABEL
        if aid == END:
            return END_LABEL
        return self._names[aid]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def iter_variants(self) -> Iterator[tuple[tuple[int, ...], int]]:
        return iter(self._variants.items())

    def iter_name_variants(self) -> Iterator[tuple[tuple[str, ...], int]]:
        for trace, count in self._variants.items():
            yield tuple(self._names[a] for a in trace), count

    def activities(self) -> frozenset[int]:
        """Ids of activities occurring in at least one variant."""
        return frozenset(self.activity_counts())

    def activity_names(self) -> list[str]:
        """Names of occurring activities, sorted."""
        return sorted(self._names[a] for a in self.activity_counts())

    def activity_counts(self) -> Counter[int]:
        """Occurrences per activity id, multiplicity-weighted."""
        if self._counts is None:
            counts: Counter[int] = Counter()
            for trace, mult in self._variants.items():
                for aid in trace:
                    counts[aid] += mult
            self._counts = counts
        return Counter(self._counts)

    def name_counts(self) -> dict[str, int]:
        return {self._names[a]: c for a, c in self.activity_counts().items()}

    @property
    def trace_count(self) -> int:
        return sum(self._variants.values())

    @property
    def event_count(self) -> int:
        return sum(len(t) * m for t, m in self._variants.items())

    def __len__(self) -> int:
        return self.trace_count

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return set(self._names) == set(other._names) and dict(self.iter_name_variants()) == dict(
            other.iter_name_variants()
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"EventLog({len(self._names)} activities, {len(self._variants)} variants, "
            f"{self.trace_count} traces)"
        )

    # -- core operations ------------------------------------------------------

    def project(self, keep: Iterable[int]) -> "EventLog":
        """Project every variant onto the ``keep`` ids, dropping emptied traces.

        Variants collapsing to the same sequence are merged; the alphabet is
        restricted to ``keep`` (re-interned densely, preserving relative order).
        """
        keep_set = set(keep)
        for aid in keep_set:
            if not 0 <= aid < len(self._names):
                raise LogError(f"unknown activity id {aid} in keep set")
        kept_names = [n for i, n in enumerate(self._names) if i in keep_set]
        remap = {self._index[n]: j for j, n in enumerate(kept_names)}
        variants: Counter[tuple[int, ...]] = Counter()
        dropped = 0
        for trace, mult in self._variants.items():
            projected = tuple(remap[a] for a in trace if a in remap)
            if projected:
                variants[projected] += mult
            else:
                dropped += mult
        return EventLog(kept_names, variants, dropped_traces=dropped)

    def project_names(self, keep: Iterable[str]) -> "EventLog":
        return self.project(self.id_of(n) for n in keep)

    def digest(self) -> str:
        """Content hash of the variant multiset (names, counts); order-insensitive."""
        if self._digest is None:
            canonical = format_variant_lines(self)
            self._digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
        return self._digest


class AugmentedView:
    """Read-only view of a log with an artificial start or end event per trace.

    ``end-appended`` yields each variant followed by the virtual END id;
    ``start-prepended`` yields the virtual START id followed by the variant.
    The base log is never touched.
    """

    __slots__ = ("base", "mode")

    def __init__(self, base: EventLog, mode: str):
        if mode not in (END_APPENDED, START_PREPENDED):
            raise LogError(f"unknown augmentation mode {mode!r}")
        self.base = base
        self.mode = mode

    def iter_variants(self) -> Iterator[tuple[tuple[int, ...], int]]:
        if self.mode == END_APPENDED:
            for trace, mult in self.base.iter_variants():
                yield trace + (END,), mult
        else:
            for trace, mult in self.base.iter_variants():
                yield (START,) + trace, mult


def augment(log: EventLog, mode: str) -> AugmentedView:
    return AugmentedView(log, mode)


def count_subsequence(pattern: Sequence[int], log: "EventLog | AugmentedView") -> int:
    """Number of contiguous occurrences of ``pattern``, multiplicity-weighted.

    Overlapping matches count; an activity id absent from the log simply
    contributes zero matches.
    """
    pattern = tuple(pattern)
    if not pattern:
        raise LogError("pattern must be non-empty")
    k = len(pattern)
    total = 0
    for trace, mult in log.iter_variants():
        n = len(trace)
        hits = sum(1 for i in range(n - k + 1) if trace[i : i + k] == pattern)
        total += hits * mult
    return total


# -- canonical plain-text variant format --------------------------------------
#
# One variant per line: "count×act1,act2,...", lines sorted by the name tuple.
# Used for fixtures, golden files, and the log digest.

_VARIANT_SEP = "×"  # multiplication sign


def format_variant_lines(log: EventLog) -> str:
    rows = sorted(log.iter_name_variants())
    for names, _ in rows:
        for name in names:
            if "," in name or "\n" in name or _VARIANT_SEP in name:
                raise LogError(f"activity name {name!r} cannot be written in variant format")
    return "".join(f"{count}{_VARIANT_SEP}{','.join(names)}\n" for names, count in rows)


def parse_variant_lines(source: Source) -> EventLog:
    text = _read_source(source)
    variants: Counter[tuple[str, ...]] = Counter()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if _VARIANT_SEP not in line:
            raise LogParseError(f"line {lineno}: missing '{_VARIANT_SEP}' separator")
        count_text, _, names_text = line.partition(_VARIANT_SEP)
        try:
            count = int(count_text)
        except ValueError:
            raise LogParseError(f"line {lineno}: bad multiplicity {count_text!r}") from None
        names = tuple(n for n in names_text.split(","))
        if any(not n for n in names):
            raise LogParseError(f"line {lineno}: empty activity name")
        variants[names] += count
    if not variants:
        raise LogParseError("empty log")
    return EventLog.from_variants(variants)


# -- XES ----------------------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def ingest_xes(
    source: Source,
    lenient: bool = False,
    lifecycle_complete_only: bool = False,
) -> EventLog:
    """Read the minimal XES skeleton: log > trace > event > string concept:name.

    Strict mode raises on an event without a ``concept:name``; lenient mode
    skips the event.  With ``lifecycle_complete_only`` only events whose
    ``lifecycle:transition`` equals ``complete`` (case-insensitive) are kept.
    Traces with no readable events are dropped and counted.
    """
    text = _read_source(source)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XML at line {line}, column {col}: {exc.msg}") from exc
    traces: list[list[str]] = []
    dropped = 0
    trace_elements = [el for el in root.iter() if _local(el.tag) == "trace"]
    for t_index, trace_el in enumerate(trace_elements):
        events: list[str] = []
        for event_el in trace_el:
            if _local(event_el.tag) != "event":
                continue
            attrs = {
                child.get("key"): child.get("value")
                for child in event_el
                if child.get("key") is not None
            }
            if lifecycle_complete_only:
                transition = attrs.get("lifecycle:transition")
                if transition is not None and transition.lower() != "complete":
                    continue
            name = attrs.get("concept:name")
            if name is None:
                if lenient:
                    continue
                raise LogParseError(
                    f"event without 'concept:name' in trace {t_index}"
                )
            events.append(name)
        if events:
            traces.append(events)
        else:
            dropped += 1
    if not traces:
        raise LogParseError("no non-empty traces in XES input")
    return EventLog.from_traces(traces, dropped_traces=dropped)


def export_xes(log: EventLog) -> bytes:
    """Write the minimal XES skeleton; inverse of :func:`ingest_xes`."""
    root = ET.Element("log", {"xes.version": "1.0", "xes.features": ""})
    for names, count in sorted(log.iter_name_variants()):
        for _ in range(count):
            trace_el = ET.SubElement(root, "trace")
            for name in names:
                event_el = ET.SubElement(trace_el, "event")
                ET.SubElement(event_el, "string", {"key": "concept:name", "value": name})
    tree = ET.ElementTree(root)
    ET.indent(tree)
    buffer = io.BytesIO()
    tree.write(buffer, encoding="utf-8", xml_declaration=True)
    return buffer.getvalue()


# -- CSV ----------------------------------------------------------------------


def ingest_csv(
    source: Source,
    case_column: str,
    activity_column: str,
    order_column: str | None = None,
) -> EventLog:
    """Group CSV rows into traces by case id.

    Events are ordered by ``order_column`` ascending (stable) when given,
    otherwise by file order.  Cases appear in order of first occurrence.
    """
    text = _read_source(source)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise LogParseError("empty log")
    for column in filter(None, (case_column, activity_column, order_column)):
        if column not in reader.fieldnames:
            raise LogParseError(f"missing column {column!r}")
    cases: dict[str, list[tuple[float, int, str]]] = {}
    row_count = 0
    for row in reader:
        row_count += 1
        case = row[case_column]
        activity = row[activity_column]
        if order_column is not None:
            raw_order = row[order_column]
            try:
                order = float(raw_order)
            except (TypeError, ValueError):
                raise LogParseError(
                    f"unparsable order value {raw_order!r} at row {reader.line_num}"
                ) from None
        else:
            order = 0.0
        cases.setdefault(case, []).append((order, row_count, activity))
    if row_count == 0:
        raise LogParseError("empty log")
    traces = []
    for events in cases.values():
        events.sort(key=lambda e: (e[0], e[1]))
        traces.append([activity for _, _, activity in events])
    return EventLog.from_traces(traces)
