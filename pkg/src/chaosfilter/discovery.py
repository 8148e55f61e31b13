"""Directly-follows graphs and block-structured model discovery.

The miner recursively partitions the activities of the log by trying, in
order, an exclusive-choice cut (disconnected behavior), a sequence cut
(strictly ordered groups), a parallel cut (mutually interleaved groups with
start/end feasibility), and a loop cut (a body holding every start and end
activity plus redo parts).  When no cut applies it falls back to the flower
model over the remaining activities, which accepts every sequence.  With
edge filtering off, every trace of the input log fits the discovered tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator

from .eventlog import EventLog, LogError
from .processtree import ProcessTree, act, loop, par, seq, tau, xor
from .validation import check_event_log

Variants = dict[tuple[str, ...], int]


@dataclass(frozen=True)
class Dfg:
    """Directly-follows graph with start/end counts, multiplicity-weighted."""

    nodes: frozenset[str]
    edges: Mapping[tuple[str, str], int]
    start_counts: Mapping[str, int]
    end_counts: Mapping[str, int]

    def to_doc(self) -> dict:
        return {
            "nodes": sorted(self.nodes),
            "edges": [
                {"source": a, "target": b, "count": c}
                for (a, b), c in sorted(self.edges.items())
            ],
            "start_counts": dict(sorted(self.start_counts.items())),
            "end_counts": dict(sorted(self.end_counts.items())),
        }


@dataclass(frozen=True)
class DiscoveryConfig:
    """Miner knobs; ``edge_filter_ratio`` 0 disables infrequent-edge removal."""

    edge_filter_ratio: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.edge_filter_ratio < 1.0:
            raise LogError("edge_filter_ratio must lie in [0, 1)")


def _dfg_from_variants(variants: Variants) -> Dfg:
    edges: dict[tuple[str, str], int] = {}
    starts: dict[str, int] = {}
    ends: dict[str, int] = {}
    nodes: set[str] = set()
    for trace, mult in variants.items():
        if not trace:
            continue
        nodes.update(trace)
        starts[trace[0]] = starts.get(trace[0], 0) + mult
        ends[trace[-1]] = ends.get(trace[-1], 0) + mult
        for a, b in zip(trace, trace[1:]):
            edges[(a, b)] = edges.get((a, b), 0) + mult
    return Dfg(frozenset(nodes), edges, starts, ends)


def build_dfg(log: EventLog) -> Dfg:
    """Directly-follows graph of a log."""
    if log.trace_count == 0:
        raise LogError("cannot build a directly-follows graph for an empty log")
    return _dfg_from_variants(dict(log.iter_name_variants()))


def _filter_edges(dfg: Dfg, ratio: float) -> dict[tuple[str, str], int]:
    if ratio == 0.0:
        return dict(dfg.edges)
    max_out: dict[str, int] = {}
    for (a, _), count in dfg.edges.items():
        max_out[a] = max(max_out.get(a, 0), count)
    return {
        (a, b): count
        for (a, b), count in dfg.edges.items()
        if count >= ratio * max_out[a]
    }


def _components(nodes: Iterable[str], undirected: set[tuple[str, str]]) -> list[frozenset[str]]:
    nodes = sorted(nodes)
    adjacency: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in undirected:
        if a in adjacency and b in adjacency and a != b:
            adjacency[a].add(b)
            adjacency[b].add(a)
    seen: set[str] = set()
    components = []
    for node in nodes:
        if node in seen:
            continue
        component = {node}
        frontier = [node]
        seen.add(node)
        while frontier:
            current = frontier.pop()
            for neighbor in adjacency[current]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    component.add(neighbor)
                    frontier.append(neighbor)
        components.append(frozenset(component))
    return sorted(components, key=min)


def _xor_cut(nodes: frozenset[str], edges: dict[tuple[str, str], int]) -> list[frozenset[str]] | None:
    components = _components(nodes, set(edges))
    return components if len(components) >= 2 else None


def _strongly_connected_components(
    nodes: Sequence[str], edges: dict[tuple[str, str], int]
) -> list[frozenset[str]]:
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    pred: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        if a in succ and b in succ:
            succ[a].append(b)
            pred[b].append(a)
    # Kosaraju with explicit stacks.
    order: list[str] = []
    seen: set[str] = set()
    for start in nodes:
        if start in seen:
            continue
        stack = [(start, iter(succ[start]))]
        seen.add(start)
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()
    assigned: dict[str, int] = {}
    components: list[set[str]] = []
    for start in reversed(order):
        if start in assigned:
            continue
        index = len(components)
        component = {start}
        assigned[start] = index
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in pred[node]:
                if nxt not in assigned:
                    assigned[nxt] = index
                    component.add(nxt)
                    frontier.append(nxt)
        components.append(component)
    return [frozenset(c) for c in components]


def _sequence_cut(nodes: frozenset[str], edges: dict[tuple[str, str], int]) -> list[frozenset[str]] | None:
    node_list = sorted(nodes)
    sccs = _strongly_connected_components(node_list, edges)
    if len(sccs) < 2:
        return None
    scc_of = {n: i for i, scc in enumerate(sccs) for n in scc}
    n_scc = len(sccs)
    succ: dict[int, set[int]] = {i: set() for i in range(n_scc)}
    for a, b in edges:
        ia, ib = scc_of[a], scc_of[b]
        if ia != ib:
            succ[ia].add(ib)
    reach: list[set[int]] = []
    for i in range(n_scc):
        seen = {i}
        frontier = [i]
        while frontier:
            current = frontier.pop()
            for nxt in succ[current]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        reach.append(seen)
    # Merge pairwise-unreachable components: they share a sequence position.
    parent = list(range(n_scc))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    for i in range(n_scc):
        for j in range(i + 1, n_scc):
            if j not in reach[i] and i not in reach[j]:
                union(i, j)
    groups: dict[int, set[int]] = {}
    for i in range(n_scc):
        groups.setdefault(find(i), set()).add(i)
    if len(groups) < 2:
        return None
    # Order groups by reachability; mixed directions mean no sequence exists.
    group_ids = sorted(groups)
    before: dict[tuple[int, int], bool] = {}
    for gi in group_ids:
        for gj in group_ids:
            if gi == gj:
                continue
            before[(gi, gj)] = any(
                j in reach[i] for i in groups[gi] for j in groups[gj]
            )
    ordered: list[int] = []
    remaining = set(group_ids)
    while remaining:
        heads = [
            g
            for g in sorted(remaining)
            if not any(before.get((other, g), False) for other in remaining if other != g)
        ]
        if len(heads) != 1:
            return None
        ordered.append(heads[0])
        remaining.remove(heads[0])
    classes = []
    for g in ordered:
        members: set[str] = set()
        for scc_index in groups[g]:
            members |= sccs[scc_index]
        classes.append(frozenset(members))
    return classes


def _parallel_cut(
    nodes: frozenset[str],
    edges: dict[tuple[str, str], int],
    starts: set[str],
    ends: set[str],
) -> list[frozenset[str]] | None:
    # Activities that are NOT doubly connected must stay in the same class.
    missing: set[tuple[str, str]] = set()
    node_list = sorted(nodes)
    for i, a in enumerate(node_list):
        for b in node_list[i + 1 :]:
            if (a, b) not in edges or (b, a) not in edges:
                missing.add((a, b))
    components = _components(nodes, missing)
    if len(components) < 2:
        return None
    for component in components:
        if not (component & starts) or not (component & ends):
            return None
    return components


def _loop_cut(
    nodes: frozenset[str],
    edges: dict[tuple[str, str], int],
    starts: set[str],
    ends: set[str],
) -> list[frozenset[str]] | None:
    body = set(starts | ends)
    if body >= nodes:
        return None
    while True:
        remainder = nodes - body
        if not remainder:
            return None
        components = _components(remainder, set(edges))
        merged = False
        for component in components:
            entries = {b for b in component if any((e, b) in edges for e in ends)}
            exits = {a for a in component if any((a, s) in edges for s in starts)}
            ok = bool(entries) or bool(exits)
            for a, b in edges:
                if a in body and b in component and a not in ends:
                    ok = False
                if a in component and b in body and b not in starts:
                    ok = False
            # Completeness: the loop must be restartable from every end and
            # every redo exit must be able to reach every start.
            if ok:
                for e in ends:
                    if any((e, b) not in edges for b in entries):
                        ok = False
                        break
            if ok:
                for a in exits:
                    if any((a, s) not in edges for s in starts):
                        ok = False
                        break
            if not ok:
                body |= component
                merged = True
                break
        if not merged:
            return [frozenset(body)] + components


def _split_xor(variants: Variants, classes: list[frozenset[str]]) -> list[Variants]:
    index_of = {a: i for i, cls in enumerate(classes) for a in cls}
    sublogs: list[Variants] = [{} for _ in classes]
    for trace, mult in sorted(variants.items()):
        votes = [0] * len(classes)
        for event in trace:
            votes[index_of[event]] += 1
        winner = max(range(len(classes)), key=lambda i: (votes[i], -i))
        projected = tuple(e for e in trace if index_of[e] == winner)
        sublogs[winner][projected] = sublogs[winner].get(projected, 0) + mult
    return sublogs


def _split_projection(variants: Variants, classes: list[frozenset[str]]) -> list[Variants]:
    sublogs: list[Variants] = [{} for _ in classes]
    for trace, mult in sorted(variants.items()):
        for i, cls in enumerate(classes):
            projected = tuple(e for e in trace if e in cls)
            sublogs[i][projected] = sublogs[i].get(projected, 0) + mult
    return sublogs


def _split_loop(variants: Variants, classes: list[frozenset[str]]) -> list[Variants]:
    # classes[0] is the body; maximal same-class runs become segment traces,
    # with implicit empty body segments keeping the body/redo alternation.
    index_of = {a: i for i, cls in enumerate(classes) for a in cls}
    sublogs: list[Variants] = [{} for _ in classes]

    def add(class_index: int, segment: tuple[str, ...], mult: int) -> None:
        sublogs[class_index][segment] = sublogs[class_index].get(segment, 0) + mult

    for trace, mult in sorted(variants.items()):
        segments: list[tuple[int, list[str]]] = []
        for event in trace:
            cls = index_of[event]
            if segments and segments[-1][0] == cls:
                segments[-1][1].append(event)
            else:
                segments.append((cls, [event]))
        previous = None
        for cls, events in segments:
            if cls != 0 and previous in (None, "redo"):
                add(0, (), mult)
            add(cls, tuple(events), mult)
            previous = "body" if cls == 0 else "redo"
        if previous != "body":
            add(0, (), mult)
    return sublogs


def flower(activities: Iterable[str]) -> ProcessTree:
    """The model accepting every sequence over the given activities."""
    names = sorted(set(activities))
    if not names:
        raise LogError("flower model needs at least one activity")
    return loop(tau(), xor(*(act(n) for n in names)))


def _discover_variants(variants: Variants, ratio: float) -> ProcessTree:
    empties = variants.get((), 0)
    rest = {t: c for t, c in variants.items() if t}
    if not rest:
        return tau()
    if empties:
        return xor(tau(), _discover_variants(rest, ratio))
    activities = sorted({a for trace in rest for a in trace})
    if len(activities) == 1 and all(len(t) == 1 for t in rest):
        return act(activities[0])
    dfg = _dfg_from_variants(rest)
    edges = _filter_edges(dfg, ratio)
    starts = set(dfg.start_counts)
    ends = set(dfg.end_counts)

    classes = _xor_cut(dfg.nodes, edges)
    if classes:
        return xor(*(_discover_variants(sub, ratio) for sub in _split_xor(rest, classes)))
    classes = _sequence_cut(dfg.nodes, edges)
    if classes:
        return seq(*(_discover_variants(sub, ratio) for sub in _split_projection(rest, classes)))
    classes = _parallel_cut(dfg.nodes, edges, starts, ends)
    if classes:
        return par(*(_discover_variants(sub, ratio) for sub in _split_projection(rest, classes)))
    classes = _loop_cut(dfg.nodes, edges, starts, ends)
    if classes:
        sublogs = _split_loop(rest, classes)
        body = _discover_variants(sublogs[0], ratio)
        redos = [_discover_variants(sub, ratio) for sub in sublogs[1:]]
        return loop(body, xor(*redos) if len(redos) > 1 else redos[0])
    return flower(activities)


def discover(log: EventLog, config: DiscoveryConfig | None = None) -> ProcessTree:
    """Discover a process tree from a log.

    With ``edge_filter_ratio`` 0 every trace of the log is accepted by the
    returned tree; with filtering on, infrequent directly-follows edges are
    ignored during cut detection and the guarantee is waived.
    """
    if log.trace_count == 0:
        raise LogError("cannot discover a model from an empty log")
    config = config or DiscoveryConfig()
    variants = dict(log.iter_name_variants())
    return _discover_variants(variants, config.edge_filter_ratio)


class ProcessTreeDiscoverer(BaseEstimator):
    """Estimator wrapper around :func:`discover`.

    After ``fit`` the discovered model is available as ``tree_`` and the
    directly-follows graph as ``dfg_``; ``score`` returns the fitness
    fraction of a log on the fitted model.
    """

    def __init__(self, edge_filter_ratio: float = 0.0):
        self.edge_filter_ratio = edge_filter_ratio

    def fit(self, X, y=None) -> "ProcessTreeDiscoverer":
        log = check_event_log(X)
        config = DiscoveryConfig(edge_filter_ratio=self.edge_filter_ratio)
        self.dfg_ = build_dfg(log)
        self.tree_ = discover(log, config)
        return self

    def score(self, X, y=None) -> float:
        if not hasattr(self, "tree_"):
            raise LogError("discoverer is not fitted yet; call fit first")
        from .evaluation import replay_nondeterminism

        return replay_nondeterminism(self.tree_, check_event_log(X)).fitness_fraction
