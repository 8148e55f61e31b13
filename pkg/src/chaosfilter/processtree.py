"""Block-structured process trees: construction, text format, and semantics.

A tree is built from ``seq``, ``xor``, ``par`` and ``loop`` operators over
activity and silent leaves.  ``loop(body, redo)`` plays the body, then any
number of redo-body rounds.  The execution semantics below drive both trace
acceptance checks and the replay metrics: a state mirrors the tree shape,
``step`` consumes one visible label (silent moves are folded in), and
``enabled_labels`` reports which labels could come next.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from collections.abc import Iterator, Sequence

SEQ = "seq"
XOR = "xor"
PAR = "par"
LOOP = "loop"
ACT = "act"
TAU = "tau"

_OPERATORS = (SEQ, XOR, PAR, LOOP)
_RESERVED = set(_OPERATORS) | {TAU}


class TreeError(ValueError):
    """Invalid process-tree structure or text."""


@dataclass(frozen=True)
class ProcessTree:
    op: str
    label: str | None = None
    children: tuple["ProcessTree", ...] = ()

    def __post_init__(self):
        if self.op == ACT:
            if not self.label:
                raise TreeError("activity nodes need a label")
            if self.children:
                raise TreeError("activity nodes cannot have children")
        elif self.op == TAU:
            if self.label or self.children:
                raise TreeError("silent nodes carry no label and no children")
        elif self.op == LOOP:
            if len(self.children) != 2:
                raise TreeError("loop nodes take exactly (body, redo)")
        elif self.op in (SEQ, XOR, PAR):
            if len(self.children) < 2:
                raise TreeError(f"{self.op} nodes need at least two children")
        else:
            raise TreeError(f"unknown node kind {self.op!r}")

    def __str__(self) -> str:
        return format_tree(self)


def act(name: str) -> ProcessTree:
    return ProcessTree(ACT, label=name)


def tau() -> ProcessTree:
    return ProcessTree(TAU)


def _operator(op: str, children: Sequence[ProcessTree]) -> ProcessTree:
    children = tuple(children)
    if not children:
        return tau()
    if len(children) == 1:
        return children[0]
    return ProcessTree(op, children=children)


def seq(*children: ProcessTree) -> ProcessTree:
    return _operator(SEQ, children)


def xor(*children: ProcessTree) -> ProcessTree:
    return _operator(XOR, children)


def par(*children: ProcessTree) -> ProcessTree:
    return _operator(PAR, children)


def loop(body: ProcessTree, redo: ProcessTree) -> ProcessTree:
    return ProcessTree(LOOP, children=(body, redo))


def labels(tree: ProcessTree) -> frozenset[str]:
    """All visible activity labels in the tree."""
    if tree.op == ACT:
        return frozenset((tree.label,))
    out: set[str] = set()
    for child in tree.children:
        out |= labels(child)
    return frozenset(out)


# -- text format ----------------------------------------------------------------
#
# Nested prefix notation, whitespace-insensitive:
#     seq(a, xor(b, c), par(d, e), loop(f, g))
# with `tau` for the silent leaf.  Activity names may not be operator words.

_TOKEN = re.compile(r"\s*([(),]|[^\s(),]+)")


def format_tree(tree: ProcessTree) -> str:
    if tree.op == ACT:
        return tree.label  # type: ignore[return-value]
    if tree.op == TAU:
        return TAU
    inner = ", ".join(format_tree(c) for c in tree.children)
    return f"{tree.op}({inner})"


def parse_tree(text: str) -> ProcessTree:
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise TreeError("empty tree text")
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise TreeError("unexpected end of tree text")
        token = tokens[pos]
        if expected is not None and token != expected:
            raise TreeError(f"expected {expected!r}, got {token!r}")
        pos += 1
        return token

    def node() -> ProcessTree:
        token = take()
        if token in ("(", ")", ","):
            raise TreeError(f"unexpected {token!r}")
        if token in _OPERATORS:
            take("(")
            children = [node()]
            while peek() == ",":
                take(",")
                children.append(node())
            take(")")
            if token == LOOP and len(children) != 2:
                raise TreeError("loop takes exactly two children")
            if len(children) < 2:
                raise TreeError(f"{token} needs at least two children")
            return ProcessTree(token, children=tuple(children))
        if token == TAU:
            return tau()
        return act(token)

    tree = node()
    if pos != len(tokens):
        raise TreeError(f"trailing tokens after tree: {tokens[pos:]!r}")
    return tree


def to_doc(tree: ProcessTree) -> dict:
    """Nested plain-dict rendering for JSON transport."""
    doc: dict = {"op": tree.op}
    if tree.label is not None:
        doc["label"] = tree.label
    if tree.children:
        doc["children"] = [to_doc(c) for c in tree.children]
    return doc


def from_doc(doc: dict) -> ProcessTree:
    return ProcessTree(
        doc["op"],
        label=doc.get("label"),
        children=tuple(from_doc(c) for c in doc.get("children", [])),
    )


# -- execution semantics ----------------------------------------------------
#
# States are nested tuples shaped like the tree:
#   act  -> bool (consumed yet)
#   tau  -> True
#   seq  -> (index, child state)
#   xor  -> None (branch not chosen) or (index, child state)
#   par  -> tuple of child states
#   loop -> ("b" | "r", child state)
# Silent moves (choosing branches, finishing children, looping) are folded
# into `step`, so every transition consumes exactly one visible label.

State = object


@functools.lru_cache(maxsize=None)
def _nullable(tree: ProcessTree) -> bool:
    """Whether the subtree can complete without emitting a visible label."""
    if tree.op == ACT:
        return False
    if tree.op == TAU:
        return True
    if tree.op == SEQ or tree.op == PAR:
        return all(_nullable(c) for c in tree.children)
    if tree.op == XOR:
        return any(_nullable(c) for c in tree.children)
    return _nullable(tree.children[0])  # loop: one body pass is mandatory


def initial_state(tree: ProcessTree) -> State:
    if tree.op == ACT:
        return False
    if tree.op == TAU:
        return True
    if tree.op == SEQ:
        return (0, initial_state(tree.children[0]))
    if tree.op == XOR:
        return None
    if tree.op == PAR:
        return tuple(initial_state(c) for c in tree.children)
    return ("b", initial_state(tree.children[0]))


def is_accepting(tree: ProcessTree, state: State) -> bool:
    if tree.op == ACT:
        return state is True
    if tree.op == TAU:
        return True
    if tree.op == SEQ:
        index, child_state = state
        if not is_accepting(tree.children[index], child_state):
            return False
        return all(_nullable(c) for c in tree.children[index + 1 :])
    if tree.op == XOR:
        if state is None:
            return _nullable(tree)
        index, child_state = state
        return is_accepting(tree.children[index], child_state)
    if tree.op == PAR:
        return all(is_accepting(c, s) for c, s in zip(tree.children, state))
    phase, child_state = state
    body, redo = tree.children
    if phase == "b":
        return is_accepting(body, child_state)
    return is_accepting(redo, child_state) and _nullable(body)


def _dedupe(states: list[State]) -> tuple[State, ...]:
    seen = set()
    out = []
    for s in states:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return tuple(out)


def step(tree: ProcessTree, state: State, label: str) -> tuple[State, ...]:
    """All states reachable by consuming ``label`` next (silent moves folded in)."""
    if tree.op == ACT:
        return (True,) if state is False and label == tree.label else ()
    if tree.op == TAU:
        return ()
    if tree.op == SEQ:
        index, child_state = state
        out = [(index, s) for s in step(tree.children[index], child_state, label)]
        # The running child may finish silently, enabling later children;
        # skipping continues while the freshly entered child is nullable.
        j, s = index, child_state
        while is_accepting(tree.children[j], s) and j + 1 < len(tree.children):
            j += 1
            s = initial_state(tree.children[j])
            out.extend((j, n) for n in step(tree.children[j], s, label))
        return _dedupe(out)
    if tree.op == XOR:
        if state is None:
            out = []
            for i, child in enumerate(tree.children):
                out.extend((i, s) for s in step(child, initial_state(child), label))
            return _dedupe(out)
        index, child_state = state
        return tuple((index, s) for s in step(tree.children[index], child_state, label))
    if tree.op == PAR:
        out = []
        for i, (child, child_state) in enumerate(zip(tree.children, state)):
            for s in step(child, child_state, label):
                out.append(state[:i] + (s,) + state[i + 1 :])
        return _dedupe(out)
    body, redo = tree.children
    phase, child_state = state
    out = []
    if phase == "b":
        out.extend(("b", s) for s in step(body, child_state, label))
        if is_accepting(body, child_state):
            out.extend(("r", s) for s in step(redo, initial_state(redo), label))
            if _nullable(redo):
                out.extend(("b", s) for s in step(body, initial_state(body), label))
    else:
        out.extend(("r", s) for s in step(redo, child_state, label))
        if is_accepting(redo, child_state):
            out.extend(("b", s) for s in step(body, initial_state(body), label))
            if _nullable(body):
                out.extend(("r", s) for s in step(redo, initial_state(redo), label))
    return _dedupe(out)


def enabled_labels(tree: ProcessTree, state: State) -> frozenset[str]:
    """Visible labels that could be consumed next from ``state``."""
    if tree.op == ACT:
        return frozenset((tree.label,)) if state is False else frozenset()
    if tree.op == TAU:
        return frozenset()
    if tree.op == SEQ:
        index, child_state = state
        out = set(enabled_labels(tree.children[index], child_state))
        j, s = index, child_state
        while is_accepting(tree.children[j], s) and j + 1 < len(tree.children):
            j += 1
            s = initial_state(tree.children[j])
            out |= enabled_labels(tree.children[j], s)
        return frozenset(out)
    if tree.op == XOR:
        if state is None:
            out = set()
            for child in tree.children:
                out |= enabled_labels(child, initial_state(child))
            return frozenset(out)
        index, child_state = state
        return enabled_labels(tree.children[index], child_state)
    if tree.op == PAR:
        out = set()
        for child, child_state in zip(tree.children, state):
            out |= enabled_labels(child, child_state)
        return frozenset(out)
    body, redo = tree.children
    phase, child_state = state
    if phase == "b":
        out = set(enabled_labels(body, child_state))
        if is_accepting(body, child_state):
            out |= enabled_labels(redo, initial_state(redo))
            if _nullable(redo):
                out |= enabled_labels(body, initial_state(body))
    else:
        out = set(enabled_labels(redo, child_state))
        if is_accepting(redo, child_state):
            out |= enabled_labels(body, initial_state(body))
            if _nullable(body):
                out |= enabled_labels(redo, initial_state(redo))
    return frozenset(out)


def accepts(tree: ProcessTree, trace: Sequence[str]) -> bool:
    """Whether the tree's language contains the trace."""
    memo: dict[tuple[State, int], bool] = {}

    def search(state: State, index: int) -> bool:
        key = (state, index)
        if key in memo:
            return memo[key]
        if index == len(trace):
            result = is_accepting(tree, state)
        else:
            result = any(search(s, index + 1) for s in step(tree, state, trace[index]))
        memo[key] = result
        return result

    return search(initial_state(tree), 0)


def bounded_language(tree: ProcessTree, max_length: int) -> frozenset[tuple[str, ...]]:
    """All accepted traces of length at most ``max_length`` (non-empty)."""
    found: set[tuple[str, ...]] = set()
    start = initial_state(tree)
    frontier: dict[State, set[tuple[str, ...]]] = {start: {()}}
    for _ in range(max_length):
        next_frontier: dict[State, set[tuple[str, ...]]] = {}
        for state, prefixes in frontier.items():
            for label in enabled_labels(tree, state):
                for nxt in step(tree, state, label):
                    bucket = next_frontier.setdefault(nxt, set())
                    bucket.update(p + (label,) for p in prefixes)
        for state, prefixes in next_frontier.items():
            if is_accepting(tree, state):
                found.update(p for p in prefixes if p)
        frontier = next_frontier
        if not frontier:
            break
    return frozenset(found)
