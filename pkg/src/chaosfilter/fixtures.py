"""Bundled fixture models and logs with their pinned generation seeds."""
from __future__ import annotations

from importlib import resources

from .eventlog import EventLog, ingest_xes
from .processtree import ProcessTree, parse_tree

# Seeds the bundled artifacts were generated with; regenerating with these
# values reproduces the shipped files byte-for-byte.
FIXTURE12_SIM_SEED = 1
FIXTURE12_TRACES = 25
FIXTURE22_SIM_SEED = 22
FIXTURE22_TRACES = 400
CHAOS_GRID_SEED = 7

TREE_NAMES = ("process12", "process22")
LOG_NAMES = ("fixture12", "worked_example")


def _data_text(filename: str) -> str:
    return resources.files("chaosfilter.data").joinpath(filename).read_text("utf-8")


def load_tree(name: str) -> ProcessTree:
    """One of the bundled process trees: ``process12`` or ``process22``."""
    if name not in TREE_NAMES:
        raise KeyError(f"unknown fixture tree {name!r}; available: {TREE_NAMES}")
    return parse_tree(_data_text(f"{name}.tree"))


def load_log(name: str) -> EventLog:
    """One of the bundled logs: ``fixture12`` or ``worked_example``."""
    if name not in LOG_NAMES:
        raise KeyError(f"unknown fixture log {name!r}; available: {LOG_NAMES}")
    return ingest_xes(_data_text(f"{name}.xes"))


def fixture_path(filename: str) -> str:
    """Filesystem path of a bundled data file (for CLI defaults and tests)."""
    return str(resources.files("chaosfilter.data").joinpath(filename))
