"""Command-line interface; every subcommand maps onto one library operation."""
from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from . import fixtures
from .discovery import DiscoveryConfig, build_dfg, discover
from .eventlog import (
    EventLog,
    LogError,
    export_xes,
    format_variant_lines,
    ingest_csv,
    ingest_xes,
    parse_variant_lines,
)
from .evaluation import (
    explained_activity_curve,
    kendall_tau_b,
    ranking_positions,
    records_to_csv,
    winning_number,
)
from .filters import FilterMethod, materialize, run_filter, standard_methods
from .processtree import TreeError, format_tree, parse_tree
from .synthesis import ChaosInsertionSpec, chaos_grid, inject_chaos, simulate

MODE_ALIASES = {"U": "uniform", "F": "frequent", "I": "infrequent"}


def fail(message: str) -> "click.ClickException":
    return click.ClickException(message)


def read_log(path: str, case_column: str, activity_column: str, order_column: str | None,
             lenient: bool) -> EventLog:
    data = Path(path).read_bytes()
    suffix = Path(path).suffix.lower()
    try:
        if suffix == ".xes":
            return ingest_xes(data, lenient=lenient)
        if suffix == ".csv":
            return ingest_csv(
                data,
                case_column=case_column,
                activity_column=activity_column,
                order_column=order_column,
            )
        return parse_variant_lines(data)
    except LogError as exc:
        raise fail(str(exc))


def write_log(log: EventLog, path: str) -> None:
    if Path(path).suffix.lower() == ".xes":
        Path(path).write_bytes(export_xes(log))
    else:
        Path(path).write_text(format_variant_lines(log), "utf-8")


def write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, "utf-8")
    else:
        click.echo(text, nl=False)


def make_method(method: str, laplace: bool, seed: int | None) -> FilterMethod:
    try:
        return FilterMethod(
            kind=method, laplace=laplace, seed=seed if method == "random" else None
        )
    except LogError as exc:
        raise fail(str(exc))


def load_tree_argument(tree: str):
    if tree in fixtures.TREE_NAMES:
        return fixtures.load_tree(tree)
    try:
        return parse_tree(Path(tree).read_text("utf-8"))
    except FileNotFoundError:
        raise fail(f"no such tree file or bundled tree: {tree!r}")
    except TreeError as exc:
        raise fail(str(exc))


log_input_options = [
    click.option("--case-column", default="case", show_default=True,
                 help="Case id column for CSV input."),
    click.option("--activity-column", default="activity", show_default=True,
                 help="Activity column for CSV input."),
    click.option("--order-column", default=None, help="Ordering column for CSV input."),
    click.option("--lenient", is_flag=True, help="Skip XES events without a name."),
]


def with_log_input(command):
    for option in reversed(log_input_options):
        command = option(command)
    return command


@click.group()
@click.version_option()
def main():
    """Detect and remove chaotic activities from event logs."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--out", default=None, help="Write the log (.xes or variant lines).")
def ingest(input_path, case_column, activity_column, order_column, lenient, out):
    """Read a log (XES, CSV, or variant lines) and report its dimensions."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    click.echo(
        f"activities={len(log.alphabet)} variants={len(dict(log.iter_variants()))} "
        f"traces={log.trace_count} events={log.event_count} dropped={log.dropped_traces}"
    )
    if out:
        write_log(log, out)


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--method", default="direct-entropy", show_default=True)
@click.option("--laplace", is_flag=True, help="Adaptive Laplace smoothing (entropy methods).")
@click.option("--seed", type=int, default=None, help="Seed (required for the random method).")
@click.option("--out", default=None, help="Write the schedule CSV here instead of stdout.")
def rank(input_path, case_column, activity_column, order_column, lenient, method, laplace,
         seed, out):
    """Rank activities by a filtering method (first row = first removed)."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    spec = make_method(method, laplace, seed)
    try:
        schedule = run_filter(log, spec)
    except LogError as exc:
        raise fail(str(exc))
    write_output(schedule.to_csv(), out)


@main.command("filter")
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--method", default="direct-entropy", show_default=True)
@click.option("--laplace", is_flag=True)
@click.option("--seed", type=int, default=None)
@click.option("--steps", type=int, required=True, help="How many activities to remove.")
@click.option("--out", required=True, help="Write the filtered log here.")
def filter_cmd(input_path, case_column, activity_column, order_column, lenient, method,
               laplace, seed, steps, out):
    """Remove the first --steps activities of a method's schedule."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    spec = make_method(method, laplace, seed)
    try:
        schedule = run_filter(log, spec)
        filtered = materialize(log, schedule, steps)
    except LogError as exc:
        raise fail(str(exc))
    write_log(filtered, out)
    click.echo(f"removed={schedule.removed_names(steps)} kept={filtered.activity_names()}")


@main.command()
@click.option("--tree", required=True,
              help="Tree file path or bundled name (process12, process22).")
@click.option("--traces", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--loop-continue-p", type=float, default=0.5, show_default=True)
@click.option("--out", required=True, help="Write the simulated log here.")
def generate(tree, traces, seed, loop_continue_p, out):
    """Simulate an event log from a process tree."""
    model = load_tree_argument(tree)
    try:
        log = simulate(model, traces, seed=seed, loop_continue_p=loop_continue_p)
    except LogError as exc:
        raise fail(str(exc))
    write_log(log, out)
    click.echo(f"traces={log.trace_count} activities={len(log.alphabet)}")


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--k", type=int, required=True, help="Number of chaotic activities to insert.")
@click.option("--mode", default="uniform", show_default=True,
              type=click.Choice(["uniform", "frequent", "infrequent", "U", "F", "I"]))
@click.option("--seed", type=int, required=True)
@click.option("--prefix", default="CHAOS_", show_default=True)
@click.option("--out", required=True, help="Write the injected log here.")
@click.option("--truth-out", default=None, help="Write the inserted activity names (JSON).")
def inject(input_path, case_column, activity_column, order_column, lenient, k, mode, seed,
           prefix, out, truth_out):
    """Insert artificial chaotic activities at random log positions."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    spec = ChaosInsertionSpec(k=k, mode=MODE_ALIASES.get(mode, mode), seed=seed,
                              name_prefix=prefix)
    try:
        chaos_log, truth = inject_chaos(log, spec)
    except LogError as exc:
        raise fail(str(exc))
    write_log(chaos_log, out)
    if truth_out:
        Path(truth_out).write_text(json.dumps(sorted(truth)) + "\n", "utf-8")
    click.echo(f"inserted={sorted(truth)}")


@main.command("evaluate-chaos")
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--k", "ks", default="1,2,4,8", show_default=True,
              help="Comma-separated insertion counts.")
@click.option("--modes", default="U,F,I", show_default=True,
              help="Comma-separated modes (U, F, I or full names).")
@click.option("--methods", default="all", show_default=True,
              help="Comma-separated method keys, or 'all' for the seven standard ones.")
@click.option("--seed", type=int, required=True)
@click.option("--out", default=None, help="Write the result CSV here instead of stdout.")
def evaluate_chaos(input_path, case_column, activity_column, order_column, lenient, ks,
                   modes, methods, seed, out):
    """Run the chaos-injection benchmark grid and emit one row per cell."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    try:
        k_values = [int(k) for k in ks.split(",") if k]
    except ValueError:
        raise fail(f"bad --k list {ks!r}")
    mode_values = [MODE_ALIASES.get(m.strip(), m.strip()) for m in modes.split(",") if m]
    if methods == "all":
        method_list = standard_methods(seed=seed)
    else:
        try:
            method_list = [
                FilterMethod.parse(m) if "random" not in m
                else FilterMethod("random", seed=seed)
                for m in methods.split(",") if m
            ]
        except LogError as exc:
            raise fail(str(exc))
    try:
        rows = chaos_grid(log, k_values, mode_values, method_list, seed=seed)
    except LogError as exc:
        raise fail(str(exc))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["method", "k", "mode", "incorrect_removals", "truth_cleared"])
    for row in rows:
        writer.writerow(
            [row["method"], row["k"], row["mode"], row["incorrect_removals"],
             row["truth_cleared"]]
        )
    write_output(buffer.getvalue(), out)


@main.command("discover")
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--edge-filter-ratio", type=float, default=0.0, show_default=True)
@click.option("--out", default=None, help="Write the tree text here instead of stdout.")
@click.option("--dfg-out", default=None, help="Also write the directly-follows graph (JSON).")
def discover_cmd(input_path, case_column, activity_column, order_column, lenient,
                 edge_filter_ratio, out, dfg_out):
    """Discover a process tree from a log."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    try:
        config = DiscoveryConfig(edge_filter_ratio=edge_filter_ratio)
        tree = discover(log, config)
    except LogError as exc:
        raise fail(str(exc))
    write_output(format_tree(tree) + "\n", out)
    if dfg_out:
        Path(dfg_out).write_text(json.dumps(build_dfg(log).to_doc(), indent=2) + "\n", "utf-8")


@main.command()
@click.argument("input_path", type=click.Path(exists=True))
@with_log_input
@click.option("--method", default="direct-entropy", show_default=True)
@click.option("--laplace", is_flag=True)
@click.option("--seed", type=int, default=None)
@click.option("--edge-filter-ratio", type=float, default=0.0, show_default=True)
@click.option("--log-id", default=None, help="Log id column value (defaults to the file stem).")
@click.option("--out", default=None, help="Write the curve CSV here instead of stdout.")
def curve(input_path, case_column, activity_column, order_column, lenient, method, laplace,
          seed, edge_filter_ratio, log_id, out):
    """Discover and replay after every removal step of a schedule."""
    log = read_log(input_path, case_column, activity_column, order_column, lenient)
    spec = make_method(method, laplace, seed)
    try:
        schedule = run_filter(log, spec)
        records = explained_activity_curve(
            log, schedule, DiscoveryConfig(edge_filter_ratio),
            log_id=log_id or Path(input_path).stem,
        )
    except LogError as exc:
        raise fail(str(exc))
    write_output(records_to_csv(records), out)


def _read_schedule_ranking(path: str) -> dict[str, float]:
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    if not rows or "activity" not in rows[0] or "step" not in rows[0]:
        raise fail(f"{path}: not a schedule CSV (need 'step' and 'activity' columns)")
    order = [row["activity"] for row in sorted(rows, key=lambda r: int(r["step"]))]
    return ranking_positions(order)


@main.command()
@click.option("--schedules", multiple=True, type=click.Path(exists=True),
              help="Schedule CSVs to correlate pairwise (repeatable).")
@click.option("--curves", multiple=True, type=click.Path(exists=True),
              help="Curve CSVs for winning numbers (repeatable).")
@click.option("--explained", type=float, default=0.75, show_default=True,
              help="Minimum explained-activity ratio for winning numbers.")
@click.option("--out", default=None)
def compare(schedules, curves, explained, out):
    """Rank correlations between schedules and winning numbers over curves."""
    if not schedules and not curves:
        raise fail("nothing to compare: pass --schedules and/or --curves")
    sections = []
    if schedules:
        rankings = {path: _read_schedule_ranking(path) for path in schedules}
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["first", "second", "tau_b", "p_value", "reject_at_0.05"])
        for i, first in enumerate(schedules):
            for second in schedules[i + 1:]:
                try:
                    result = kendall_tau_b(rankings[first], rankings[second])
                except LogError as exc:
                    raise fail(f"{first} vs {second}: {exc}")
                writer.writerow(
                    [first, second,
                     "" if result.tau_b is None else f"{result.tau_b:.6f}",
                     "" if result.p_value is None else f"{result.p_value:.6g}",
                     "" if result.reject_at_0_05 is None else result.reject_at_0_05]
                )
        sections.append(buffer.getvalue())
    if curves:
        values: dict[str, dict[str, float]] = {}
        logs: list[str] = []
        for path in curves:
            with open(path, newline="", encoding="utf-8") as handle:
                for row in csv.DictReader(handle):
                    if not row.get("nondeterminism"):
                        continue
                    if float(row["explained_ratio"]) < explained:
                        continue
                    method = row["method"]
                    log_id = row["log_id"]
                    value = float(row["nondeterminism"])
                    cell = values.setdefault(method, {})
                    cell[log_id] = min(cell.get(log_id, value), value)
                    if log_id not in logs:
                        logs.append(log_id)
        methods = sorted(values)
        matrix = [[values[m].get(log_id) for log_id in logs] for m in methods]
        try:
            totals, averages = winning_number(matrix)
        except LogError as exc:
            raise fail(str(exc))
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["method", "winning_number", "average"])
        for method, total, average in zip(methods, totals, averages):
            writer.writerow([method, total, average])
        sections.append(buffer.getvalue())
    write_output("".join(sections), out)


@main.command()
@click.option("--port", type=int, default=None, help="Defaults to $CHAOSFILTER_PORT or 8000.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", default=None, help="Session store directory ($CHAOSFILTER_STORE).")
@click.option("--upload-limit", type=int, default=None,
              help="Max upload bytes ($CHAOSFILTER_UPLOAD_LIMIT).")
def serve(port, host, store, upload_limit):
    """Run the HTTP service."""
    import os

    import uvicorn

    from .service import DEFAULT_UPLOAD_LIMIT, ENV_PORT, ENV_STORE, ENV_UPLOAD_LIMIT, create_app

    port = port if port is not None else int(os.environ.get(ENV_PORT, "8000"))
    store = store if store is not None else os.environ.get(ENV_STORE) or None
    limit = (
        upload_limit
        if upload_limit is not None
        else int(os.environ.get(ENV_UPLOAD_LIMIT, str(DEFAULT_UPLOAD_LIMIT)))
    )
    app = create_app(store_dir=store, upload_limit=limit)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
