"""HTTP facade for interactive, toggle-driven chaotic-activity filtering.

A session holds one uploaded log, the set of toggled-off activities, and a
cache of filter schedules (the indirect filter is expensive, so rankings
are computed once per method and invalidated by the log digest).  Model
discovery always runs on a projection of the immutable base log, so
toggling never destroys information.  Explained-activity curves run on a
background thread and are polled through a status field.
"""
from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .discovery import DiscoveryConfig, build_dfg, discover
from .entropy import entropy_report
from .eventlog import EventLog, LogError, ingest_csv, ingest_xes, parse_variant_lines
from .evaluation import explained_activity_curve, flower_baseline, replay_nondeterminism
from .filters import FilterMethod, FilterSchedule, full_ranking, run_filter
from .processtree import format_tree, to_doc

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_UPLOAD_LIMIT = 64 * 1024 * 1024
DEFAULT_MAX_ACTIVITIES = 512

ENV_PORT = "CHAOSFILTER_PORT"
ENV_STORE = "CHAOSFILTER_STORE"
ENV_UPLOAD_LIMIT = "CHAOSFILTER_UPLOAD_LIMIT"


@dataclass
class Session:
    id: str
    log: EventLog
    disabled: set[str] = field(default_factory=set)
    edge_filter_ratio: float = 0.0
    schedules: dict[str, FilterSchedule] = field(default_factory=dict)
    created: str = ""
    updated: str = ""
    jobs: dict[str, dict] = field(default_factory=dict)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def touch(self) -> None:
        self.updated = _now()

    def explained_ratio(self) -> float:
        total = len(self.log.alphabet)
        return (total - len(self.disabled)) / total if total else 0.0


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# -- persistence ---------------------------------------------------------------


def _log_to_doc(log: EventLog) -> dict:
    return {
        "alphabet": list(log.alphabet),
        "variants": [
            {"count": count, "events": list(names)}
            for names, count in sorted(log.iter_name_variants())
        ],
        "dropped_traces": log.dropped_traces,
    }


def _log_from_doc(doc: dict) -> EventLog:
    index = {name: i for i, name in enumerate(doc["alphabet"])}
    variants = {
        tuple(index[e] for e in entry["events"]): entry["count"]
        for entry in doc["variants"]
    }
    return EventLog(doc["alphabet"], variants, dropped_traces=doc.get("dropped_traces", 0))


def _schedule_to_doc(schedule: FilterSchedule) -> dict:
    return {
        "method": schedule.method.key(),
        "removal_order": [[name, criterion] for name, criterion in schedule.removal_order],
        "retained": [[name, criterion] for name, criterion in schedule.retained],
        "source_digest": schedule.source_digest,
        "note": schedule.note,
    }


def _schedule_from_doc(doc: dict) -> FilterSchedule:
    return FilterSchedule(
        method=FilterMethod.parse(doc["method"]),
        removal_order=tuple((n, float(c)) for n, c in doc["removal_order"]),
        retained=tuple((n, float(c)) for n, c in doc["retained"]),
        source_digest=doc["source_digest"],
        note=doc.get("note", ""),
    )


def session_to_doc(session: Session) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "id": session.id,
        "log": _log_to_doc(session.log),
        "disabled": sorted(session.disabled),
        "edge_filter_ratio": session.edge_filter_ratio,
        "schedules": {
            key: _schedule_to_doc(schedule) for key, schedule in sorted(session.schedules.items())
        },
        "created": session.created,
        "updated": session.updated,
    }


def session_from_doc(doc: dict) -> Session:
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise LogError(f"unsupported session schema version {version!r}, expected {SCHEMA_VERSION}")
    log = _log_from_doc(doc["log"])
    session = Session(
        id=doc["id"],
        log=log,
        disabled=set(doc.get("disabled", ())),
        edge_filter_ratio=doc.get("edge_filter_ratio", 0.0),
        created=doc.get("created", ""),
        updated=doc.get("updated", ""),
    )
    digest = log.digest()
    for key, schedule_doc in doc.get("schedules", {}).items():
        schedule = _schedule_from_doc(schedule_doc)
        if schedule.source_digest != digest:
            logger.warning("dropping stale schedule %r of session %s", key, session.id)
            continue
        session.schedules[key] = schedule
    return session


class SessionStore:
    """In-memory session registry with optional directory persistence."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory else None
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        assert self.directory is not None
        return self.directory / f"{session_id}.json"

    def create(self, log: EventLog) -> Session:
        now = _now()
        session = Session(id=uuid.uuid4().hex[:16], log=log, created=now, updated=now)
        with self._lock:
            self._sessions[session.id] = session
        self.save(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        if self.directory:
            path = self._path(session_id)
            if path.exists():
                session = session_from_doc(json.loads(path.read_text("utf-8")))
                with self._lock:
                    self._sessions.setdefault(session_id, session)
                    return self._sessions[session_id]
        raise KeyError(session_id)

    def save(self, session: Session) -> None:
        if not self.directory:
            return
        doc = session_to_doc(session)
        self._path(session.id).write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n", "utf-8"
        )

    def delete(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)
        if self.directory:
            self._path(session_id).unlink(missing_ok=True)


def persist_session(session: Session, store: str | os.PathLike) -> Path:
    """Write one session to a directory; returns the document path."""
    directory = Path(store)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{session.id}.json"
    path.write_text(json.dumps(session_to_doc(session), sort_keys=True, indent=2) + "\n", "utf-8")
    return path


# -- request/response bodies -----------------------------------------------------


class TogglesBody(BaseModel):
    disabled: list[str] = Field(default_factory=list)


class DiscoverBody(BaseModel):
    edge_filter_ratio: float = 0.0


def _parse_method_params(method: str, laplace: bool, seed: int | None) -> FilterMethod:
    try:
        return FilterMethod(kind=method, laplace=laplace, seed=seed)
    except LogError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app(
    store_dir: str | os.PathLike | None = None,
    upload_limit: int = DEFAULT_UPLOAD_LIMIT,
    max_activities: int = DEFAULT_MAX_ACTIVITIES,
) -> FastAPI:
    app = FastAPI(title="chaosfilter", version="0.1.0")
    # The companion UI is served separately; the API carries no credentials.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(store_dir)
    app.state.store = store

    def get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        except LogError as exc:
            raise HTTPException(status_code=500, detail=str(exc))

    def cached_schedule(session: Session, method: FilterMethod) -> FilterSchedule:
        key = method.key()
        with session.lock:
            schedule = session.schedules.get(key)
            if schedule is not None and schedule.source_digest == session.log.digest():
                return schedule
            schedule = run_filter(session.log, method)
            session.schedules[key] = schedule
            session.touch()
            store.save(session)
            return schedule

    @app.exception_handler(LogError)
    async def log_error_handler(request: Request, exc: LogError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/logs")
    async def upload_log(
        request: Request,
        case_column: str = "case",
        activity_column: str = "activity",
        order_column: str | None = None,
        lenient: bool = False,
    ):
        body = await request.body()
        if len(body) > upload_limit:
            raise HTTPException(
                status_code=413,
                detail=f"upload of {len(body)} bytes exceeds the {upload_limit} byte limit",
            )
        if not body:
            raise HTTPException(status_code=400, detail="empty upload")
        content_type = request.headers.get("content-type", "").split(";")[0].strip().lower()
        try:
            if content_type in ("application/xml", "text/xml", "application/xes+xml"):
                log = ingest_xes(body, lenient=lenient)
            elif content_type == "text/csv":
                log = ingest_csv(
                    body,
                    case_column=case_column,
                    activity_column=activity_column,
                    order_column=order_column,
                )
            elif content_type == "text/plain":
                log = parse_variant_lines(body)
            else:
                raise HTTPException(
                    status_code=415,
                    detail=f"unsupported content type {content_type!r}; "
                    "use application/xml (XES), text/csv, or text/plain (variant lines)",
                )
        except LogError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if len(log.alphabet) > max_activities:
            raise HTTPException(
                status_code=400,
                detail=f"log has {len(log.alphabet)} activities, above the {max_activities} "
                "limit; pre-filter the log before interactive analysis",
            )
        session = store.create(log)
        return {
            "session_id": session.id,
            "alphabet": list(session.log.alphabet),
            "frequencies": session.log.name_counts(),
            "trace_count": session.log.trace_count,
            "event_count": session.log.event_count,
            "dropped_traces": session.log.dropped_traces,
        }

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        session = get_session(session_id)
        with session.lock:
            doc = session_to_doc(session)
        doc["explained_ratio"] = session.explained_ratio()
        return doc

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        get_session(session_id)
        store.delete(session_id)
        return {"deleted": session_id}

    @app.get("/sessions/{session_id}/ranking")
    def ranking(
        session_id: str,
        method: str = "direct-entropy",
        laplace: bool = False,
        seed: int | None = None,
    ):
        session = get_session(session_id)
        spec = _parse_method_params(method, laplace, seed)
        schedule = cached_schedule(session, spec)
        frequencies = session.log.name_counts()
        rows = []
        for row in schedule.to_rows():
            name = row["activity"]
            rows.append(
                {
                    "rank": row["step"],
                    "activity": name,
                    "criterion": row["criterion"],
                    "alpha": row["alpha"],
                    "frequency": frequencies.get(name, 0),
                    "retained": row["retained"],
                    "enabled": name not in session.disabled,
                }
            )
        return {"method": spec.key(), "rows": rows, "note": schedule.note}

    @app.put("/sessions/{session_id}/toggles")
    def set_toggles(session_id: str, body: TogglesBody):
        session = get_session(session_id)
        unknown = [name for name in body.disabled if name not in session.log]
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown activities: {unknown}")
        with session.lock:
            session.disabled = set(body.disabled)
            session.touch()
            store.save(session)
        return {
            "disabled": sorted(session.disabled),
            "enabled_count": len(session.log.alphabet) - len(session.disabled),
            "explained_ratio": session.explained_ratio(),
        }

    @app.post("/sessions/{session_id}/discover")
    def discover_model(session_id: str, body: DiscoverBody | None = None):
        session = get_session(session_id)
        body = body or DiscoverBody()
        try:
            config = DiscoveryConfig(edge_filter_ratio=body.edge_filter_ratio)
        except LogError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        with session.lock:
            session.edge_filter_ratio = body.edge_filter_ratio
            enabled = [n for n in session.log.alphabet if n not in session.disabled]
            projected = session.log.project_names(enabled)
            if len(projected.activities()) < 2:
                raise HTTPException(
                    status_code=400, detail="fewer than 2 activities enabled"
                )
            tree = discover(projected, config)
            dfg = build_dfg(projected)
            replay = replay_nondeterminism(tree, projected)
            report = entropy_report(projected)
            session.touch()
            store.save(session)
        return {
            "tree": to_doc(tree),
            "tree_text": format_tree(tree),
            "dfg": dfg.to_doc(),
            "nondeterminism": replay.nondeterminism,
            "fitness_fraction": replay.fitness_fraction,
            "flower_baseline": flower_baseline(projected.activity_names()),
            "enabled": sorted(projected.activity_names()),
            "entropy": report.to_rows(),
        }

    @app.get("/sessions/{session_id}/curve")
    def curve(
        session_id: str,
        method: str = "direct-entropy",
        laplace: bool = False,
        seed: int | None = None,
        wait: bool = False,
    ):
        session = get_session(session_id)
        spec = _parse_method_params(method, laplace, seed)
        key = spec.key()
        with session.lock:
            job = session.jobs.get(key)
            if job is None:
                job = {"status": "pending", "records": None, "error": None, "thread": None}
                session.jobs[key] = job

                def compute():
                    try:
                        schedule = cached_schedule(session, spec)
                        records = explained_activity_curve(
                            session.log, schedule, DiscoveryConfig(session.edge_filter_ratio),
                            log_id=session.id,
                        )
                        job["records"] = [
                            {
                                "log_id": r.log_id,
                                "method": r.method,
                                "steps": r.steps,
                                "explained_ratio": r.explained_ratio,
                                "nondeterminism": r.nondeterminism,
                                "fitness_fraction": r.fitness_fraction,
                                "flower_baseline": r.flower_baseline,
                            }
                            for r in records
                        ]
                        job["status"] = "ready"
                    except Exception as exc:  # surfaced through polling
                        job["error"] = str(exc)
                        job["status"] = "failed"

                thread = threading.Thread(target=compute, daemon=True)
                job["thread"] = thread
                thread.start()
        if wait and job["thread"] is not None:
            job["thread"].join()
        status = job["status"]
        if status == "ready":
            return {"status": status, "method": key, "records": job["records"]}
        if status == "failed":
            return JSONResponse(
                status_code=500, content={"status": status, "method": key, "error": job["error"]}
            )
        return {"status": status, "method": key}

    return app
