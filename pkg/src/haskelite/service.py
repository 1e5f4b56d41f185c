"""HTTP session service for interactive stepping.

Each session owns one tracer timeline; step requests advance it entry by
entry.  Sessions are independent, serialized individually (concurrent
steps on one session get 409), and evicted after an idle timeout.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .program import LoadError, load_program, prepare_entry
from .tracer import TraceEntry, TraceOptions, Tracer

DEFAULT_IDLE_TIMEOUT = 30 * 60.0


def _ui_dir() -> Optional[Path]:
    override = os.environ.get("HASKELITE_UI_DIR")
    candidates = [Path(override)] if override else []
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for c in candidates:
        if c.is_dir() and (c / "index.html").is_file():
            return c
    return None


class SessionOptions(BaseModel):
    fuel: int = 100_000
    dots: int = 4
    force: bool = True
    max_entries: int = 10_000


class CreateRequest(BaseModel):
    program: str = ""
    expr: str
    options: SessionOptions = SessionOptions()


class StepRequest(BaseModel):
    n: int = 1


@dataclass
class Session:
    id: str
    tracer: Tracer
    entries: List[TraceEntry]
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)

    def touch(self):
        self.last_used = time.monotonic()


class SessionStore:
    def __init__(self, idle_timeout: float = DEFAULT_IDLE_TIMEOUT):
        self.idle_timeout = idle_timeout
        self._sessions: Dict[str, Session] = {}
        self._lock = threading.Lock()

    def evict_idle(self):
        now = time.monotonic()
        with self._lock:
            stale = [
                sid
                for sid, s in self._sessions.items()
                if now - s.last_used > self.idle_timeout
            ]
            for sid in stale:
                del self._sessions[sid]

    def add(self, session: Session):
        with self._lock:
            self._sessions[session.id] = session

    def get(self, sid: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(sid)

    def remove(self, sid: str) -> bool:
        with self._lock:
            return self._sessions.pop(sid, None) is not None


def create_app(idle_timeout: float = DEFAULT_IDLE_TIMEOUT) -> FastAPI:
    app = FastAPI(title="haskelite stepping service")
    store = SessionStore(idle_timeout)
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateRequest):
        store.evict_idle()
        try:
            program = load_program(req.program)
            entry, _scheme = prepare_entry(program, req.expr)
        except LoadError as err:
            return JSONResponse(status_code=422, content=err.diagnostic.to_json())
        opts = TraceOptions(
            max_entries=max(1, req.options.max_entries),
            force_result=req.options.force,
            dots_per_level=max(0, req.options.dots),
            fuel=max(1, min(req.options.fuel, 10_000_000)),
        )
        tracer = Tracer(
            program.heap, program.global_names, entry, opts, program.supply
        )
        session = Session(
            id=uuid.uuid4().hex,
            tracer=tracer,
            entries=[tracer.initial_entry],
        )
        store.add(session)
        return {
            "id": session.id,
            "entry": tracer.initial_entry.to_json(),
            "warnings": program.warnings,
        }

    def _with_session(sid: str):
        session = store.get(sid)
        if session is None:
            return None, JSONResponse(
                status_code=404, content={"message": "unknown session"}
            )
        return session, None

    @app.post("/sessions/{sid}/step")
    def step_session(sid: str, req: StepRequest):
        store.evict_idle()
        session, err = _with_session(sid)
        if err:
            return err
        if not session.lock.acquire(blocking=False):
            return JSONResponse(
                status_code=409, content={"message": "session is busy"}
            )
        try:
            session.touch()
            out = []
            limit = session.tracer.opts.max_entries
            for _ in range(max(0, req.n)):
                if len(session.entries) >= limit:
                    break
                entry = session.tracer.next_entry()
                if entry is None:
                    break
                session.entries.append(entry)
                out.append(entry.to_json())
            return {"entries": out, "status": session.tracer.status}
        finally:
            session.lock.release()

    @app.post("/sessions/{sid}/force")
    def force_session(sid: str):
        session, err = _with_session(sid)
        if err:
            return err
        if not session.lock.acquire(blocking=False):
            return JSONResponse(
                status_code=409, content={"message": "session is busy"}
            )
        try:
            session.touch()
            session.tracer.enable_force()
            return {"status": session.tracer.status}
        finally:
            session.lock.release()

    @app.get("/sessions/{sid}/trace")
    def get_trace(sid: str):
        session, err = _with_session(sid)
        if err:
            return err
        session.touch()
        return {
            "entries": [e.to_json() for e in session.entries],
            "status": session.tracer.status,
        }

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        if not store.remove(sid):
            return JSONResponse(
                status_code=404, content={"message": "unknown session"}
            )
        return None

    ui = _ui_dir()
    if ui is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui), html=True), name="ui")

    return app
