"""HTTP session service.

One process hosts many independent sessions. Every accepted edit
bumps the version and pushes one {version, digest} event, in order,
onto each subscriber of the session's event stream. All errors use
one JSON shape: {"status", "code", "message"}.
"""

from __future__ import annotations

import asyncio
import json
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response, StreamingResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .errors import BricsError, UnknownGrammarError
from .grammar import StructureGrammar, load_grammar_dir, builtin_grammars_path
from .refactor import extract_block, fold_spans
from .render import render_svg
from .session import Edit, Session, Snapshot
from .viewmodel import (DEFAULT_PALETTE, conditional_activity, editor_rects,
                        mark_errors, overview_model)

_STATUS_BY_CODE = {
    "E_STALE": 409,
    "E_RANGE": 422,
    "E_BOUNDARY": 422,
    "E_MULTI_OUTPUT": 422,
    "E_NAME_TAKEN": 422,
    "E_NO_METHOD": 422,
    "E_UNKNOWN_GRAMMAR": 422,
    "E_ENCODING": 422,
    "E_EXPR": 422,
    "E_GRAMMAR": 422,
    "E_UNKNOWN_SESSION": 404,
    "E_UNKNOWN_BLOCK": 404,
    "E_BAD_REQUEST": 400,
}


class ApiFailure(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _bad_request(message: str) -> ApiFailure:
    return ApiFailure(400, "E_BAD_REQUEST", message)


@dataclass
class _Entry:
    session: Session
    queues: list[asyncio.Queue] = field(default_factory=list)


def _snapshot_payload(entry: _Entry, snapshot: Snapshot) -> dict:
    return {
        "version": snapshot.version,
        "digest": snapshot.digest,
        "tree": snapshot.tree.to_dict(),
        "diagnostics": [
            {"line": d.line, "col": d.col, "code": d.code, "message": d.message}
            for d in snapshot.diagnostics
        ],
    }


def _parse_defines(raw: Optional[str]) -> Optional[frozenset]:
    if raw is None:
        return None
    return frozenset(s for s in (part.strip() for part in raw.split(",")) if s)


def create_app(grammars: Optional[dict[str, StructureGrammar]] = None) -> FastAPI:
    if grammars is None:
        grammars = load_grammar_dir(builtin_grammars_path())
    app = FastAPI(title="brics", version="0.1.0")
    sessions: dict[str, _Entry] = {}

    def entry_for(session_id: str) -> _Entry:
        entry = sessions.get(session_id)
        if entry is None:
            raise ApiFailure(404, "E_UNKNOWN_SESSION",
                             f"no session {session_id!r}")
        return entry

    def activity_for(entry: _Entry, defines: Optional[frozenset]):
        if defines is None:
            return None
        snapshot = entry.session.snapshot
        return conditional_activity(snapshot.tree, entry.session.source,
                                    entry.session.grammar, defines)

    @app.exception_handler(ApiFailure)
    async def on_api_failure(request: Request, exc: ApiFailure):
        return JSONResponse(
            {"status": exc.status, "code": exc.code, "message": str(exc)},
            status_code=exc.status)

    @app.exception_handler(BricsError)
    async def on_brics_error(request: Request, exc: BricsError):
        status = _STATUS_BY_CODE.get(exc.code, 422)
        return JSONResponse(
            {"status": status, "code": exc.code, "message": str(exc)},
            status_code=status)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            {"status": 400, "code": "E_BAD_REQUEST", "message": str(exc.errors())},
            status_code=400)

    @app.exception_handler(StarletteHTTPException)
    async def on_http_exception(request: Request, exc: StarletteHTTPException):
        return JSONResponse(
            {"status": exc.status_code, "code": "E_BAD_REQUEST",
             "message": str(exc.detail)},
            status_code=exc.status_code)

    async def read_json(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise _bad_request("body must be JSON")
        if not isinstance(body, dict):
            raise _bad_request("body must be a JSON object")
        return body

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await read_json(request)
        text = body.get("text")
        grammar_name = body.get("grammar")
        if not isinstance(text, str) or not isinstance(grammar_name, str):
            raise _bad_request("need string fields 'text' and 'grammar'")
        grammar = grammars.get(grammar_name)
        if grammar is None:
            raise UnknownGrammarError(
                f"unknown grammar {grammar_name!r}; have {sorted(grammars)}")
        session = Session(text, grammar)
        session_id = uuid.uuid4().hex[:12]
        entry = _Entry(session)
        sessions[session_id] = entry

        def publish(snapshot: Snapshot) -> None:
            event = {"version": snapshot.version, "digest": snapshot.digest}
            for queue in list(entry.queues):
                queue.put_nowait(event)

        session.subscribe(publish)
        payload = _snapshot_payload(entry, session.snapshot)
        payload["session_id"] = session_id
        return payload

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        entry = entry_for(session_id)
        payload = _snapshot_payload(entry, entry.session.snapshot)
        payload["session_id"] = session_id
        payload["text"] = entry.session.document.text
        payload["grammar"] = entry.session.grammar.name
        return payload

    @app.post("/sessions/{session_id}/edits")
    async def post_edit(session_id: str, request: Request):
        entry = entry_for(session_id)
        body = await read_json(request)
        try:
            edit = Edit(
                start_byte=int(body["start_byte"]),
                end_byte=int(body["end_byte"]),
                replacement=str(body["replacement"]),
                base_version=int(body["base_version"]),
            )
        except (KeyError, TypeError, ValueError):
            raise _bad_request(
                "need start_byte, end_byte, replacement, base_version")
        snapshot = entry.session.apply_edit(edit)
        return _snapshot_payload(entry, snapshot)

    @app.get("/sessions/{session_id}/rects")
    async def get_rects(session_id: str, defines: Optional[str] = None):
        entry = entry_for(session_id)
        snapshot = entry.session.snapshot
        activity = activity_for(entry, _parse_defines(defines))
        rects = editor_rects(snapshot.tree, entry.session.source,
                             DEFAULT_PALETTE, activity)
        payload = {
            "version": snapshot.version,
            "rects": [r.to_dict() for r in rects],
        }
        if activity is not None:
            payload["activityErrors"] = [
                {"blockId": e.block_id, "line": e.line,
                 "code": e.code, "message": e.message}
                for e in activity.errors
            ]
        return payload

    @app.get("/sessions/{session_id}/overview")
    async def get_overview(session_id: str, w: int, h: int, g: int,
                           from_line: Optional[int] = None,
                           to_line: Optional[int] = None,
                           defines: Optional[str] = None,
                           errors: Optional[str] = None,
                           request: Request = None):
        entry = entry_for(session_id)
        # the query names "from"/"to" are Python keywords, so they arrive
        # via the raw query dict
        try:
            if request is not None:
                if from_line is None and "from" in request.query_params:
                    from_line = int(request.query_params["from"])
                if to_line is None and "to" in request.query_params:
                    to_line = int(request.query_params["to"])
        except ValueError:
            raise _bad_request("from/to must be integers")
        session = entry.session
        snapshot = session.snapshot
        source = session.source
        zoom = (from_line if from_line is not None else 1,
                to_line if to_line is not None else source.line_count)
        activity = activity_for(entry, _parse_defines(defines))
        model = overview_model(snapshot.tree, source, w, h, g, zoom,
                               DEFAULT_PALETTE, activity)
        if errors:
            try:
                lines = [int(part) for part in errors.split(",") if part.strip()]
            except ValueError:
                raise _bad_request("errors must be comma-separated line numbers")
            model = mark_errors(model, lines)
        payload = model.to_dict()
        payload["version"] = snapshot.version
        return payload

    @app.post("/sessions/{session_id}/refactor/extract")
    async def post_extract(session_id: str, request: Request):
        entry = entry_for(session_id)
        body = await read_json(request)
        block_id = body.get("block_id")
        name = body.get("name")
        if not isinstance(block_id, int) or not isinstance(name, str):
            raise _bad_request("need integer 'block_id' and string 'name'")
        session = entry.session
        snapshot = session.snapshot
        try:
            result = extract_block(session.source, snapshot.tree,
                                   session.grammar, block_id, name)
        except ValueError as exc:
            raise _bad_request(str(exc))
        new_snapshot = session.replace_text(result.new_source, snapshot.version)
        payload = _snapshot_payload(entry, new_snapshot)
        payload["text"] = result.new_source
        payload["new_method_lines"] = list(result.new_method_lines)
        payload["call_line"] = result.call_line
        return payload

    @app.get("/sessions/{session_id}/events")
    async def get_events(session_id: str):
        entry = entry_for(session_id)
        queue: asyncio.Queue = asyncio.Queue()
        entry.queues.append(queue)

        async def stream():
            try:
                while True:
                    event = await queue.get()
                    yield json.dumps(event) + "\n"
            finally:
                if queue in entry.queues:
                    entry.queues.remove(queue)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.get("/sessions/{session_id}/render.svg")
    async def get_svg(session_id: str, fold: Optional[int] = None,
                      defines: Optional[str] = None):
        entry = entry_for(session_id)
        snapshot = entry.session.snapshot
        source = entry.session.source
        activity = activity_for(entry, _parse_defines(defines))
        rects = editor_rects(snapshot.tree, source, DEFAULT_PALETTE, activity)
        folds = fold_spans(snapshot.tree, fold) if fold is not None else []
        svg = render_svg(rects, folds, source)
        return Response(svg, media_type="image/svg+xml")

    return app
