"""HTTP service exposing the engine.

One writer lock per map serializes all mutations to it (including the LLM
round-trip of an enrichment); requests against different maps proceed in
parallel. Endpoints are plain sync handlers so the framework runs them on
worker threads. Errors use one body shape: {code, message, detail}.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import errors as err
from .enrichment import (
    EnrichmentResult,
    EnrichmentWarning,
    exemplify_node,
    explain_node,
    explore_node,
    generate_map,
)
from .llm import DEFAULT_PARAMS, CompletionParams, Provider, ProviderError
from .mindmap import (
    AddChild,
    DeleteSubtree,
    EditCommand,
    EditText,
    MindMap,
    MoveSubtree,
    NodeOrigin,
    SetCollapsed,
)
from .outline import Violation
from .prompts import PromptConfig, default_config
from .store import export_outline, save


class InvalidCommand(err.EngineError):
    """Command body does not describe a known mutation."""


class UnknownMap(err.EngineError):
    """No live map with that id."""


_STATUS_FOR = [
    (err.EmptyQuery, 400),
    (err.EmptyQuestion, 400),
    (err.EmptyTopic, 400),
    (UnknownMap, 404),
    (err.UnknownNode, 404),
    (err.NoHistory, 409),
    (err.RedundantContent, 409),
    (err.NoExamples, 409),
    (err.GenerationMalformed, 422),
    (err.CycleError, 422),
    (err.CannotDeleteRoot, 422),
    (err.EmptyText, 422),
    (InvalidCommand, 422),
    (ProviderError, 502),
    (err.ScriptExhausted, 502),
]


class MapSession:
    def __init__(self, m: MindMap):
        self.map = m
        self.lock = threading.Lock()


class SessionRegistry:
    """Live maps by id; id generation is monotonic per process."""

    def __init__(self):
        self._sessions: dict[str, MapSession] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, m: MindMap) -> str:
        with self._lock:
            self._counter += 1
            map_id = f"m{self._counter}"
            self._sessions[map_id] = MapSession(m)
        return map_id

    def get(self, map_id: str) -> MapSession:
        with self._lock:
            session = self._sessions.get(map_id)
        if session is None:
            raise UnknownMap(f"no map with id {map_id!r}")
        return session


def _warning_record(warning) -> dict:
    if isinstance(warning, Violation):
        return {
            "kind": warning.kind.value,
            "location": warning.location,
            "detail": warning.detail,
        }
    if isinstance(warning, EnrichmentWarning):
        return {"kind": warning.kind, "location": None, "detail": warning.detail}
    return {"kind": str(warning), "location": None, "detail": ""}


def _parse_command(body: dict) -> EditCommand:
    if not isinstance(body, dict) or "type" not in body:
        raise InvalidCommand("command body needs a 'type' field")
    kind = body["type"]
    try:
        if kind == "add_child":
            origin = NodeOrigin(body.get("origin", "user_added"))
            return AddChild(
                parent=body["parent"],
                text=body.get("text", ""),
                origin=origin,
                position=body.get("position"),
            )
        if kind == "delete_subtree":
            return DeleteSubtree(node=body["node"])
        if kind == "edit_text":
            return EditText(node=body["node"], new_text=body.get("new_text", ""))
        if kind == "move_subtree":
            return MoveSubtree(
                node=body["node"],
                new_parent=body["new_parent"],
                position=body.get("position"),
            )
        if kind == "set_collapsed":
            return SetCollapsed(node=body["node"], flag=bool(body.get("flag", True)))
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidCommand(f"bad command field: {exc}") from exc
    raise InvalidCommand(f"unknown command type {kind!r}")


def create_app(
    provider: Provider,
    config: PromptConfig | None = None,
    *,
    store_dir: str | Path | None = None,
    params: CompletionParams = DEFAULT_PARAMS,
) -> FastAPI:
    """Build the service around a provider; store_dir=None keeps maps
    in-memory only."""
    config = config or default_config()
    registry = SessionRegistry()
    app = FastAPI(title="nodemind", version="1")
    app.state.registry = registry

    def persist(map_id: str, m: MindMap) -> None:
        if store_dir is None:
            return
        directory = Path(store_dir)
        directory.mkdir(parents=True, exist_ok=True)
        save(m, directory / f"{map_id}.json", map_id=map_id)

    @app.exception_handler(err.EngineError)
    def engine_error_handler(request: Request, exc: err.EngineError):
        status = 500
        for klass, code in _STATUS_FOR:
            if isinstance(exc, klass):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={
                "code": type(exc).__name__,
                "message": str(exc),
                "detail": getattr(exc, "raw", ""),
            },
        )

    def tree_response(map_id: str, m: MindMap) -> dict:
        return {
            "map_id": map_id,
            "revision": m.revision,
            "tree": m.to_record(),
        }

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/maps", status_code=201)
    def create_map(body: dict = Body(...)) -> dict:
        query = body.get("query", "")
        if not isinstance(query, str) or not query.strip():
            raise err.EmptyQuery("query is empty")
        m = generate_map(query, provider, config, params=params)
        map_id = registry.create(m)
        persist(map_id, m)
        response = tree_response(map_id, m)
        response["warnings"] = [_warning_record(w) for w in m.warnings]
        return response

    @app.get("/maps/{map_id}")
    def get_map(map_id: str) -> dict:
        session = registry.get(map_id)
        with session.lock:
            return tree_response(map_id, session.map)

    @app.get("/maps/{map_id}/export")
    def export_map(
        map_id: str,
        format: str = Query("outline"),
        all: bool = Query(False),
    ) -> PlainTextResponse:
        if format != "outline":
            raise InvalidCommand(f"unsupported export format {format!r}")
        session = registry.get(map_id)
        with session.lock:
            text = export_outline(session.map, include_collapsed=all)
        return PlainTextResponse(text)

    def _enrich(map_id: str, node_id: str, runner) -> dict:
        session = registry.get(map_id)
        with session.lock:
            result: EnrichmentResult = runner(session.map, node_id)
            persist(map_id, session.map)
            return {
                "map_id": map_id,
                "revision": session.map.revision,
                "attached": [
                    session.map.to_record(nid) for nid in result.attached_ids
                ],
                "warnings": [_warning_record(w) for w in result.warnings],
            }

    @app.post("/maps/{map_id}/nodes/{node_id}/explain")
    def explain(map_id: str, node_id: str) -> dict:
        return _enrich(
            map_id,
            node_id,
            lambda m, nid: explain_node(m, nid, provider, config, params=params),
        )

    @app.post("/maps/{map_id}/nodes/{node_id}/examples")
    def examples(map_id: str, node_id: str) -> dict:
        return _enrich(
            map_id,
            node_id,
            lambda m, nid: exemplify_node(m, nid, provider, config, params=params),
        )

    @app.post("/maps/{map_id}/nodes/{node_id}/explore")
    def explore(map_id: str, node_id: str, body: dict | None = Body(None)) -> dict:
        question = (body or {}).get("question", "")
        if not isinstance(question, str) or not question.strip():
            raise err.EmptyQuestion("explore requires a question")
        return _enrich(
            map_id,
            node_id,
            lambda m, nid: explore_node(
                m, nid, question, provider, config, params=params
            ),
        )

    @app.post("/maps/{map_id}/commands")
    def apply_command(map_id: str, body: dict = Body(...)) -> dict:
        cmd = _parse_command(body)
        session = registry.get(map_id)
        with session.lock:
            session.map.apply(cmd)
            persist(map_id, session.map)
            return tree_response(map_id, session.map)

    @app.post("/maps/{map_id}/undo")
    def undo(map_id: str) -> dict:
        session = registry.get(map_id)
        with session.lock:
            session.map.undo()
            persist(map_id, session.map)
            return tree_response(map_id, session.map)

    @app.post("/maps/{map_id}/redo")
    def redo(map_id: str) -> dict:
        session = registry.get(map_id)
        with session.lock:
            session.map.redo()
            persist(map_id, session.map)
            return tree_response(map_id, session.map)

    return app
