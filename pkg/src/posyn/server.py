"""Session server: the engine behind a bidirectional message channel.

One authoritative engine per session; clients send raw pointer-derived
events and receive deltas. WebSocket frames provide the length-delimited
JSON transport. Message kinds: hello, loadProject, event, state, delta,
violation, bye.
"""

from __future__ import annotations

import asyncio
import json

from starlette.applications import Starlette
from starlette.routing import WebSocketRoute
from starlette.websockets import WebSocket, WebSocketDisconnect

from .engine import Engine, SessionEvent
from .errors import PosynError, ValidationFailedError
from .project import ProjectDocument, load_project
from .session import final_document

PROTOCOL_KINDS = ("hello", "loadProject", "event", "state", "delta", "violation", "bye")


class Session:
    """Shared engine state for every client of one session id."""

    def __init__(self, session_id: str, default_project_text: str | None):
        self.session_id = session_id
        self.default_project_text = default_project_text
        self.doc: ProjectDocument | None = None
        self.engine: Engine | None = None
        self.expected_seq = 1
        self.clients: list[WebSocket] = []
        self.lock = asyncio.Lock()

    def state_message(self) -> dict:
        assert self.doc is not None and self.engine is not None
        return {
            "kind": "state",
            "sessionId": self.session_id,
            "payload": {
                "project": final_document(self.doc, self.engine).to_dict(),
                "rendered": self.engine.rendered_state(),
                "activeViews": self._active_views(),
            },
        }

    def _active_views(self) -> list[str]:
        assert self.engine is not None
        return [v.name for v in self.engine.views if v.active]

    async def broadcast(self, message: dict) -> None:
        for client in list(self.clients):
            try:
                await client.send_json(message)
            except (WebSocketDisconnect, RuntimeError):
                pass  # a disconnecting client never blocks the others

    def load(self, text: str) -> None:
        doc = load_project(text)
        self.doc = doc
        self.engine = Engine(doc.model, doc.views, doc.layouts, doc.scales)
        self.expected_seq = 1


def _violation_message(session_id: str, code: str, message: str, **extra) -> dict:
    payload = {"code": code, "message": message}
    payload.update(extra)
    return {"kind": "violation", "sessionId": session_id, "payload": payload}


def create_app(default_project_text: str | None = None) -> Starlette:
    app = Starlette(routes=[WebSocketRoute("/session", _session_socket)])
    app.state.sessions = {}
    app.state.default_project_text = default_project_text
    return app


def _get_session(app, session_id: str) -> Session:
    sessions = app.state.sessions
    if session_id not in sessions:
        sessions[session_id] = Session(session_id, app.state.default_project_text)
    return sessions[session_id]


async def _session_socket(websocket: WebSocket) -> None:
    await websocket.accept()
    session = _get_session(websocket.app, websocket.query_params.get("session", "default"))
    session.clients.append(websocket)
    await websocket.send_json({"kind": "hello", "sessionId": session.session_id})
    try:
        while True:
            try:
                raw = await websocket.receive_text()
            except WebSocketDisconnect:
                break
            closing = await _handle(session, websocket, raw)
            if closing:
                break
    finally:
        if websocket in session.clients:
            session.clients.remove(websocket)


async def _handle(session: Session, sender: WebSocket, raw: str) -> bool:
    """Process one client message; True closes the connection."""
    sid = session.session_id
    try:
        message = json.loads(raw)
    except ValueError as err:
        await sender.send_json(_violation_message(sid, "ParseError", f"not valid JSON: {err}"))
        return False
    if not isinstance(message, dict) or message.get("kind") not in PROTOCOL_KINDS:
        await sender.send_json(
            _violation_message(sid, "BadMessage", "message needs a known kind")
        )
        return False

    kind = message["kind"]
    if kind == "hello":
        await sender.send_json({"kind": "hello", "sessionId": sid})
        return False

    if kind == "loadProject":
        payload = message.get("payload")
        if isinstance(payload, dict):
            text = json.dumps(payload)
        elif isinstance(payload, str):
            text = payload
        elif payload is None and session.default_project_text is not None:
            text = session.default_project_text
        else:
            await sender.send_json(
                _violation_message(sid, "BadMessage", "no project supplied or configured")
            )
            return False
        async with session.lock:
            try:
                session.load(text)
            except ValidationFailedError as err:
                await sender.send_json(
                    _violation_message(sid, err.code, err.message, report=err.report)
                )
                return False
            except PosynError as err:
                await sender.send_json(_violation_message(sid, err.code, err.message))
                return False
            await session.broadcast(session.state_message())
        return False

    if kind == "event":
        async with session.lock:
            if session.engine is None:
                await sender.send_json(
                    _violation_message(sid, "NoProject", "load a project first")
                )
                return False
            try:
                event = SessionEvent.from_dict(message.get("payload", {}))
            except (PosynError, ValueError, TypeError) as err:
                await sender.send_json(_violation_message(sid, "BadEvent", str(err)))
                return False
            if event.seq != session.expected_seq:
                await sender.send_json(
                    _violation_message(
                        sid,
                        "BadSequence",
                        f"expected seq {session.expected_seq}, got {event.seq}",
                    )
                )
                return False
            session.expected_seq += 1
            outcome = session.engine.apply_event(event)
            # the outcome plus a fresh presentation snapshot, so clients can
            # redraw without any semantics of their own
            payload = outcome.to_dict()
            payload["rendered"] = session.engine.rendered_state()
            payload["activeViews"] = session._active_views()
            await session.broadcast(
                {"kind": "delta", "sessionId": sid, "payload": payload}
            )
            violations = outcome.all_violations()
            if violations:
                first = violations[0]
                await sender.send_json(
                    _violation_message(
                        sid, first.code, first.message, ruleId=first.rule_id,
                        elementId=first.element_id,
                    )
                )
        return False

    # bye: answer with the final project state, then close
    payload = None
    if session.doc is not None and session.engine is not None:
        payload = {"project": final_document(session.doc, session.engine).to_dict()}
    await sender.send_json({"kind": "bye", "sessionId": sid, "payload": payload})
    await sender.close()
    return True
