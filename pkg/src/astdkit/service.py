"""HTTP/JSON animation service.

One server may host several specifications; each session animates one of
them. Sessions are single-writer: steps on a session are serialized by a
per-session lock. Nondeterminism is surfaced as an explicit successor list
with stable indices, so every animation is reproducible from its trace.
The JSON contract is documented in docs/api.md.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .control import Event
from .data import EMPTY_ENV
from .diagnostics import EvalError
from .document import SpecDoc
from .engine import CombinedState, Engine, state_to_json
from .render import render_pred


class Session:
    def __init__(self, session_id: str, spec_name: str, engine: Engine):
        self.id = session_id
        self.spec_name = spec_name
        self.engine = engine
        self.current = engine.initial_state()
        self.trace: list[dict] = []          # {event, choiceIndex}
        self.history: list[CombinedState] = []
        self.lock = threading.Lock()

    def snapshot(self) -> dict:
        spec = self.engine.spec
        inv_status = []
        for inv in spec.invariants:
            pred_text = render_pred(inv.pred)
            try:
                ok = self.engine.evaluator.eval_pred(
                    inv.pred, self.current.data, None, EMPTY_ENV
                )
                inv_status.append({"name": inv.name, "ok": bool(ok), "pred": pred_text})
            except EvalError as err:
                inv_status.append({"name": inv.name, "ok": False, "pred": pred_text,
                                   "error": str(err)})
        enabled = [
            {
                "label": ev.label,
                "args": list(ev.args),
                "text": str(ev),
                "successorCount": n,
            }
            for ev, n in self.engine.enabled_events(self.current)
        ]
        return {
            "sessionId": self.id,
            "spec": self.spec_name,
            **state_to_json(spec, self.current),
            "invariantStatus": inv_status,
            "enabled": enabled,
            "trace": list(self.trace),
        }

    def step(self, label: str, args: tuple[str, ...], choice_index: int):
        """Returns the snapshot, or raises Refusal with the reason."""
        event = Event(label, args)
        succs = self.engine.combined_step(self.current, event)
        if not succs:
            if not self.engine.control_accepts(self.current, event):
                raise Refusal("control refuses")
            edef = self.engine.spec.event(label)
            if edef is None and self.engine.spec.pure(label) is None:
                raise Refusal("unknown event label")
            if edef is not None and not self.engine.evaluator.event_enabled(
                    edef, args, self.current.data):
                raise Refusal("data guard refuses")
            raise Refusal("data action infeasible")
        if not (0 <= choice_index < len(succs)):
            raise Refusal(
                f"choice index {choice_index} out of range (event has "
                f"{len(succs)} successors)"
            )
        self.history.append(self.current)
        self.current = succs[choice_index]
        self.trace.append({
            "event": {"label": label, "args": list(args)},
            "choiceIndex": choice_index,
        })
        return self.snapshot()

    def undo(self):
        if self.history:
            self.current = self.history.pop()
            self.trace.pop()
        return self.snapshot()

    def reset(self):
        self.current = self.engine.initial_state()
        self.trace.clear()
        self.history.clear()
        return self.snapshot()


class Refusal(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class AnimationService:
    def __init__(self, specs: dict[str, SpecDoc]):
        self.specs = dict(specs)
        self.sessions: dict[str, Session] = {}
        self._next = 0
        self.lock = threading.Lock()

    def create_session(self, spec_name: str) -> Session:
        spec = self.specs.get(spec_name)
        if spec is None:
            raise KeyError(spec_name)
        with self.lock:
            self._next += 1
            session = Session(f"s{self._next}", spec_name, Engine(spec))
            self.sessions[session.id] = session
        return session

    def session(self, session_id: str) -> Session | None:
        return self.sessions.get(session_id)


def make_server(specs: dict[str, SpecDoc], port: int = 0) -> ThreadingHTTPServer:
    service = AnimationService(specs)

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            pass

        # --- plumbing ---

        def send_json(self, code: int, payload: dict):
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if not length:
                return {}
            raw = self.rfile.read(length)
            try:
                out = json.loads(raw)
            except json.JSONDecodeError:
                raise ValueError("request body is not valid JSON")
            if not isinstance(out, dict):
                raise ValueError("request body must be a JSON object")
            return out

        def do_OPTIONS(self):
            self.send_json(200, {})

        # --- routes ---

        def do_GET(self):
            if self.path == "/specs":
                self.send_json(200, {"specs": sorted(service.specs)})
                return
            m = re.fullmatch(r"/sessions/([^/]+)/state", self.path)
            if m:
                session = service.session(m.group(1))
                if session is None:
                    self.send_json(404, {"error": "unknown session"})
                    return
                with session.lock:
                    self.send_json(200, session.snapshot())
                return
            self.send_json(404, {"error": "no such resource"})

        def do_POST(self):
            try:
                body = self.read_body()
            except ValueError as err:
                self.send_json(400, {"error": str(err)})
                return
            if self.path == "/sessions":
                name = body.get("specName")
                if not isinstance(name, str):
                    self.send_json(400, {"error": "specName is required"})
                    return
                try:
                    session = service.create_session(name)
                except KeyError:
                    self.send_json(404, {"error": f"unknown spec {name!r}"})
                    return
                with session.lock:
                    self.send_json(
                        201,
                        {"sessionId": session.id, "snapshot": session.snapshot()},
                    )
                return
            m = re.fullmatch(r"/sessions/([^/]+)/(step|undo|reset)", self.path)
            if not m:
                self.send_json(404, {"error": "no such resource"})
                return
            session = service.session(m.group(1))
            if session is None:
                self.send_json(404, {"error": "unknown session"})
                return
            action = m.group(2)
            with session.lock:
                if action == "undo":
                    self.send_json(200, session.undo())
                    return
                if action == "reset":
                    self.send_json(200, session.reset())
                    return
                event = body.get("event") or {}
                label = event.get("label")
                args = tuple(event.get("args") or ())
                if not isinstance(label, str) or not all(
                        isinstance(a, str) for a in args):
                    self.send_json(400, {"error": "event must carry label and args"})
                    return
                choice = body.get("choiceIndex", 0)
                if not isinstance(choice, int):
                    self.send_json(400, {"error": "choiceIndex must be an integer"})
                    return
                try:
                    snapshot = session.step(label, args, choice)
                except Refusal as refusal:
                    self.send_json(
                        409, {"error": "event refused", "reason": refusal.reason}
                    )
                    return
                except EvalError as err:
                    self.send_json(409, {"error": "evaluation error", "reason": str(err)})
                    return
                self.send_json(200, snapshot)

    server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
    server.service = service
    return server


def serve_forever(specs: dict[str, SpecDoc], port: int) -> None:
    server = make_server(specs, port)
    host, actual_port = server.server_address
    print(f"animation service listening on http://{host}:{actual_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
