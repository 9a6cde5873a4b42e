"""Newline-delimited JSON session protocol, over TCP or stdio.

Each connection owns one session.  Requests are single-line JSON objects
``{"op": ..., ...}``; responses are ``{"ok": true, ...}`` or
``{"error": {"code", "message", "position"?}}``.  The operations mirror the
interactive workflow: load_builtin, start_goal, apply, back, solutions,
state, list_theorems, list_solvers.  See docs/protocol.md.
"""

from __future__ import annotations

import json
import socketserver
import sys
from typing import Optional, TextIO

from . import theories
from .kernel import KernelError
from .render import solution_payload
from .session import Session, SessionError
from .solver import SolverError, StepBudgetExceeded
from .syntax import ParseError
from .theory import Theory, TheoryError, merge_theories


class ConnectionState:
    """One protocol session: a theory context plus an interactive session."""

    def __init__(self, context: Theory):
        self.context = context
        self.session = Session(context)

    # -- operations

    def op_load_builtin(self, req: dict) -> dict:
        name = _field(req, "name")
        extra = theories.load_builtin(name)
        self.context = merge_theories(f"{self.context.name}+{name}", [self.context, extra])
        self.session = Session(self.context)
        return {
            "theory": name,
            "theorems": self.context.theorem_names(),
            "solvers": self.context.solver_names(),
        }

    def op_start_goal(self, req: dict) -> dict:
        query = _field(req, "query")
        self.session.start_goal(query)
        goal = self.session.levels[-1]
        return {
            "metavars": [v.name for v in self.session.qvars],
            "goal": _first_goal_text(self.session),
            "display": self.session.display(),
            "depth": self.session.depth(),
        }

    def op_apply(self, req: dict) -> dict:
        text = _field(req, "solver")
        every = bool(req.get("every_subgoal", False))
        self.session.apply_text(text, every_subgoal=every)
        return self._state_payload()

    def op_back(self, req: dict) -> dict:
        self.session.back()
        return self._state_payload()

    def op_solutions(self, req: dict) -> dict:
        n = req.get("count", 1)
        if not isinstance(n, int) or n < 1:
            raise ProtocolError("bad_request", "count must be a positive integer")
        sols = self.session.take_solutions(n)
        return {"solutions": [solution_payload(s) for s in sols], "returned": len(sols)}

    def op_state(self, req: dict) -> dict:
        return self._state_payload()

    def op_list_theorems(self, req: dict) -> dict:
        return {"theorems": self.context.theorem_names()}

    def op_list_solvers(self, req: dict) -> dict:
        return {"solvers": self.context.solver_names(), "combinators": _COMBINATOR_DOC}

    def _state_payload(self) -> dict:
        return {
            "display": self.session.display(),
            "depth": self.session.depth(),
            "metavars": [v.name for v in self.session.qvars],
        }


_COMBINATOR_DOC = [
    "accept(THM)", "rule(THM)", "conj", "splitconj", "refl", "all", "no",
    "relassoc", "concat(s, s)", "then(s, s)", "repeat(s)", "valid(s)",
    "collect([s, ...])", "every([s, ...])", "interleave([s, ...])",
    "prolog([THM, ...])",
]

_OPS = {
    "load_builtin": ConnectionState.op_load_builtin,
    "start_goal": ConnectionState.op_start_goal,
    "apply": ConnectionState.op_apply,
    "back": ConnectionState.op_back,
    "solutions": ConnectionState.op_solutions,
    "state": ConnectionState.op_state,
    "list_theorems": ConnectionState.op_list_theorems,
    "list_solvers": ConnectionState.op_list_solvers,
}


class ProtocolError(Exception):
    def __init__(self, code: str, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.code = code
        self.position = position


def _field(req: dict, name: str) -> str:
    v = req.get(name)
    if not isinstance(v, str):
        raise ProtocolError("bad_request", f"missing string field {name!r}")
    return v


def _first_goal_text(session: Session) -> Optional[str]:
    from . import stream, syntax

    head = stream.force(session.levels[-1])
    if head is stream.EMPTY:
        return None
    st = head.head
    if not st.subgoals:
        return None
    return syntax.print_term(st.subgoals[0].concl)


def handle_request(state: ConnectionState, line: str) -> dict:
    """Dispatch one request line; never raises."""
    try:
        req = json.loads(line)
    except json.JSONDecodeError as e:
        return _err("bad_json", str(e), getattr(e, "pos", None))
    if not isinstance(req, dict):
        return _err("bad_request", "request must be a JSON object")
    op = req.get("op")
    handler = _OPS.get(op)
    if handler is None:
        return _err("unknown_op", f"unknown op {op!r}")
    try:
        payload = handler(state, req)
        payload["ok"] = True
        return payload
    except ProtocolError as e:
        return _err(e.code, str(e), e.position)
    except ParseError as e:
        return _err("parse_error", str(e), e.position)
    except (TheoryError, SessionError, SolverError, KernelError) as e:
        code = "budget_exceeded" if isinstance(e, StepBudgetExceeded) else "error"
        return _err(code, str(e))


def _err(code: str, message: str, position: Optional[int] = None) -> dict:
    err = {"code": code, "message": message}
    if position is not None:
        err["position"] = position
    return {"error": err}


def serve_stdio(context: Theory, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    state = ConnectionState(context)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        stdout.write(json.dumps(handle_request(state, line), ensure_ascii=False) + "\n")
        stdout.flush()
    return 0


def serve_tcp(context: Theory, host: str, port: int) -> int:
    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            state = ConnectionState(context)
            for raw in self.rfile:
                line = raw.decode("utf-8").strip()
                if not line:
                    continue
                resp = json.dumps(handle_request(state, line), ensure_ascii=False) + "\n"
                self.wfile.write(resp.encode("utf-8"))
                self.wfile.flush()

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    with Server((host, port), Handler) as srv:
        actual = srv.server_address[1]
        print(f"listening on {host}:{actual}", flush=True)
        try:
            srv.serve_forever()
        except KeyboardInterrupt:
            pass
    return 0


def create_http_app(context: Theory):
    """A FastAPI app bridging the same protocol over a WebSocket at /ws.

    Optional: requires the `server` extra (fastapi + uvicorn).
    """
    try:
        from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    except ImportError as e:  # pragma: no cover
        raise RuntimeError(
            "the --http bridge needs fastapi and uvicorn (pip install certlog[server])"
        ) from e

    app = FastAPI(title="certlog session bridge")

    async def ws_endpoint(ws):
        await ws.accept()
        state = ConnectionState(context)
        try:
            while True:
                line = await ws.receive_text()
                await ws.send_text(json.dumps(handle_request(state, line), ensure_ascii=False))
        except WebSocketDisconnect:
            pass

    # the annotation is attached as the class object itself: postponed
    # annotations would stringify it, and the lazy import above keeps
    # WebSocket out of the namespace the string would resolve against
    ws_endpoint.__annotations__ = {"ws": WebSocket}
    app.websocket("/ws")(ws_endpoint)
    return app


def serve_http(context: Theory, host: str, port: int) -> int:  # pragma: no cover
    import uvicorn

    app = create_http_app(context)
    print(f"http bridge on {host}:{port} (WebSocket at /ws)", flush=True)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0
