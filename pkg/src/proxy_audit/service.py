"""Local HTTP review service backing the companion UI.

Strictly single-tenant: binds loopback by default; if the environment
variable PROXY_AUDIT_TOKEN is set, every request must carry it in the
`x-proxy-audit-token` header. Judgments are written ahead to the
session log before the request is acknowledged.
"""

from __future__ import annotations

import os
import threading

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from typing import Optional

from .errors import (OracleSuspended, ProxyAuditError, UnknownFingerprint,
                     UnknownSession)
from .oracle import Judgment
from .repair import UNDECIDED, INAPPROPRIATE, APPROPRIATE
from .session import Session, SessionConfig

_VERDICTS = (APPROPRIATE, INAPPROPRIATE, UNDECIDED)


class SessionRequest(BaseModel):
    model_path: str
    dataset_path: str
    protected: str
    label: Optional[str] = None
    epsilon: float = 0.9
    delta: float = 0.4
    seed: int = 0
    bins: int = 10


class JudgmentRequest(BaseModel):
    fingerprint: str
    verdict: str
    note: str = ""
    author: str = ""


def create_app(session_root: str) -> FastAPI:
    os.makedirs(session_root, exist_ok=True)
    app = FastAPI(title="proxy-audit review service")
    # per-session single-writer locks
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(sid: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(sid, threading.Lock())

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        token = os.environ.get("PROXY_AUDIT_TOKEN")
        if token and request.url.path.startswith("/sessions"):
            if request.headers.get("x-proxy-audit-token") != token:
                return JSONResponse({"error": "bad or missing token"},
                                    status_code=401)
        return await call_next(request)

    @app.exception_handler(ProxyAuditError)
    async def audit_error(request: Request, exc: ProxyAuditError):
        status = 404 if isinstance(
            exc, (UnknownSession, UnknownFingerprint)) else 400
        return JSONResponse({"error": str(exc)}, status_code=status)

    def get_session(sid: str) -> Session:
        return Session.load(session_root, sid)

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest):
        cfg = SessionConfig(
            model_path=body.model_path, dataset_path=body.dataset_path,
            protected=body.protected, label=body.label,
            epsilon=body.epsilon, delta=body.delta, seed=body.seed,
            bins=body.bins)
        session = Session.create(session_root, cfg)
        return {"id": session.id}

    @app.get("/sessions/{sid}/witnesses")
    def witnesses(sid: str):
        session = get_session(sid)
        out = []
        for w in session.witnesses():
            w = dict(w)
            w["verdict"] = session.verdict(w["fingerprint"])
            w["size"] = w.get("subterm_size")
            out.append(w)
        return out

    @app.get("/sessions/{sid}/subexpressions")
    def subexpressions(sid: str):
        session = get_session(sid)
        cfg = session.config
        return {"epsilon": cfg.epsilon, "delta": cfg.delta,
                "rows": session.subexpressions()}

    @app.post("/sessions/{sid}/judgments", status_code=204)
    def post_judgment(sid: str, body: JudgmentRequest):
        if body.verdict not in _VERDICTS:
            raise HTTPException(422, f"bad verdict {body.verdict!r}")
        session = get_session(sid)
        with lock_for(sid):
            session.record_judgment(Judgment(
                fingerprint=body.fingerprint, verdict=body.verdict,
                note=body.note, author=body.author or "ui"))
        return Response(status_code=204)

    @app.post("/sessions/{sid}/repair")
    def repair(sid: str):
        session = get_session(sid)
        with lock_for(sid):
            try:
                return session.run_repair()
            except OracleSuspended as exc:
                return JSONResponse(
                    {"error": "undecided witnesses block repair",
                     "undecided": [w.to_dict() for w in exc.undecided]},
                    status_code=409)

    @app.get("/sessions/{sid}/program")
    def program(sid: str, form: str = "text"):
        session = get_session(sid)
        if form == "text":
            return {"text": str(session.program())}
        if form == "diff":
            return {"before": str(session.original_program()),
                    "after": str(session.program()),
                    "edits": session.edits()}
        raise HTTPException(422, f"unknown form {form!r}")

    package_dir = os.path.dirname(os.path.abspath(__file__))
    repo_root = os.path.dirname(os.path.dirname(package_dir))
    static_dir = os.environ.get(
        "PROXY_AUDIT_UI", os.path.join(repo_root, "frontend", "dist"))
    if os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")

    return app
