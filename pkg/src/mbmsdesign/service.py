"""HTTP delivery of sessions, validation, generation and KB editing.

Sessions are in-memory with idle eviction; only the knowledge base
persists. Knowledge base mutations are serialized by a writer lock and
written to the archive path before the response goes out, so a mutation is
either fully persisted and visible to later sessions or the request fails.
Existing sessions keep the snapshot they started with.
"""

import secrets
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI, Request, Response

from . import canonical
from .catalog import Catalog, load_catalog_file
from .codegen import default_templates, generate_scaffold, zip_fileset
from .engine import (
    Session,
    new_session,
    project_description,
    retry_pending,
    submit_requirement,
)
from .errors import (
    DesignError,
    EmptySelection,
    MalformedRequirement,
    MalformedRule,
    MalformedValue,
)
from .facts import Sym, value_to_doc
from .kb import (
    KnowledgeBase,
    ProductionRule,
    add_rule,
    export_subset,
    link_rule_to_units,
    load_kb_file,
    save_kb,
)
from .reqdsl import FormalRequirement, formalize, parse_requirements
from .shipped import shipped_catalog, shipped_kb
from .validator import validate


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8787
    kb_path: str | None = None
    catalog_path: str | None = None
    session_timeout: float = 3600.0
    max_sessions: int = 64

    def __post_init__(self):
        if self.session_timeout <= 0:
            raise MalformedValue("session timeout must be positive")
        if self.max_sessions <= 0:
            raise MalformedValue("max sessions must be positive")

    @classmethod
    def from_doc(cls, doc) -> "ServiceConfig":
        bind = doc.get("bind", "127.0.0.1:8787")
        host, _, port = bind.rpartition(":")
        return cls(
            host=host or "127.0.0.1",
            port=int(port),
            kb_path=doc.get("kb"),
            catalog_path=doc.get("catalog"),
            session_timeout=float(doc.get("session_timeout", 3600)),
            max_sessions=int(doc.get("max_sessions", 64)),
        )


class SessionStore:
    """Sessions keyed by unguessable ids, evicted after idle timeout."""

    def __init__(self, timeout: float, max_sessions: int):
        self.timeout = timeout
        self.max_sessions = max_sessions
        self._lock = threading.Lock()
        self._sessions: dict = {}
        self._touched: dict = {}
        self._session_locks: dict = {}

    def sweep(self, now: float | None = None) -> None:
        now = time.monotonic() if now is None else now
        with self._lock:
            stale = [
                sid
                for sid, touched in self._touched.items()
                if now - touched > self.timeout
            ]
            for sid in stale:
                self._sessions.pop(sid, None)
                self._touched.pop(sid, None)
                self._session_locks.pop(sid, None)

    def create(self, kb: KnowledgeBase, catalog: Catalog) -> Session:
        self.sweep()
        with self._lock:
            if len(self._sessions) >= self.max_sessions:
                raise SessionLimit("session limit reached")
            sid = secrets.token_hex(16)
            session = new_session(kb, catalog, sid)
            self._sessions[sid] = session
            self._touched[sid] = time.monotonic()
            self._session_locks[sid] = threading.Lock()
            return session

    def get(self, sid: str) -> tuple:
        self.sweep()
        with self._lock:
            session = self._sessions.get(sid)
            if session is None:
                raise UnknownSession(f"no session {sid}")
            self._touched[sid] = time.monotonic()
            return session, self._session_locks[sid]


class UnknownSession(DesignError):
    code = "unknown_session"


class SessionLimit(DesignError):
    code = "session_limit"


_STATUS_BY_CODE = {
    "unknown_session": 404,
    "unknown_rule": 404,
    "unknown_frame": 404,
    "unknown_unit": 404,
    "duplicate_rule_id": 409,
    "session_not_awaiting": 409,
    "session_not_describable": 409,
    "session_limit": 503,
}


def _http_status(err: DesignError) -> int:
    return _STATUS_BY_CODE.get(err.code, 400)


def _doc_response(doc, status: int = 200) -> Response:
    return Response(
        content=canonical.encode(doc),
        status_code=status,
        media_type="application/json",
    )


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.catalog = (
            load_catalog_file(config.catalog_path)
            if config.catalog_path
            else shipped_catalog()
        )
        self.kb = (
            load_kb_file(config.kb_path, self.catalog)
            if config.kb_path
            else shipped_kb()
        )
        self.kb_lock = threading.Lock()
        self.store = SessionStore(config.session_timeout, config.max_sessions)

    def mutate_kb(self, fn) -> KnowledgeBase:
        """Apply a KB edit, persisting before the new value becomes visible."""
        with self.kb_lock:
            updated = fn(self.kb)
            if self.config.kb_path:
                save_kb(updated, self.config.kb_path)
            self.kb = updated
            return updated


def _scheme_doc(session: Session) -> dict:
    instances = []
    for inst in session.scheme.instances:
        unit = session.catalog.unit(inst.unit_id)
        instances.append(
            {
                "id": str(inst.instance_id),
                "unit": str(inst.unit_id),
                "kind": unit.kind,
                "params": {str(s): value_to_doc(v) for s, v in inst.params},
            }
        )
    return {
        "instances": instances,
        "connections": [c.to_doc() for c in session.scheme.connections],
    }


def _outcome_doc(session: Session, req_id, firings) -> dict:
    doc = {
        "status": session.status.to_doc(),
        "requirement": None if req_id is None else str(req_id),
        "firings": [f.to_doc() for f in firings],
        "scheme": _scheme_doc(session),
    }
    return doc


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="mbmsdesign", docs_url=None, redoc_url=None)
    app.state.design = state

    @app.exception_handler(DesignError)
    async def _design_error(_request: Request, err: DesignError):
        return _doc_response(err.to_doc(), _http_status(err))

    @app.post("/sessions")
    async def create_session():
        session = state.store.create(state.kb, state.catalog)
        return _doc_response(
            {"session": session.session_id, "status": session.status.to_doc()},
            status=201,
        )

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        session, _lock = state.store.get(sid)
        return _doc_response(
            {
                "session": session.session_id,
                "status": session.status.to_doc(),
                "requirements": len(session.requirement_log),
                "instances": len(session.scheme.instances),
                "kb_version": session.kb.version,
            }
        )

    @app.post("/sessions/{sid}/requirements")
    async def post_requirement(sid: str, request: Request):
        session, lock = state.store.get(sid)
        body = canonical.loads(await request.body())
        if not isinstance(body, dict):
            raise MalformedRequirement("body must be an object")
        with lock:
            if "statement" in body:
                raws = parse_requirements(str(body["statement"]))
                if len(raws) != 1:
                    raise MalformedRequirement("submit exactly one statement")
                req = formalize(raws[0], session.next_req_id)
            elif "requirement" in body:
                req = FormalRequirement.from_doc(body["requirement"])
            else:
                raise MalformedRequirement(
                    "body needs a statement or a requirement document"
                )
            outcome = submit_requirement(session, req)
            return _doc_response(_outcome_doc(session, req.req_id, outcome.firings))

    @app.post("/sessions/{sid}/retry")
    async def retry(sid: str):
        session, lock = state.store.get(sid)
        with lock:
            pending = session.pending
            outcome = retry_pending(session, state.kb)
            req_id = None if pending is None else pending.req_id
            return _doc_response(_outcome_doc(session, req_id, outcome.firings))

    @app.get("/sessions/{sid}/scheme")
    async def get_scheme(sid: str):
        session, lock = state.store.get(sid)
        with lock:
            return _doc_response(_scheme_doc(session))

    @app.get("/sessions/{sid}/validation")
    async def get_validation(sid: str):
        session, lock = state.store.get(sid)
        with lock:
            report = validate(session.scheme, session.kb, session.catalog)
            return _doc_response(report.to_doc())

    @app.get("/sessions/{sid}/description")
    async def get_description(sid: str):
        session, lock = state.store.get(sid)
        with lock:
            pd = project_description(session)
            return _doc_response(pd.to_doc())

    @app.post("/sessions/{sid}/generate")
    async def generate(sid: str, request: Request):
        session, lock = state.store.get(sid)
        raw = await request.body()
        body = canonical.loads(raw) if raw.strip() else {}
        force = bool(body.get("force", False)) if isinstance(body, dict) else False
        with lock:
            pd = project_description(session)
            report = validate(session.scheme, session.kb, session.catalog)
            if report.passed:
                pd = pd.with_validation("passed")
            elif force:
                pd = pd.with_validation("forced")
            else:
                return _doc_response(
                    {"error": "validation_failed", "report": report.to_doc()},
                    status=409,
                )
            fileset = generate_scaffold(pd, default_templates())
        return Response(
            content=zip_fileset(fileset),
            media_type="application/zip",
            headers={"Content-Disposition": "attachment; filename=mbms-scaffold.zip"},
        )

    @app.get("/kb/rules")
    async def kb_rules():
        kb = state.kb
        return _doc_response(
            {"version": kb.version, "rules": [r.to_doc() for r in kb.rules]}
        )

    @app.post("/kb/rules")
    async def kb_add_rule(request: Request):
        doc = canonical.loads(await request.body())
        rule = ProductionRule.from_doc(doc)
        updated = state.mutate_kb(lambda kb: add_rule(kb, rule))
        return _doc_response({"version": updated.version}, status=201)

    @app.post("/kb/rules/{rule_id}/links")
    async def kb_link(rule_id: str, request: Request):
        doc = canonical.loads(await request.body())
        if not isinstance(doc, dict) or "units" not in doc:
            raise MalformedRule("body needs a units list")
        updated = state.mutate_kb(
            lambda kb: link_rule_to_units(kb, Sym(rule_id), doc["units"], state.catalog)
        )
        return _doc_response({"version": updated.version})

    @app.post("/kb/export")
    async def kb_export(request: Request):
        doc = canonical.loads(await request.body())
        if not isinstance(doc, dict):
            raise EmptySelection("selector must be an object")
        archive = export_subset(
            state.kb,
            rule_ids=doc.get("rule_ids"),
            capabilities=doc.get("capabilities"),
            select_all=bool(doc.get("all", False)),
        )
        return Response(
            content=archive,
            media_type="application/json",
            headers={"Content-Disposition": "attachment; filename=subset.mbkb"},
        )

    @app.get("/catalog/units")
    async def catalog_units():
        return _doc_response(state.catalog.to_doc())

    return app


def serve_http(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
