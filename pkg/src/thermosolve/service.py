"""HTTP session service around the problem builder and reasoner.

Each session wraps one problem under construction.  Mutating endpoints
return the full dialogue state so a client never needs to track partial
updates; solving works on a finalized copy, so a session stays editable
afterwards and repeated solves are idempotent.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .errors import (
    DomainError,
    IncompleteDefinition,
    InconsistentInput,
    MultipleOccurrenceUnsolved,
    NoSolution,
    NotSolvable,
    ThermosolveError,
    UnknownElement,
    UnknownMaterial,
    UnknownProcessClass,
)
from .knowledge import builtin_schema, materials_table
from .documents import serialize_problem
from .problem import (
    ProblemInstance,
    create_problem,
    pending_choices,
    process_classes,
    set_attribute,
    set_targets,
    set_value,
)
from .reasoner import export_reasoning_graph, reasoning_graph_to_dot, solve_problem_detailed
from .report import to_json


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    session_timeout: float = 3600.0  # seconds of inactivity before purge
    data_dir: str | None = None
    cors_origins: tuple[str, ...] = ()


class _HttpError(ThermosolveError):
    """Internal carrier for non-422 statuses."""

    def __init__(self, status: int, code: str, message: str, **details):
        super().__init__(message, **details)
        self.status = status
        self.code = code


@dataclass
class _Session:
    id: str
    problem: ProblemInstance
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


_STATUS_BY_TYPE: tuple[tuple[type, int], ...] = (
    (UnknownProcessClass, 400),
    (UnknownMaterial, 422),
    (ThermosolveError, 422),
)

_STAGE_BY_TYPE: tuple[tuple[type, str], ...] = (
    (IncompleteDefinition, "definition"),
    (NotSolvable, "reachability"),
    (InconsistentInput, "audit"),
    (DomainError, "execution"),
    (NoSolution, "execution"),
    (MultipleOccurrenceUnsolved, "execution"),
)


def _status_for(exc: ThermosolveError) -> int:
    if isinstance(exc, _HttpError):
        return exc.status
    for exc_type, status in _STATUS_BY_TYPE:
        if isinstance(exc, exc_type):
            return status
    return 422


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    schema = builtin_schema(config.data_dir)
    sessions: dict[str, _Session] = {}
    expired: dict[str, float] = {}
    store_lock = threading.Lock()

    app = FastAPI(title="thermosolve", docs_url=None, redoc_url=None)

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ThermosolveError)
    def _envelope_handler(request: Request, exc: ThermosolveError):
        return JSONResponse(status_code=_status_for(exc), content=exc.envelope())

    def _purge() -> None:
        now = time.monotonic()
        stale = [
            sid
            for sid, session in sessions.items()
            if now - session.last_used > config.session_timeout
        ]
        for sid in stale:
            del sessions[sid]
            expired[sid] = now
        while len(expired) > 1000:
            expired.pop(next(iter(expired)))

    def _get_session(session_id: str) -> _Session:
        with store_lock:
            _purge()
            session = sessions.get(session_id)
            if session is None:
                if session_id in expired:
                    raise _HttpError(
                        404, "SessionExpired",
                        f"session {session_id} expired after"
                        f" {config.session_timeout:.0f}s of inactivity",
                    )
                raise _HttpError(404, "UnknownSession", f"no session {session_id}")
            session.last_used = time.monotonic()
            return session

    def _locked(session: _Session):
        if not session.lock.acquire(blocking=False):
            raise _HttpError(
                409, "SessionBusy",
                f"session {session.id} is processing another request",
            )
        return session.lock

    def _state(session: _Session) -> dict:
        problem = session.problem
        variables = []
        for instance_id in sorted(problem.instances):
            instance = problem.instances[instance_id]
            for base in sorted(instance.variable_instances):
                name = instance.variable_instances[base]
                definition = schema.variables[base]
                variables.append(
                    {
                        "name": name,
                        "base": base,
                        "instance": instance_id,
                        "symbol": definition.symbol,
                        "unit": definition.si_unit,
                        "known": name in problem.knowns,
                        "value": problem.knowns.get(name),
                        "provenance": problem.provenance.get(name),
                        "target": name in problem.targets,
                    }
                )
        return {
            "session_id": session.id,
            "process_class": problem.process_class.name,
            "status": problem.status,
            "material": problem.material_name,
            "pending_choices": [
                {
                    "instance": choice.instance,
                    "kind": choice.kind,
                    "attribute": choice.attribute,
                    "options": list(choice.options),
                }
                for choice in pending_choices(problem)
            ],
            "attributes": {
                instance_id: problem.instances[instance_id].effective_attributes()
                for instance_id in sorted(problem.instances)
            },
            "variables": variables,
            "knowns": dict(sorted(problem.knowns.items())),
            "targets": list(problem.targets),
            "targets_explicit": problem.targets_explicit,
        }

    def _field(payload: dict, key: str):
        if not isinstance(payload, dict) or key not in payload:
            raise _HttpError(400, "BadRequest", f"request body needs a {key!r} field")
        return payload[key]

    @app.get("/api/process-classes")
    def list_process_classes():
        return {
            "process_classes": [
                {
                    "name": cls.name,
                    "description": cls.description,
                    "state_count": cls.state_count,
                    "change_count": cls.change_count,
                }
                for cls in process_classes()
            ]
        }

    @app.get("/api/materials")
    def list_materials():
        table = materials_table(config.data_dir)
        return {
            "materials": [
                {
                    "name": record.name,
                    "molar_mass": record.molar_mass,
                    "specific_gas_constant": record.specific_gas_constant,
                    "cv": record.cv,
                    "cp": record.cp,
                    "kappa": record.kappa,
                    "is_ideal_gas": record.is_ideal_gas,
                }
                for record in sorted(table.values(), key=lambda r: r.name)
            ]
        }

    @app.post("/api/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        name = _field(payload, "process_class")
        problem = create_problem(name, schema=schema, data_dir=config.data_dir)
        session = _Session(id=secrets.token_urlsafe(16), problem=problem)
        with store_lock:
            _purge()
            sessions[session.id] = session
        return _state(session)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _state(_get_session(session_id))

    @app.delete("/api/sessions/{session_id}")
    def delete_session(session_id: str):
        session = _get_session(session_id)
        with store_lock:
            sessions.pop(session.id, None)
        return {"deleted": session.id}

    @app.post("/api/sessions/{session_id}/attributes")
    def post_attribute(session_id: str, payload: dict = Body(...)):
        session = _get_session(session_id)
        lock = _locked(session)
        try:
            set_attribute(
                session.problem,
                str(_field(payload, "instance")),
                str(_field(payload, "attribute")),
                _field(payload, "value"),
            )
            return _state(session)
        finally:
            lock.release()

    @app.post("/api/sessions/{session_id}/values")
    def post_value(session_id: str, payload: dict = Body(...)):
        session = _get_session(session_id)
        lock = _locked(session)
        try:
            set_value(session.problem, str(_field(payload, "name")), _field(payload, "value"))
            return _state(session)
        finally:
            lock.release()

    @app.post("/api/sessions/{session_id}/targets")
    def post_targets(session_id: str, payload: dict = Body(...)):
        session = _get_session(session_id)
        lock = _locked(session)
        try:
            targets = _field(payload, "targets")
            if not isinstance(targets, list):
                raise _HttpError(400, "BadRequest", "'targets' must be a list")
            set_targets(session.problem, [str(t) for t in targets])
            return _state(session)
        finally:
            lock.release()

    @app.get("/api/sessions/{session_id}/document")
    def get_document(session_id: str):
        session = _get_session(session_id)
        return {"session_id": session.id, "document": serialize_problem(session.problem)}

    @app.post("/api/sessions/{session_id}/solve")
    def solve(session_id: str, graph: str | None = Query(default=None)):
        if graph not in (None, "json", "dot"):
            raise _HttpError(
                400, "BadRequest", "graph must be 'json' or 'dot' when present"
            )
        session = _get_session(session_id)
        lock = _locked(session)
        try:
            # the solver finalizes a copy, so the session stays editable
            try:
                outcome = solve_problem_detailed(session.problem)
            except ThermosolveError as exc:
                for exc_type, stage in _STAGE_BY_TYPE:
                    if isinstance(exc, exc_type):
                        exc.details.setdefault("stage", stage)
                        break
                raise
            body: dict = {
                "session_id": session.id,
                "report": to_json(outcome.report),
            }
            if graph == "json":
                body["graph"] = export_reasoning_graph(outcome.graph)
            elif graph == "dot":
                body["graph"] = reasoning_graph_to_dot(export_reasoning_graph(outcome.graph))
            return body
        finally:
            lock.release()

    return app


def run_service(config: ServiceConfig | None = None) -> None:
    """Blocking uvicorn server; the CLI 'serve' command ends up here."""
    import uvicorn

    config = config or ServiceConfig()
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
