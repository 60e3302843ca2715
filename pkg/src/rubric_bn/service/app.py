"""HTTP API hosting live assessment sessions.

Status codes: 400 malformed body, 404 unknown model/session, 409 for
dominance-inconsistent or impossible evidence (conflicting cells listed),
422 for rubric/parameter documents that parse but violate their invariants.
The service binds localhost by default and keeps no authentication.
"""

from __future__ import annotations

import hashlib
import json
import tempfile
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..compiler import compile_network
from ..errors import (
    EncodingError,
    ImpossibleEvidenceError,
    ParseError,
    RubricBnError,
    ValidationError,
)
from ..inference import infer, rank_tasks
from ..io import params_from_dict, params_to_dict, rubric_from_dict, rubric_to_dict
from ..scoring import probabilistic_score
from . import schemas
from .sessions import (
    CompiledModel,
    Event,
    Session,
    SessionStore,
    evidence_from_events,
    now_iso,
    surviving_observations,
)


class _HttpError(Exception):
    """Internal carrier for a non-2xx response."""

    def __init__(self, status: int, message: str, conflicts: list | None = None):
        self.status = status
        self.message = message
        self.conflicts = conflicts or []
        super().__init__(message)


class ModelRegistry:
    """Compiled models keyed by a digest of their source documents."""

    def __init__(self):
        self._models: dict[str, CompiledModel] = {}
        self._lock = threading.Lock()

    def register(self, doc, params) -> str:
        canonical = json.dumps(
            {"rubric": rubric_to_dict(doc), "params": params_to_dict(params)},
            sort_keys=True,
        )
        model_id = hashlib.sha256(canonical.encode()).hexdigest()[:12]
        network = compile_network(doc.rubric, list(doc.tasks), params)
        with self._lock:
            self._models[model_id] = CompiledModel(
                model_id=model_id, doc=doc, params=params, network=network
            )
        return model_id

    def get(self, model_id: str) -> CompiledModel | None:
        with self._lock:
            return self._models.get(model_id)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._models)


def _report_model(report) -> schemas.PosteriorReportModel:
    return schemas.PosteriorReportModel(
        posteriors=dict(report.posteriors),
        evidence_digest=report.evidence_digest,
        log_likelihood=report.log_likelihood,
    )


def _conflict_cells(model: CompiledModel, conflicts) -> list[dict]:
    cells = []
    for item in conflicts:
        if isinstance(item, tuple) and len(item) == 3:
            task, r, c = item
            cells.append({"task": task, "r": r, "c": c})
        else:
            node = model.network.answers_by_id.get(str(item))
            if node is not None:
                cells.append({"task": node.task, "r": node.coord.r, "c": node.coord.c})
            else:
                cells.append({"answer": str(item)})
    return cells


def create_app(
    session_dir: str | Path | None = None,
    console_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; session event logs persist under ``session_dir``."""
    app = FastAPI(title="rubric-bn assessment service", version="0.1.0")
    if session_dir is None:
        tmp = tempfile.TemporaryDirectory(prefix="rubric-bn-sessions-")
        app.state.session_tmp = tmp  # keeps the directory alive with the app
        session_dir = tmp.name
    app.state.registry = ModelRegistry()
    app.state.sessions = SessionStore(session_dir)

    if console_dir is not None and Path(console_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(_HttpError)
    async def http_error(request: Request, exc: _HttpError):
        body: dict = {"detail": exc.message}
        if exc.conflicts:
            body["conflicts"] = exc.conflicts
        return JSONResponse(status_code=exc.status, content=body)

    def _model_or_404(model_id: str) -> CompiledModel:
        model = app.state.registry.get(model_id)
        if model is None:
            raise _HttpError(404, f"unknown model {model_id!r}")
        return model

    def _session_or_404(session_id: str) -> tuple[Session, CompiledModel]:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise _HttpError(404, f"unknown session {session_id!r}")
        return session, _model_or_404(session.model_id)

    def _guarded_report(model: CompiledModel, events: list[Event]):
        try:
            evidence = evidence_from_events(model, events)
            return infer(model.network, evidence)
        except EncodingError as exc:
            raise _HttpError(409, str(exc), _conflict_cells(model, exc.conflicts))
        except ImpossibleEvidenceError as exc:
            raise _HttpError(
                409, str(exc), [{"answer": a, "value": v} for a, v in exc.evidence]
            )
        except (ValidationError, ParseError) as exc:
            raise _HttpError(422, str(exc))

    @app.post("/models", response_model=schemas.ModelCreated)
    def create_model(body: schemas.ModelCreateRequest):
        try:
            doc = rubric_from_dict(body.rubric)
            params = params_from_dict(body.params, name="params")
            model_id = app.state.registry.register(doc, params)
        except RubricBnError as exc:
            raise _HttpError(422, str(exc))
        return schemas.ModelCreated(model_id=model_id)

    @app.get("/models")
    def list_models():
        return {"models": app.state.registry.ids()}

    @app.get("/models/{model_id}", response_model=schemas.ModelInfo)
    def get_model(model_id: str):
        model = _model_or_404(model_id)
        return schemas.ModelInfo(
            model_id=model.model_id,
            provenance=model.network.provenance,
            rubric=rubric_to_dict(model.doc),
            params=params_to_dict(model.params),
            skills=[s.id for s in model.network.skills],
            tasks=list(model.network.tasks),
        )

    @app.post("/sessions", response_model=schemas.SessionCreated)
    def create_session(body: schemas.SessionCreateRequest):
        _model_or_404(body.model_id)
        session = app.state.sessions.create(body.model_id)
        return schemas.SessionCreated(session_id=session.id, model_id=session.model_id)

    @app.post(
        "/sessions/{session_id}/observations",
        response_model=schemas.PosteriorReportModel,
    )
    def post_observation(session_id: str, body: schemas.ObservationRequest):
        session, model = _session_or_404(session_id)
        with session.lock:
            event = Event(ts=now_iso(), type="observation", observation=body.model_dump())
            report = _guarded_report(model, session.events + [event])
            app.state.sessions.append(session, event)
        return _report_model(report)

    @app.delete(
        "/sessions/{session_id}/observations/latest",
        response_model=schemas.PosteriorReportModel,
    )
    def undo_latest(session_id: str):
        session, model = _session_or_404(session_id)
        with session.lock:
            if not surviving_observations(session.events):
                raise _HttpError(409, "nothing to undo")
            event = Event(ts=now_iso(), type="undo")
            report = _guarded_report(model, session.events + [event])
            app.state.sessions.append(session, event)
        return _report_model(report)

    @app.get(
        "/sessions/{session_id}/posteriors",
        response_model=schemas.PosteriorsWithScore,
    )
    def get_posteriors(session_id: str):
        session, model = _session_or_404(session_id)
        report = _guarded_report(model, session.snapshot())
        return schemas.PosteriorsWithScore(
            posteriors=dict(report.posteriors),
            evidence_digest=report.evidence_digest,
            log_likelihood=report.log_likelihood,
            probabilistic_score=probabilistic_score(report),
        )

    @app.get(
        "/sessions/{session_id}/whatif",
        response_model=schemas.PosteriorReportModel,
    )
    def whatif(
        session_id: str,
        task: str,
        r: int,
        c: int,
        value: int | None = None,
        kind: str | None = None,
    ):
        session, model = _session_or_404(session_id)
        if kind is None:
            kind = "achieved" if value is None else "obs"
        try:
            obs = schemas.ObservationRequest(task=task, kind=kind, r=r, c=c, value=value)
        except ValueError as exc:
            raise _HttpError(400, str(exc))
        event = Event(ts=now_iso(), type="observation", observation=obs.model_dump())
        report = _guarded_report(model, session.snapshot() + [event])
        return _report_model(report)

    @app.get(
        "/sessions/{session_id}/next-task",
        response_model=list[schemas.TaskSuggestion],
    )
    def next_task(session_id: str):
        session, model = _session_or_404(session_id)
        try:
            evidence = evidence_from_events(model, session.snapshot())
            ranked = rank_tasks(model.network, evidence)
        except ImpossibleEvidenceError as exc:
            raise _HttpError(409, str(exc))
        except RubricBnError as exc:
            raise _HttpError(422, str(exc))
        return [
            schemas.TaskSuggestion(task=task, expected_gain_bits=gain)
            for task, gain in ranked
        ]

    @app.get("/sessions/{session_id}/log", response_model=schemas.SessionLog)
    def get_log(session_id: str):
        session, _ = _session_or_404(session_id)
        return schemas.SessionLog(
            session_id=session.id,
            model_id=session.model_id,
            status=session.status,
            events=[
                schemas.SessionEvent(
                    ts=e.ts,
                    type=e.type,
                    observation=(
                        schemas.ObservationRequest(**e.observation)
                        if e.observation
                        else None
                    ),
                )
                for e in session.snapshot()
            ],
        )

    return app
