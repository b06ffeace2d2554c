"""Service boundary: configuration, session lifecycle, and the HTTP API.

Every mutating endpoint appends events to storage before responding, and
turns are serialized per session: a second concurrent turn on the same
session is rejected as busy rather than queued (the chat UI disables input
while a reply is in flight, so queuing would only invite out-of-order
confusion). Distinct sessions advance concurrently without shared state.
"""

from __future__ import annotations

import hmac
import secrets
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import analytics, orchestrator, prompts, sentiment, storage, survey
from .gateway import (
    EmptyCompletion,
    GenerationParams,
    ProviderRejected,
    ProviderUnavailable,
    ReplySource,
    default_timeout_s,
)
from .orchestrator import (
    OrchestrationContext,
    OrchestrationError,
    Session,
    SessionClosed,
    Transition,
)
from .survey import ProfileValidationError, RegistryError


class SessionBusy(Exception):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} has a turn in flight")


@dataclass(frozen=True)
class ServiceConfig:
    """Startup configuration; invalid values refuse to start the process."""

    port: int = 8000
    data_dir: Path = Path("./data")
    registry_path: Path = survey.DEFAULT_REGISTRY_PATH
    lexicon_path: Path = sentiment.DEFAULT_LEXICON_PATH
    prompts_path: Path = prompts.DEFAULT_PROMPTS_PATH
    stopwords_path: Path = analytics.DEFAULT_STOPWORDS_PATH
    elaboration_word_threshold: int = orchestrator.DEFAULT_ELABORATION_WORD_THRESHOLD
    seed: int | None = None  # None = fresh entropy per session
    admin_token: str = ""
    durable_writes: bool = True

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.elaboration_word_threshold < 1:
            raise ValueError("elaboration word threshold must be >= 1")
        for path in (self.registry_path, self.lexicon_path, self.prompts_path, self.stopwords_path):
            if not Path(path).exists():
                raise ValueError(f"configured path does not exist: {path}")


@dataclass
class SurveyService:
    """Owns the loaded configuration data, the event log, and live sessions."""

    config: ServiceConfig
    provider: ReplySource
    registry: list[survey.SurveyTemplate] = field(default_factory=list)
    log: storage.EventLog = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self.registry:
            self.registry = survey.load_registry(self.config.registry_path)
        survey.check_registry_coverage(self.registry)
        self.pack = prompts.load_prompt_pack(self.config.prompts_path)
        self.lexicon = sentiment.SentimentLexicon.from_file(self.config.lexicon_path)
        self.stopwords = analytics.load_stopwords(self.config.stopwords_path)
        if self.log is None:
            self.log = storage.EventLog(
                self.config.data_dir, durable=self.config.durable_writes
            )
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._counter = 0
        self._contexts: dict[str, OrchestrationContext] = {}
        for session_id in self.log.session_ids():
            session = storage.replay_session(self.log, session_id, self.registry)
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()

    def score(self, text: str) -> sentiment.SentimentScores:
        return sentiment.score_text(text, self.lexicon)

    def context_for(self, template_id: str) -> OrchestrationContext:
        ctx = self._contexts.get(template_id)
        if ctx is None:
            template = next(t for t in self.registry if t.id == template_id)
            ctx = OrchestrationContext(
                template=template,
                pack=self.pack,
                compound_scorer=lambda text: self.score(text).compound,
                elaboration_word_threshold=self.config.elaboration_word_threshold,
                generation_params=GenerationParams(timeout_s=default_timeout_s()),
            )
            self._contexts[template_id] = ctx
        return ctx

    def _next_seed(self) -> int:
        if self.config.seed is None:
            return secrets.randbits(32)
        seed = self.config.seed + self._counter
        self._counter += 1
        return seed

    def get_session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise storage.UnknownSession(session_id)
        return session

    def _commit(self, transition: Transition) -> Transition:
        self.log.append(transition.session.id, transition.events)
        self._sessions[transition.session.id] = transition.session
        return transition

    def create_session(
        self, role: str, details: dict, context_notes: str | None = None
    ) -> Transition:
        profile = survey.validate_role_details(survey.parse_role(role), details)
        if context_notes:
            profile = replace(profile, context_notes=context_notes)
        template = survey.resolve_template(profile, self.registry)
        ctx = self.context_for(template.id)
        transition = orchestrator.start_session(ctx, profile, self._next_seed())
        self._locks[transition.session.id] = threading.Lock()
        return self._commit(transition)

    def _locked(self, session_id: str) -> threading.Lock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise storage.UnknownSession(session_id)
        return lock

    def _run_turn(self, session_id: str, operation) -> Transition:
        lock = self._locked(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        try:
            session = self.get_session(session_id)
            ctx = self.context_for(session.template_id)
            return self._commit(operation(ctx, session))
        finally:
            lock.release()

    def post_message(self, session_id: str, text: str) -> Transition:
        return self._run_turn(
            session_id,
            lambda ctx, session: orchestrator.advance_turn(ctx, session, text, self.provider),
        )

    def choose_topic(self, session_id: str, choice: str) -> Transition:
        return self._run_turn(
            session_id,
            lambda ctx, session: orchestrator.select_topic(ctx, session, choice),
        )

    def switch_topic(self, session_id: str) -> Transition:
        return self._run_turn(
            session_id,
            lambda ctx, session: orchestrator.request_topic_switch(ctx, session),
        )

    def submit_feedback(self, session_id: str, payload: dict) -> Transition:
        try:
            parsed = analytics.FeedbackSurvey.from_dict(payload)
        except (KeyError, ValueError) as exc:
            raise ProfileValidationError(f"invalid feedback payload: {exc}") from exc
        return self._run_turn(
            session_id,
            lambda ctx, session: orchestrator.submit_feedback(ctx, session, parsed),
        )

    def available_topics(self, session_id: str) -> list[survey.Topic]:
        session = self.get_session(session_id)
        ctx = self.context_for(session.template_id)
        return orchestrator.available_topics(ctx, session)

    def collected_surveys(self) -> list[analytics.FeedbackSurvey]:
        surveys = []
        for record in storage.feedback_records(self.log):
            surveys.append(
                analytics.FeedbackSurvey.from_dict(
                    {
                        "satisfaction": record["satisfaction"],
                        "reuse_likelihood": record["reuse_likelihood"],
                        "comprehension": record["comprehension"],
                        "preference": record["preference"],
                        "comment": record["comment"] or None,
                    }
                )
            )
        return surveys

    def report(self) -> dict:
        return analytics.build_report(
            self.collected_surveys(), self.score, self.stopwords
        )

    def export_bytes(self, what: storage.ExportKind, fmt: storage.ExportFormat) -> bytes:
        return storage.export(self.log, what, fmt, score_fn=self.score)


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------


class CreateSessionBody(BaseModel):
    role: str
    details: dict = {}
    context_notes: str | None = None


class MessageBody(BaseModel):
    text: str


class TopicBody(BaseModel):
    topic_id: str


class FeedbackBody(BaseModel):
    satisfaction: str
    reuse_likelihood: str
    comprehension: str
    preference: str
    comment: str | None = None


def _topic_json(topic: survey.Topic) -> dict:
    return {"id": topic.id, "title": topic.title, "sensitive": topic.sensitive}


def _turn_json(transition: Transition) -> dict:
    result = transition.result
    return {
        "session_id": transition.session.id,
        "message": result.assistant_text,
        "phase": {
            "kind": result.new_phase.kind.value,
            "topic_id": result.new_phase.topic_id,
        },
        "offered_topics": [_topic_json(t) for t in result.offered_topics],
        "elaboration_requested": result.elaboration_requested,
    }


_ERROR_STATUS: list[tuple[type[Exception], int]] = [
    (ProfileValidationError, 400),
    (orchestrator.EmptyInput, 400),
    (analytics.EmptyInput, 400),
    (analytics.BadRange, 400),
    (storage.UnknownSession, 404),
    (SessionBusy, 409),
    (SessionClosed, 409),
    (OrchestrationError, 409),
    (storage.SequenceConflict, 409),
    (storage.SessionAlreadyClosed, 409),
    (ProviderUnavailable, 503),
    (ProviderRejected, 502),
    (EmptyCompletion, 502),
    (RegistryError, 500),
    (storage.StorageError, 500),
]


def _error_response(exc: Exception) -> JSONResponse:
    for exc_type, status in _ERROR_STATUS:
        if isinstance(exc, exc_type):
            return JSONResponse(
                status_code=status,
                content={"error": type(exc).__name__, "message": str(exc)},
            )
    raise exc


def create_app(service: SurveyService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="pulsechat", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(Exception)
    async def handle_domain_error(_request, exc: Exception):  # pragma: no cover
        return _error_response(exc)

    for exc_type, _status in _ERROR_STATUS:
        app.add_exception_handler(exc_type, lambda _req, exc: _error_response(exc))

    @app.exception_handler(HTTPException)
    async def handle_http_error(_request, exc: HTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": "HttpError", "message": str(exc.detail)},
        )

    from fastapi.exceptions import RequestValidationError

    @app.exception_handler(RequestValidationError)
    async def handle_body_error(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "ValidationError", "message": str(exc.errors()[:3])},
        )

    def require_admin(authorization: str | None = Header(default=None)) -> None:
        expected = service.config.admin_token
        supplied = ""
        if authorization and authorization.lower().startswith("bearer "):
            supplied = authorization[7:]
        if not expected or not hmac.compare_digest(supplied, expected):
            raise HTTPException(
                status_code=401, detail="admin endpoints require a valid bearer token"
            )

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        transition = service.create_session(body.role, body.details, body.context_notes)
        return _turn_json(transition)

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody) -> dict:
        return _turn_json(service.post_message(session_id, body.text))

    @app.get("/api/sessions/{session_id}/topics")
    def list_topics(session_id: str) -> dict:
        session = service.get_session(session_id)
        topics = service.available_topics(session_id)
        return {
            "session_id": session_id,
            "phase": {
                "kind": session.phase.kind.value,
                "topic_id": session.phase.topic_id,
            },
            "topics": [_topic_json(t) for t in topics],
        }

    @app.post("/api/sessions/{session_id}/topic")
    def choose_topic(session_id: str, body: TopicBody) -> dict:
        return _turn_json(service.choose_topic(session_id, body.topic_id))

    @app.post("/api/sessions/{session_id}/switch-topic")
    def switch_topic(session_id: str) -> dict:
        return _turn_json(service.switch_topic(session_id))

    @app.post("/api/sessions/{session_id}/feedback")
    def submit_feedback(session_id: str, body: FeedbackBody) -> dict:
        return _turn_json(service.submit_feedback(session_id, body.model_dump()))

    @app.get("/api/admin/report")
    def admin_report(_auth: None = Depends(require_admin)) -> dict:
        return service.report()

    @app.get("/api/admin/export")
    def admin_export(
        what: str = Query(...),
        format: str = Query("csv"),
        _auth: None = Depends(require_admin),
    ) -> Response:
        try:
            kind = storage.ExportKind(what)
            fmt = storage.ExportFormat(format)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        payload = service.export_bytes(kind, fmt)
        media = "text/csv" if fmt is storage.ExportFormat.CSV else "application/x-ndjson"
        return Response(content=payload, media_type=media)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
