"""HTTP layer exposing interview sessions to browser and scripted clients.

One model is loaded at startup and never mutated. Sessions live in memory
under sequential ids; requests touching the same session are serialized by
a per-session lock, so concurrent sessions cannot interfere. Completed
transcripts are optionally persisted as JSON lines, one file per session.

Every response carries ``schema_version``; errors are ``{code, message}``
JSON bodies.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from vaq.bank import Question
from vaq.data import MISSING
from vaq.io import load_model
from vaq.model import PosteriorModel
from vaq.session import (
    PendingQuestionError,
    Session,
    SessionStoppedError,
    merged_session_config,
    session_config_from_dict,
    top_causes,
)

SCHEMA_VERSION = 1

_VALUE_MAP = {"yes": 1, "no": 0, "dont_know": MISSING}


class ApiError(Exception):
    """Error surfaced to the client as a {code, message} JSON body."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class SessionHandle:
    """One live interview held by the server."""

    id: str
    created_at: float
    config: dict[str, Any]
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory session registry with sequential, deterministic ids."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._handles: dict[str, SessionHandle] = {}
        self._counter = 0

    def create(self, session: Session, config: dict[str, Any]) -> SessionHandle:
        with self._lock:
            self._counter += 1
            handle = SessionHandle(
                id=f"s-{self._counter:06d}",
                created_at=time.time(),
                config=config,
                session=session,
            )
            self._handles[handle.id] = handle
            return handle

    def get(self, session_id: str) -> SessionHandle:
        with self._lock:
            try:
                return self._handles[session_id]
            except KeyError:
                raise ApiError(
                    404, "unknown_session", f"no session {session_id!r}"
                ) from None


def _question_payload(question: Question) -> dict[str, Any]:
    return {"id": question.id, "index": question.index, "text": question.text}


def _top3(model: PosteriorModel, session: Session) -> list[dict[str, Any]]:
    entries = top_causes(session.classify().probs)
    return [
        {**entry, "label": model.cause_labels[entry["cause"] - 1]}
        for entry in entries
    ]


def _final_result(model: PosteriorModel, session: Session) -> dict[str, Any]:
    result = session.classify()
    return {
        "cause": result.cause,
        "cause_label": model.cause_labels[result.cause - 1],
        "posterior": [float(p) for p in result.probs],
        "length": session.num_answered,
        "reason": session.stop_decision.reason,
    }


def _persist_transcript(directory: Path, handle: SessionHandle) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / f"{handle.id}.jsonl", "w", encoding="utf-8") as fh:
        for record in handle.session.transcript():
            json.dump(record, fh)
            fh.write("\n")


def create_app(
    model: PosteriorModel | None = None,
    *,
    model_path: str | Path | None = None,
    transcript_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Application factory: give either a loaded model or a path to one."""
    if (model is None) == (model_path is None):
        raise ValueError("give exactly one of model or model_path")
    if model is None:
        model = load_model(model_path)
    transcripts = Path(transcript_dir) if transcript_dir else None

    app = FastAPI(title="adaptive interview service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore()
    app.state.model = model
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "invalid_request", "message": str(exc)}
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(
        _request: Request, exc: StarletteHTTPException
    ) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": "http_error", "message": str(exc.detail)},
        )

    @app.post("/v1/sessions")
    def create_session(
        overrides: dict[str, Any] | None = Body(default=None),
    ) -> JSONResponse:
        try:
            config_dict = merged_session_config(overrides)
            config = session_config_from_dict(config_dict, model.bank)
            session = Session(model, config)
        except ValueError as exc:
            raise ApiError(400, "invalid_config", str(exc)) from exc
        handle = store.create(session, config_dict)
        with handle.lock:
            payload = {
                "schema_version": SCHEMA_VERSION,
                "session_id": handle.id,
                "t": 0,
                "first_question": _question_payload(session.next_question()),
                "class_posterior_top3": _top3(model, session),
            }
        return JSONResponse(payload)

    @app.post("/v1/sessions/{session_id}/responses")
    def submit_response(
        session_id: str, body: dict[str, Any] = Body(...)
    ) -> JSONResponse:
        handle = store.get(session_id)
        raw_value = body.get("value")
        if raw_value not in _VALUE_MAP:
            raise ApiError(
                400,
                "invalid_value",
                f"value must be one of {sorted(_VALUE_MAP)}, got {raw_value!r}",
            )
        question_id = body.get("question_id")
        try:
            model.bank.index_of(question_id)
        except (KeyError, TypeError):
            raise ApiError(
                400, "unknown_question", f"no question {question_id!r}"
            ) from None
        with handle.lock:
            session = handle.session
            try:
                decision = session.record_response(question_id, _VALUE_MAP[raw_value])
            except SessionStoppedError as exc:
                raise ApiError(409, "session_stopped", str(exc)) from exc
            except PendingQuestionError as exc:
                raise ApiError(409, "question_mismatch", str(exc)) from exc
            payload: dict[str, Any] = {
                "schema_version": SCHEMA_VERSION,
                "session_id": handle.id,
                "t": session.num_answered,
                "class_posterior_top3": _top3(model, session),
            }
            record = session.transcript()[-1]
            if "stop_fraction" in record:
                payload["stop_fraction"] = record["stop_fraction"]
            if decision.stop:
                payload["final_result"] = _final_result(model, session)
                if transcripts is not None:
                    _persist_transcript(transcripts, handle)
            else:
                payload["next_question"] = _question_payload(session.next_question())
        return JSONResponse(payload)

    @app.get("/v1/sessions/{session_id}")
    def get_state(session_id: str) -> JSONResponse:
        handle = store.get(session_id)
        with handle.lock:
            session = handle.session
            payload = {
                "schema_version": SCHEMA_VERSION,
                "session_id": handle.id,
                "t": session.num_answered,
                "stopped": session.stopped,
                "transcript": session.transcript(),
                "class_posterior_top3": _top3(model, session),
            }
            if session.stopped:
                payload["final_result"] = _final_result(model, session)
            else:
                payload["next_question"] = _question_payload(session.next_question())
        return JSONResponse(payload)

    @app.get("/v1/model/info")
    def model_info() -> JSONResponse:
        return JSONResponse(
            {
                "schema_version": SCHEMA_VERSION,
                "num_causes": model.num_causes,
                "num_questions": model.bank.size,
                "cause_labels": list(model.cause_labels),
            }
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
