"""Local HTTP service exposing live staircase sessions to a browser client.

Sessions live in memory keyed by id, with optional append-only JSONL
persistence on every state change. Rendering stays server-side so the
pixel quantization of disparity remains authoritative in one place; the
correct orientation of the pending trial is never disclosed in any
response, only in the stored record of answered trials.
"""

from __future__ import annotations

import os
import threading
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .errors import StereoacuityError
from .geometry import (
    DEFAULT_N_LEVELS,
    DEFAULT_REFERENCE_M,
    DisplayProfile,
    LevelTable,
    build_level_table,
    round_half_up,
)
from .ol import is_ol
from .persist import SessionLog, level_table_to_dict, record_to_dict
from .pngio import to_png_bytes
from .renderer import DEFAULT_DOT_COVERAGE, Orientation, StereogramSpec, render
from .staircase import StaircaseSession, make_record

DEFAULT_PORT = int(os.environ.get("STEREO_PORT", "8787"))


class CreateSessionBody(BaseModel):
    ppi: float = Field(gt=0)
    distance_m: float = Field(gt=0)
    seed: Optional[int] = Field(default=None, ge=0)
    width_px: int = Field(default=2048, gt=0)
    height_px: int = Field(default=1536, gt=0)
    n_levels: int = Field(default=DEFAULT_N_LEVELS, ge=1)
    reference_m: float = Field(default=DEFAULT_REFERENCE_M, gt=0)
    dot_coverage: float = Field(default=DEFAULT_DOT_COVERAGE, gt=0, lt=1)


class ResponseBody(BaseModel):
    orientation: Orientation
    elapsed_ms: int = Field(default=0, ge=0)


class LiveSession:
    def __init__(
        self,
        session_id: str,
        profile: DisplayProfile,
        table: LevelTable,
        seed: int,
        reference_m: float,
        dot_coverage: float,
    ):
        self.session_id = session_id
        self.profile = profile
        self.reference_m = reference_m
        self.dot_coverage = dot_coverage
        self.staircase = StaircaseSession(table, seed)
        self.lock = threading.Lock()
        self.created_at = make_record(
            self.staircase, profile=profile, reference_m=reference_m, session_id=session_id
        ).created_at

    def record(self):
        return make_record(
            self.staircase,
            profile=self.profile,
            reference_m=self.reference_m,
            session_id=self.session_id,
            created_at=self.created_at,
        )

    def stimulus_spec(self) -> StereogramSpec:
        # One derived seed per trial: repeated GETs of the same trial
        # return the identical image.
        trial_index = len(self.staircase.trials)
        derived = int(
            np.random.SeedSequence([self.staircase.seed, trial_index]).generate_state(1)[0]
        )
        return StereogramSpec(
            profile=self.profile,
            distance_m=self.staircase.table.distance_m,
            level=self.staircase.current_level,
            orientation=self.staircase.pending_orientation,
            seed=derived,
            dot_coverage=self.dot_coverage,
        )


class SessionStore:
    def __init__(self, log_path=None):
        self._sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()
        self.log = SessionLog(log_path) if log_path else None

    def create(self, body: CreateSessionBody) -> LiveSession:
        import uuid

        profile = DisplayProfile(ppi=body.ppi, width_px=body.width_px, height_px=body.height_px)
        table = build_level_table(
            profile, body.distance_m, n_levels=body.n_levels, reference_m=body.reference_m
        )
        seed = body.seed if body.seed is not None else int.from_bytes(os.urandom(4), "big")
        session = LiveSession(
            session_id=str(uuid.uuid4()),
            profile=profile,
            table=table,
            seed=seed,
            reference_m=body.reference_m,
            dot_coverage=body.dot_coverage,
        )
        with self._lock:
            self._sessions[session.session_id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Optional[LiveSession]:
        with self._lock:
            return self._sessions.get(session_id)

    def persist(self, session: LiveSession) -> None:
        if self.log is not None:
            self.log.append(session.record())


def _encode_outcome(outcome):
    if outcome is None:
        return None
    if is_ol(outcome):
        return "OL"
    return float(outcome)


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="stereoacuity session service")
    app.state.store = store if store is not None else SessionStore()
    # The browser client is served statically from another origin; the
    # service itself stays loopback-bound.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def validation_as_400(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(StereoacuityError)
    async def domain_as_400(request: Request, exc: StereoacuityError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions")
    async def create_session(body: CreateSessionBody):
        session = app.state.store.create(body)
        return {
            "session_id": session.session_id,
            "seed": session.staircase.seed,
            "level_table": level_table_to_dict(session.staircase.table),
        }

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        session = app.state.store.get(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return record_to_dict(session.record())

    @app.get("/sessions/{session_id}/stimulus")
    async def get_stimulus(session_id: str):
        session = app.state.store.get(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        if session.staircase.finished:
            return JSONResponse(status_code=409, content={"detail": "session finished"})
        png = to_png_bytes(render(session.stimulus_spec()))
        return Response(content=png, media_type="image/png")

    @app.post("/sessions/{session_id}/response")
    async def post_response(session_id: str, body: ResponseBody):
        session = app.state.store.get(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        if not session.lock.acquire(blocking=False):
            return JSONResponse(
                status_code=409, content={"detail": "another response is in flight"}
            )
        try:
            if session.staircase.finished:
                return JSONResponse(status_code=409, content={"detail": "session finished"})
            trial = session.staircase.respond(body.orientation, elapsed_ms=body.elapsed_ms)
            app.state.store.persist(session)
            outcome = session.staircase.outcome
            payload = {
                "correct": trial.correct,
                "finished": session.staircase.finished,
                "trial_count": len(session.staircase.trials),
                "outcome": _encode_outcome(outcome),
                "outcome_rounded": (
                    None
                    if outcome is None
                    else ("OL" if is_ol(outcome) else round_half_up(outcome))
                ),
            }
            return payload
        finally:
            session.lock.release()

    return app


def serve(port: int = DEFAULT_PORT, host: str = "127.0.0.1", log_path=None) -> None:
    import uvicorn

    app = create_app(SessionStore(log_path=log_path))
    uvicorn.run(app, host=host, port=port, log_level="warning")
