"""HTTP session service exposing the dialogue protocol.

State lives in process: a scenario registry and a session store with a
per-session lock, so operations on one session are serialized while
distinct sessions proceed concurrently.  Every response that mutates a
session returns the full session view; once a session ends its trace is
persisted to the trace directory and served at ``/trace``.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .arguments import trace_to_dict
from .beliefs import IDENTITY_PARAMS, WeightingParams
from .scenarios import AgentPolicy, Scenario, ScenarioError, scenario_from_dict, load_scenario_dir
from .session import ENDED, PhaseError, Session, SessionError


class CreateSessionBody(BaseModel):
    scenario_id: str
    policy: str = "greedy_believable"
    script: list[str] = []
    participant: Optional[str] = None
    initial_params: Optional[dict] = None
    learn_live: bool = True


class ConfidenceBody(BaseModel):
    value: float


class CounterBody(BaseModel):
    choice_id: str
    confidence: float


class RankingBody(BaseModel):
    order: list[str]


class ArgumentRankingBody(BaseModel):
    order: list[str]


class EndBody(BaseModel):
    reason: str = "ended_by_human"


class _Store:
    def __init__(self):
        self.scenarios: dict[str, Scenario] = {}
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.registry_lock = threading.Lock()


def _scenario_summary(s: Scenario) -> dict:
    return {
        "id": s.id,
        "atoms": list(s.language.atoms),
        "n_arguments": len(s.pool),
        "candidate_models": [c.id for c in s.candidate_models],
        "max_rounds": s.max_rounds,
        "confidence_scale": None if s.confidence_scale is None else list(s.confidence_scale),
    }


def session_view(session: Session) -> dict:
    scenario = session.scenario
    pending = None
    if session._pending_argument is not None:
        entry = scenario.entry(session._pending_argument)
        pending = {"id": entry.argument.id, "display": entry.display_text()}
    offered = [
        {
            "id": arg_id,
            "display": scenario.entry(arg_id).display_text(),
        }
        for arg_id in session.offered_counters
    ]
    return {
        "id": session.id,
        "scenario_id": scenario.id,
        "phase": session.phase,
        "round": session.round,
        "max_rounds": session.max_rounds,
        "ended_reason": session.ended_reason,
        "confidence_scale": (
            None if scenario.confidence_scale is None else list(scenario.confidence_scale)
        ),
        "transcript": [
            {
                "t": ev.t,
                "speaker": ev.speaker,
                "argument": ev.argument_id,
                "display": scenario.entry(ev.argument_id).display_text(),
                "confidence": ev.confidence,
                "attacks": ev.attacks,
            }
            for ev in session.events
        ],
        "pending_argument": pending,
        "offered_counters": offered,
        "candidates": session.candidate_probabilities(),
        "belief": session.belief.to_payload(),
        "live_params": {"s": session.live_params.s, "r": session.live_params.r},
        "model_rankings": [
            {"round": r, "order": list(order)} for r, order in session.rankings
        ],
        "final_argument_ranking": list(session.final_argument_ranking),
    }


def create_app(
    scenario_dir: str | Path | None = None,
    trace_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="persona dialogue service")
    store = _Store()
    app.state.store = store
    app.state.trace_dir = Path(trace_dir) if trace_dir else None

    if scenario_dir:
        store.scenarios.update(load_scenario_dir(scenario_dir))

    @app.exception_handler(SessionError)
    async def _session_error(request: Request, exc: SessionError):
        status = 409 if isinstance(exc, PhaseError) or exc.code == "already_ended" else 400
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": str(exc), "phase": exc.phase},
        )

    @app.exception_handler(ScenarioError)
    async def _scenario_error(request: Request, exc: ScenarioError):
        return JSONResponse(
            status_code=400,
            content={"code": "invalid_scenario", "message": str(exc), "phase": ""},
        )

    @app.exception_handler(KeyError)
    async def _not_found(request: Request, exc: KeyError):
        return JSONResponse(
            status_code=404,
            content={"code": "not_found", "message": str(exc), "phase": ""},
        )

    @app.get("/api/health")
    def health():
        return {"status": "ok", "scenarios": len(store.scenarios)}

    @app.get("/api/scenarios")
    def list_scenarios():
        return [_scenario_summary(s) for s in store.scenarios.values()]

    @app.post("/api/scenarios", status_code=201)
    def add_scenario(doc: dict):
        scenario = scenario_from_dict(doc)
        with store.registry_lock:
            store.scenarios[scenario.id] = scenario
        return _scenario_summary(scenario)

    @app.get("/api/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str):
        return _scenario_summary(store.scenarios[scenario_id])

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        scenario = store.scenarios[body.scenario_id]
        policy = AgentPolicy(body.policy, tuple(body.script))
        params = IDENTITY_PARAMS
        if body.initial_params is not None:
            params = WeightingParams(
                float(body.initial_params["s"]), float(body.initial_params["r"])
            )
        session_id = uuid.uuid4().hex[:12]
        session = Session(
            session_id,
            scenario,
            policy=policy,
            initial_params=params,
            learn_live=body.learn_live,
            participant_id=body.participant,
        )
        with store.registry_lock:
            store.sessions[session_id] = session
            store.locks[session_id] = threading.Lock()
        return session_view(session)

    def _locked(session_id: str):
        session = store.sessions[session_id]
        return session, store.locks[session_id]

    def _persist_if_ended(session: Session) -> None:
        if session.phase == ENDED and app.state.trace_dir is not None and session.has_trace():
            session.persist(app.state.trace_dir)
            session.persist_log(app.state.trace_dir)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session, lock = _locked(session_id)
        with lock:
            return session_view(session)

    @app.post("/api/sessions/{session_id}/confidence")
    def post_confidence(session_id: str, body: ConfidenceBody):
        session, lock = _locked(session_id)
        with lock:
            session.submit_confidence(body.value)
            _persist_if_ended(session)
            return session_view(session)

    @app.post("/api/sessions/{session_id}/counter")
    def post_counter(session_id: str, body: CounterBody):
        session, lock = _locked(session_id)
        with lock:
            session.submit_counter(body.choice_id, body.confidence)
            _persist_if_ended(session)
            return session_view(session)

    @app.post("/api/sessions/{session_id}/ranking")
    def post_ranking(session_id: str, body: RankingBody):
        session, lock = _locked(session_id)
        with lock:
            session.submit_ranking(body.order)
            _persist_if_ended(session)
            return session_view(session)

    @app.post("/api/sessions/{session_id}/argument-ranking")
    def post_argument_ranking(session_id: str, body: ArgumentRankingBody):
        session, lock = _locked(session_id)
        with lock:
            session.set_final_argument_ranking(body.order)
            _persist_if_ended(session)
            return session_view(session)

    @app.post("/api/sessions/{session_id}/end")
    def post_end(session_id: str, body: EndBody):
        session, lock = _locked(session_id)
        with lock:
            session.end(body.reason)
            _persist_if_ended(session)
            return session_view(session)

    @app.get("/api/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        session, lock = _locked(session_id)
        with lock:
            return trace_to_dict(session.trace())

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
