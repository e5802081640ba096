"""HTTP facade over worlds, sessions, and saved reports.

The map endpoint exposes 2-D geometry for rendering; session views never
reveal the goal while a session is active. Session state is guarded by a
per-session lock so concurrent requests serialize cleanly.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    DegenerateBelief,
    EmptyInput,
    IllegalTransition,
    InvalidArgument,
    MixedWorlds,
    NoPath,
    NonAdjacentMove,
    ParseError,
    UnknownViewpoint,
    UnparsableSentence,
    ValidationError,
    WayfinderError,
    WorldMismatch,
)
from .location import BowModel, train_bow
from .metrics import outcome_to_dict
from .pipeline import (
    EpisodeSpec,
    FinishEvent,
    MoveEvent,
    Session,
    SessionConfig,
    UtteranceEvent,
    episode_from_dict,
    new_session,
    session_step,
)
from .planner import CostModel, neutral_cost_model
from .synth import desc_token_examples, sample_episode
from .world import NavGraph, heading_between, world_from_dict

_STATUS = {
    ParseError: 400,
    ValidationError: 400,
    InvalidArgument: 400,
    EmptyInput: 400,
    MixedWorlds: 400,
    WorldMismatch: 400,
    UnknownViewpoint: 400,
    UnparsableSentence: 400,
    IllegalTransition: 409,
    NonAdjacentMove: 409,
    NoPath: 409,
    DegenerateBelief: 409,
}


class NotFound(WayfinderError):
    pass


def _status_for(err: WayfinderError) -> int:
    if isinstance(err, NotFound):
        return 404
    for cls, code in _STATUS.items():
        if isinstance(err, cls):
            return code
    return 400


@dataclass
class SessionRuntime:
    session: Session
    graph: NavGraph
    model: BowModel
    spec: EpisodeSpec
    lock: threading.Lock = field(default_factory=threading.Lock)


class Engine:
    """In-memory registry of worlds, locator models, and live sessions."""

    def __init__(self, cm: CostModel | None = None,
                 scfg: SessionConfig = SessionConfig(),
                 reports_dir: str | None = None,
                 transcripts_dir: str | None = None,
                 rng_seed: int | None = None):
        self.cm = cm or neutral_cost_model()
        self.scfg = scfg
        self.reports_dir = Path(reports_dir) if reports_dir else None
        self.transcripts_dir = Path(transcripts_dir) if transcripts_dir else None
        self.worlds: dict[str, NavGraph] = {}
        self.models: dict[str, BowModel] = {}
        self.sessions: dict[str, SessionRuntime] = {}
        self._rng = random.Random(rng_seed)
        self._lock = threading.Lock()

    def add_world(self, g: NavGraph, model: BowModel | None = None) -> None:
        with self._lock:
            if model is None:
                examples = desc_token_examples(g)
                model = train_bow(examples) if examples else None
            self.worlds[g.world_id] = g
            if model is not None:
                self.models[g.world_id] = model

    def world(self, world_id: str) -> NavGraph:
        try:
            return self.worlds[world_id]
        except KeyError:
            raise NotFound(f"unknown world {world_id!r}") from None

    def model_for(self, world_id: str) -> BowModel:
        try:
            return self.models[world_id]
        except KeyError:
            raise ValidationError(
                f"world {world_id!r} has no locator model") from None

    def create_session(self, world_id: str, episode_spec) -> str:
        g = self.world(world_id)
        self.model_for(world_id)  # fail early if no locator exists
        if episode_spec == "random":
            spec = sample_episode(self._rng, g, f"live-{uuid.uuid4().hex[:8]}")
        else:
            spec = episode_from_dict(episode_spec)
            if spec.world_id != world_id:
                raise ValidationError(
                    f"episode world {spec.world_id!r} != {world_id!r}")
        sid = uuid.uuid4().hex[:12]
        session = new_session(sid, g, spec, self.scfg)
        with self._lock:
            self.sessions[sid] = SessionRuntime(session, g,
                                                self.models[world_id], spec)
        return sid

    def runtime(self, session_id: str) -> SessionRuntime:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise NotFound(f"unknown session {session_id!r}") from None

    def apply(self, session_id: str, event) -> Session:
        rt = self.runtime(session_id)
        with rt.lock:
            rt.session = session_step(rt.session, event, rt.graph, rt.model,
                                      self.cm, self.scfg)
            if self.transcripts_dir is not None:
                self._persist(rt)
            return rt.session

    def _persist(self, rt: SessionRuntime) -> None:
        self.transcripts_dir.mkdir(parents=True, exist_ok=True)
        path = self.transcripts_dir / f"{rt.session.session_id}.jsonl"
        records = [json.dumps(r, sort_keys=True) for r in rt.session.transcript]
        path.write_text("\n".join(records) + "\n" if records else "",
                        encoding="utf-8")

    def report(self, batch_id: str) -> dict:
        if self.reports_dir is None:
            raise NotFound("no reports directory configured")
        if "/" in batch_id or batch_id.startswith("."):
            raise InvalidArgument("bad batch id")
        path = self.reports_dir / f"{batch_id}.json"
        if not path.exists():
            raise NotFound(f"no report {batch_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))


def session_view(engine: Engine, rt: SessionRuntime) -> dict:
    """Client-facing snapshot; the goal stays hidden until the session ends."""
    s = rt.session
    g = rt.graph
    options = [
        {
            "to": nid,
            "bearing": heading_between(g, s.user_node, nid),
            "labels": sorted(e.labels),
        }
        for nid, e in g.adjacency(s.user_node)
    ]
    view = {
        "session_id": s.session_id,
        "world_id": s.world_id,
        "phase": s.phase,
        "user_node": s.user_node,
        "current_instructions": s.instructions.text if s.instructions else "",
        "neighbor_options": options,
        "moves_used": s.moves_used,
        "budget": s.budget,
        "final_report": None,
    }
    if s.phase == "DONE" and s.outcome is not None:
        view["final_report"] = outcome_to_dict(s.outcome)
    return view


class CreateSessionBody(BaseModel):
    world_id: str
    episode_spec: dict | str = "random"


class UtteranceBody(BaseModel):
    text: str
    goal_text: str | None = None


class MoveBody(BaseModel):
    to: str


class FinishBody(BaseModel):
    claim_arrived: bool = False


def create_app(engine: Engine, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="wayfinder", docs_url=None, redoc_url=None)
    if cors_origins:
        app.add_middleware(CORSMiddleware, allow_origins=cors_origins,
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(WayfinderError)
    async def domain_error(_request, err: WayfinderError):
        return JSONResponse(
            status_code=_status_for(err),
            content={"code": type(err).__name__, "message": str(err),
                     "detail": getattr(err, "detail", None)},
        )

    @app.post("/worlds")
    async def post_world(request: Request):
        try:
            doc = await request.json()
        except Exception:
            raise ParseError("request body is not valid JSON") from None
        g = world_from_dict(doc)
        engine.add_world(g)
        return {"world_id": g.world_id}

    @app.get("/worlds/{world_id}/map")
    async def get_map(world_id: str):
        g = engine.world(world_id)
        return {
            "world_id": g.world_id,
            "nodes": [
                {"id": vid, "x": vp.pos[0], "y": vp.pos[1],
                 "labels": sorted(vp.labels)}
                for vid, vp in ((v, g.viewpoints[v]) for v in g.node_ids())
            ],
            "edges": [
                {"a": e.a, "b": e.b, "labels": sorted(e.labels)}
                for e in g.edges
            ],
        }

    @app.post("/sessions")
    async def post_session(body: CreateSessionBody):
        if isinstance(body.episode_spec, str) and body.episode_spec != "random":
            raise InvalidArgument('episode_spec must be an object or "random"')
        sid = engine.create_session(body.world_id, body.episode_spec)
        return {"session_id": sid}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return session_view(engine, engine.runtime(session_id))

    @app.post("/sessions/{session_id}/utterance")
    async def post_utterance(session_id: str, body: UtteranceBody):
        engine.apply(session_id, UtteranceEvent(body.text, body.goal_text))
        return session_view(engine, engine.runtime(session_id))

    @app.post("/sessions/{session_id}/move")
    async def post_move(session_id: str, body: MoveBody):
        engine.apply(session_id, MoveEvent(body.to))
        return session_view(engine, engine.runtime(session_id))

    @app.post("/sessions/{session_id}/finish")
    async def post_finish(session_id: str, body: FinishBody):
        engine.apply(session_id, FinishEvent(body.claim_arrived))
        return session_view(engine, engine.runtime(session_id))

    @app.get("/reports/{batch_id}")
    async def get_report(batch_id: str):
        return engine.report(batch_id)

    return app
