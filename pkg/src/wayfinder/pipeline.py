"""Closed-loop wiring: localize, plan, instruct, ground, score.

Batch evaluation runs scripted episodes end to end; interactive sessions
drive the same components one event at a time. The follower always starts
from the episode's true start, never from the locator's estimate, so
localization error shows up in the metrics instead of being hidden.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import (
    EmptyInput,
    IllegalTransition,
    InvalidArgument,
    NonAdjacentMove,
    ParseError,
    WayfinderError,
)
from .generator import InstructionDoc, generate
from .grounder import FollowerConfig, execute, parse_instructions
from .location import (
    BeliefState,
    BowModel,
    Utterance,
    belief_argmax,
    belief_init,
    belief_update,
    locate,
    tokenize,
)
from .metrics import (
    SUCCESS_THRESHOLD_M,
    EpisodeOutcome,
    EvalReport,
    episode_outcome,
    summarize,
)
from .planner import CostModel, Plan, neutral_cost_model, plan_astar
from .seeding import derive_seed, max_workers
from .world import NavGraph, geodesic_distance, shortest_path


@dataclass(frozen=True)
class EpisodeSpec:
    episode_id: str
    world_id: str
    true_start: str
    true_goal: str
    start_utterance: Utterance
    goal_utterance: Utterance


def episode_to_dict(spec: EpisodeSpec) -> dict:
    return {
        "episode_id": spec.episode_id,
        "world_id": spec.world_id,
        "true_start": spec.true_start,
        "true_goal": spec.true_goal,
        "start_utterance": {"text": spec.start_utterance.text,
                            "role": spec.start_utterance.role},
        "goal_utterance": {"text": spec.goal_utterance.text,
                           "role": spec.goal_utterance.role},
    }


def episode_from_dict(doc: dict) -> EpisodeSpec:
    try:
        return EpisodeSpec(
            episode_id=doc["episode_id"],
            world_id=doc["world_id"],
            true_start=doc["true_start"],
            true_goal=doc["true_goal"],
            start_utterance=Utterance(doc["start_utterance"]["text"],
                                      doc["start_utterance"]["role"]),
            goal_utterance=Utterance(doc["goal_utterance"]["text"],
                                     doc["goal_utterance"]["role"]),
        )
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed episode spec: {e}") from None


def episodes_to_jsonl(specs: Sequence[EpisodeSpec]) -> str:
    lines = [json.dumps(episode_to_dict(s), sort_keys=True) for s in specs]
    return "\n".join(lines) + ("\n" if lines else "")


def episodes_from_jsonl(data: bytes | str) -> list[EpisodeSpec]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    specs = []
    for i, line in enumerate(data.splitlines()):
        if not line.strip():
            continue
        try:
            specs.append(episode_from_dict(json.loads(line)))
        except json.JSONDecodeError as e:
            raise ParseError(f"line {i + 1}: invalid JSON: {e}") from None
    return specs


def _failed_outcome(g: NavGraph, spec: EpisodeSpec, err: WayfinderError,
                    threshold: float) -> EpisodeOutcome:
    dist = geodesic_distance(g, spec.true_start, spec.true_goal)
    return EpisodeOutcome(
        episode_id=spec.episode_id,
        goal=spec.true_goal,
        grounded_path=(spec.true_start,),
        shortest_len=dist,
        walked_len=0.0,
        error=dist,
        success=False,
        oracle_success=False,
        diagnostics={"failure": f"{type(err).__name__}: {err}"},
    )


def run_episode(spec: EpisodeSpec, g: NavGraph, locator: BowModel,
                cm: CostModel, cfg: FollowerConfig,
                threshold: float = SUCCESS_THRESHOLD_M,
                style: str = "default") -> EpisodeOutcome:
    """One scripted episode; component failures become failed episodes."""
    if spec.world_id != g.world_id:
        raise InvalidArgument(
            f"episode {spec.episode_id}: world {spec.world_id!r} loaded "
            f"against {g.world_id!r}")
    g.require(spec.true_start)
    g.require(spec.true_goal)
    diags: dict = {}
    try:
        v_start, _ = locate(locator, g, spec.start_utterance)
        v_goal, _ = locate(locator, g, spec.goal_utterance)
        diags["locator_error_m"] = geodesic_distance(g, v_start, spec.true_start)
        plan = plan_astar(g, v_start, v_goal, cm)
        diags["plan_length_m"] = plan.length_m
        doc = generate(g, plan.trajectory, trajectory_ref=spec.episode_id,
                       style=style)
        diags["n_actions"] = len(doc.actions)
        actions = parse_instructions(doc.text, style)
        path = execute(g, spec.true_start, actions, cfg)
        outcome = episode_outcome(g, spec.episode_id, path, spec.true_goal,
                                  threshold)
        return replace(outcome, diagnostics=diags)
    except WayfinderError as err:
        failed = _failed_outcome(g, spec, err, threshold)
        failed.diagnostics.update(diags)
        return failed


def run_eval(specs: Sequence[EpisodeSpec], g: NavGraph, locator: BowModel,
             cm: CostModel, base_cfg: FollowerConfig, root_seed: int = 0,
             threshold: float = SUCCESS_THRESHOLD_M,
             style: str = "default") -> EvalReport:
    """Batch evaluation; per-episode seeds derive from the root seed, so
    results do not depend on execution order or thread count."""
    if not specs:
        raise EmptyInput("no episodes to run")

    def one(spec: EpisodeSpec) -> EpisodeOutcome:
        cfg = replace(base_cfg, seed=derive_seed(root_seed, spec.episode_id))
        return run_episode(spec, g, locator, cm, cfg, threshold, style)

    workers = max_workers(len(specs))
    if workers == 1:
        outcomes = [one(s) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, specs))
    return summarize(outcomes)


# --- interactive sessions ---------------------------------------------------------

PHASE_AWAIT = "AWAIT_UTTERANCE"
PHASE_INSTRUCTED = "INSTRUCTED"
PHASE_DONE = "DONE"


@dataclass(frozen=True)
class UtteranceEvent:
    text: str
    goal_text: str | None = None


@dataclass(frozen=True)
class MoveEvent:
    to: str


@dataclass(frozen=True)
class FinishEvent:
    claim_arrived: bool


@dataclass(frozen=True)
class SessionConfig:
    replan_every: int = 1
    budget_factor: int = 4
    threshold: float = SUCCESS_THRESHOLD_M
    style: str = "default"


@dataclass(frozen=True)
class Session:
    """Immutable session value; session_step returns a new one."""
    session_id: str
    world_id: str
    phase: str
    true_start: str
    true_goal: str
    user_node: str
    visited: tuple[str, ...]
    belief: BeliefState
    goal_estimate: str | None
    plan: Plan | None
    instructions: InstructionDoc | None
    moves_used: int
    budget: int
    transcript: tuple[dict, ...]
    outcome: EpisodeOutcome | None


def session_budget(g: NavGraph, start: str, goal: str,
                   scfg: SessionConfig) -> int:
    steps = max(1, len(shortest_path(g, start, goal)) - 1)
    return scfg.budget_factor * steps


def new_session(session_id: str, g: NavGraph, spec: EpisodeSpec,
                scfg: SessionConfig = SessionConfig()) -> Session:
    g.require(spec.true_start)
    g.require(spec.true_goal)
    return Session(
        session_id=session_id,
        world_id=g.world_id,
        phase=PHASE_AWAIT,
        true_start=spec.true_start,
        true_goal=spec.true_goal,
        user_node=spec.true_start,
        visited=(spec.true_start,),
        belief=belief_init(g),
        goal_estimate=None,
        plan=None,
        instructions=None,
        moves_used=0,
        budget=session_budget(g, spec.true_start, spec.true_goal, scfg),
        transcript=(),
        outcome=None,
    )


def _instruct(s: Session, g: NavGraph, model: BowModel, cm: CostModel,
              scfg: SessionConfig) -> tuple[Plan, InstructionDoc]:
    est = belief_argmax(s.belief)
    plan = plan_astar(g, est, s.goal_estimate, cm)
    doc = generate(g, plan.trajectory, trajectory_ref=s.session_id,
                   style=scfg.style)
    return plan, doc


def _finalize(s: Session, g: NavGraph, scfg: SessionConfig,
              record: dict) -> Session:
    outcome = episode_outcome(g, s.session_id, list(s.visited), s.true_goal,
                              scfg.threshold)
    return replace(s, phase=PHASE_DONE, outcome=outcome,
                   transcript=s.transcript + (record,))


def session_step(s: Session, event, g: NavGraph, model: BowModel,
                 cm: CostModel, scfg: SessionConfig = SessionConfig()) -> Session:
    """Apply one event; illegal events raise and leave the session unchanged."""
    if g.world_id != s.world_id:
        raise InvalidArgument(f"session world {s.world_id!r} loaded against "
                              f"{g.world_id!r}")
    if isinstance(event, UtteranceEvent):
        if s.phase != PHASE_AWAIT:
            raise IllegalTransition(f"UTTERANCE not legal in phase {s.phase}")
        belief = belief_update(s.belief, model, g, tokenize(event.text))
        goal_estimate = s.goal_estimate
        if event.goal_text is not None:
            goal_estimate, _ = locate(model, g,
                                      Utterance(event.goal_text, "describe_goal"))
        if goal_estimate is None:
            raise InvalidArgument("first utterance must describe the goal")
        record = {"event": "utterance", "text": event.text,
                  "goal_text": event.goal_text}
        s2 = replace(s, belief=belief, goal_estimate=goal_estimate,
                     phase=PHASE_INSTRUCTED,
                     transcript=s.transcript + (record,))
        plan, doc = _instruct(s2, g, model, cm, scfg)
        return replace(s2, plan=plan, instructions=doc)

    if isinstance(event, MoveEvent):
        if s.phase != PHASE_INSTRUCTED:
            raise IllegalTransition(f"MOVE not legal in phase {s.phase}")
        if g.edge_between(s.user_node, event.to) is None:
            raise NonAdjacentMove(
                f"{event.to!r} is not adjacent to {s.user_node!r}")
        record = {"event": "move", "to": event.to}
        moves = s.moves_used + 1
        s2 = replace(s, user_node=event.to, visited=s.visited + (event.to,),
                     moves_used=moves)
        if moves >= s.budget:
            return _finalize(s2, g, scfg, record)
        s2 = replace(s2, transcript=s.transcript + (record,))
        if scfg.replan_every > 0 and moves % scfg.replan_every == 0:
            belief = belief_update(s2.belief, model, g, [])
            s2 = replace(s2, belief=belief)
            plan, doc = _instruct(s2, g, model, cm, scfg)
            s2 = replace(s2, plan=plan, instructions=doc)
        return s2

    if isinstance(event, FinishEvent):
        if s.phase != PHASE_INSTRUCTED:
            raise IllegalTransition(f"finish not legal in phase {s.phase}")
        record = {"event": "finish", "claim_arrived": event.claim_arrived}
        return _finalize(s, g, scfg, record)

    raise InvalidArgument(f"unknown event {event!r}")


def event_from_record(record: dict):
    kind = record.get("event")
    if kind == "utterance":
        return UtteranceEvent(record["text"], record.get("goal_text"))
    if kind == "move":
        return MoveEvent(record["to"])
    if kind == "finish":
        return FinishEvent(bool(record["claim_arrived"]))
    raise ParseError(f"unknown transcript record {record!r}")


def replay_transcript(session_id: str, g: NavGraph, model: BowModel,
                      cm: CostModel, spec: EpisodeSpec,
                      transcript: Sequence[dict],
                      scfg: SessionConfig = SessionConfig()) -> Session:
    """Rebuild a session by replaying its transcript; deterministic."""
    s = new_session(session_id, g, spec, scfg)
    for record in transcript:
        s = session_step(s, event_from_record(record), g, model, cm, scfg)
    return s
