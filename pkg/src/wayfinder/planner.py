"""User-aware route planning with A*.

Edge costs scale metric length by per-label profile multipliers and add a
describability penalty at high-degree junctions. A label mapped to
FORBIDDEN makes the edge untraversable for that profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from typing import Mapping, Sequence

from .errors import EmptyInput, InvalidArgument, NoPath, ParseError, WayfinderError
from .world import Edge, NavGraph, euclidean_distance, geodesic_distance

FORBIDDEN = math.inf


@dataclass(frozen=True)
class UserProfile:
    name: str
    label_multipliers: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for label, m in self.label_multipliers.items():
            if m != FORBIDDEN and (not math.isfinite(m) or m < 0):
                raise InvalidArgument(f"multiplier for {label!r} must be >= 0")


def neutral_profile() -> UserProfile:
    return UserProfile("neutral", {})


def wheelchair_profile() -> UserProfile:
    return UserProfile("wheelchair", {"stairs": FORBIDDEN})


@dataclass(frozen=True)
class CostModel:
    profile: UserProfile
    describability_weight: float = 0.0   # lambda
    branch_penalty: float = 0.0

    def __post_init__(self):
        if self.describability_weight < 0 or self.branch_penalty < 0:
            raise InvalidArgument("penalty weights must be nonnegative")


def neutral_cost_model() -> CostModel:
    return CostModel(neutral_profile())


def edge_multiplier(edge: Edge, profile: UserProfile) -> float:
    m = 1.0
    for label in edge.labels:
        m *= profile.label_multipliers.get(label, 1.0)
    return m


def user_aware_cost(edge: Edge, next_node_degree: int, cm: CostModel) -> float:
    """length * (product of label multipliers) + lambda * branch_penalty *
    max(0, degree - 2); any FORBIDDEN label makes the cost infinite."""
    m = edge_multiplier(edge, cm.profile)
    if math.isinf(m):
        return math.inf
    return (edge.length * m
            + cm.describability_weight * cm.branch_penalty
            * max(0, next_node_degree - 2))


@dataclass(frozen=True)
class Plan:
    trajectory: tuple[str, ...]
    cost: float
    length_m: float


def _step_cost(g: NavGraph, u: str, v: str, edge: Edge, cm: CostModel) -> float:
    return user_aware_cost(edge, g.degree(v), cm)


def _heuristic_scale(g: NavGraph, cm: CostModel) -> float:
    """Smallest per-meter cost rate over the world's traversable edges.

    Scaling the Euclidean heuristic by this keeps it admissible no matter
    how the profile discounts or inflates labels.
    """
    scale = math.inf
    for e in g.edges:
        m = edge_multiplier(e, cm.profile)
        if math.isfinite(m):
            scale = min(scale, m)
    if not math.isfinite(scale):
        return 0.0
    return scale


def _reverse_dists(g: NavGraph, goal: str, cm: CostModel) -> dict[str, float]:
    """Min cost to reach the goal from each node (directed costs)."""
    dist = {goal: 0.0}
    heap = [(0.0, goal)]
    while heap:
        d, v = heappop(heap)
        if d > dist.get(v, math.inf):
            continue
        for u, e in g.adjacency(v):
            c = _step_cost(g, u, v, e, cm)
            if math.isinf(c):
                continue
            nd = d + c
            if nd < dist.get(u, math.inf):
                dist[u] = nd
                heappush(heap, (nd, u))
    return dist


def plan_astar(g: NavGraph, start: str, goal: str, cm: CostModel) -> Plan:
    """Minimum-cost route under the profile.

    Equal-cost alternatives resolve to the lexicographically smallest
    node-id sequence. Raises NoPath when every route is forbidden.
    """
    g.require(start)
    g.require(goal)
    if start == goal:
        return Plan((start,), 0.0, 0.0)

    scale = _heuristic_scale(g, cm)

    def h(v: str) -> float:
        return euclidean_distance(g, v, goal) * scale

    g_cost = {start: 0.0}
    closed: set[str] = set()
    heap = [(h(start), start)]
    found = False
    while heap:
        f, u = heappop(heap)
        if u in closed:
            continue
        closed.add(u)
        if u == goal:
            found = True
            break
        base = g_cost[u]
        for v, e in g.adjacency(u):
            if v in closed:
                continue
            c = _step_cost(g, u, v, e, cm)
            if math.isinf(c):
                continue
            nd = base + c
            if nd < g_cost.get(v, math.inf):
                g_cost[v] = nd
                heappush(heap, (nd + h(v), v))
    if not found:
        raise NoPath(f"{goal!r} unreachable from {start!r} for profile "
                     f"{cm.profile.name!r}")

    # canonicalize among ties: walk forward picking the smallest-id neighbor
    # that stays on a minimum-cost route
    dist_rev = _reverse_dists(g, goal, cm)
    path = [start]
    seen = {start}
    u = start
    while u != goal:
        chosen = None
        for v, e in g.adjacency(u):
            if v in seen and v != goal:
                continue
            c = _step_cost(g, u, v, e, cm)
            if math.isinf(c):
                continue
            if c + dist_rev.get(v, math.inf) == dist_rev[u]:
                chosen = v
                break
        if chosen is None:
            raise NoPath(f"path reconstruction stalled at {u!r}")
        path.append(chosen)
        seen.add(chosen)
        u = chosen

    cost = 0.0
    length = 0.0
    for a, b in zip(path, path[1:]):
        e = g.edge_between(a, b)
        cost += _step_cost(g, a, b, e, cm)
        length += e.length
    return Plan(tuple(path), cost, length)


# --- profile files ------------------------------------------------------------

def profile_from_dict(doc: dict) -> tuple[UserProfile, float, float]:
    """Parse {"name", "multipliers", "describability_weight", "branch_penalty"}.

    Returns the profile plus the two cost-model weights.
    """
    if not isinstance(doc, dict):
        raise ParseError("profile must be a JSON object")
    unknown = set(doc) - {"name", "multipliers", "describability_weight",
                          "branch_penalty"}
    if unknown:
        raise ParseError(f"unknown profile fields: {sorted(unknown)}")
    name = doc.get("name", "custom")
    mults = {}
    for label, value in doc.get("multipliers", {}).items():
        if value == "forbidden":
            mults[label] = FORBIDDEN
        elif isinstance(value, (int, float)):
            mults[label] = float(value)
        else:
            raise ParseError(f"multiplier for {label!r} must be a number "
                             f"or \"forbidden\"")
    profile = UserProfile(name, mults)
    return (profile,
            float(doc.get("describability_weight", 0.0)),
            float(doc.get("branch_penalty", 0.0)))


def load_cost_model(data: bytes | str) -> CostModel:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid profile JSON: {e}") from None
    profile, weight, penalty = profile_from_dict(doc)
    return CostModel(profile, weight, penalty)


def traversed_forbidden(g: NavGraph, path: Sequence[str], profile: UserProfile) -> int:
    """Count forbidden edges along a path (0 for any planner output)."""
    n = 0
    for a, b in zip(path, path[1:]):
        e = g.edge_between(a, b)
        if e is not None and math.isinf(edge_multiplier(e, profile)):
            n += 1
    return n


def evaluate_planner(g: NavGraph, pairs: Sequence[tuple[str, str]],
                     cm: CostModel, style: str = "default",
                     follower: "FollowerConfig | None" = None,
                     root_seed: int = 0,
                     threshold: float | None = None) -> "EvalReport":
    """Plan each (start, goal) pair, realize instructions, and ground them
    with the simulated follower starting at the pair's start.

    An unreachable goal becomes a failed episode rather than an exception.
    """
    from .generator import generate
    from .grounder import FollowerConfig, execute, parse_instructions
    from .metrics import (SUCCESS_THRESHOLD_M, EpisodeOutcome,
                          episode_outcome, summarize)
    from .seeding import derive_seed

    if not pairs:
        raise EmptyInput("no pairs to evaluate")
    if follower is None:
        follower = FollowerConfig()
    if threshold is None:
        threshold = SUCCESS_THRESHOLD_M

    outcomes = []
    for i, (start, goal) in enumerate(pairs):
        eid = f"pair{i:04d}"
        g.require(start)
        g.require(goal)
        cfg = replace(follower, seed=derive_seed(root_seed, eid))
        diags: dict = {}
        try:
            plan = plan_astar(g, start, goal, cm)
            diags["plan_length_m"] = plan.length_m
            doc = generate(g, plan.trajectory, trajectory_ref=eid, style=style)
            diags["n_actions"] = len(doc.actions)
            actions = parse_instructions(doc.text, style)
            path = execute(g, start, actions, cfg)
            outcome = episode_outcome(g, eid, path, goal, threshold)
            outcomes.append(replace(outcome, diagnostics=diags))
        except WayfinderError as err:
            dist = geodesic_distance(g, start, goal)
            diags["failure"] = f"{type(err).__name__}: {err}"
            outcomes.append(EpisodeOutcome(
                episode_id=eid, goal=goal, grounded_path=(start,),
                shortest_len=dist, walked_len=0.0, error=dist,
                success=False, oracle_success=False, diagnostics=diags))
    return summarize(outcomes)
