"""Shared generators for randomized worlds and cost models."""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from wayfinder.planner import FORBIDDEN, CostModel, UserProfile
from wayfinder.world import NavGraph, Viewpoint

DATA_DIR = Path(__file__).parent / "data"

ROOMS = ("kitchen", "hallway", "bedroom", "office", "lobby", "garage")
EDGE_LABELS = ("stairs", "door", "narrow")


def random_world(seed: int, n_nodes: int | None = None) -> NavGraph:
    """Connected world with jittered-lattice positions (no x-y collisions)."""
    rng = random.Random(seed)
    n = n_nodes if n_nodes is not None else rng.randint(8, 50)
    side = max(3, math.ceil(math.sqrt(n)) + 1)
    cells = [(r, c) for r in range(side) for c in range(side)]
    rng.shuffle(cells)
    vps = []
    for i, (r, c) in enumerate(cells[:n]):
        x = c * 2.5 + rng.uniform(-0.5, 0.5)
        y = r * 2.5 + rng.uniform(-0.5, 0.5)
        room = rng.choice(ROOMS)
        vps.append(Viewpoint(f"v{i:03d}", (x, y, 0.0), frozenset([room]),
                             (room, f"tok{i % 7}")))
    ids = [vp.id for vp in vps]
    edges: list[tuple[str, str, list[str]]] = []
    seen: set[tuple[str, str]] = set()

    def add(a: str, b: str) -> None:
        key = (a, b) if a < b else (b, a)
        if a != b and key not in seen:
            seen.add(key)
            labels = [l for l in EDGE_LABELS if rng.random() < 0.2]
            edges.append((a, b, labels))

    order = ids[:]
    rng.shuffle(order)
    for i in range(1, len(order)):
        add(order[i], order[rng.randrange(i)])
    for _ in range(n // 2):
        add(rng.choice(ids), rng.choice(ids))
    return NavGraph(f"rand-{seed}-{n}", vps, edges)


def random_cost_model(rng: random.Random) -> CostModel:
    mults = {}
    for label in EDGE_LABELS:
        if rng.random() < 0.7:
            if rng.random() < 0.2:
                mults[label] = FORBIDDEN
            else:
                mults[label] = rng.choice((0.25, 0.5, 1.5, 2.0, 4.0))
    lam = rng.choice((0.0, 0.5, 1.0))
    bp = rng.choice((0.0, 0.5, 2.0))
    return CostModel(UserProfile("sampled", mults), lam, bp)


def dijkstra_cost_oracle(g: NavGraph, start: str, goal: str,
                         cm: CostModel) -> float:
    """Independent Dijkstra over the same directed cost definition."""
    import heapq

    def cost(u: str, v: str) -> float:
        e = g.edge_between(u, v)
        m = 1.0
        for label in e.labels:
            m *= cm.profile.label_multipliers.get(label, 1.0)
        if math.isinf(m):
            return math.inf
        return e.length * m + (cm.describability_weight * cm.branch_penalty
                               * max(0, len(g.adjacency(v)) - 2))

    dist = {start: 0.0}
    heap = [(0.0, start)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        if u == goal:
            return d
        for v, _ in g.adjacency(u):
            c = cost(u, v)
            if math.isinf(c):
                continue
            nd = d + c
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist.get(goal, math.inf)


def line_world(n: int, spacing: float = 3.0, world_id: str = "line") -> NavGraph:
    """n nodes in a row along +x; ids c0..c{n-1}."""
    vps = [Viewpoint(f"c{i}", (i * spacing, 0.0, 0.0), frozenset(["hallway"]),
                     ("hallway", f"spot{i}"))
           for i in range(n)]
    edges = [(f"c{i}", f"c{i + 1}", []) for i in range(n - 1)]
    return NavGraph(world_id, vps, edges)


@pytest.fixture
def grid5() -> NavGraph:
    from wayfinder.world import generate_grid_world
    return generate_grid_world(5, 5, 3.0, 7)
