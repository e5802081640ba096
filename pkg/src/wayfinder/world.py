"""Navigation graphs: viewpoints, edges, geometry, and the grid generator.

Graphs are immutable after construction; shortest-path distances are cached
per source node on first use.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Iterable, Sequence

from .errors import (
    DegenerateHeading,
    InvalidArgument,
    ParseError,
    UnknownViewpoint,
    ValidationError,
)

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class Viewpoint:
    id: str
    pos: Vec3
    labels: frozenset[str] = frozenset()
    desc_tokens: tuple[str, ...] = ()


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    labels: frozenset[str]
    length: float

    def other(self, v: str) -> str:
        return self.b if v == self.a else self.a


class NavGraph:
    """Undirected navigation graph over named viewpoints.

    Edge endpoints are stored with a < b; lengths come from the Euclidean
    distance between endpoint positions.
    """

    def __init__(self, world_id: str, viewpoints: Iterable[Viewpoint],
                 edges: Iterable[tuple[str, str, Iterable[str]]]):
        if not world_id:
            raise ValidationError("world_id must be nonempty")
        self.world_id = world_id
        self.viewpoints: dict[str, Viewpoint] = {}
        for vp in viewpoints:
            if not vp.id:
                raise ValidationError("viewpoint with empty id")
            if vp.id in self.viewpoints:
                raise ValidationError(f"duplicate viewpoint id {vp.id!r}")
            if len(vp.pos) != 3 or not all(math.isfinite(c) for c in vp.pos):
                raise ValidationError(f"viewpoint {vp.id!r} has non-finite position")
            self.viewpoints[vp.id] = vp
        if not self.viewpoints:
            raise ValidationError("world has no viewpoints")

        self.edges: list[Edge] = []
        seen_pairs: set[tuple[str, str]] = set()
        for a, b, labels in edges:
            if a == b:
                raise ValidationError(f"self-loop edge at {a!r}")
            for end in (a, b):
                if end not in self.viewpoints:
                    raise ValidationError(f"edge endpoint {end!r} is not a viewpoint")
            lo, hi = (a, b) if a < b else (b, a)
            if (lo, hi) in seen_pairs:
                raise ValidationError(f"duplicate edge {lo!r}-{hi!r}")
            seen_pairs.add((lo, hi))
            length = _euclid(self.viewpoints[lo].pos, self.viewpoints[hi].pos)
            if length <= 0.0:
                raise ValidationError(f"edge {lo!r}-{hi!r} has zero length")
            self.edges.append(Edge(lo, hi, frozenset(labels), length))
        self.edges.sort(key=lambda e: (e.a, e.b))

        # adjacency lists sorted by neighbor id; lookup map for single edges
        self._adj: dict[str, list[tuple[str, Edge]]] = {v: [] for v in self.viewpoints}
        self._edge_map: dict[tuple[str, str], Edge] = {}
        for e in self.edges:
            self._adj[e.a].append((e.b, e))
            self._adj[e.b].append((e.a, e))
            self._edge_map[(e.a, e.b)] = e
            self._edge_map[(e.b, e.a)] = e
        for lst in self._adj.values():
            lst.sort(key=lambda t: t[0])

        self._check_connected()
        self._dist_cache: dict[str, dict[str, float]] = {}

    def _check_connected(self) -> None:
        start = next(iter(self.viewpoints))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for nid, _ in self._adj[u]:
                if nid not in seen:
                    seen.add(nid)
                    stack.append(nid)
        if len(seen) != len(self.viewpoints):
            missing = sorted(set(self.viewpoints) - seen)
            raise ValidationError(f"world not connected; unreachable: {missing[:5]}")

    def require(self, vid: str) -> Viewpoint:
        try:
            return self.viewpoints[vid]
        except KeyError:
            raise UnknownViewpoint(f"unknown viewpoint {vid!r}") from None

    def adjacency(self, vid: str) -> list[tuple[str, Edge]]:
        self.require(vid)
        return self._adj[vid]

    def edge_between(self, a: str, b: str) -> Edge | None:
        self.require(a)
        self.require(b)
        return self._edge_map.get((a, b))

    def degree(self, vid: str) -> int:
        return len(self.adjacency(vid))

    def node_ids(self) -> list[str]:
        return sorted(self.viewpoints)


def _euclid(p: Vec3, q: Vec3) -> float:
    return math.dist(p, q)


def euclidean_distance(g: NavGraph, a: str, b: str) -> float:
    return _euclid(g.require(a).pos, g.require(b).pos)


def neighbors(g: NavGraph, v: str) -> list[tuple[str, frozenset[str], float]]:
    """Adjacent viewpoints with edge labels and lengths, ascending by id."""
    return [(nid, e.labels, e.length) for nid, e in g.adjacency(v)]


def _dists_from(g: NavGraph, src: str) -> dict[str, float]:
    cached = g._dist_cache.get(src)
    if cached is not None:
        return cached
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for nid, e in g._adj[u]:
            nd = d + e.length
            if nd < dist.get(nid, math.inf):
                dist[nid] = nd
                heappush(heap, (nd, nid))
    g._dist_cache[src] = dist
    return dist


def geodesic_distance(g: NavGraph, a: str, b: str) -> float:
    """Length of the shortest path along edges; 0 iff a == b.

    Always expands from the smaller id so the result is exactly symmetric
    despite floating-point summation order.
    """
    g.require(a)
    g.require(b)
    lo, hi = (a, b) if a <= b else (b, a)
    return _dists_from(g, lo)[hi]


def shortest_path(g: NavGraph, a: str, b: str) -> list[str]:
    """One geodesic path a..b, deterministic (smaller ids win ties)."""
    g.require(a)
    g.require(b)
    if a == b:
        return [a]
    dist = {a: 0.0}
    parent: dict[str, str] = {}
    heap = [(0.0, a)]
    while heap:
        d, u = heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for nid, e in g._adj[u]:
            nd = d + e.length
            if nd < dist.get(nid, math.inf):
                dist[nid] = nd
                parent[nid] = u
                heappush(heap, (nd, nid))
    if b not in parent:
        raise UnknownViewpoint(f"no path {a!r} -> {b!r}")
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def heading_between(g: NavGraph, a: str, b: str) -> float:
    """Bearing of b from a in the x-y plane.

    0 is +y ("north"), clockwise positive, result in [0, 2*pi).
    """
    pa = g.require(a).pos
    pb = g.require(b).pos
    dx = pb[0] - pa[0]
    dy = pb[1] - pa[1]
    if math.hypot(dx, dy) < 1e-12:
        raise DegenerateHeading(f"{a!r} and {b!r} share an x-y projection")
    return math.atan2(dx, dy) % (2.0 * math.pi)


# --- file format -------------------------------------------------------------

_NODE_FIELDS = {"id", "pos", "labels", "desc_tokens"}
_EDGE_FIELDS = {"a", "b", "labels"}
_WORLD_FIELDS = {"world_id", "nodes", "edges"}


def _str_list(value, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise ParseError(f"{what} must be a list of strings")
    return value


def world_from_dict(doc: dict) -> NavGraph:
    if not isinstance(doc, dict):
        raise ParseError("world document must be a JSON object")
    unknown = set(doc) - _WORLD_FIELDS
    if unknown:
        raise ParseError(f"unknown world fields: {sorted(unknown)}")
    for field in ("world_id", "nodes", "edges"):
        if field not in doc:
            raise ParseError(f"missing world field {field!r}")
    if not isinstance(doc["world_id"], str):
        raise ParseError("world_id must be a string")

    vps = []
    for i, node in enumerate(doc["nodes"]):
        if not isinstance(node, dict):
            raise ParseError(f"node {i} must be an object")
        unknown = set(node) - _NODE_FIELDS
        if unknown:
            raise ParseError(f"node {i}: unknown fields {sorted(unknown)}")
        if "id" not in node or "pos" not in node:
            raise ParseError(f"node {i}: id and pos are required")
        if not isinstance(node["id"], str):
            raise ParseError(f"node {i}: id must be a string")
        pos = node["pos"]
        if (not isinstance(pos, list) or len(pos) != 3
                or not all(isinstance(c, (int, float)) for c in pos)):
            raise ParseError(f"node {node['id']!r}: pos must be [x, y, z]")
        labels = _str_list(node.get("labels", []), f"node {node['id']!r} labels")
        toks = _str_list(node.get("desc_tokens", []), f"node {node['id']!r} desc_tokens")
        vps.append(Viewpoint(node["id"], (float(pos[0]), float(pos[1]), float(pos[2])),
                             frozenset(labels), tuple(toks)))

    edges = []
    for i, edge in enumerate(doc["edges"]):
        if not isinstance(edge, dict):
            raise ParseError(f"edge {i} must be an object")
        unknown = set(edge) - _EDGE_FIELDS
        if unknown:
            raise ParseError(f"edge {i}: unknown fields {sorted(unknown)}")
        if "a" not in edge or "b" not in edge:
            raise ParseError(f"edge {i}: a and b are required")
        if not (isinstance(edge["a"], str) and isinstance(edge["b"], str)):
            raise ParseError(f"edge {i}: endpoints must be strings")
        labels = _str_list(edge.get("labels", []), f"edge {i} labels")
        edges.append((edge["a"], edge["b"], labels))

    return NavGraph(doc["world_id"], vps, edges)


def load_world(data: bytes | str) -> NavGraph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return world_from_dict(doc)


def world_to_dict(g: NavGraph) -> dict:
    return {
        "world_id": g.world_id,
        "nodes": [
            {
                "id": vp.id,
                "pos": list(vp.pos),
                "labels": sorted(vp.labels),
                "desc_tokens": list(vp.desc_tokens),
            }
            for vp in (g.viewpoints[v] for v in g.node_ids())
        ],
        "edges": [
            {"a": e.a, "b": e.b, "labels": sorted(e.labels)}
            for e in g.edges
        ],
    }


def world_to_json(g: NavGraph) -> str:
    return json.dumps(world_to_dict(g), indent=2, sort_keys=True) + "\n"


# --- synthetic grid worlds ----------------------------------------------------

ROOM_WORDS = ("kitchen", "hallway", "bedroom", "bathroom", "office", "lobby",
              "garage", "studio", "pantry", "closet", "balcony", "library")
COLOR_WORDS = ("red", "blue", "green", "white", "black", "yellow",
               "gray", "brown", "purple", "orange", "teal", "pink")
THING_WORDS = ("sofa", "plant", "window", "painting", "lamp", "shelf",
               "mirror", "piano", "rug", "clock", "vase", "desk")

_STAIRS_RATE = 0.12


def grid_node_id(r: int, c: int) -> str:
    return f"n{r:02d}x{c:02d}"


def generate_grid_world(rows: int, cols: int, spacing: float = 3.0,
                        label_seed: int = 0) -> NavGraph:
    """rows x cols lattice with deterministic labels and edge attributes.

    Node (r, c) sits at (c*spacing, r*spacing, 0). A seed-dependent subset
    of edges carries the "stairs" label.
    """
    if rows < 1 or cols < 1:
        raise InvalidArgument("rows and cols must be >= 1")
    if rows * cols < 2:
        raise InvalidArgument("grid needs at least two nodes")
    if spacing <= 0:
        raise InvalidArgument("spacing must be positive")
    rng = random.Random(label_seed)
    vps = []
    for r in range(rows):
        for c in range(cols):
            room = rng.choice(ROOM_WORDS)
            color = rng.choice(COLOR_WORDS)
            thing = rng.choice(THING_WORDS)
            vps.append(Viewpoint(
                grid_node_id(r, c),
                (c * spacing, r * spacing, 0.0),
                frozenset([room]),
                (room, color, thing),
            ))
    edges = []
    for r in range(rows):
        for c in range(cols):
            here = grid_node_id(r, c)
            if c + 1 < cols:
                labels = ["stairs"] if rng.random() < _STAIRS_RATE else []
                edges.append((here, grid_node_id(r, c + 1), labels))
            if r + 1 < rows:
                labels = ["stairs"] if rng.random() < _STAIRS_RATE else []
                edges.append((here, grid_node_id(r + 1, c), labels))
    return NavGraph(f"grid-{rows}x{cols}-s{label_seed}", vps, edges)


def walk_length(g: NavGraph, path: Sequence[str]) -> float:
    """Sum of traversed edge lengths, counting repeats."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        e = g.edge_between(a, b)
        if e is None:
            from .errors import NonAdjacentTrajectory
            raise NonAdjacentTrajectory(f"{a!r} and {b!r} are not adjacent")
        total += e.length
    return total
