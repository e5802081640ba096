"""Simulated instruction follower: parse templated text, walk the graph.

Execution is deliberately literal. FORWARD repeatedly steps to the neighbor
whose bearing best matches the current heading, re-snapping the heading to
each traversed edge, and stops once the remaining distance drops below half
of the next edge. With noise, each move is replaced by a uniformly random
neighbor with probability noise_epsilon.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    DegenerateHeading,
    EmptyInput,
    InvalidArgument,
    UnparsableSentence,
)
from .generator import (
    CompoundAction,
    compass_bearing,
    compiled_patterns,
    forward,
    orient,
    turn,
    wrap_signed,
)
from .world import NavGraph, heading_between

HALF_PI = math.pi / 2.0
TWO_PI = 2.0 * math.pi

# forward-compatible neighbors sit within a quarter turn of the heading
FORWARD_CONE_RAD = HALF_PI

_TURN_DELTAS = {"left": -HALF_PI, "right": HALF_PI, "around": math.pi}

_SENTENCE_SPLIT = re.compile(r"\.(?:\s+|$)")


@dataclass(frozen=True)
class FollowerConfig:
    noise_epsilon: float = 0.0
    max_steps: int = 100
    seed: int = 0
    straight_tol: float = 30.0  # shared default with the generator's chunker

    def __post_init__(self):
        if not (0.0 <= self.noise_epsilon <= 1.0):
            raise InvalidArgument("noise_epsilon must be within [0, 1]")
        if self.max_steps < 1:
            raise InvalidArgument("max_steps must be >= 1")


def parse_instructions(text: str, style: str = "default") -> list[CompoundAction]:
    """Invert realize(); raises UnparsableSentence on anything else.

    Splitting happens at periods followed by whitespace or end of text, so
    decimal distances survive intact. Empty input parses to no actions.
    """
    patterns = compiled_patterns(style)
    actions: list[CompoundAction] = []
    pieces = [s.strip() for s in _SENTENCE_SPLIT.split(text)]
    sentences = [s for s in pieces if s]
    for i, sent in enumerate(sentences):
        matched = False
        for key, pattern in patterns:
            m = pattern.match(sent + ".")
            if not m:
                continue
            groups = m.groupdict()
            if key == "orient":
                actions.append(orient(compass_bearing(groups["compass"])))
            elif key == "forward":
                actions.append(forward(float(groups["dist"])))
            elif key == "turn":
                actions.append(turn(groups["dir"]))
            else:
                actions.append(turn(groups["dir"], groups["landmark"]))
            matched = True
            break
        if not matched:
            raise UnparsableSentence(i, sent + ".")
    return actions


def _bearing_or_none(g: NavGraph, a: str, b: str) -> float | None:
    try:
        return heading_between(g, a, b)
    except DegenerateHeading:
        return None


def execute(g: NavGraph, start: str, actions: Sequence[CompoundAction],
            cfg: FollowerConfig) -> list[str]:
    """Walk the graph following actions; returns every node visited.

    The trajectory always begins at start and never exceeds
    cfg.max_steps + 1 nodes. A FORWARD with no neighbor within a quarter
    turn of the heading simply ends, it does not raise.
    """
    g.require(start)
    rng = random.Random(cfg.seed)
    node = start
    heading = 0.0
    visited = [start]
    steps = 0
    for act in actions:
        if act.kind == "orient":
            heading = act.bearing % TWO_PI
        elif act.kind == "turn":
            heading = (heading + _TURN_DELTAS[act.direction]) % TWO_PI
        elif act.kind == "forward":
            remaining = act.distance
            while True:
                if steps >= cfg.max_steps:
                    return visited
                adj = g.adjacency(node)
                chosen = None
                if cfg.noise_epsilon > 0.0 and rng.random() < cfg.noise_epsilon:
                    chosen = adj[rng.randrange(len(adj))] if adj else None
                else:
                    best_gap = None
                    for nid, e in adj:
                        bearing = _bearing_or_none(g, node, nid)
                        if bearing is None:
                            continue
                        gap = abs(wrap_signed(bearing - heading))
                        if gap > FORWARD_CONE_RAD:
                            continue
                        if best_gap is None or gap < best_gap - 1e-12:
                            best_gap = gap
                            chosen = (nid, e)
                if chosen is None:
                    break  # dead end: the forward ends early, silently
                nid, edge = chosen
                if remaining < edge.length / 2.0:
                    break
                prev = node
                node = nid
                visited.append(nid)
                steps += 1
                snapped = _bearing_or_none(g, prev, nid)
                if snapped is not None:
                    heading = snapped
                remaining -= edge.length
        else:
            raise InvalidArgument(f"unknown action kind {act.kind!r}")
    return visited


def random_follower(g: NavGraph, start: str, n_steps: int, seed: int) -> list[str]:
    """Uniform random walk of exactly n_steps moves (the no-language baseline)."""
    g.require(start)
    if n_steps < 0:
        raise InvalidArgument("n_steps must be >= 0")
    rng = random.Random(seed)
    node = start
    visited = [start]
    for _ in range(n_steps):
        adj = g.adjacency(node)
        if not adj:
            raise EmptyInput(f"{node!r} has no neighbors")
        node = adj[rng.randrange(len(adj))][0]
        visited.append(node)
    return visited
