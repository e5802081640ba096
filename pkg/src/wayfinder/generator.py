"""Template instruction generation from planned trajectories.

A trajectory is chunked into compound actions: one initial ORIENT, FORWARD
runs over near-straight stretches, and TURN actions at bends. The template
grammar realizing them is exactly invertible (see grounder.parse_instructions).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    EmptyTrajectory,
    InvalidArgument,
    NonAdjacentTrajectory,
    UnknownTemplateSet,
)
from .world import NavGraph, heading_between

TWO_PI = 2.0 * math.pi

COMPASS_WORDS = ("north", "northeast", "east", "southeast",
                 "south", "southwest", "west", "northwest")
COMPASS_BEARINGS = tuple(i * (math.pi / 4.0) for i in range(8))

TURN_DIRECTIONS = ("left", "right", "around")

STRAIGHT_TOL_DEG = 30.0
AROUND_TOL_DEG = 135.0


def wrap_signed(angle: float) -> float:
    """Map an angle difference into (-pi, pi]."""
    a = angle % TWO_PI
    if a > math.pi:
        a -= TWO_PI
    return a


def compass_word(bearing: float) -> str:
    k = round(bearing / (math.pi / 4.0)) % 8
    return COMPASS_WORDS[k]


def compass_bearing(word: str) -> float:
    return COMPASS_BEARINGS[COMPASS_WORDS.index(word)]


def snap_to_compass(bearing: float) -> float:
    return compass_bearing(compass_word(bearing))


@dataclass(frozen=True)
class CompoundAction:
    kind: str                    # "orient" | "forward" | "turn"
    bearing: float | None = None
    distance: float | None = None
    direction: str | None = None
    landmark: str | None = None


def orient(bearing: float) -> CompoundAction:
    if not (0.0 <= bearing < TWO_PI):
        raise InvalidArgument(f"bearing {bearing} outside [0, 2*pi)")
    return CompoundAction("orient", bearing=bearing)


def forward(distance: float) -> CompoundAction:
    if distance <= 0:
        raise InvalidArgument("forward distance must be positive")
    return CompoundAction("forward", distance=distance)


def turn(direction: str, landmark: str | None = None) -> CompoundAction:
    if direction not in TURN_DIRECTIONS:
        raise InvalidArgument(f"bad turn direction {direction!r}")
    return CompoundAction("turn", direction=direction, landmark=landmark)


def chunk_trajectory(g: NavGraph, x: Sequence[str],
                     straight_tol: float = STRAIGHT_TOL_DEG,
                     around_tol: float = AROUND_TOL_DEG) -> list[CompoundAction]:
    """Compound actions reproducing x when followed exactly.

    Bends up to straight_tol degrees merge into the running FORWARD; sharper
    ones emit a TURN (beyond around_tol, a turn-around). The initial ORIENT
    is snapped to the eight-way compass so the realized text carries the
    same bearing the parser recovers.
    """
    if not x:
        raise EmptyTrajectory("cannot chunk an empty trajectory")
    for v in x:
        g.require(v)
    for a, b in zip(x, x[1:]):
        if g.edge_between(a, b) is None:
            raise NonAdjacentTrajectory(f"{a!r} and {b!r} are not adjacent")
    if len(x) == 1:
        return []

    straight_rad = math.radians(straight_tol)
    around_rad = math.radians(around_tol)
    actions = [orient(snap_to_compass(heading_between(g, x[0], x[1])))]
    run_len = g.edge_between(x[0], x[1]).length
    for i in range(1, len(x) - 1):
        h_in = heading_between(g, x[i - 1], x[i])
        h_out = heading_between(g, x[i], x[i + 1])
        delta = wrap_signed(h_out - h_in)
        step = g.edge_between(x[i], x[i + 1]).length
        if abs(delta) <= straight_rad:
            run_len += step
            continue
        actions.append(forward(max(round(run_len, 1), 0.1)))
        if abs(delta) <= around_rad:
            direction = "right" if delta > 0 else "left"
        else:
            direction = "around"
        labels = g.viewpoints[x[i]].labels
        actions.append(turn(direction, min(labels) if labels else None))
        run_len = step
    actions.append(forward(max(round(run_len, 1), 0.1)))
    return actions


# --- templates ------------------------------------------------------------------

DEFAULT_TEMPLATES: Mapping[str, str] = {
    "orient": "Face {compass}.",
    "forward": "Walk {dist} meters.",
    "turn": "Turn {dir}.",
    "turn_landmark": "Turn {dir} at the {landmark}.",
}

_TEMPLATE_KEYS = set(DEFAULT_TEMPLATES)

_template_sets: dict[str, Mapping[str, str]] = {"default": dict(DEFAULT_TEMPLATES)}

_SLOT_PATTERNS = {
    "compass": "(?P<compass>" + "|".join(COMPASS_WORDS) + ")",
    "dist": r"(?P<dist>\d+(?:\.\d+)?)",
    "dir": "(?P<dir>" + "|".join(TURN_DIRECTIONS) + ")",
    "landmark": r"(?P<landmark>.+)",
}


def register_template_set(style: str, templates: Mapping[str, str]) -> None:
    if set(templates) != _TEMPLATE_KEYS:
        raise InvalidArgument(
            f"template set needs exactly the keys {sorted(_TEMPLATE_KEYS)}")
    _template_sets[style] = dict(templates)
    _compiled_patterns.pop(style, None)


def get_template_set(style: str) -> Mapping[str, str]:
    try:
        return _template_sets[style]
    except KeyError:
        raise UnknownTemplateSet(f"no template set {style!r}") from None


_compiled_patterns: dict[str, list[tuple[str, re.Pattern]]] = {}


def compiled_patterns(style: str) -> list[tuple[str, re.Pattern]]:
    """Anchored regexes inverting each template, most specific first."""
    cached = _compiled_patterns.get(style)
    if cached is not None:
        return cached
    templates = get_template_set(style)
    patterns = []
    for key in ("turn_landmark", "turn", "orient", "forward"):
        spec = templates[key]
        regex = ""
        pos = 0
        for m in re.finditer(r"\{(compass|dist|dir|landmark)\}", spec):
            regex += re.escape(spec[pos:m.start()])
            regex += _SLOT_PATTERNS[m.group(1)]
            pos = m.end()
        regex += re.escape(spec[pos:])
        patterns.append((key, re.compile("^" + regex + "$")))
    _compiled_patterns[style] = patterns
    return patterns


def format_distance(d: float) -> str:
    return str(int(d)) if float(d).is_integer() else f"{d:.1f}"


def realize(actions: Sequence[CompoundAction], style: str = "default") -> str:
    """One sentence per action, joined with single spaces."""
    templates = get_template_set(style)
    sentences = []
    for act in actions:
        if act.kind == "orient":
            sentences.append(templates["orient"].format(
                compass=compass_word(act.bearing)))
        elif act.kind == "forward":
            sentences.append(templates["forward"].format(
                dist=format_distance(act.distance)))
        elif act.kind == "turn":
            if act.landmark:
                sentences.append(templates["turn_landmark"].format(
                    dir=act.direction, landmark=act.landmark))
            else:
                sentences.append(templates["turn"].format(dir=act.direction))
        else:
            raise InvalidArgument(f"unknown action kind {act.kind!r}")
    return " ".join(sentences)


@dataclass(frozen=True)
class InstructionDoc:
    actions: tuple[CompoundAction, ...]
    text: str
    trajectory_ref: str = ""


def generate(g: NavGraph, x: Sequence[str], trajectory_ref: str = "",
             style: str = "default") -> InstructionDoc:
    actions = tuple(chunk_trajectory(g, x))
    return InstructionDoc(actions, realize(actions, style), trajectory_ref)
