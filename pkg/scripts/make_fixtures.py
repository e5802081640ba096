"""Regenerate every committed fixture under tests/data/.

All outputs are canonical JSON or JSONL, so reruns are byte-identical.
The stairs world and the timed-instruction files are hand-designed; this
script writes them verbatim and sanity-checks the derived expectations
before committing them to disk.
"""

from __future__ import annotations

import json
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wayfinder.generator import chunk_trajectory
from wayfinder.grounder import FollowerConfig, execute, random_follower
from wayfinder.location import (
    build_phrase_dataset,
    dataset_to_jsonl,
    load_timed_file,
    model_to_json,
    train_bow,
)
from wayfinder.metrics import navigation_error
from wayfinder.pipeline import episodes_to_jsonl
from wayfinder.planner import (
    CostModel,
    UserProfile,
    neutral_cost_model,
    plan_astar,
    wheelchair_profile,
)
from wayfinder.seeding import derive_seed
from wayfinder.synth import make_episode_suite, make_location_corpus
from wayfinder.world import NavGraph, Viewpoint, generate_grid_world, world_to_json

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path.relative_to(DATA.parent.parent)}")


# --- hand-designed world: stairs shortcut plus a high-degree hub --------------------

def stairs_world() -> NavGraph:
    """Two planning dilemmas in one floor plan.

    West half: s-k-t is a 12 m shortcut whose first edge is stairs; the
    stair-free detour s-d1-d2-t is 22 m. East half: p-h-q runs 8 m through
    a degree-5 junction, while p-b1-q bypasses it in 10 m, so the route
    flips as soon as branch penalties outweigh 2 m of extra walking.
    """
    vps = [
        Viewpoint("s", (0.0, 0.0, 0.0), frozenset(["lobby"]),
                  ("lobby", "entrance", "doors")),
        Viewpoint("k", (6.0, 0.0, 0.0), frozenset(["stairwell"]),
                  ("stairwell", "metal", "steps")),
        Viewpoint("t", (12.0, 0.0, 0.0), frozenset(["atrium"]),
                  ("atrium", "glass", "bright")),
        Viewpoint("d1", (0.0, 5.0, 0.0), frozenset(["annex"]),
                  ("annex", "quiet", "carpet")),
        Viewpoint("d2", (12.0, 5.0, 0.0), frozenset(["gallery"]),
                  ("gallery", "paintings", "frames")),
        Viewpoint("p", (16.0, 0.0, 0.0), frozenset(["corridor"]),
                  ("corridor", "long", "narrow")),
        Viewpoint("h", (20.0, 0.0, 0.0), frozenset(["junction"]),
                  ("junction", "busy", "signs")),
        Viewpoint("q", (24.0, 0.0, 0.0), frozenset(["cafe"]),
                  ("cafe", "coffee", "tables")),
        Viewpoint("b1", (20.0, -3.0, 0.0), frozenset(["ramp"]),
                  ("ramp", "smooth", "slope")),
        Viewpoint("x1", (20.0, 4.0, 0.0), frozenset(["storage"]),
                  ("storage", "boxes", "dust")),
        Viewpoint("x2", (20.0, -4.0, 0.0), frozenset(["printer"]),
                  ("printer", "paper", "hum")),
        Viewpoint("x3", (18.0, 3.0, 0.0), frozenset(["closet"]),
                  ("closet", "supply", "mops")),
    ]
    edges = [
        ("s", "k", ["stairs"]),
        ("k", "t", []),
        ("s", "d1", []),
        ("d1", "d2", []),
        ("d2", "t", []),
        ("t", "p", []),
        ("p", "h", []),
        ("h", "q", []),
        ("p", "b1", []),
        ("b1", "q", []),
        ("h", "x1", []),
        ("h", "x2", []),
        ("h", "x3", []),
    ]
    return NavGraph("labhall", vps, edges)


def check_stairs_world(g: NavGraph) -> None:
    assert g.degree("h") == 5
    neutral = plan_astar(g, "s", "t", neutral_cost_model())
    assert neutral.trajectory == ("s", "k", "t"), neutral.trajectory
    wheels = plan_astar(g, "s", "t", CostModel(wheelchair_profile()))
    assert wheels.trajectory == ("s", "d1", "d2", "t"), wheels.trajectory
    assert wheels.length_m > neutral.length_m

    lam0 = CostModel(UserProfile("guide", {}), 0.0, 2.0)
    lam1 = CostModel(UserProfile("guide", {}), 1.0, 2.0)
    assert plan_astar(g, "t", "q", lam0).trajectory == ("t", "p", "h", "q")
    assert plan_astar(g, "t", "q", lam1).trajectory == ("t", "p", "b1", "q")


# --- timed instructions with hand-derived phrase assignments ------------------------

TIMED_CORRIDOR = {
    "tokens": [
        {"w": "i", "t": 1.0}, {"w": "m", "t": 1.5}, {"w": "at", "t": 2.0},
        {"w": "the", "t": 2.5}, {"w": "lobby.", "t": 3.0},
        {"w": "passing", "t": 6.0}, {"w": "the", "t": 6.5},
        {"w": "stairwell", "t": 7.0}, {"w": "now.", "t": 8.0},
        {"w": "big", "t": 12.5}, {"w": "glass", "t": 13.0},
        {"w": "atrium.", "t": 14.0},
    ],
    "trace": [{"t": 0.0, "v": "s"}, {"t": 5.0, "v": "k"},
              {"t": 12.0, "v": "t"}],
}

TIMED_DETOUR = {
    "tokens": [
        {"w": "ok.", "t": 2.0},
        {"w": "...", "t": 3.0},
        {"w": "quiet", "t": 4.5}, {"w": "annex", "t": 5.0},
        {"w": "here.", "t": 5.5},
        {"w": "lots", "t": 11.0}, {"w": "of", "t": 12.0},
        {"w": "paintings.", "t": 13.0},
        {"w": "back", "t": 17.0}, {"w": "in", "t": 17.5},
        {"w": "the", "t": 18.0}, {"w": "atrium", "t": 18.5},
    ],
    "trace": [{"t": 0.0, "v": "s"}, {"t": 4.0, "v": "d1"},
              {"t": 10.0, "v": "d2"}, {"t": 16.0, "v": "t"}],
}

TIMED_HUB = {
    "tokens": [
        {"w": "long", "t": 1.0}, {"w": "corridor!", "t": 2.0},
        {"w": "busy", "t": 7.5}, {"w": "junction?", "t": 8.0},
        {"w": "smell", "t": 10.0}, {"w": "of", "t": 11.0},
        {"w": "coffee.", "t": 12.0},
    ],
    "trace": [{"t": 0.0, "v": "t"}, {"t": 3.0, "v": "p"},
              {"t": 7.0, "v": "h"}, {"t": 11.0, "v": "q"}],
}

# Midpoint-of-phrase rule, worked by hand:
#   corridor: midpoints 2.0, 7.0, 13.25 against trace times (0, 5, 12)
#   detour:   midpoints 2.0, 5.0, 12.0, 17.75 against (0, 4, 10, 16);
#             the "..." word contributes no tokens
#   hub:      midpoints 1.5, 7.75, 11.0 against (0, 3, 7, 11); the last
#             midpoint sits exactly on the q boundary and lands in q
EXPECTED_PHRASES = [
    {"tokens": ["i", "m", "at", "the", "lobby"], "viewpoint": "s"},
    {"tokens": ["passing", "the", "stairwell", "now"], "viewpoint": "k"},
    {"tokens": ["big", "glass", "atrium"], "viewpoint": "t"},
    {"tokens": ["ok"], "viewpoint": "s"},
    {"tokens": ["quiet", "annex", "here"], "viewpoint": "d1"},
    {"tokens": ["lots", "of", "paintings"], "viewpoint": "d2"},
    {"tokens": ["back", "in", "the", "atrium"], "viewpoint": "t"},
    {"tokens": ["long", "corridor"], "viewpoint": "t"},
    {"tokens": ["busy", "junction"], "viewpoint": "h"},
    {"tokens": ["smell", "of", "coffee"], "viewpoint": "q"},
]


def check_timed_fixtures(g: NavGraph) -> str:
    examples = []
    for doc in (TIMED_CORRIDOR, TIMED_DETOUR, TIMED_HUB):
        timed, trace = load_timed_file(json.dumps(doc))
        examples.extend(build_phrase_dataset(timed, trace, g))
    got = [{"tokens": list(e.tokens), "viewpoint": e.viewpoint}
           for e in examples]
    assert got == EXPECTED_PHRASES, got
    return dataset_to_jsonl(examples)


# --- grid corpus, follower suite, e2e episodes --------------------------------------

def follower_suite() -> list[dict]:
    rng = random.Random(31)
    lines = []
    for seed in range(101, 106):
        g = generate_grid_world(5, 5, 3.0, seed)
        ids = g.node_ids()
        for _ in range(100):
            start, goal = rng.sample(ids, 2)
            lines.append({"world": {"rows": 5, "cols": 5, "spacing": 3.0,
                                    "seed": seed},
                          "start": start, "goal": goal})
    return lines


def follower_suite_margins(lines: list[dict]) -> None:
    """Confirm the committed suite separates the three followers cleanly."""
    worlds = {}
    n = len(lines)
    clean = noisy = rand = 0
    for i, rec in enumerate(lines):
        w = rec["world"]
        key = w["seed"]
        if key not in worlds:
            worlds[key] = generate_grid_world(w["rows"], w["cols"],
                                              w["spacing"], w["seed"])
        g = worlds[key]
        plan = plan_astar(g, rec["start"], rec["goal"], neutral_cost_model())
        actions = chunk_trajectory(g, plan.trajectory)
        out = execute(g, rec["start"], actions, FollowerConfig())
        clean += navigation_error(g, out[-1], rec["goal"]) <= 3.0
        out = execute(g, rec["start"], actions,
                      FollowerConfig(noise_epsilon=0.2,
                                     seed=derive_seed(2024, f"noisy{i:04d}")))
        noisy += navigation_error(g, out[-1], rec["goal"]) <= 3.0
        k = len(plan.trajectory) - 1
        out = random_follower(g, rec["start"], k,
                              seed=derive_seed(2024, f"rand{i:04d}"))
        rand += navigation_error(g, out[-1], rec["goal"]) <= 3.0
    print(f"  follower suite: clean {clean / n:.3f}, "
          f"noisy(0.2) {noisy / n:.3f}, random {rand / n:.3f}")
    assert clean == n
    assert 0.05 < noisy / n < 0.95
    assert noisy > rand


def main() -> None:
    g = stairs_world()
    check_stairs_world(g)
    write(DATA / "stairs_world.json", world_to_json(g))
    write(DATA / "stairs_pairs.jsonl", "".join(
        json.dumps({"start": a, "goal": b}) + "\n"
        for a, b in [("s", "t"), ("t", "q"), ("s", "q"), ("q", "s"),
                     ("d1", "q")]))
    for name, weight in (("profile_lambda0.json", 0.0),
                         ("profile_lambda1.json", 1.0)):
        write(DATA / name, json.dumps({
            "name": "guide",
            "multipliers": {},
            "describability_weight": weight,
            "branch_penalty": 2.0,
        }, indent=2, sort_keys=True) + "\n")
    write(DATA / "profile_wheelchair.json", json.dumps({
        "name": "wheelchair",
        "multipliers": {"stairs": "forbidden"},
    }, indent=2, sort_keys=True) + "\n")

    for name, doc in (("timed_corridor.json", TIMED_CORRIDOR),
                      ("timed_detour.json", TIMED_DETOUR),
                      ("timed_hub.json", TIMED_HUB)):
        write(DATA / name, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    write(DATA / "expected_phrases.jsonl", check_timed_fixtures(g))

    grid = generate_grid_world(5, 5, 3.0, 7)
    write(DATA / "grid5_world.json", world_to_json(grid))
    train, test = make_location_corpus(grid, 500, 100, seed=13)
    write(DATA / "loc_train.jsonl", dataset_to_jsonl(train))
    write(DATA / "loc_test.jsonl", dataset_to_jsonl(test))
    model = train_bow(train)
    write(DATA / "loc_model.json", model_to_json(model))

    lines = follower_suite()
    follower_suite_margins(lines)
    write(DATA / "follower_suite.jsonl",
          "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in lines))

    episodes = make_episode_suite(grid, 100, seed=21)
    write(DATA / "e2e_episodes.jsonl", episodes_to_jsonl(episodes))


if __name__ == "__main__":
    main()
