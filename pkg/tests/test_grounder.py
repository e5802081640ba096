import math
import random

import pytest

from wayfinder.errors import InvalidArgument, UnknownViewpoint, UnparsableSentence
from wayfinder.generator import chunk_trajectory, forward, orient, realize, turn
from wayfinder.grounder import (
    FORWARD_CONE_RAD,
    FollowerConfig,
    execute,
    parse_instructions,
    random_follower,
)
from wayfinder.world import NavGraph, Viewpoint, generate_grid_world

from conftest import line_world

EAST = math.pi / 2
WEST = 3 * math.pi / 2


def cfg(**kw) -> FollowerConfig:
    return FollowerConfig(**kw)


# --- parsing -------------------------------------------------------------------

def test_parse_reports_offending_sentence():
    with pytest.raises(UnparsableSentence) as err:
        parse_instructions("Face east. Walk six meters. Turn left.")
    assert err.value.index == 1
    assert err.value.sentence == "Walk six meters."


def test_parse_empty_text():
    assert parse_instructions("") == []
    assert parse_instructions("   ") == []


def test_parse_decimal_distances_survive_sentence_split():
    actions = parse_instructions("Walk 2.5 meters. Walk 10 meters.")
    assert actions == [forward(2.5), forward(10.0)]


def test_follower_config_validation():
    with pytest.raises(InvalidArgument):
        cfg(noise_epsilon=-0.1)
    with pytest.raises(InvalidArgument):
        cfg(noise_epsilon=1.5)
    with pytest.raises(InvalidArgument):
        cfg(max_steps=0)


# --- noiseless execution ----------------------------------------------------------

def test_straight_line_walk():
    g = line_world(4)
    out = execute(g, "c0", [orient(EAST), forward(9.0)], cfg())
    assert out == ["c0", "c1", "c2", "c3"]


def test_execute_unknown_start():
    with pytest.raises(UnknownViewpoint):
        execute(line_world(2), "nope", [], cfg())


def test_forward_stops_when_remaining_under_half_edge():
    g = line_world(4)  # 3 m edges
    assert execute(g, "c0", [orient(EAST), forward(4.0)], cfg()) == ["c0", "c1"]
    # remaining exactly half the edge still moves
    assert execute(g, "c0", [orient(EAST), forward(4.5)], cfg()) == \
        ["c0", "c1", "c2"]
    assert execute(g, "c0", [orient(EAST), forward(1.0)], cfg()) == ["c0"]


def test_initial_heading_is_north():
    # at c0 the only neighbor lies east, exactly on the cone boundary
    g = line_world(3)
    assert FORWARD_CONE_RAD == pytest.approx(math.pi / 2)
    out = execute(g, "c0", [forward(3.0)], cfg())
    assert out == ["c0", "c1"]


def test_turns_rotate_the_heading():
    g = line_world(3)
    # right from north faces east; around from east faces west
    assert execute(g, "c0", [turn("right"), forward(3.0)], cfg()) == ["c0", "c1"]
    out = execute(g, "c1", [orient(EAST), turn("around"), forward(3.0)], cfg())
    assert out == ["c1", "c0"]
    # facing north on an east-west line: both neighbors sit exactly on the
    # inclusive cone boundary, so the tie goes to the smaller id
    out = execute(g, "c1", [orient(EAST), turn("left"), forward(3.0)], cfg())
    assert out == ["c1", "c0"]
    out = execute(g, "c0", [orient(WEST), forward(3.0)], cfg())
    assert out == ["c0"]  # only neighbor is directly behind


def test_dead_end_ends_forward_silently():
    g = line_world(4)
    out = execute(g, "c0", [orient(EAST), forward(50.0)], cfg())
    assert out == ["c0", "c1", "c2", "c3"]


def test_heading_resnaps_to_traversed_edge():
    ang = math.radians(20.0)
    c_pos = (3.0 * math.sin(ang), 3.0 + 3.0 * math.cos(ang), 0.0)
    vps = [Viewpoint("a", (0.0, 0.0, 0.0)), Viewpoint("b", (0.0, 3.0, 0.0)),
           Viewpoint("c", c_pos)]
    g = NavGraph("w", vps, [("a", "b", []), ("b", "c", [])])
    out = execute(g, "a", [orient(0.0), forward(6.0)], cfg())
    assert out == ["a", "b", "c"]


def test_bearing_tie_prefers_smaller_id():
    g = generate_grid_world(3, 3, 3.0, 0)
    # heading northeast from the center: north and east neighbors tie
    out = execute(g, "n01x01",
                  [orient(math.pi / 4), forward(3.0)], cfg())
    assert out == ["n01x01", "n01x02"]


def test_max_steps_caps_trajectory_length():
    g = line_world(6)
    out = execute(g, "c0", [orient(EAST), forward(100.0)], cfg(max_steps=2))
    assert out == ["c0", "c1", "c2"]
    # cap applies across actions, not per action
    out = execute(g, "c0", [orient(EAST), forward(3.0), forward(3.0)],
                  cfg(max_steps=1))
    assert out == ["c0", "c1"]


def test_noiseless_execution_ignores_seed():
    g = generate_grid_world(4, 4, 3.0, 2)
    actions = parse_instructions(
        "Face east. Walk 9 meters. Turn left. Walk 6 meters.")
    a = execute(g, "n00x00", actions, cfg(seed=1))
    b = execute(g, "n00x00", actions, cfg(seed=999))
    assert a == b


def test_generated_instructions_round_trip_through_follower():
    g = generate_grid_world(5, 5, 3.0, 7)
    rng = random.Random(3)
    from wayfinder.planner import neutral_cost_model, plan_astar
    ids = g.node_ids()
    for _ in range(25):
        start, goal = rng.choice(ids), rng.choice(ids)
        plan = plan_astar(g, start, goal, neutral_cost_model())
        actions = parse_instructions(realize(chunk_trajectory(g, plan.trajectory)))
        out = execute(g, start, actions, cfg())
        assert out == list(plan.trajectory)


# --- noisy execution --------------------------------------------------------------------

def noisy_oracle(g, start, actions, noise, max_steps, seed):
    """Replays the documented per-move randomness protocol from scratch."""
    rng = random.Random(seed)
    node = start
    heading = 0.0
    visited = [start]
    steps = 0
    for act in actions:
        if act.kind == "orient":
            heading = act.bearing % (2 * math.pi)
        elif act.kind == "turn":
            delta = {"left": -math.pi / 2, "right": math.pi / 2,
                     "around": math.pi}[act.direction]
            heading = (heading + delta) % (2 * math.pi)
        else:
            remaining = act.distance
            while True:
                if steps >= max_steps:
                    return visited
                adj = g.adjacency(node)
                if rng.random() < noise:
                    nid, e = adj[rng.randrange(len(adj))]
                else:
                    raise AssertionError("oracle only covers noise=1")
                if remaining < e.length / 2.0:
                    break
                from wayfinder.world import heading_between
                heading = heading_between(g, node, nid)
                node = nid
                visited.append(nid)
                steps += 1
                remaining -= e.length
    return visited


@pytest.mark.parametrize("seed", range(8))
def test_full_noise_matches_rng_protocol_oracle(seed):
    g = generate_grid_world(4, 4, 3.0, 1)
    actions = parse_instructions("Face east. Walk 9 meters. Turn left. "
                                 "Walk 9 meters. Turn right. Walk 6 meters.")
    ours = execute(g, "n00x00", actions, cfg(noise_epsilon=1.0, seed=seed))
    expected = noisy_oracle(g, "n00x00", actions, 1.0, 100, seed)
    assert ours == expected


def test_noise_is_reproducible_and_seed_sensitive():
    g = generate_grid_world(4, 4, 3.0, 1)
    actions = parse_instructions("Face east. Walk 9 meters. Turn left. "
                                 "Walk 9 meters.")
    runs = {tuple(execute(g, "n00x00", actions,
                          cfg(noise_epsilon=0.5, seed=s))) for s in range(30)}
    assert len(runs) > 1
    again = execute(g, "n00x00", actions, cfg(noise_epsilon=0.5, seed=4))
    assert tuple(again) in runs


def test_noise_degrades_goal_reaching():
    from wayfinder.metrics import navigation_error
    from wayfinder.planner import neutral_cost_model, plan_astar

    g = generate_grid_world(5, 5, 3.0, 3)
    rng = random.Random(11)
    ids = g.node_ids()
    episodes = []
    for _ in range(60):
        start, goal = rng.sample(ids, 2)
        plan = plan_astar(g, start, goal, neutral_cost_model())
        actions = chunk_trajectory(g, plan.trajectory)
        episodes.append((start, goal, actions))

    def success_rate(noise):
        hits = 0
        for i, (start, goal, actions) in enumerate(episodes):
            out = execute(g, start, actions,
                          cfg(noise_epsilon=noise, seed=i))
            hits += navigation_error(g, out[-1], goal) <= 3.0
        return hits / len(episodes)

    assert success_rate(0.0) == 1.0
    assert success_rate(0.3) < 1.0


# --- random baseline ----------------------------------------------------------------------

def test_random_follower_walk_shape_and_determinism():
    g = generate_grid_world(3, 3, 3.0, 0)
    walk = random_follower(g, "n00x00", 10, seed=5)
    assert len(walk) == 11
    assert walk[0] == "n00x00"
    for a, b in zip(walk, walk[1:]):
        assert g.edge_between(a, b) is not None
    assert walk == random_follower(g, "n00x00", 10, seed=5)
    assert walk != random_follower(g, "n00x00", 10, seed=6)


def test_random_follower_matches_rng_protocol():
    g = generate_grid_world(3, 3, 3.0, 0)
    rng = random.Random(9)
    node = "n01x01"
    expected = [node]
    for _ in range(6):
        adj = g.adjacency(node)
        node = adj[rng.randrange(len(adj))][0]
        expected.append(node)
    assert random_follower(g, "n01x01", 6, seed=9) == expected


def test_random_follower_validation():
    g = line_world(2)
    with pytest.raises(InvalidArgument):
        random_follower(g, "c0", -1, seed=0)
    with pytest.raises(UnknownViewpoint):
        random_follower(g, "zz", 3, seed=0)
