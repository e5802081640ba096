"""Synthetic utterance and episode sampling for corpora and smoke runs."""

from __future__ import annotations

import random
from typing import Sequence

from .location import PhraseLocationExample, Utterance, tokenize
from .pipeline import EpisodeSpec
from .world import NavGraph

_POSITION_OPENERS = (
    "i am near the",
    "i am by the",
    "i think i am at the",
    "im standing near the",
    "here there is a",
)

_GOAL_OPENERS = (
    "i want to get to the",
    "take me to the",
    "i need to reach the",
    "looking for the",
)


def sample_utterance(rng: random.Random, g: NavGraph, vid: str,
                     role: str) -> Utterance:
    """Noisy description of a viewpoint built from its descriptive tokens."""
    toks = list(g.require(vid).desc_tokens)
    if not toks:
        toks = [vid]
    k = min(len(toks), rng.choice((2, 3)))
    picked = rng.sample(toks, k)
    opener = rng.choice(_POSITION_OPENERS if role == "describe_position"
                        else _GOAL_OPENERS)
    return Utterance(f"{opener} {' '.join(picked)}", role)


def make_location_corpus(g: NavGraph, n_train: int, n_test: int,
                         seed: int) -> tuple[list[PhraseLocationExample],
                                             list[PhraseLocationExample]]:
    rng = random.Random(seed)
    ids = g.node_ids()

    def batch(n: int) -> list[PhraseLocationExample]:
        out = []
        for _ in range(n):
            vid = rng.choice(ids)
            utt = sample_utterance(rng, g, vid, "describe_position")
            out.append(PhraseLocationExample(tuple(tokenize(utt.text)), vid,
                                             g.world_id))
        return out

    return batch(n_train), batch(n_test)


def sample_episode(rng: random.Random, g: NavGraph, episode_id: str) -> EpisodeSpec:
    ids = g.node_ids()
    start = rng.choice(ids)
    goal = rng.choice(ids)
    while goal == start:
        goal = rng.choice(ids)
    return EpisodeSpec(
        episode_id=episode_id,
        world_id=g.world_id,
        true_start=start,
        true_goal=goal,
        start_utterance=sample_utterance(rng, g, start, "describe_position"),
        goal_utterance=sample_utterance(rng, g, goal, "describe_goal"),
    )


def make_episode_suite(g: NavGraph, n: int, seed: int,
                       prefix: str = "ep") -> list[EpisodeSpec]:
    rng = random.Random(seed)
    return [sample_episode(rng, g, f"{prefix}{i:04d}") for i in range(n)]


def desc_token_examples(g: NavGraph) -> list[PhraseLocationExample]:
    """One training example per viewpoint straight from its tokens; the
    fallback locator for worlds uploaded without a trained model."""
    out = []
    for vid in g.node_ids():
        toks = g.viewpoints[vid].desc_tokens
        if toks:
            out.append(PhraseLocationExample(tuple(toks), vid, g.world_id))
    return out
