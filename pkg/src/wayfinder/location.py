"""Single-utterance localization: Bag-of-Words scoring and belief filtering.

The token model is a Laplace-smoothed unigram distribution per viewpoint
with one shared slot for unseen tokens. Belief tracking runs a discrete
Bayes filter whose motion model stays put with probability 0.5 and spreads
the remainder uniformly over neighbors.
"""

from __future__ import annotations

import json
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DegenerateBelief,
    EmptyInput,
    EmptyTrace,
    InvalidArgument,
    MixedWorlds,
    ParseError,
    UnknownViewpoint,
    UnorderedTimestamps,
    WorldMismatch,
)
from .world import NavGraph

_TOKEN_RE = re.compile(r"[a-z0-9]+")

STAY_PROB = 0.5


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Utterance:
    text: str
    role: str  # "describe_position" | "describe_goal"


@dataclass(frozen=True)
class PhraseLocationExample:
    tokens: tuple[str, ...]
    viewpoint: str
    world_id: str


@dataclass(frozen=True)
class BowModel:
    world_id: str
    vocab: frozenset[str]
    counts: dict[str, dict[str, int]]   # viewpoint -> token -> count
    totals: dict[str, int]              # viewpoint -> total token count
    prior: dict[str, float]             # viewpoint -> example frequency
    alpha: float

    def known(self, vid: str) -> bool:
        return vid in self.prior


@dataclass(frozen=True)
class BeliefState:
    world_id: str
    probs: dict[str, float]


def train_bow(examples: Sequence[PhraseLocationExample],
              alpha: float = 1.0) -> BowModel:
    if not examples:
        raise EmptyInput("no training examples")
    if alpha <= 0:
        raise InvalidArgument("alpha must be positive")
    world_ids = {ex.world_id for ex in examples}
    if len(world_ids) > 1:
        raise MixedWorlds(f"examples span worlds {sorted(world_ids)}")
    counts: dict[str, dict[str, int]] = {}
    totals: dict[str, int] = {}
    seen: dict[str, int] = {}
    vocab: set[str] = set()
    for i, ex in enumerate(examples):
        if not ex.tokens:
            raise InvalidArgument(f"example {i} has no tokens")
        vp_counts = counts.setdefault(ex.viewpoint, {})
        for tok in ex.tokens:
            vp_counts[tok] = vp_counts.get(tok, 0) + 1
            vocab.add(tok)
        totals[ex.viewpoint] = totals.get(ex.viewpoint, 0) + len(ex.tokens)
        seen[ex.viewpoint] = seen.get(ex.viewpoint, 0) + 1
    n = len(examples)
    prior = {v: k / n for v, k in seen.items()}
    return BowModel(world_ids.pop(), frozenset(vocab), counts, totals, prior, alpha)


def token_prob(model: BowModel, token: str, vid: str) -> float:
    """Smoothed p(token | viewpoint); tokens outside the vocabulary share
    one unseen slot. Defined for any viewpoint (zero counts if untrained)."""
    c = model.counts.get(vid, {}).get(token, 0)
    total = model.totals.get(vid, 0)
    denom = total + model.alpha * (len(model.vocab) + 1)
    return (c + model.alpha) / denom


def score(model: BowModel, tokens: Sequence[str], vid: str) -> float:
    """log prior(v) + sum of log token probabilities."""
    if not model.known(vid):
        raise UnknownViewpoint(f"viewpoint {vid!r} absent from training data")
    total = math.log(model.prior[vid])
    for tok in tokens:
        total += math.log(token_prob(model, tok, vid))
    return total


def _check_world(model: BowModel, g: NavGraph) -> None:
    if model.world_id != g.world_id:
        raise WorldMismatch(
            f"model world {model.world_id!r} != graph world {g.world_id!r}")
    for vid in model.prior:
        if vid not in g.viewpoints:
            raise WorldMismatch(f"model viewpoint {vid!r} missing from world")


def locate(model: BowModel, g: NavGraph, utterance: Utterance) -> tuple[str, float]:
    """Most probable viewpoint for one utterance, with its log score.

    Untrained viewpoints carry zero prior, so the argmax ranges over the
    trained ones; exact ties resolve to the ascending-id winner. An empty
    utterance falls back to the prior.
    """
    _check_world(model, g)
    tokens = tokenize(utterance.text)
    best: str | None = None
    best_score = -math.inf
    for vid in sorted(model.prior):
        s = score(model, tokens, vid)
        if s > best_score:
            best, best_score = vid, s
    assert best is not None
    return best, best_score


def belief_init(g: NavGraph) -> BeliefState:
    n = len(g.viewpoints)
    return BeliefState(g.world_id, {v: 1.0 / n for v in g.viewpoints})


def belief_update(belief: BeliefState, model: BowModel, g: NavGraph,
                  tokens: Sequence[str]) -> BeliefState:
    """One motion-then-observation step of the discrete Bayes filter.

    Raises DegenerateBelief instead of renormalizing if every posterior
    entry underflows to zero.
    """
    if belief.world_id != g.world_id:
        raise WorldMismatch(
            f"belief world {belief.world_id!r} != graph world {g.world_id!r}")
    _check_world(model, g)
    predicted: dict[str, float] = {v: STAY_PROB * belief.probs.get(v, 0.0)
                                   for v in g.viewpoints}
    for src in g.viewpoints:
        mass = belief.probs.get(src, 0.0)
        if mass == 0.0:
            continue
        adj = g.adjacency(src)
        if not adj:
            predicted[src] += (1.0 - STAY_PROB) * mass
            continue
        share = (1.0 - STAY_PROB) * mass / len(adj)
        for nid, _ in adj:
            predicted[nid] += share
    posterior: dict[str, float] = {}
    for v, p in predicted.items():
        like = 1.0
        for tok in tokens:
            like *= token_prob(model, tok, v)
        posterior[v] = p * like
    total = sum(posterior.values())
    if total <= 0.0 or not math.isfinite(total):
        raise DegenerateBelief("posterior mass vanished")
    return BeliefState(g.world_id, {v: p / total for v, p in posterior.items()})


def belief_argmax(belief: BeliefState) -> str:
    """Highest-probability viewpoint, ascending id on ties."""
    if not belief.probs:
        raise EmptyInput("empty belief")
    best, best_p = None, -1.0
    for vid in sorted(belief.probs):
        p = belief.probs[vid]
        if p > best_p:
            best, best_p = vid, p
    return best


# --- dataset surgery ------------------------------------------------------------

TimedInstruction = Sequence[tuple[str, float]]   # (word, seconds)
PoseTrace = Sequence[tuple[float, str]]          # (seconds, viewpoint)

_SENTENCE_FINAL = (".", "!", "?")


def build_phrase_dataset(timed: TimedInstruction, trace: PoseTrace,
                         g: NavGraph) -> list[PhraseLocationExample]:
    """Split a timed instruction into phrases and pin each to the viewpoint
    occupied at the phrase's temporal midpoint.

    Phrases end at words carrying sentence-final punctuation; phrases that
    tokenize to nothing are dropped.
    """
    if not trace:
        raise EmptyTrace("pose trace has no entries")
    trace_times = [t for t, _ in trace]
    if any(b <= a for a, b in zip(trace_times, trace_times[1:])):
        raise UnorderedTimestamps("trace timestamps must strictly increase")
    for _, vid in trace:
        g.require(vid)
    word_times = [t for _, t in timed]
    if any(b < a for a, b in zip(word_times, word_times[1:])):
        raise UnorderedTimestamps("token timestamps must be nondecreasing")

    def viewpoint_at(t: float) -> str:
        idx = bisect_right(trace_times, t) - 1
        if idx < 0:
            idx = 0
        return trace[idx][1]

    examples: list[PhraseLocationExample] = []
    cur_tokens: list[str] = []
    cur_times: list[float] = []

    def close_phrase() -> None:
        nonlocal cur_tokens, cur_times
        if cur_tokens:
            mid = (cur_times[0] + cur_times[-1]) / 2.0
            examples.append(PhraseLocationExample(
                tuple(cur_tokens), viewpoint_at(mid), g.world_id))
        cur_tokens, cur_times = [], []

    for word, t in timed:
        toks = tokenize(word)
        cur_tokens.extend(toks)
        cur_times.extend(t for _ in toks)
        if word.rstrip().endswith(_SENTENCE_FINAL):
            close_phrase()
    close_phrase()
    return examples


# --- serialization ----------------------------------------------------------------

def model_to_json(model: BowModel) -> str:
    doc = {
        "world_id": model.world_id,
        "alpha": model.alpha,
        "vocab": sorted(model.vocab),
        "counts": model.counts,
        "totals": model.totals,
        "prior": model.prior,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(data: bytes | str) -> BowModel:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid model JSON: {e}") from None
    try:
        return BowModel(
            world_id=doc["world_id"],
            vocab=frozenset(doc["vocab"]),
            counts={v: dict(c) for v, c in doc["counts"].items()},
            totals=dict(doc["totals"]),
            prior=dict(doc["prior"]),
            alpha=float(doc["alpha"]),
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise ParseError(f"malformed model document: {e}") from None


def dataset_to_jsonl(examples: Iterable[PhraseLocationExample]) -> str:
    lines = []
    for ex in examples:
        lines.append(json.dumps(
            {"text": " ".join(ex.tokens), "viewpoint": ex.viewpoint,
             "world_id": ex.world_id},
            sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def dataset_from_jsonl(data: bytes | str) -> list[PhraseLocationExample]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    examples = []
    for i, line in enumerate(data.splitlines()):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {i + 1}: invalid JSON: {e}") from None
        try:
            examples.append(PhraseLocationExample(
                tuple(tokenize(doc["text"])), doc["viewpoint"], doc["world_id"]))
        except (KeyError, TypeError) as e:
            raise ParseError(f"line {i + 1}: malformed example: {e}") from None
    return examples


def load_timed_file(data: bytes | str) -> tuple[list[tuple[str, float]],
                                                list[tuple[float, str]]]:
    """Parse a timed-instruction document: {"tokens": [{"w","t"}], "trace": [{"t","v"}]}."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid timed-instruction JSON: {e}") from None
    if not isinstance(doc, dict) or set(doc) != {"tokens", "trace"}:
        raise ParseError("timed instruction must have exactly tokens and trace")
    try:
        timed = [(tok["w"], float(tok["t"])) for tok in doc["tokens"]]
        trace = [(float(entry["t"]), entry["v"]) for entry in doc["trace"]]
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed timed instruction: {e}") from None
    return timed, trace
