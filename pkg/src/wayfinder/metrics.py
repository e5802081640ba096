"""Navigation metrics: error, success, oracle success, SPL, and reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyInput, InvalidArgument
from .world import NavGraph, geodesic_distance, walk_length

SUCCESS_THRESHOLD_M = 3.0


@dataclass(frozen=True)
class EpisodeOutcome:
    episode_id: str
    goal: str
    grounded_path: tuple[str, ...]
    shortest_len: float
    walked_len: float
    error: float
    success: bool
    oracle_success: bool
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EvalReport:
    n_episodes: int
    mean_error: float
    success_rate: float
    oracle_success_rate: float
    spl: float
    per_episode: tuple[EpisodeOutcome, ...]


def navigation_error(g: NavGraph, final: str, goal: str) -> float:
    return geodesic_distance(g, final, goal)


def is_success(error: float, threshold: float = SUCCESS_THRESHOLD_M) -> bool:
    """Boundary is inclusive: error == threshold counts as success."""
    if error < 0:
        raise InvalidArgument("error must be nonnegative")
    return error <= threshold


def oracle_success(g: NavGraph, path: Sequence[str], goal: str,
                   threshold: float = SUCCESS_THRESHOLD_M) -> bool:
    """True if any visited node is within the threshold of the goal."""
    if not path:
        raise EmptyInput("oracle_success needs a nonempty path")
    return any(geodesic_distance(g, v, goal) <= threshold for v in path)


def spl_term(success: bool, shortest_len: float, walked_len: float) -> float:
    """Per-episode S * l / max(p, l); a degenerate l == 0 yields S itself."""
    s = 1.0 if success else 0.0
    if shortest_len == 0.0:
        return s
    return s * shortest_len / max(walked_len, shortest_len)


def episode_outcome(g: NavGraph, episode_id: str, path: Sequence[str], goal: str,
                    threshold: float = SUCCESS_THRESHOLD_M) -> EpisodeOutcome:
    if not path:
        raise EmptyInput(f"episode {episode_id}: empty trajectory")
    g.require(goal)
    walked = walk_length(g, path)
    shortest = geodesic_distance(g, path[0], goal)
    err = navigation_error(g, path[-1], goal)
    succ = is_success(err, threshold)
    return EpisodeOutcome(
        episode_id=episode_id,
        goal=goal,
        grounded_path=tuple(path),
        shortest_len=shortest,
        walked_len=walked,
        error=err,
        success=succ,
        oracle_success=oracle_success(g, path, goal, threshold),
    )


def spl(outcomes: Sequence[EpisodeOutcome]) -> float:
    if not outcomes:
        raise EmptyInput("spl of zero episodes")
    return sum(spl_term(o.success, o.shortest_len, o.walked_len)
               for o in outcomes) / len(outcomes)


def summarize(outcomes: Sequence[EpisodeOutcome]) -> EvalReport:
    if not outcomes:
        raise EmptyInput("summarize of zero episodes")
    n = len(outcomes)
    return EvalReport(
        n_episodes=n,
        mean_error=sum(o.error for o in outcomes) / n,
        success_rate=sum(o.success for o in outcomes) / n,
        oracle_success_rate=sum(o.oracle_success for o in outcomes) / n,
        spl=spl(outcomes),
        per_episode=tuple(outcomes),
    )


def aggregate(g: NavGraph, episodes: Sequence[tuple[Sequence[str], str]],
              threshold: float = SUCCESS_THRESHOLD_M) -> EvalReport:
    """Score a batch of (trajectory, goal) pairs.

    Per-episode failures are re-raised with the episode id prepended.
    """
    if not episodes:
        raise EmptyInput("aggregate of zero episodes")
    outcomes = []
    for i, (path, goal) in enumerate(episodes):
        eid = f"ep{i:04d}"
        try:
            outcomes.append(episode_outcome(g, eid, path, goal, threshold))
        except Exception as err:
            raise err.__class__(f"episode {eid}: {err}") from err
    return summarize(outcomes)


# --- serialization -------------------------------------------------------------

def outcome_to_dict(o: EpisodeOutcome) -> dict:
    rec = {
        "episode_id": o.episode_id,
        "goal": o.goal,
        "path": list(o.grounded_path),
        "shortest_len_m": o.shortest_len,
        "walked_len_m": o.walked_len,
        "error_m": o.error,
        "success": o.success,
        "oracle_success": o.oracle_success,
        "spl_term": spl_term(o.success, o.shortest_len, o.walked_len),
    }
    if o.diagnostics:
        rec["diagnostics"] = dict(sorted(o.diagnostics.items()))
    return rec


def report_to_dict(r: EvalReport) -> dict:
    # percentages serialized at two decimals; raw floats kept per episode
    return {
        "n_episodes": r.n_episodes,
        "mean_error_m": round(r.mean_error, 2),
        "success_pct": round(100.0 * r.success_rate, 2),
        "oracle_success_pct": round(100.0 * r.oracle_success_rate, 2),
        "spl_pct": round(100.0 * r.spl, 2),
        "per_episode": [outcome_to_dict(o) for o in r.per_episode],
    }


def report_to_json(r: EvalReport) -> str:
    return json.dumps(report_to_dict(r), indent=2, sort_keys=True) + "\n"


CSV_COLUMNS = ("episode_id", "error", "success", "oracle", "spl_term")


def render_csv(report_doc: dict) -> str:
    """Flat per-episode CSV from a parsed report document."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in report_doc["per_episode"]:
        w.writerow([
            rec["episode_id"],
            f"{rec['error_m']:.2f}",
            int(rec["success"]),
            int(rec["oracle_success"]),
            f"{rec['spl_term']:.4f}",
        ])
    return buf.getvalue()


TABLE_HEADERS = ("Error (m)", "Success (%)", "Oracle Succ. (%)", "SPL (%)")


def render_table(report_doc: dict) -> str:
    """Four-column summary table in the conventional layout."""
    values = (
        f"{report_doc['mean_error_m']:.2f}",
        f"{report_doc['success_pct']:.2f}",
        f"{report_doc['oracle_success_pct']:.2f}",
        f"{report_doc['spl_pct']:.2f}",
    )
    widths = [max(len(h), len(v)) for h, v in zip(TABLE_HEADERS, values)]
    head = "  ".join(h.rjust(w) for h, w in zip(TABLE_HEADERS, widths))
    row = "  ".join(v.rjust(w) for v, w in zip(values, widths))
    return f"{head}\n{row}\n"
