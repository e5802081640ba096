"""Closed-loop navigation instructions: localize, plan, instruct, follow, score."""

from .errors import WayfinderError
from .generator import CompoundAction, InstructionDoc, chunk_trajectory, generate, realize
from .grounder import FollowerConfig, execute, parse_instructions, random_follower
from .location import BowModel, belief_init, belief_update, locate, tokenize, train_bow
from .metrics import EpisodeOutcome, EvalReport, aggregate, episode_outcome, summarize
from .pipeline import EpisodeSpec, run_episode, run_eval
from .planner import FORBIDDEN, CostModel, UserProfile, evaluate_planner, plan_astar
from .world import NavGraph, generate_grid_world, geodesic_distance, load_world

__all__ = [
    "WayfinderError",
    "CompoundAction", "InstructionDoc", "chunk_trajectory", "generate", "realize",
    "FollowerConfig", "execute", "parse_instructions", "random_follower",
    "BowModel", "belief_init", "belief_update", "locate", "tokenize", "train_bow",
    "EpisodeOutcome", "EvalReport", "aggregate", "episode_outcome", "summarize",
    "EpisodeSpec", "run_episode", "run_eval",
    "FORBIDDEN", "CostModel", "UserProfile", "evaluate_planner", "plan_astar",
    "NavGraph", "generate_grid_world", "geodesic_distance", "load_world",
]

__version__ = "0.1.0"
