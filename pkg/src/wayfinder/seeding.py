"""Seed splitting and the parallelism cap shared by batch runners."""

from __future__ import annotations

import hashlib
import os

THREADS_ENV_VAR = "WAYFINDER_THREADS"


def derive_seed(root_seed: int, episode_id: str) -> int:
    """Stable per-episode seed split, independent of episode order."""
    digest = hashlib.sha256(f"{root_seed}\x1f{episode_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def max_workers(n_tasks: int) -> int:
    """Parallelism cap from the environment (serial by default)."""
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        cap = int(raw)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_tasks))
