"""Counter-keyed random streams.

Every stream is a pure function of ``(seed, *keys)``; no generator state is
shared between call sites, so replications and re-runs are reproducible
regardless of execution order.
"""
from __future__ import annotations

import numpy as np

ROLES = {"data": 0, "sim": 1, "solver": 2, "start": 3, "cover": 4}


def stream(seed: int, *keys: int) -> np.random.Generator:
    keys = tuple(int(k) for k in keys)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=keys))


def child_seed(master_seed: int, replication: int, role: str) -> int:
    """64-bit seed for one (replication, role) pair."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(replication), ROLES[role]))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
