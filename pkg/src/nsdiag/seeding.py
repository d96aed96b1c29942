"""Deterministic stream derivation for all stochastic operations.

Every stochastic routine in this package takes an integer ``seed`` and, where
it runs many independent sub-tasks (bootstrap replications, simulated log X
rows, batches of runs), derives one child stream per sub-task from the
counter path ``(seed, index...)``.  Results are therefore reproducible and
independent of how the sub-tasks are scheduled across workers.

The generator algorithm is numpy's PCG64, keyed through ``SeedSequence``.
"""

import numpy as np


def rng_for(seed, *path):
    """Return the PCG64 generator for counter path ``(seed, *path)``.

    Parameters
    ----------
    seed : int
        Non-negative root seed.
    *path : int
        Sub-task counters, e.g. a bootstrap replication index.
    """
    return np.random.Generator(np.random.PCG64(_sequence(seed, *path)))


def subseed(seed, *path):
    """Derive a child root seed for nested stochastic operations.

    ``subseed(s, i)`` is itself a valid ``seed`` argument, so layered
    operations (per-run bootstraps inside an ensemble, say) can hand each
    layer its own independent root.
    """
    state = _sequence(seed, *path).generate_state(4, np.uint32)
    return int.from_bytes(state.tobytes(), "little")


def _sequence(seed, *path):
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence([seed, *[int(p) for p in path]])
