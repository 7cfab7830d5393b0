"""Deterministic random-stream derivation.

Paths are simulated in fixed-size blocks.  Block ``k`` of a run seeded with
``seed`` owns the streams spawned from ``SeedSequence(seed, spawn_key=(k,))``;
stream 0 drives the clock, stream 1 the base process.  Results therefore do not
depend on how blocks are scheduled over workers.
"""
import numpy as np

BLOCK = 1 << 14


def block_rngs(seed, index, streams=2):
    """Generators for block ``index`` of a run seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(streams)]


def blocks(n, block=BLOCK):
    """Yield ``(index, slice)`` pairs covering ``range(n)``."""
    for k, start in enumerate(range(0, n, block)):
        yield k, slice(start, min(start + block, n))


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
