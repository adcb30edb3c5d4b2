"""Counter-style seed derivation for reproducible parallel streams.

Every random draw is taken from a generator keyed by (master seed, stream,
counter), so results never depend on which worker ran which iteration.
"""

import numpy as np

# Stream identifiers keep unrelated consumers of one master seed apart.
STREAM_SPLIT = 0
STREAM_RESTRICTED = 1
STREAM_STANDARD = 2
STREAM_BASELINE = 3
STREAM_MATCH = 4
STREAM_RESAMPLE = 5
STREAM_SIMULATION = 6
STREAM_SUBSAMPLE = 7


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the stream addressed by ``keys`` under ``seed``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(sequence)


def derive_seed(seed: int, *keys: int) -> int:
    """Integer seed for the stream addressed by ``keys`` (63-bit)."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
