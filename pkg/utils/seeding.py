"""
Seed derivation helpers.

Responsibilities:
- Derives independent, platform-stable random streams from a master seed and an index path
- Guarantees that the stream of item i never depends on how many other items exist
"""

import numpy as np


def derive_seed(master_seed, *keys):
    """
    Build a SeedSequence for one item of a seeded experiment.
    Args:
        master_seed (int): The run's master seed.
        *keys (int): Index path of the item (e.g. SNR index, realization index).
    Returns:
        np.random.SeedSequence: Stream seed; identical inputs give identical streams.
    """
    return np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])


def rng_for(master_seed, *keys):
    """
    Shorthand for a Generator seeded with derive_seed(master_seed, *keys).
    """
    return np.random.default_rng(derive_seed(master_seed, *keys))
