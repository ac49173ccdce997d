"""
Deterministic train / validation / test partition of a dataset.
"""

import logging
import math

import numpy as np

from datapipe.storage import Dataset
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "val", "test")
# 81,000 / 9,000 / 19,000 out of 109,000
REFERENCE_FRACTIONS = (81 / 109, 9 / 109, 19 / 109)


def split_sizes(count: int, fractions) -> tuple[int, int, int]:
    """Rounded train and validation sizes; the test part takes the remainder."""
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f < 0 for f in fractions):
        raise InvalidArgumentError(f"need three nonnegative fractions, got {fractions}")
    if not math.isclose(sum(fractions), 1.0, abs_tol=1e-9):
        raise InvalidArgumentError(f"fractions must sum to 1, got {sum(fractions)}")
    n_train = min(count, round(fractions[0] * count))
    n_val = min(count - n_train, round(fractions[1] * count))
    return n_train, n_val, count - n_train - n_val


def split(dataset: Dataset, fractions=REFERENCE_FRACTIONS, seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """
    Shuffle the sample order with a seeded permutation and cut it into three parts.
    Args:
        dataset (Dataset): Samples to partition.
        fractions (tuple[float, float, float]): Train, validation and test shares; must sum to 1.
        seed (int): Permutation seed.
    Returns:
        tuple[Dataset, Dataset, Dataset]: Disjoint parts whose union is the input.
    """
    n_train, n_val, n_test = split_sizes(len(dataset), fractions)
    order = np.random.default_rng(seed).permutation(len(dataset))
    bounds = (0, n_train, n_train + n_val, len(dataset))
    parts = tuple(
        dataset.subset(order[bounds[i] : bounds[i + 1]], split=name)
        for i, name in enumerate(SPLIT_NAMES)
    )
    logger.info(f"  ↳ Split {len(dataset)} samples into {n_train}/{n_val}/{n_test}")
    return parts
