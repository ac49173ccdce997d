import numpy as np
import pytest

from datapipe.manifest import new_manifest
from datapipe.storage import Dataset


@pytest.fixture
def sf_manifest(tiny_profile, small_cfg):
    def factory(count=6, seed=1, **options):
        return new_manifest(tiny_profile, small_cfg, "sf", 1, count, seed, snr_db=10.0, **options)

    return factory


@pytest.fixture
def random_dataset(sf_manifest):
    """Dataset with random planes in the small_cfg geometry (4 x 8, Q = 1)."""

    def factory(count=10, seed=0):
        rng = np.random.default_rng(seed)
        manifest = sf_manifest(count=count, seed=seed)
        meta = np.stack(
            [rng.integers(1, 16, count), np.ones(count, dtype=np.int64), np.arange(count)], axis=1
        )
        return Dataset(
            manifest=manifest,
            inputs=rng.standard_normal((count, 4, 8, 2)).astype(np.float32),
            targets=rng.uniform(-1, 1, (count, 4, 8, 2)).astype(np.float32),
            meta=meta.astype(np.int64),
        )

    return factory
