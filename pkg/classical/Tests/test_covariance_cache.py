from unittest.mock import patch

import numpy as np
import pytest

from classical.covariance import ensemble_covariance
from classical.covariance_cache import cached_ensemble_covariance, load_covariance, save_covariance
from utils.errors import DataIntegrityError


def test_covariance_file_round_trip(tmp_path, small_cfg, tiny_profile):
    cov = ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=64, seed=3)
    path = tmp_path / "cov.bin"
    save_covariance(cov, path)
    loaded = load_covariance(path)
    assert loaded.layout == cov.layout
    assert loaded.n_mc == 64
    assert loaded.seed == 3
    assert loaded.profile_hash == cov.profile_hash
    assert np.allclose(loaded.matrix, cov.matrix, atol=1e-4 * np.abs(cov.matrix).max())


def test_truncated_covariance_file(tmp_path, small_cfg, tiny_profile):
    cov = ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=16, seed=3)
    path = tmp_path / "cov.bin"
    save_covariance(cov, path)
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(DataIntegrityError):
        load_covariance(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "cov.bin"
    path.write_bytes(b"NOTACOV!" + bytes(16))
    with pytest.raises(DataIntegrityError):
        load_covariance(path)


def test_cache_hit_skips_recomputation(tmp_path, small_cfg, tiny_profile):
    first = cached_ensemble_covariance(tiny_profile, small_cfg, 1, 1, 32, 5, cache_dir=tmp_path)
    assert len(list(tmp_path.glob("*.cov"))) == 1
    with patch("classical.covariance_cache.ensemble_covariance") as compute:
        second = cached_ensemble_covariance(tiny_profile, small_cfg, 1, 1, 32, 5, cache_dir=tmp_path)
        compute.assert_not_called()
    assert second.matrix.shape == first.matrix.shape


def test_temporal_model_gets_its_own_cache_entry(tmp_path, small_cfg, tiny_profile):
    markov = cached_ensemble_covariance(tiny_profile, small_cfg, 1, 2, 200, 3, cache_dir=tmp_path)
    doppler = cached_ensemble_covariance(
        tiny_profile, small_cfg, 1, 2, 200, 3, temporal_model="doppler", cache_dir=tmp_path
    )
    assert len(list(tmp_path.glob("*.cov"))) == 2
    direct = ensemble_covariance(tiny_profile, small_cfg, q=1, s=2, n_mc=200, seed=3, temporal_model="doppler")
    scale = np.abs(direct.matrix).max()
    assert np.allclose(doppler.matrix, direct.matrix, atol=1e-4 * scale)
    assert not np.allclose(markov.matrix, direct.matrix, atol=1e-2 * scale)
