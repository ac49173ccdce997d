import math

import numpy as np
import pytest

from chanmodel import chanmodel_params as params
from chanmodel.geometry import draw_paths, freq_channel_at_time
from chanmodel.temporal import (
    ChannelTensor,
    draw_channel_block,
    evolve_gauss_markov,
    rho_from_doppler,
)
from utils.errors import InvalidArgumentError


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def test_rho_without_doppler_is_one():
    assert rho_from_doppler(0.0, 1e-4) == 1.0
    assert rho_from_doppler(0.0, 3.0) == 1.0


def test_rho_at_first_bessel_zero_is_zero():
    interval = 1e-4
    f_d = params.FIRST_BESSEL_ZERO / (2 * math.pi * interval)
    assert rho_from_doppler(f_d, interval) == pytest.approx(0.0, abs=1e-12)


def test_rho_decreases_up_to_first_zero():
    interval = 1e-4
    grid = np.linspace(0.0, params.FIRST_BESSEL_ZERO, 200) / (2 * math.pi * interval)
    rhos = [rho_from_doppler(f, interval) for f in grid]
    assert all(b <= a for a, b in zip(rhos, rhos[1:]))


def test_rho_for_shipped_doppler_spreads():
    """
    With T = 0.1 ms, 1400 Hz and 1800 Hz leave clearly correlated intervals, the faster one less so.
    """
    umi = rho_from_doppler(1400.0, params.INTERVAL_S)
    uma = rho_from_doppler(1800.0, params.INTERVAL_S)
    assert 0.75 < umi < 0.85
    assert 0.6 < uma < umi


def test_half_millisecond_interval_decorrelates_shipped_doppler():
    assert rho_from_doppler(1400.0, 5e-4) == 0.0
    assert rho_from_doppler(1400.0, params.INTERVAL_S) > 0.5


@pytest.mark.parametrize("f_d, interval", [(-1.0, 1e-4), (100.0, 0.0), (100.0, -1e-3)])
def test_rho_rejects_invalid_inputs(f_d, interval):
    with pytest.raises(InvalidArgumentError):
        rho_from_doppler(f_d, interval)


def test_gauss_markov_rho_one_returns_input():
    h = _cn(np.random.default_rng(1), (4, 8))
    assert np.array_equal(evolve_gauss_markov(h, 1.0, seed=3), h)


@pytest.mark.parametrize("rho", [-0.1, 1.01])
def test_gauss_markov_rejects_rho_outside_unit_interval(rho):
    with pytest.raises(InvalidArgumentError):
        evolve_gauss_markov(np.zeros((2, 2), dtype=complex), rho, seed=0)


def test_gauss_markov_rho_zero_decorrelates():
    rng = np.random.default_rng(10)
    h = _cn(rng, 10_000)
    out = evolve_gauss_markov(h, 0.0, rng)
    corr = np.abs(np.mean(np.conj(h) * out)) / np.sqrt(np.mean(np.abs(h) ** 2) * np.mean(np.abs(out) ** 2))
    assert corr < 0.05


def test_gauss_markov_correlation_matches_rho():
    rng = np.random.default_rng(11)
    h = _cn(rng, 10_000)
    out = evolve_gauss_markov(h, 0.9, rng)
    corr = np.real(np.mean(np.conj(h) * out)) / np.sqrt(np.mean(np.abs(h) ** 2) * np.mean(np.abs(out) ** 2))
    assert corr == pytest.approx(0.9, abs=0.02)


def test_gauss_markov_is_variance_stationary():
    """
    10^4 chains, 50 steps, rho = 0.9: per-entry variance stays within 5% of the start.
    """
    rng = np.random.default_rng(12)
    h = _cn(rng, (10_000, 2))
    start = np.mean(np.abs(h) ** 2)
    for _ in range(50):
        h = evolve_gauss_markov(h, 0.9, rng)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(start, rel=0.05)


def test_gauss_markov_is_deterministic_per_seed():
    h = _cn(np.random.default_rng(0), (3, 3))
    assert np.array_equal(evolve_gauss_markov(h, 0.5, 42), evolve_gauss_markov(h, 0.5, 42))


def test_channel_tensor_rejects_nan():
    entries = np.zeros((1, 1, 2, 2), dtype=complex)
    entries[0, 0, 1, 1] = np.nan
    with pytest.raises(InvalidArgumentError):
        ChannelTensor(entries)


def test_channel_tensor_rejects_wrong_rank():
    with pytest.raises(InvalidArgumentError):
        ChannelTensor(np.zeros((2, 2, 2), dtype=complex))


def test_channel_tensor_shape_check(small_cfg):
    tensor = ChannelTensor(np.zeros((2, 3, 4, 8), dtype=complex))
    tensor.check_shape(small_cfg)
    assert tensor.n_subcarriers == 2
    assert tensor.n_intervals == 3
    assert tensor.interval(1).shape == (2, 4, 8)
    with pytest.raises(InvalidArgumentError):
        ChannelTensor(np.zeros((2, 3, 8, 4), dtype=complex)).check_shape(small_cfg)


def test_channel_block_shape_and_determinism(small_cfg, tiny_profile):
    first = draw_channel_block(tiny_profile, small_cfg, q=2, n_intervals=4, seed=9)
    second = draw_channel_block(tiny_profile, small_cfg, q=2, n_intervals=4, seed=9)
    assert first.entries.shape == (2, 4, 4, 8)
    assert 1 <= first.first_subcarrier <= small_cfg.n_subcarriers - 1
    assert first.first_subcarrier == second.first_subcarrier
    assert np.array_equal(first.entries, second.entries)


def test_channel_block_with_unit_rho_is_static(small_cfg, tiny_profile):
    block = draw_channel_block(tiny_profile, small_cfg, q=1, n_intervals=3, seed=1, rho=1.0)
    assert np.array_equal(block.entries[:, 0], block.entries[:, 2])


def test_channel_block_doppler_model_follows_path_rotation(small_cfg, tiny_profile):
    block = draw_channel_block(
        tiny_profile, small_cfg, q=1, n_intervals=3, seed=5, temporal_model="doppler", k0=4
    )
    paths = draw_paths(tiny_profile, np.random.default_rng(5))
    expected = freq_channel_at_time(paths, small_cfg, 4, 2 * small_cfg.interval_s)
    assert np.allclose(block.entries[0, 2], expected, atol=1e-12)


def test_channel_block_rejects_unknown_temporal_model(small_cfg, tiny_profile):
    with pytest.raises(InvalidArgumentError):
        draw_channel_block(tiny_profile, small_cfg, 1, 2, seed=0, temporal_model="jakes")
