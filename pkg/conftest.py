"""
Shared pytest fixtures for the package test suites.

This module provides:
- Small and full-size SystemConfig fixtures
- A tiny scenario profile for fast Monte-Carlo tests
- Gating of tests marked 'slow' behind MMW_RUN_SLOW=1
"""

import math

import pytest

from chanmodel.scenario import AngleSpread, ScenarioProfile, load_profile
from chanmodel.system_config import SystemConfig
from utils.settings import RUN_SLOW_TESTS


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW_TESTS:
        return
    skip_slow = pytest.mark.skip(reason="set MMW_RUN_SLOW=1 to run scaled reproductions")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def reference_cfg():
    """N_T = 32, N_R = 16, two RF chains per side, K = 64."""
    return SystemConfig()


@pytest.fixture
def small_cfg():
    """Reduced arrays that keep joint covariance dimensions small."""
    return SystemConfig(n_tx=8, n_rx=4, n_tx_rf=2, n_rx_rf=2, n_subcarriers=16)


@pytest.fixture
def tiny_profile():
    return ScenarioProfile(
        name="tiny-test",
        n_paths=3,
        delay_spread_s=100e-9,
        aoa_spread=AngleSpread(center_rad=math.pi / 4, center_jitter_rad=0.1, spread_rad=0.3),
        aod_spread=AngleSpread(center_rad=math.pi / 3, center_jitter_rad=0.1, spread_rad=0.3),
        power_profile=(0.5, 0.3, 0.2),
        doppler_max_hz=1400.0,
    )


@pytest.fixture
def umi_profile():
    return load_profile("umi-nlos-like")


@pytest.fixture
def uma_profile():
    return load_profile("uma-nlos-like")
