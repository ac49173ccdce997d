import math

import pytest

from chanmodel.scenario import (
    AngleSpread,
    ScenarioProfile,
    available_profiles,
    load_profile,
    profile_hash,
    save_profile,
)
from chanmodel.system_config import SystemConfig
from utils.errors import InvalidArgumentError


def test_shipped_profiles_are_available():
    assert {"umi-nlos-like", "uma-nlos-like"} <= set(available_profiles())


def test_shipped_profiles_differ_in_statistics(umi_profile, uma_profile):
    assert umi_profile.n_paths == uma_profile.n_paths == 3
    assert umi_profile.delay_spread_s == pytest.approx(300e-9)
    assert uma_profile.delay_spread_s == pytest.approx(600e-9)
    assert umi_profile.doppler_max_hz == 1400.0
    assert uma_profile.doppler_max_hz == 1800.0
    assert profile_hash(umi_profile) != profile_hash(uma_profile)


def test_profile_round_trips_through_file(tmp_path, tiny_profile):
    path = tmp_path / "tiny.json"
    save_profile(tiny_profile, path)
    loaded = load_profile(path)
    assert loaded == tiny_profile
    assert profile_hash(loaded) == profile_hash(tiny_profile)


def test_profile_hash_ignores_description(tiny_profile):
    described = ScenarioProfile.from_dict({**tiny_profile.to_dict(), "description": "notes"})
    assert profile_hash(described) == profile_hash(tiny_profile)


def test_with_doppler_changes_hash(tiny_profile):
    assert profile_hash(tiny_profile.with_doppler(0.0)) != profile_hash(tiny_profile)


def test_unknown_profile_name():
    with pytest.raises(InvalidArgumentError):
        load_profile("rural-nowhere")


def test_wrong_schema_is_rejected(tiny_profile):
    with pytest.raises(InvalidArgumentError):
        ScenarioProfile.from_dict({**tiny_profile.to_dict(), "schema": "scenario/0"})


@pytest.mark.parametrize(
    "overrides",
    [
        {"power_profile": (0.5, 0.3, 0.3)},
        {"power_profile": (0.5, 0.5)},
        {"n_paths": 0, "power_profile": ()},
        {"doppler_max_hz": -1.0},
        {"gain_normalization": "peak"},
    ],
)
def test_invalid_profiles_are_rejected(overrides):
    fields = dict(
        name="bad",
        n_paths=3,
        delay_spread_s=1e-7,
        aoa_spread=AngleSpread(spread_rad=math.pi),
        aod_spread=AngleSpread(spread_rad=math.pi),
        power_profile=(0.5, 0.3, 0.2),
    )
    fields.update(overrides)
    with pytest.raises(InvalidArgumentError):
        ScenarioProfile(**fields)


def test_system_config_defaults():
    cfg = SystemConfig()
    assert (cfg.n_tx, cfg.n_rx, cfg.n_tx_rf, cfg.n_rx_rf, cfg.n_subcarriers) == (32, 16, 2, 2, 64)
    assert cfg.sample_rate_hz == 100e6
    assert cfg.carrier_hz == 28e9
    assert SystemConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_tx": 1, "n_tx_rf": 2},
        {"n_rx_rf": 0},
        {"spacing_ratio": 0.0},
        {"n_subcarriers": 0},
    ],
)
def test_system_config_invariants(kwargs):
    with pytest.raises(InvalidArgumentError):
        SystemConfig(**kwargs)
