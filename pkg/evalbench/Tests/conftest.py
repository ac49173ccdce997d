import math

import pytest
import torch

from chanmodel.scenario import AngleSpread, ScenarioProfile
from neuralest.netspec import build_net, reference_spec
from neuralest.network import ChannelCNN, TrainedEstimator


@pytest.fixture
def other_profile(tiny_profile):
    """tiny_profile with its clusters moved to different directions."""
    return ScenarioProfile(
        name="tiny-other",
        n_paths=tiny_profile.n_paths,
        delay_spread_s=tiny_profile.delay_spread_s,
        aoa_spread=AngleSpread(center_rad=-math.pi / 3, center_jitter_rad=0.1, spread_rad=0.3),
        aod_spread=AngleSpread(center_rad=-math.pi / 6, center_jitter_rad=0.1, spread_rad=0.3),
        power_profile=tiny_profile.power_profile,
        doppler_max_hz=tiny_profile.doppler_max_hz,
    )


@pytest.fixture
def small_net():
    """Untrained networks sized for small_cfg (4 x 8 arrays)."""
    base = reference_spec(q=1, spatial_shape=(4, 8), n_layers=3, hidden_maps=8)

    def factory(kind="sf", q=1, s_or_d=1, seed=0):
        spec = build_net(kind, q, s_or_d, base=base)
        torch.manual_seed(seed)
        return TrainedEstimator(spec, ChannelCNN(spec), device="cpu")

    return factory
