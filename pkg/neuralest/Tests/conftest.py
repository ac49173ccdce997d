import numpy as np
import pytest
import torch

from neuralest.netspec import build_net, reference_spec
from neuralest.network import ChannelCNN, TrainedEstimator


@pytest.fixture
def tiny_base():
    """Three-layer, 8-map table on a 4 x 8 array."""
    return reference_spec(q=1, spatial_shape=(4, 8), n_layers=3, hidden_maps=8)


@pytest.fixture
def tiny_net(tiny_base):
    torch.manual_seed(0)
    return TrainedEstimator(tiny_base, device="cpu")


@pytest.fixture
def make_net(tiny_base):
    def factory(kind, q=1, s_or_d=1, seed=0):
        spec = build_net(kind, q, s_or_d, base=tiny_base)
        torch.manual_seed(seed)
        return TrainedEstimator(spec, ChannelCNN(spec), device="cpu")

    return factory


@pytest.fixture
def toy_data():
    """
    Denoising pairs on a 4 x 8 array: target in [-0.5, 0.5], input = 2 * target + noise
    (TE planes are c times the scaled target).
    """

    def factory(count, maps_in=2, maps_out=2, seed=0):
        rng = np.random.default_rng(seed)
        targets = rng.uniform(-0.5, 0.5, (count, 4, 8, maps_out)).astype(np.float32)
        reps = maps_in // maps_out
        inputs = np.concatenate([2 * targets] * reps, axis=-1)
        inputs = inputs + 0.1 * rng.standard_normal(inputs.shape)
        return inputs.astype(np.float32), targets

    return factory
