"""
Convolutional channel estimators built from a NetSpec.

Responsibilities:
- Real/imaginary stacking of complex TE matrices into channel-last network inputs (and back)
- ChannelCNN: zero-padded Conv -> ReLU -> BN blocks with a tanh output layer (torch)
- TrainedEstimator: an immutable, eval-mode network plus its spec, batched inference and
  rescaling by c
- Band-wide deployment of a Q-subcarrier network over all K subcarriers
"""

import logging
from collections.abc import Sequence

import numpy as np
import torch
from torch import nn

from neuralest import neuralest_params as params
from neuralest.netspec import NetSpec
from utils.errors import InvalidArgumentError
from utils.settings import TORCH_DEVICE

logger = logging.getLogger(__name__)


def stack_inputs(r_list) -> np.ndarray:
    """
    Split complex matrices into real planes, channel-last.
    Args:
        r_list (Sequence[np.ndarray] | np.ndarray): n matrices of shape (N_R, N_T), or an
            array of shape (..., n, N_R, N_T).
    Returns:
        np.ndarray: float32 array (..., N_R, N_T, 2n) ordered [Re R1, Im R1, Re R2, Im R2, ...].
    """
    if isinstance(r_list, Sequence) and not isinstance(r_list, np.ndarray):
        shapes = {np.shape(r) for r in r_list}
        if len(shapes) != 1:
            raise InvalidArgumentError(f"input matrices differ in shape: {sorted(shapes)}")
        r_list = np.stack(r_list, axis=0)
    r = np.asarray(r_list)
    if r.ndim < 3:
        raise InvalidArgumentError(f"expected (..., n, N_R, N_T), got shape {r.shape}")
    # (..., n, N_R, N_T) -> (..., N_R, N_T, n, 2) -> (..., N_R, N_T, 2n)
    planes = np.stack([r.real, r.imag], axis=-1)
    planes = np.moveaxis(planes, -4, -2)
    return planes.reshape(planes.shape[:-2] + (-1,)).astype(np.float32)


def unstack_outputs(x) -> np.ndarray:
    """
    Inverse of stack_inputs: (..., N_R, N_T, 2n) -> complex (..., n, N_R, N_T).
    """
    x = np.asarray(x)
    if x.ndim < 3 or x.shape[-1] % 2:
        raise InvalidArgumentError(f"expected an even number of planes, got shape {x.shape}")
    pairs = x.reshape(x.shape[:-1] + (x.shape[-1] // 2, 2))
    complex_planes = pairs[..., 0] + 1j * pairs[..., 1]
    return np.moveaxis(complex_planes, -1, -3)


class ChannelCNN(nn.Module):
    """
    Channels-first network: (batch, 2*Q*depth, N_R, N_T) -> (batch, 2*Q, N_R, N_T) in [-1, 1].
    """

    def __init__(self, spec: NetSpec):
        super().__init__()
        self.spec = spec
        blocks = []
        for layer in spec.layers:
            conv = nn.Conv2d(
                layer.in_maps,
                layer.out_maps,
                kernel_size=layer.filter_side,
                padding=layer.filter_side // 2,
            )
            if layer.activation == "relu":
                nn.init.kaiming_uniform_(conv.weight, nonlinearity="relu")
                blocks += [conv, nn.ReLU()]
            else:
                nn.init.xavier_uniform_(conv.weight)
                blocks += [conv, nn.Tanh()]
            nn.init.zeros_(conv.bias)
            if layer.batch_norm:
                blocks.append(nn.BatchNorm2d(layer.out_maps, eps=params.BN_EPS, momentum=params.BN_MOMENTUM))
        self.body = nn.Sequential(*blocks)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.body(x)


def to_channels_first(batch: np.ndarray) -> torch.Tensor:
    """(B, N_R, N_T, maps) numpy -> (B, maps, N_R, N_T) float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(batch, dtype=np.float32)).permute(0, 3, 1, 2)


class TrainedEstimator:
    """
    A network in eval mode with its spec. Inference never updates BN statistics, so one
    instance can serve concurrent callers.
    """

    def __init__(self, spec: NetSpec, module: ChannelCNN | None = None, device: str | None = None):
        self.spec = spec
        self.device = torch.device(device or TORCH_DEVICE)
        self.module = (module or ChannelCNN(spec)).to(self.device)
        self.module.eval()

    @property
    def name(self) -> str:
        return self.spec.name

    def state_dict(self) -> dict:
        return {k: v.detach().cpu() for k, v in self.module.state_dict().items()}

    def raw_outputs(self, r_stack: np.ndarray) -> np.ndarray:
        """
        Network outputs in [-1, 1], channel-last, for (..., N_R, N_T, input_maps) inputs.
        """
        r_stack = np.asarray(r_stack, dtype=np.float32)
        expected = (*self.spec.spatial_shape, self.spec.input_maps)
        if r_stack.shape[-3:] != expected:
            raise InvalidArgumentError(
                f"input shape {r_stack.shape} does not end in {expected} for network {self.name}"
            )
        lead = r_stack.shape[:-3]
        flat = r_stack.reshape((-1,) + expected)
        outputs = []
        with torch.no_grad():
            for start in range(0, len(flat), params.INFERENCE_BATCH):
                batch = to_channels_first(flat[start : start + params.INFERENCE_BATCH]).to(self.device)
                outputs.append(self.module(batch).permute(0, 2, 3, 1).cpu().numpy())
        if outputs:
            out = np.concatenate(outputs, axis=0)
        else:
            out = np.empty((0, *self.spec.spatial_shape, self.spec.output_maps), np.float32)
        return out.reshape(lead + out.shape[1:])

    def estimate(self, r_stack: np.ndarray) -> np.ndarray:
        """
        Channel estimates c * f(r_stack) as complex (..., Q, N_R, N_T).
        """
        scaled = self.raw_outputs(r_stack).astype(np.float64) * self.spec.scale_c
        return unstack_outputs(scaled)


def estimate(net: TrainedEstimator, r_stack: np.ndarray) -> np.ndarray:
    return net.estimate(r_stack)


def group_starts(n_subcarriers: int, q: int) -> list[int]:
    """
    0-based first subcarrier of each Q-group covering the band; the last group is aligned
    to the band edge and may overlap its predecessor.
    """
    if q > n_subcarriers:
        raise InvalidArgumentError(f"q={q} exceeds the band of {n_subcarriers} subcarriers")
    starts = list(range(0, n_subcarriers - q + 1, q))
    if starts[-1] + q < n_subcarriers:
        starts.append(n_subcarriers - q)
    return starts


def estimate_band(net: TrainedEstimator, te_band: np.ndarray) -> np.ndarray:
    """
    Run a Q-subcarrier network over a whole band.
    Args:
        net (TrainedEstimator): Network with depth interval stacks per input.
        te_band (np.ndarray): TE matrices of shape (..., depth, K, N_R, N_T), interval
            stacks in chronological order.
    Returns:
        np.ndarray: Estimates of shape (..., K, N_R, N_T).
    """
    te_band = np.asarray(te_band)
    if te_band.ndim < 4:
        raise InvalidArgumentError(f"te_band must be (..., depth, K, N_R, N_T), got {te_band.shape}")
    depth, n_sub = te_band.shape[-4], te_band.shape[-3]
    if depth != net.spec.depth:
        raise InvalidArgumentError(f"te_band has {depth} interval stacks, network expects {net.spec.depth}")
    q = net.spec.q
    out = np.empty(te_band.shape[:-4] + te_band.shape[-3:], dtype=np.complex128)
    for start in group_starts(n_sub, q):
        group = te_band[..., :, start : start + q, :, :]
        # (..., depth, Q, N_R, N_T) -> (..., depth*Q, N_R, N_T)
        group = group.reshape(group.shape[:-4] + (depth * q,) + group.shape[-2:])
        out[..., start : start + q, :, :] = net.estimate(stack_inputs(group))
    return out
