"""
Offline training of the CNN estimators.

Responsibilities:
- TrainConfig: epochs, piecewise-constant learning-rate schedule, batch size, optimizer, seed
- The batch MSE loss normalized by the number of samples and c^2
- Adam training with seeded shuffling, per-epoch history, best-validation checkpoint and
  divergence detection
"""

import copy
import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from torch.utils.data import DataLoader, TensorDataset
from tqdm import tqdm

from neuralest import neuralest_params as params
from neuralest.netspec import NetSpec
from neuralest.network import ChannelCNN, TrainedEstimator
from utils.errors import InvalidArgumentError, TrainingDivergedError
from utils.log_formatter import format_epoch_message
from utils.settings import TORCH_DEVICE

logger = logging.getLogger(__name__)

OPTIMIZERS = ("adam",)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = params.EPOCHS
    lr_schedule: tuple[tuple[int, float], ...] = params.LR_SCHEDULE
    batch_size: int = params.BATCH_SIZE
    optimizer: str = params.OPTIMIZER
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidArgumentError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.optimizer not in OPTIMIZERS:
            raise InvalidArgumentError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        spans = [span for span, _ in self.lr_schedule]
        if not spans or any(span < 1 for span in spans) or sum(spans) != self.epochs:
            raise InvalidArgumentError(
                f"lr_schedule spans {spans} must be positive and sum to epochs={self.epochs}"
            )
        if any(lr <= 0 for _, lr in self.lr_schedule):
            raise InvalidArgumentError("learning rates must be > 0")

    def lr_at_epoch(self, epoch: int) -> float:
        """Learning rate of a 1-based epoch."""
        if not (1 <= epoch <= self.epochs):
            raise InvalidArgumentError(f"epoch {epoch} outside [1, {self.epochs}]")
        end = 0
        for span, lr in self.lr_schedule:
            end += span
            if epoch <= end:
                return lr
        raise AssertionError("unreachable: spans sum to epochs")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "lr_schedule": [list(step) for step in self.lr_schedule],
            "batch_size": self.batch_size,
            "optimizer": self.optimizer,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        return cls(
            epochs=int(data["epochs"]),
            lr_schedule=tuple((int(span), float(lr)) for span, lr in data["lr_schedule"]),
            batch_size=int(data["batch_size"]),
            optimizer=data.get("optimizer", params.OPTIMIZER),
            seed=int(data.get("seed", 0)),
        )

    @classmethod
    def scaled(cls, epochs: int, seed: int = 0, batch_size: int = params.BATCH_SIZE) -> "TrainConfig":
        """Shrink the reference 1/4 - 1/2 - 1/4 schedule to fewer epochs."""
        first = max(1, epochs // 4)
        last = max(1, epochs // 4) if epochs >= 3 else 0
        middle = epochs - first - last
        spans = [(first, 1e-4), (middle, 5e-5), (last, 1e-5)]
        return cls(
            epochs=epochs,
            lr_schedule=tuple(step for step in spans if step[0] > 0),
            batch_size=batch_size,
            seed=seed,
        )


@dataclass
class TrainResult:
    estimator: TrainedEstimator
    best_state: dict
    best_epoch: int
    history: list[dict] = field(default_factory=list)


def mse_loss(h_true, h_est, c: float) -> float:
    """
    (1 / (N c^2)) * sum_i sum_q ||H - H_hat||_F^2 over a batch.
    Args:
        h_true (np.ndarray): True channels, shape (N, Q, N_R, N_T) or (N, N_R, N_T).
        h_est (np.ndarray): Estimates, same shape.
        c (float): Scaling constant.
    Returns:
        float: Nonnegative loss.
    """
    h_true, h_est = np.asarray(h_true), np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise InvalidArgumentError(f"shape mismatch: {h_true.shape} vs {h_est.shape}")
    n = h_true.shape[0] if h_true.ndim > 2 else 1
    return float(np.sum(np.abs(h_true - h_est) ** 2) / (n * c**2))


def _batch_loss(outputs: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    # targets are already divided by c, so this equals mse_loss on unscaled channels
    return ((outputs - targets) ** 2).sum() / outputs.shape[0]


def _as_tensors(data) -> TensorDataset:
    inputs, targets = (data.inputs, data.targets) if hasattr(data, "inputs") else data
    x = torch.from_numpy(np.ascontiguousarray(inputs, dtype=np.float32)).permute(0, 3, 1, 2)
    y = torch.from_numpy(np.ascontiguousarray(targets, dtype=np.float32)).permute(0, 3, 1, 2)
    return TensorDataset(x, y)


def _check_shapes(spec: NetSpec, dataset: TensorDataset, label: str) -> None:
    x, y = dataset.tensors
    expected_x = (spec.input_maps, *spec.spatial_shape)
    expected_y = (spec.output_maps, *spec.spatial_shape)
    if tuple(x.shape[1:]) != expected_x or tuple(y.shape[1:]) != expected_y:
        raise InvalidArgumentError(
            f"{label} data shapes {tuple(x.shape[1:])} -> {tuple(y.shape[1:])} do not match "
            f"network {spec.name}: {expected_x} -> {expected_y}"
        )
    if len(x) == 0:
        raise InvalidArgumentError(f"{label} data is empty")


def _evaluate(module, loader, device) -> float:
    module.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for x, y in loader:
            out = module(x.to(device))
            total += float(((out - y.to(device)) ** 2).sum())
            count += x.shape[0]
    return total / count


def train(
    spec: NetSpec,
    train_data,
    val_data,
    tc: TrainConfig,
    init_state: dict | None = None,
    device: str | None = None,
    progress: bool = False,
) -> TrainResult:
    """
    Train a network on (input, scaled target) pairs.
    Args:
        spec (NetSpec): Architecture.
        train_data: Object with .inputs / .targets arrays (channel-last) or an (inputs, targets) tuple.
        val_data: Same layout as train_data.
        tc (TrainConfig): Schedule and seed.
        init_state (dict, optional): State dict to start from (fine-tuning).
        device (str, optional): Torch device; default MMW_DEVICE.
        progress (bool): Show a tqdm bar over epochs.
    Returns:
        TrainResult: Final estimator, best-validation state and per-epoch history.
    Raises:
        TrainingDivergedError: A loss became NaN or infinite.
    """
    device = torch.device(device or TORCH_DEVICE)
    train_set, val_set = _as_tensors(train_data), _as_tensors(val_data)
    _check_shapes(spec, train_set, "training")
    _check_shapes(spec, val_set, "validation")

    torch.manual_seed(tc.seed)
    module = ChannelCNN(spec)
    if init_state is not None:
        module.load_state_dict(init_state)
        logger.info(f"  ↳ Fine-tuning {spec.name} from a saved state")
    module.to(device)

    shuffle_gen = torch.Generator().manual_seed(tc.seed)
    train_loader = DataLoader(train_set, batch_size=tc.batch_size, shuffle=True, generator=shuffle_gen)
    val_loader = DataLoader(val_set, batch_size=max(tc.batch_size, params.INFERENCE_BATCH))
    optimizer = torch.optim.Adam(module.parameters(), lr=tc.lr_at_epoch(1))

    logger.info(
        f"  ↳ Training {spec.name} (Q={spec.q}, depth={spec.depth}) on {len(train_set)} samples, "
        f"{tc.epochs} epochs, batch {tc.batch_size}"
    )
    history: list[dict] = []
    best_val, best_epoch, best_state = float("inf"), 0, None
    for epoch in tqdm(range(1, tc.epochs + 1), desc=spec.name, disable=not progress):
        lr = tc.lr_at_epoch(epoch)
        for group in optimizer.param_groups:
            group["lr"] = lr

        module.train()
        total, count = 0.0, 0
        for x, y in train_loader:
            x, y = x.to(device), y.to(device)
            optimizer.zero_grad()
            loss = _batch_loss(module(x), y)
            loss.backward()
            optimizer.step()
            total += float(loss) * x.shape[0]
            count += x.shape[0]
        train_loss = total / count
        val_loss = _evaluate(module, val_loader, device)

        entry = {"epoch": epoch, "lr": lr, "train_loss": train_loss, "val_loss": val_loss}
        history.append(entry)
        logger.debug(format_epoch_message(entry, tc.epochs))
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            logger.error(f"    ✖ {spec.name} diverged at epoch {epoch}")
            raise TrainingDivergedError(
                f"{spec.name} diverged at epoch {epoch}: {format_epoch_message(entry, tc.epochs)}",
                history=history,
            )
        if val_loss < best_val:
            best_val, best_epoch = val_loss, epoch
            best_state = copy.deepcopy({k: v.detach().cpu() for k, v in module.state_dict().items()})

    logger.info(
        f"    ✓ {spec.name} trained: final val_loss={history[-1]['val_loss']:.6g}, "
        f"best {best_val:.6g} at epoch {best_epoch}"
    )
    return TrainResult(
        estimator=TrainedEstimator(spec, module, device=str(device)),
        best_state=best_state,
        best_epoch=best_epoch,
        history=history,
    )
