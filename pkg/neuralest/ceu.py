"""
Cache protocols for the temporal estimators.

Responsibilities:
- CeuCache: TE stacks of the earlier intervals of the current channel estimation unit (CEU)
- sprcnn_run_ceu: one CEU of D intervals, network d fed with the cached stacks plus the
  current one, cache emptied at the CEU boundary
- sftcnn_run_sequence: the single-slot cache of the SFT-CNN over a run of intervals

Interval stacks are concatenated in chronological order (oldest first), matching the
layout the datasets are generated with.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from chanmodel.system_config import SystemConfig
from neuralest.network import TrainedEstimator, stack_inputs
from pilotfront.front_end import tentative_estimate
from pilotfront.pilot_config import PilotConfig, PilotSchedule, uniform_schedule
from utils.errors import ProtocolError

logger = logging.getLogger(__name__)


@dataclass
class CeuCache:
    capacity: int
    stored: list[np.ndarray] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.stored)

    def push(self, te_stack: np.ndarray) -> None:
        if self.depth >= self.capacity:
            raise ProtocolError(f"CEU cache is full ({self.capacity} stacks)")
        self.stored.append(te_stack)

    def clear(self) -> None:
        self.stored.clear()


@dataclass
class CeuResult:
    estimates: list[np.ndarray]
    input_matrices: list[int]


def sprcnn_run_ceu(
    nets: list[TrainedEstimator],
    pilots_per_interval: list[np.ndarray],
    schedule: PilotSchedule,
    cache: CeuCache,
    cfg: SystemConfig,
) -> CeuResult:
    """
    Estimate the channels of one CEU.
    Args:
        nets (list[TrainedEstimator]): D networks; net d (0-based) takes d + 1 TE stacks.
        pilots_per_interval (list[np.ndarray]): Pilots per interval, each (..., Q, M_R[d], M_T[d]).
        schedule (PilotSchedule): D pilot configurations, the first one full.
        cache (CeuCache): Empty cache with capacity D - 1.
        cfg (SystemConfig): Array sizes.
    Returns:
        CeuResult: Estimates (..., Q, N_R, N_T) per interval and the input arity per interval.
    Raises:
        ProtocolError: Network, schedule, pilot and cache state disagree.
    """
    n_intervals = len(schedule)
    if len(nets) != n_intervals or len(pilots_per_interval) != n_intervals:
        raise ProtocolError(
            f"CEU of {n_intervals} intervals got {len(nets)} networks and "
            f"{len(pilots_per_interval)} pilot blocks"
        )
    if cache.capacity != n_intervals - 1:
        raise ProtocolError(f"cache capacity {cache.capacity} != D - 1 = {n_intervals - 1}")
    first = schedule[0]
    if first.m_tx != cfg.n_tx or first.m_rx != cfg.n_rx:
        raise ProtocolError("the first interval of a CEU must use full pilots")

    estimates, arity = [], []
    # The cache is emptied at the CEU boundary whether or not the CEU completes.
    try:
        for d, (net, y, pc) in enumerate(zip(nets, pilots_per_interval, schedule.per_interval)):
            if cache.depth != d:
                raise ProtocolError(f"cache holds {cache.depth} stacks at interval {d + 1}, expected {d}")
            if net.spec.depth != d + 1:
                raise ProtocolError(f"interval {d + 1} needs an SPR network of depth {d + 1}, got {net.name}")
            if np.shape(y)[-2:] != (pc.m_rx, pc.m_tx):
                raise ProtocolError(
                    f"pilots of interval {d + 1} have shape {np.shape(y)}, schedule expects "
                    f"({pc.m_rx}, {pc.m_tx})"
                )
            te = tentative_estimate(y, pc, cfg)
            inputs = np.concatenate(cache.stored + [te], axis=-3)
            arity.append(inputs.shape[-3])
            estimates.append(net.estimate(stack_inputs(inputs)))
            if d < n_intervals - 1:
                cache.push(te)
    finally:
        cache.clear()
    return CeuResult(estimates=estimates, input_matrices=arity)


def sftcnn_run_sequence(
    net: TrainedEstimator,
    pilots_seq: list[np.ndarray],
    schedule: PilotSchedule | PilotConfig,
    cfg: SystemConfig,
) -> list[np.ndarray]:
    """
    Run an SFT-CNN over consecutive intervals, caching the previous TE stack.

    The first interval has no predecessor, so its own stack fills the cached slot.
    Args:
        net (TrainedEstimator): Network of depth S (stacks of S - 1 earlier intervals + current).
        pilots_seq (list[np.ndarray]): Pilots per interval, each (..., Q, M_R, M_T).
        schedule (PilotSchedule | PilotConfig): Pilot configuration(s).
        cfg (SystemConfig): Array sizes.
    Returns:
        list[np.ndarray]: Estimates (..., Q, N_R, N_T) per interval.
    """
    if isinstance(schedule, PilotConfig):
        schedule = uniform_schedule(schedule, len(pilots_seq))
    if len(schedule) != len(pilots_seq):
        raise ProtocolError(f"{len(pilots_seq)} pilot blocks for a schedule of {len(schedule)}")
    window = net.spec.depth
    history: list[np.ndarray] = []
    estimates = []
    for y, pc in zip(pilots_seq, schedule.per_interval):
        te = tentative_estimate(y, pc, cfg)
        earlier = history[-(window - 1) :] if window > 1 else []
        earlier = [te] * (window - 1 - len(earlier)) + earlier
        inputs = np.concatenate(earlier + [te], axis=-3)
        estimates.append(net.estimate(stack_inputs(inputs)))
        history = (history + [te])[-(window - 1) :] if window > 1 else []
    return estimates
