"""
Paired Monte-Carlo realizations for the benchmarks.

Responsibilities:
- TrialBatch: true channels over Q subcarriers and S intervals plus the received pilots
  of every interval under one pilot schedule
- draw_trials: realization r of SNR point i uses derive_seed(seed, i, r, ...) for its channel
  and its noise, so every estimator and every pilot schedule sees the same channels
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from chanmodel.scenario import ScenarioProfile
from chanmodel.system_config import SystemConfig
from chanmodel.temporal import draw_channel_block
from pilotfront.front_end import received_pilots, tentative_estimate
from pilotfront.pilot_config import PilotSchedule
from utils.binio import array_digest
from utils.errors import InvalidArgumentError
from utils.seeding import derive_seed, rng_for
from utils.settings import DEFAULT_WORKERS

logger = logging.getLogger(__name__)

CHANNEL_STREAM = 0
NOISE_STREAM = 1


@dataclass(eq=False)
class TrialBatch:
    """
    channels: (B, Q, S, N_R, N_T) complex.
    pilots: one (B, Q, M_R[n], M_T[n]) array per interval n.
    """

    cfg: SystemConfig
    schedule: PilotSchedule
    channels: np.ndarray
    pilots: list[np.ndarray]
    first_subcarriers: np.ndarray

    @property
    def size(self) -> int:
        return self.channels.shape[0]

    @property
    def q(self) -> int:
        return self.channels.shape[1]

    @property
    def n_intervals(self) -> int:
        return self.channels.shape[2]

    def target(self, n: int = -1) -> np.ndarray:
        """True channels of interval n (default: the current, last one); (B, Q, N_R, N_T)."""
        return self.channels[:, :, n]

    def te(self, n: int) -> np.ndarray:
        return tentative_estimate(self.pilots[n], self.schedule[n], self.cfg)

    def te_stack(self, depth: int) -> np.ndarray:
        """TE of the last 'depth' intervals, oldest first: (B, depth, Q, N_R, N_T)."""
        if depth > self.n_intervals:
            raise InvalidArgumentError(
                f"an estimator needs {depth} intervals, the trials hold {self.n_intervals}"
            )
        start = self.n_intervals - depth
        return np.stack([self.te(n) for n in range(start, self.n_intervals)], axis=1)

    def digest(self) -> str:
        return array_digest(self.channels, *self.pilots)


def _draw_one(profile, cfg, q, schedule, seed, snr_index, r, rho, temporal_model, noise_stream):
    block = draw_channel_block(
        profile,
        cfg,
        q,
        len(schedule),
        derive_seed(seed, snr_index, r, CHANNEL_STREAM),
        rho=rho,
        temporal_model=temporal_model,
    )
    noise_rng = rng_for(seed, snr_index, r, noise_stream)
    pilots = [
        received_pilots(block.interval(n), pc, seed=noise_rng)
        for n, pc in enumerate(schedule.per_interval)
    ]
    return block, pilots


def draw_trials(
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int,
    schedule: PilotSchedule,
    seed: int,
    snr_index: int,
    realizations: range,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    noise_stream: int = NOISE_STREAM,
    workers: int | None = None,
) -> TrialBatch:
    """
    Draw a batch of realizations with one interval per schedule entry.
    Args:
        profile (ScenarioProfile): Scenario.
        cfg (SystemConfig): System parameters.
        q (int): Adjacent subcarriers per realization.
        schedule (PilotSchedule): Pilots per interval (its length sets S).
        seed (int): Master seed.
        snr_index (int): Index of the SNR point in its sweep.
        realizations (range): Realization indices r to draw.
        rho (float, optional): Interval correlation override.
        temporal_model (str): 'gauss-markov' or 'doppler'.
        noise_stream (int): Seed key of the noise; another stream gives fresh noise on the
            same channels.
        workers (int, optional): Thread count; default MMW_WORKERS.
    Returns:
        TrialBatch: Realizations in index order.
    """
    workers = workers or DEFAULT_WORKERS
    with ThreadPoolExecutor(max_workers=workers) as executor:
        draws = list(
            executor.map(
                lambda r: _draw_one(
                    profile, cfg, q, schedule, seed, snr_index, r, rho, temporal_model, noise_stream
                ),
                realizations,
            )
        )
    if not draws:
        raise InvalidArgumentError("draw_trials needs at least one realization")
    return TrialBatch(
        cfg=cfg,
        schedule=schedule,
        channels=np.stack([block.entries for block, _ in draws]),
        pilots=[np.stack([pilots[n] for _, pilots in draws]) for n in range(len(schedule))],
        first_subcarriers=np.array([block.first_subcarrier for block, _ in draws], dtype=np.int64),
    )
