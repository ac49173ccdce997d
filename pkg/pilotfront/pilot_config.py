"""
Pilot configurations and per-interval pilot schedules.

Responsibilities:
- PilotConfig: beamformer F, combiner W, beam counts and transmit power of one pilot phase
- PilotSchedule: one PilotConfig per coherence interval of a channel estimation unit (CEU)
- Builders for full-overhead pilots and the reduced-overhead SPR schedule
"""

from dataclasses import dataclass, replace

import numpy as np

from chanmodel.system_config import SystemConfig
from pilotfront.codebook import dft_codebook
from utils.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class PilotConfig:
    m_tx: int
    m_rx: int
    power: float
    beamformer: np.ndarray  # F, (N_T, M_T)
    combiner: np.ndarray  # W, (N_R, M_R)

    def __post_init__(self):
        if self.beamformer.ndim != 2 or self.beamformer.shape[1] != self.m_tx:
            raise InvalidArgumentError(
                f"beamformer shape {self.beamformer.shape} does not have m_tx={self.m_tx} columns"
            )
        if self.combiner.ndim != 2 or self.combiner.shape[1] != self.m_rx:
            raise InvalidArgumentError(
                f"combiner shape {self.combiner.shape} does not have m_rx={self.m_rx} columns"
            )
        if not (self.power > 0):
            raise InvalidArgumentError(f"power must be > 0, got {self.power}")

    @property
    def n_tx(self) -> int:
        return self.beamformer.shape[0]

    @property
    def n_rx(self) -> int:
        return self.combiner.shape[0]

    @property
    def is_full(self) -> bool:
        return self.m_tx >= self.n_tx and self.m_rx >= self.n_rx

    def with_power(self, power: float) -> "PilotConfig":
        return replace(self, power=power)

    def describe(self) -> dict:
        return {"m_tx": self.m_tx, "m_rx": self.m_rx, "power": self.power}


def pilot_config(
    cfg: SystemConfig,
    power: float,
    m_tx: int | None = None,
    m_rx: int | None = None,
    tx_codebook: np.ndarray | None = None,
    rx_codebook: np.ndarray | None = None,
) -> PilotConfig:
    """
    Pilot configuration using the leading columns of a codebook (DFT unless given).
    Args:
        cfg (SystemConfig): Array sizes.
        power (float): Transmit power P (linear SNR with unit-variance noise).
        m_tx (int, optional): Number of beamforming vectors; default N_T.
        m_rx (int, optional): Number of combining vectors; default N_R.
        tx_codebook (np.ndarray, optional): (N_T, >= m_tx) matrix loaded from file.
        rx_codebook (np.ndarray, optional): (N_R, >= m_rx) matrix loaded from file.
    Returns:
        PilotConfig: The configuration.
    """
    m_tx = cfg.n_tx if m_tx is None else m_tx
    m_rx = cfg.n_rx if m_rx is None else m_rx
    if tx_codebook is None:
        beamformer = dft_codebook(cfg.n_tx, m_tx)
    else:
        beamformer = _leading_columns(tx_codebook, cfg.n_tx, m_tx, "tx")
    if rx_codebook is None:
        combiner = dft_codebook(cfg.n_rx, m_rx)
    else:
        combiner = _leading_columns(rx_codebook, cfg.n_rx, m_rx, "rx")
    return PilotConfig(m_tx=m_tx, m_rx=m_rx, power=power, beamformer=beamformer, combiner=combiner)


def _leading_columns(codebook: np.ndarray, n_antennas: int, n_cols: int, side: str) -> np.ndarray:
    if codebook.shape[0] != n_antennas or codebook.shape[1] < n_cols:
        raise InvalidArgumentError(
            f"{side} codebook shape {codebook.shape} cannot supply {n_cols} beams "
            f"for {n_antennas} antennas"
        )
    return np.asarray(codebook[:, :n_cols], dtype=np.complex128)


@dataclass(frozen=True)
class PilotSchedule:
    """
    One PilotConfig per coherence-interval slot d = 1..D of a CEU.
    """

    per_interval: tuple[PilotConfig, ...]

    def __post_init__(self):
        if len(self.per_interval) < 1:
            raise InvalidArgumentError("PilotSchedule needs at least one interval")

    def __len__(self) -> int:
        return len(self.per_interval)

    def __getitem__(self, d: int) -> PilotConfig:
        return self.per_interval[d]

    def with_power(self, power: float) -> "PilotSchedule":
        return PilotSchedule(tuple(pc.with_power(power) for pc in self.per_interval))

    def check_spr(self, cfg: SystemConfig) -> None:
        """
        Raise unless the first interval uses full overhead (M_T = N_T, M_R = N_R).
        """
        first = self.per_interval[0]
        if first.m_tx != cfg.n_tx or first.m_rx != cfg.n_rx:
            raise InvalidArgumentError(
                f"SPR schedules start with full pilots ({cfg.n_tx}, {cfg.n_rx}), "
                f"got ({first.m_tx}, {first.m_rx})"
            )

    def describe(self) -> list[dict]:
        return [pc.describe() for pc in self.per_interval]


def uniform_schedule(pc: PilotConfig, n_intervals: int) -> PilotSchedule:
    """Schedule that repeats one configuration for every interval."""
    return PilotSchedule(tuple(pc for _ in range(n_intervals)))


def spr_schedule(
    cfg: SystemConfig,
    power: float,
    ceu_length: int = 4,
    reduced_m_tx: int = 16,
    reduced_m_rx: int = 4,
) -> PilotSchedule:
    """
    Full pilots in the first interval of the CEU, reduced pilots in the remaining ones.
    The defaults reproduce the D = 4, M_T[n] = 16, M_R[n] = 4 setting.
    """
    if ceu_length < 1:
        raise InvalidArgumentError(f"ceu_length must be >= 1, got {ceu_length}")
    full = pilot_config(cfg, power)
    reduced = pilot_config(cfg, power, m_tx=reduced_m_tx, m_rx=reduced_m_rx)
    return PilotSchedule((full,) + tuple(reduced for _ in range(ceu_length - 1)))
