"""
Pilot phase of the hybrid transceiver and tentative estimation (TE).

Responsibilities:
- Received pilot matrices Y = sqrt(P) W^H H F + W^H N with unit-variance complex AWGN
- TE matrices G_L, G_R and the normalized TE lift R = G_L Y G_R / sqrt(P)
- Spatial pilot overhead M_T * ceil(M_R / N_R^RF)
- Per-entry variance of the noise left in the TE output

All functions accept a leading batch dimension on channels and pilots.
"""

import logging
import math

import numpy as np

from chanmodel.system_config import SystemConfig
from pilotfront.pilot_config import PilotConfig, PilotSchedule
from utils.errors import InvalidArgumentError, NumericalRankError

logger = logging.getLogger(__name__)

# Gram matrices with a larger condition number are treated as singular
MAX_GRAM_CONDITION = 1e12


def complex_awgn(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) entries: independent real/imag parts with variance 1/2 each."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def received_pilots(h, pc: PilotConfig, seed=None, noiseless: bool = False) -> np.ndarray:
    """
    Simulate the pilot phase for one channel matrix or a batch of them.
    Args:
        h (np.ndarray): Channel(s) of shape (..., N_R, N_T).
        pc (PilotConfig): Beamformer, combiner and power.
        seed: Noise randomness source (int, SeedSequence or Generator). Ignored when noiseless.
        noiseless (bool): Drop the noise term (oracle tests).
    Returns:
        np.ndarray: Pilot matrices of shape (..., M_R, M_T).
    Raises:
        InvalidArgumentError: h is not compatible with the pilot configuration.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim < 2 or h.shape[-2:] != (pc.n_rx, pc.n_tx):
        raise InvalidArgumentError(
            f"channel shape {h.shape} is not compatible with pilots for "
            f"N_R={pc.n_rx}, N_T={pc.n_tx}"
        )
    w_h = pc.combiner.conj().T
    y = np.sqrt(pc.power) * (w_h @ h @ pc.beamformer)
    if noiseless:
        return y
    rng = np.random.default_rng(seed)
    noise = complex_awgn(rng, h.shape[:-1] + (pc.m_tx,))
    return y + w_h @ noise


def _check_gram(gram: np.ndarray, name: str) -> None:
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > MAX_GRAM_CONDITION:
        raise NumericalRankError(
            f"{name} is singular (condition number {cond:.3g}); the codebook is degenerate"
        )


def te_matrices(pc: PilotConfig, cfg: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """
    TE matrices for a pilot configuration.

    G_L = W if M_R < N_R else (W W^H)^-1 W
    G_R = F^H if M_T < N_T else F^H (F F^H)^-1
    Args:
        pc (PilotConfig): Pilot configuration.
        cfg (SystemConfig): Array sizes.
    Returns:
        tuple[np.ndarray, np.ndarray]: G_L of shape (N_R, M_R) and G_R of shape (M_T, N_T).
    Raises:
        NumericalRankError: W W^H or F F^H is singular.
    """
    if pc.n_rx != cfg.n_rx or pc.n_tx != cfg.n_tx:
        raise InvalidArgumentError(
            f"pilot config is sized for ({pc.n_rx}, {pc.n_tx}), system is ({cfg.n_rx}, {cfg.n_tx})"
        )
    w, f = pc.combiner, pc.beamformer
    if pc.m_rx < cfg.n_rx:
        g_left = w.copy()
    else:
        gram = w @ w.conj().T
        _check_gram(gram, "W W^H")
        g_left = np.linalg.solve(gram, w)
    if pc.m_tx < cfg.n_tx:
        g_right = f.conj().T
    else:
        gram = f @ f.conj().T
        _check_gram(gram, "F F^H")
        # F^H (F F^H)^-1 == ((F F^H)^-1 F)^H because F F^H is Hermitian
        g_right = np.linalg.solve(gram, f).conj().T
    return g_left, g_right


def tentative_estimate(y, pc: PilotConfig, cfg: SystemConfig) -> np.ndarray:
    """
    Lift beam-domain pilots back to an antenna-domain channel estimate.
    Args:
        y (np.ndarray): Pilot matrices of shape (..., M_R, M_T).
        pc (PilotConfig): Pilot configuration that produced y.
        cfg (SystemConfig): Array sizes.
    Returns:
        np.ndarray: R = G_L y G_R / sqrt(P), shape (..., N_R, N_T).
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim < 2 or y.shape[-2:] != (pc.m_rx, pc.m_tx):
        raise InvalidArgumentError(
            f"pilot shape {y.shape} does not match (M_R, M_T) = ({pc.m_rx}, {pc.m_tx})"
        )
    g_left, g_right = te_matrices(pc, cfg)
    return (g_left @ y @ g_right) / np.sqrt(pc.power)


def te_noise_variance(pc: PilotConfig, cfg: SystemConfig) -> float:
    """
    Average per-entry variance of the noise term in the TE output.

    The noise term is G_L W^H N G_R / sqrt(P), so its total energy is
    ||G_L W^H||_F^2 * ||G_R||_F^2 / P. Equals 1/P for full unitary pilots.
    """
    g_left, g_right = te_matrices(pc, cfg)
    left = g_left @ pc.combiner.conj().T
    energy = np.linalg.norm(left, "fro") ** 2 * np.linalg.norm(g_right, "fro") ** 2
    return float(energy / (pc.power * cfg.n_tx * cfg.n_rx))


def pilot_overhead(m_tx: int, m_rx: int, n_rx_rf: int) -> int:
    """
    Channel uses consumed by one pilot phase: M_T * ceil(M_R / N_R^RF).
    """
    if min(m_tx, m_rx, n_rx_rf) < 1:
        raise InvalidArgumentError(
            f"pilot_overhead needs positive counts, got ({m_tx}, {m_rx}, {n_rx_rf})"
        )
    return m_tx * math.ceil(m_rx / n_rx_rf)


def schedule_overhead(schedule: PilotSchedule, n_rx_rf: int) -> list[int]:
    """Per-interval pilot overhead of a schedule."""
    return [pilot_overhead(pc.m_tx, pc.m_rx, n_rx_rf) for pc in schedule.per_interval]


def average_overhead(schedule: PilotSchedule, n_rx_rf: int) -> float:
    """Mean per-interval overhead over one CEU, e.g. (256 + 3*32)/4 = 88."""
    per_interval = schedule_overhead(schedule, n_rx_rf)
    return sum(per_interval) / len(per_interval)


def flops_te(pc: PilotConfig, q: int = 1) -> int:
    """
    Multiplications of the TE lift G_L Y G_R over q subcarriers.
    (N_R x M_R)(M_R x M_T) followed by (N_R x M_T)(M_T x N_T); for full pilots this is
    q * N_T * N_R * (N_T + N_R).
    """
    n_rx, n_tx = pc.n_rx, pc.n_tx
    return q * (n_rx * pc.m_rx * pc.m_tx + n_rx * pc.m_tx * n_tx)


def snr_db_to_power(snr_db: float) -> float:
    """Pilot power P for an SNR in dB (unit-variance noise and unit mean channel gain)."""
    return float(10.0 ** (float(snr_db) / 10.0))
