"""
Time variation of the channel across coherence intervals.

Responsibilities:
- Gauss-Markov evolution of channel matrices between coherence intervals
- Mapping from maximum Doppler spread to the interval correlation coefficient (Jakes J0)
- ChannelTensor: validated container of H[k][n] over subcarriers and intervals
- Drawing channel blocks (Q adjacent subcarriers x a run of intervals) for datasets and benchmarks
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from chanmodel.geometry import draw_paths, freq_response
from chanmodel.scenario import ScenarioProfile
from chanmodel.system_config import SystemConfig
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

TEMPORAL_MODELS = ("gauss-markov", "doppler")


def rho_from_doppler(f_d_hz: float, interval_s: float) -> float:
    """
    Interval correlation coefficient rho = clamp(J0(2*pi*f_d*T), 0, 1).
    Args:
        f_d_hz (float): Maximum Doppler spread in Hz (>= 0).
        interval_s (float): Coherence interval length T in seconds (> 0).
    Returns:
        float: rho in [0, 1].
    Raises:
        InvalidArgumentError: Negative Doppler or non-positive interval.
    """
    if f_d_hz < 0 or not np.isfinite(f_d_hz):
        raise InvalidArgumentError(f"f_d must be finite and >= 0, got {f_d_hz!r}")
    if interval_s <= 0 or not np.isfinite(interval_s):
        raise InvalidArgumentError(f"interval must be finite and > 0, got {interval_s!r}")
    return float(np.clip(j0(2.0 * np.pi * f_d_hz * interval_s), 0.0, 1.0))


def evolve_gauss_markov(h_prev, rho: float, seed, innovation_var: float = 1.0) -> np.ndarray:
    """
    One Gauss-Markov step: rho * h_prev + sqrt(1 - rho^2) * Theta, Theta ~ CN(0, innovation_var).

    Works on any array shape, so a batch of chains or all subcarriers of a block evolve at once.
    innovation_var should equal the stationary per-entry variance of h_prev's ensemble.
    Args:
        h_prev (np.ndarray): Complex channel(s) of the previous interval.
        rho (float): Correlation coefficient in [0, 1].
        seed (int | np.random.SeedSequence | np.random.Generator): Randomness source.
        innovation_var (float): Per-entry variance of Theta.
    Returns:
        np.ndarray: Channel(s) of the next interval, same shape as h_prev.
    Raises:
        InvalidArgumentError: rho outside [0, 1].
    """
    if not (0.0 <= rho <= 1.0):
        raise InvalidArgumentError(f"rho must be in [0, 1], got {rho!r}")
    h_prev = np.asarray(h_prev, dtype=np.complex128)
    if rho == 1.0:
        return h_prev.copy()
    rng = np.random.default_rng(seed)
    theta = (rng.standard_normal(h_prev.shape) + 1j * rng.standard_normal(h_prev.shape)) * np.sqrt(
        innovation_var / 2.0
    )
    return rho * h_prev + np.sqrt(1.0 - rho**2) * theta


@dataclass(frozen=True, eq=False)
class ChannelTensor:
    """
    True channels H[k][n]: entries has shape (Q, n_intervals, N_R, N_T).
    first_subcarrier is the 1-based index k0 of entries[0].
    """

    entries: np.ndarray
    first_subcarrier: int = 1

    def __post_init__(self):
        if self.entries.ndim != 4:
            raise InvalidArgumentError(
                f"ChannelTensor entries must be 4-D (Q, S, N_R, N_T), got {self.entries.shape}"
            )
        if not np.all(np.isfinite(self.entries)):
            raise InvalidArgumentError("ChannelTensor contains NaN or Inf entries")

    @property
    def n_subcarriers(self) -> int:
        return self.entries.shape[0]

    @property
    def n_intervals(self) -> int:
        return self.entries.shape[1]

    def check_shape(self, cfg: SystemConfig) -> None:
        if self.entries.shape[2:] != (cfg.n_rx, cfg.n_tx):
            raise InvalidArgumentError(
                f"ChannelTensor matrices are {self.entries.shape[2:]}, "
                f"expected {(cfg.n_rx, cfg.n_tx)}"
            )

    def interval(self, n: int) -> np.ndarray:
        """All Q subcarrier matrices of interval n (0-based); shape (Q, N_R, N_T)."""
        return self.entries[:, n]


def draw_channel_block(
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int,
    n_intervals: int,
    seed,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    k0: int | None = None,
) -> ChannelTensor:
    """
    Draw true channels on Q adjacent subcarriers over n_intervals coherence intervals.

    The first interval comes from a fresh path draw; later intervals follow either the
    Gauss-Markov recursion (default) or the per-path Doppler model at t = n*T.
    Args:
        profile (ScenarioProfile): Scenario statistics.
        cfg (SystemConfig): System parameters.
        q (int): Number of adjacent subcarriers.
        n_intervals (int): Number of coherence intervals.
        seed: Randomness source (int, SeedSequence or Generator).
        rho (float, optional): Interval correlation; default rho_from_doppler(f_d, T).
        temporal_model (str): 'gauss-markov' or 'doppler'.
        k0 (int, optional): First subcarrier; default uniform over [1, K - Q + 1].
    Returns:
        ChannelTensor: entries of shape (Q, n_intervals, N_R, N_T).
    """
    if q < 1 or q > cfg.n_subcarriers:
        raise InvalidArgumentError(f"q must be in [1, {cfg.n_subcarriers}], got {q}")
    if n_intervals < 1:
        raise InvalidArgumentError(f"n_intervals must be >= 1, got {n_intervals}")
    if temporal_model not in TEMPORAL_MODELS:
        raise InvalidArgumentError(
            f"temporal_model must be one of {TEMPORAL_MODELS}, got {temporal_model!r}"
        )
    rng = np.random.default_rng(seed)
    paths = draw_paths(profile, rng)
    if k0 is None:
        k0 = int(rng.integers(1, cfg.n_subcarriers - q + 2))
    ks = np.arange(k0, k0 + q)

    entries = np.empty((q, n_intervals, cfg.n_rx, cfg.n_tx), dtype=np.complex128)
    entries[:, 0] = freq_response(paths, cfg, ks)
    if temporal_model == "doppler":
        for n in range(1, n_intervals):
            entries[:, n] = freq_response(paths, cfg, ks, t=n * cfg.interval_s)
    else:
        if rho is None:
            rho = rho_from_doppler(profile.doppler_max_hz, cfg.interval_s)
        for n in range(1, n_intervals):
            entries[:, n] = evolve_gauss_markov(
                entries[:, n - 1], rho, rng, innovation_var=profile.gain_var
            )
    return ChannelTensor(entries=entries, first_subcarrier=k0)
