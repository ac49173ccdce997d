"""
Geometric frequency-domain channel model for the hybrid mmWave link.

Responsibilities:
- ULA response vectors for arrival and departure angles
- Statistical draw of per-realization path sets from a ScenarioProfile
- Evaluation of the per-subcarrier channel H_k and its time-varying form H_k(t)
"""

import logging
from dataclasses import dataclass

import numpy as np

from chanmodel.scenario import AngleSpread, ScenarioProfile
from chanmodel.system_config import SystemConfig
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class PathSet:
    """
    One channel realization: L paths with complex gain, delay, AoA, AoD and Doppler shift.
    """

    gains: np.ndarray
    delays_s: np.ndarray
    aoa_rad: np.ndarray
    aod_rad: np.ndarray
    doppler_hz: np.ndarray
    gain_var: float = 1.0

    def __post_init__(self):
        lengths = {
            len(self.gains),
            len(self.delays_s),
            len(self.aoa_rad),
            len(self.aod_rad),
            len(self.doppler_hz),
        }
        if len(lengths) != 1:
            raise InvalidArgumentError(f"PathSet lists differ in length: {sorted(lengths)}")
        if len(self.gains) < 1:
            raise InvalidArgumentError("PathSet needs at least one path")
        if np.any(np.asarray(self.delays_s) < 0):
            raise InvalidArgumentError("PathSet delays must be nonnegative")
        if self.gain_var <= 0:
            raise InvalidArgumentError(f"gain_var must be > 0, got {self.gain_var}")

    @property
    def n_paths(self) -> int:
        return len(self.gains)

    @classmethod
    def single(
        cls, gain=1.0, delay_s=0.0, aoa_rad=0.0, aod_rad=0.0, doppler_hz=0.0
    ) -> "PathSet":
        """Convenience constructor for a one-path realization."""
        return cls(
            gains=np.array([gain], dtype=np.complex128),
            delays_s=np.array([delay_s], dtype=float),
            aoa_rad=np.array([aoa_rad], dtype=float),
            aod_rad=np.array([aod_rad], dtype=float),
            doppler_hz=np.array([doppler_hz], dtype=float),
        )


def steering_vector(angle_rad: float, n_elems: int, spacing_ratio: float) -> np.ndarray:
    """
    Unit-norm ULA response (1/sqrt(n)) * exp(-j*2*pi*(d/lambda)*m*sin(angle)), m = 0..n-1.
    Args:
        angle_rad (float): Arrival or departure angle in radians.
        n_elems (int): Number of array elements.
        spacing_ratio (float): Element spacing over wavelength (d/lambda).
    Returns:
        np.ndarray: complex128 vector of length n_elems.
    Raises:
        InvalidArgumentError: Non-finite angle or n_elems < 1.
    """
    if not np.isfinite(angle_rad):
        raise InvalidArgumentError(f"angle must be finite, got {angle_rad!r}")
    if n_elems < 1:
        raise InvalidArgumentError(f"n_elems must be >= 1, got {n_elems}")
    return array_response(np.array([angle_rad]), n_elems, spacing_ratio)[0]


def array_response(angles_rad: np.ndarray, n_elems: int, spacing_ratio: float) -> np.ndarray:
    """
    Stack of steering vectors, one row per angle; shape (len(angles), n_elems).
    """
    m = np.arange(n_elems)
    phase = -TWO_PI * spacing_ratio * np.outer(np.sin(angles_rad), m)
    return np.exp(1j * phase) / np.sqrt(n_elems)


def _draw_angles(rng: np.random.Generator, spread: AngleSpread, n_paths: int) -> np.ndarray:
    if spread.center_rad is None:
        center = rng.uniform(0.0, TWO_PI)
    else:
        center = float(spread.center_rad)
    center += rng.uniform(-spread.center_jitter_rad, spread.center_jitter_rad)
    offsets = rng.uniform(-spread.spread_rad, spread.spread_rad, n_paths)
    return np.mod(center + offsets, TWO_PI)


def draw_paths(profile: ScenarioProfile, seed) -> PathSet:
    """
    Draw one realization of the profile's paths.

    Gains are CN(0, sigma^2 * L * p_l) so that E||H_k||_F^2 = N_T * N_R; with
    gain_normalization='unit-energy' the draw is rescaled to sum |alpha_l|^2 = L * sigma^2.
    Args:
        profile (ScenarioProfile): Scenario statistics.
        seed (int | np.random.SeedSequence | np.random.Generator): Randomness source.
    Returns:
        PathSet: Deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    n_paths = profile.n_paths
    power = np.asarray(profile.power_profile, dtype=float)

    unit = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2.0)
    gains = unit * np.sqrt(profile.gain_var * n_paths * power)
    if profile.gain_normalization == "unit-energy":
        energy = float(np.sum(np.abs(gains) ** 2))
        if energy > 0:
            gains = gains * np.sqrt(n_paths * profile.gain_var / energy)

    delays = rng.uniform(0.0, profile.delay_spread_s, n_paths)
    aoa = _draw_angles(rng, profile.aoa_spread, n_paths)
    aod = _draw_angles(rng, profile.aod_spread, n_paths)
    if profile.doppler_max_hz > 0:
        doppler = rng.uniform(-profile.doppler_max_hz, profile.doppler_max_hz, n_paths)
    else:
        doppler = np.zeros(n_paths)

    return PathSet(
        gains=gains,
        delays_s=delays,
        aoa_rad=aoa,
        aod_rad=aod,
        doppler_hz=doppler,
        gain_var=profile.gain_var,
    )


def _check_subcarriers(ks, cfg: SystemConfig) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(ks))
    if not np.issubdtype(ks.dtype, np.integer):
        raise InvalidArgumentError(f"subcarrier indices must be integers, got {ks.dtype}")
    if np.any(ks < 1) or np.any(ks > cfg.n_subcarriers):
        raise InvalidArgumentError(
            f"subcarrier index out of range [1, {cfg.n_subcarriers}]: {ks.tolist()}"
        )
    return ks


def freq_response(paths: PathSet, cfg: SystemConfig, ks, t: float = 0.0) -> np.ndarray:
    """
    Channel matrices for several subcarriers at time t.
    Args:
        paths (PathSet): The realization.
        cfg (SystemConfig): Array sizes and sampling parameters.
        ks (Sequence[int]): 1-based subcarrier indices.
        t (float): Time in seconds; adds exp(+j*2*pi*nu_l*t) per path.
    Returns:
        np.ndarray: complex128 array of shape (len(ks), N_R, N_T).
    """
    ks = _check_subcarriers(ks, cfg)
    if not np.isfinite(t):
        raise InvalidArgumentError(f"time must be finite, got {t!r}")
    a_rx = array_response(paths.aoa_rad, cfg.n_rx, cfg.spacing_ratio)  # (L, N_R)
    a_tx = array_response(paths.aod_rad, cfg.n_tx, cfg.spacing_ratio)  # (L, N_T)
    delay_phase = np.exp(
        -1j * TWO_PI * np.outer(ks, paths.delays_s) * cfg.sample_rate_hz / cfg.n_subcarriers
    )
    weights = delay_phase * (paths.gains * np.exp(1j * TWO_PI * paths.doppler_hz * t))
    scale = np.sqrt(cfg.n_tx * cfg.n_rx / paths.n_paths)
    return scale * np.einsum("kl,lr,lt->krt", weights, a_rx, a_tx.conj())


def freq_channel(paths: PathSet, cfg: SystemConfig, k: int) -> np.ndarray:
    """
    H_k = sqrt(N_T*N_R/L) * sum_l alpha_l * exp(-j*2*pi*tau_l*f_s*k/K) * a_R(phi_l) a_T(phi_l)^H.
    Args:
        paths (PathSet): The realization.
        cfg (SystemConfig): System parameters.
        k (int): Subcarrier index in [1, K].
    Returns:
        np.ndarray: complex128 matrix of shape (N_R, N_T).
    Raises:
        InvalidArgumentError: k out of range.
    """
    return freq_response(paths, cfg, [k])[0]


def freq_channel_at_time(paths: PathSet, cfg: SystemConfig, k: int, t: float) -> np.ndarray:
    """
    Time-varying channel H_k(t): freq_channel with each path rotated by exp(+j*2*pi*nu_l*t).
    """
    return freq_response(paths, cfg, [k], t=t)[0]
