"""
Leading-order multiplication counts of the classical estimators.
"""

from chanmodel.system_config import SystemConfig
from utils.errors import InvalidArgumentError


def _check_positive(**counts):
    for name, value in counts.items():
        if value < 1:
            raise InvalidArgumentError(f"{name} must be >= 1, got {value}")


def flops_mmse(q: int, s: int, cfg: SystemConfig) -> int:
    """
    Cost of the joint MMSE filter: (S*Q*N_T*N_R)^3.
    """
    _check_positive(q=q, s=s)
    return (s * q * cfg.n_tx * cfg.n_rx) ** 3


def flops_ls(q: int, cfg: SystemConfig) -> int:
    """LS over Q subcarriers: Q * N_T^2 * N_R^2."""
    _check_positive(q=q)
    return q * cfg.n_tx**2 * cfg.n_rx**2


def flops_mmse_covariance(q: int, cfg: SystemConfig) -> int:
    """Per-realization covariance estimate for the non-ideal MMSE: Q^2 * N_T^2 * N_R^2."""
    _check_positive(q=q)
    return q**2 * cfg.n_tx**2 * cfg.n_rx**2
