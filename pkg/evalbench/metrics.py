"""
Normalized mean-squared error and its confidence interval.

Responsibilities:
- Per-realization ratios ||H - H_hat||_F^2 / ||H||_F^2, averaged (mean of ratios)
- Exclusion of zero-norm channels with a warning
- Normal-approximation confidence half-widths and dB conversion
"""

import logging
import math

import numpy as np

from evalbench import evalbench_params as params
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def nmse_ratios(h_true, h_est) -> np.ndarray:
    """
    Per-realization NMSE ratios.
    Args:
        h_true (np.ndarray): True channels, shape (R, ...) with one realization per leading row.
        h_est (np.ndarray): Estimates of the same shape.
    Returns:
        np.ndarray: Ratios of the realizations whose true channel is nonzero.
    """
    h_true = np.asarray(h_true)
    h_est = np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise InvalidArgumentError(f"shape mismatch: {h_true.shape} vs {h_est.shape}")
    if h_true.ndim < 2:
        raise InvalidArgumentError(f"expected (realizations, ...) arrays, got {h_true.shape}")
    axes = tuple(range(1, h_true.ndim))
    power = np.sum(np.abs(h_true) ** 2, axis=axes)
    error = np.sum(np.abs(h_true - h_est) ** 2, axis=axes)
    keep = power > 0
    if not np.all(keep):
        logger.warning(f"    ⚠ Excluded {int(np.sum(~keep))} zero-norm channels from the NMSE")
    return error[keep] / power[keep]


def nmse(h_true, h_est) -> float:
    """Mean of the per-realization ratios; NaN when every channel is zero."""
    ratios = nmse_ratios(h_true, h_est)
    return float(np.mean(ratios)) if ratios.size else float("nan")


def confidence_half_width(ratios, z: float = params.CI_Z) -> float:
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size < 2:
        return float("inf")
    return float(z * np.std(ratios, ddof=1) / math.sqrt(ratios.size))


def to_db(value: float) -> float:
    """10 log10(value); -inf for zero."""
    return 10.0 * math.log10(value) if value > 0 else float("-inf")
