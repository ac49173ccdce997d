"""
LS and MMSE channel estimators over Q subcarriers and S coherence intervals.

Responsibilities:
- LS: tentative estimates of every (k, n) pilot block, stacked into a joint vector
- Per-entry LS error variances for uniform and reduced-pilot schedules
- MMSE refinement R (R + Sigma)^-1 h_ls with one diagonal-loading retry on failure
"""

import logging
from collections.abc import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from chanmodel.system_config import SystemConfig
from classical.covariance import CovarianceModel
from classical.joint_vector import JointLayout
from pilotfront.front_end import te_noise_variance, tentative_estimate
from pilotfront.pilot_config import PilotConfig, PilotSchedule, uniform_schedule
from utils.errors import InvalidArgumentError, NumericalRankError

logger = logging.getLogger(__name__)

RETRY_RELATIVE_LOADING = 1e-6


def _as_schedule(schedule, n_intervals: int) -> PilotSchedule:
    if isinstance(schedule, PilotConfig):
        return uniform_schedule(schedule, n_intervals)
    if len(schedule) != n_intervals:
        raise InvalidArgumentError(
            f"schedule has {len(schedule)} intervals, pilots cover {n_intervals}"
        )
    return schedule


def ls_estimate(
    y_list: Sequence[np.ndarray], schedule: PilotSchedule | PilotConfig, cfg: SystemConfig
) -> np.ndarray:
    """
    LS joint estimate from per-interval pilot blocks.
    Args:
        y_list (Sequence[np.ndarray]): One entry per interval n, each of shape
            (..., Q, M_R[n], M_T[n]).
        schedule (PilotSchedule | PilotConfig): Pilot configuration per interval; a single
            PilotConfig is used for every interval.
        cfg (SystemConfig): Array sizes.
    Returns:
        np.ndarray: Joint vectors of shape (..., Q*S*N_R*N_T).
    """
    if len(y_list) < 1:
        raise InvalidArgumentError("ls_estimate needs at least one interval of pilots")
    schedule = _as_schedule(schedule, len(y_list))
    lifted = [
        tentative_estimate(y, pc, cfg) for y, pc in zip(y_list, schedule.per_interval)
    ]
    # (..., Q, N_R, N_T) per interval -> (..., Q, S, N_R, N_T)
    blocks = np.stack(lifted, axis=-3)
    layout = JointLayout.for_system(cfg, q=blocks.shape[-4], s=len(y_list))
    return layout.stack(blocks)


def ls_noise_variance(
    schedule: PilotSchedule | PilotConfig, cfg: SystemConfig, layout: JointLayout
) -> np.ndarray:
    """
    Diagonal of the LS error covariance: te_noise_variance of interval n on every entry of
    the blocks of interval n.
    """
    schedule = _as_schedule(schedule, layout.s)
    per_interval = np.array([te_noise_variance(pc, cfg) for pc in schedule.per_interval])
    grid = np.broadcast_to(per_interval[None, :, None], (layout.q, layout.s, layout.block_dim))
    return grid.reshape(layout.dim).copy()


def _noise_diagonal(noise_var, dim: int) -> np.ndarray:
    diag = np.broadcast_to(np.asarray(noise_var, dtype=float), (dim,)).copy()
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise InvalidArgumentError("noise_var must be finite and > 0")
    return diag


def _factor(cov: CovarianceModel, diag: np.ndarray):
    system = cov.matrix + np.diag(diag)
    try:
        return cho_factor(system, lower=True)
    except LinAlgError:
        extra = RETRY_RELATIVE_LOADING * float(np.real(np.trace(system))) / cov.dim
        logger.warning(f"    ⚠ Cholesky failed; retrying with extra loading {extra:.3g}")
        try:
            return cho_factor(system + extra * np.eye(cov.dim), lower=True)
        except LinAlgError as e:
            raise NumericalRankError(
                f"R + noise is not positive definite even after loading {extra:.3g}"
            ) from e


def mmse_filter(cov: CovarianceModel, noise_var) -> np.ndarray:
    """
    The MMSE filter matrix R (R + Sigma)^-1 with Sigma = diag(noise_var).
    """
    diag = _noise_diagonal(noise_var, cov.dim)
    factor = _factor(cov, diag)
    # R and R + Sigma are Hermitian, so R (R + Sigma)^-1 = ((R + Sigma)^-1 R)^H
    return cho_solve(factor, cov.matrix).conj().T


def mmse_refine(h_ls, cov: CovarianceModel, noise_var) -> np.ndarray:
    """
    Refine LS joint estimate(s) with a covariance model.
    Args:
        h_ls (np.ndarray): Joint vector(s) of shape (..., dim).
        cov (CovarianceModel): Channel covariance R.
        noise_var (float | np.ndarray): Per-entry LS error variance, scalar or length-dim.
    Returns:
        np.ndarray: R (R + Sigma)^-1 h_ls, same shape as h_ls.
    Raises:
        NumericalRankError: R + Sigma stays indefinite after one loading retry.
    """
    h_ls = np.asarray(h_ls, dtype=np.complex128)
    if h_ls.shape[-1] != cov.dim:
        raise InvalidArgumentError(
            f"h_ls length {h_ls.shape[-1]} does not match covariance dimension {cov.dim}"
        )
    diag = _noise_diagonal(noise_var, cov.dim)
    factor = _factor(cov, diag)
    columns = h_ls.reshape(-1, cov.dim).T
    refined = cov.matrix @ cho_solve(factor, columns)
    return refined.T.reshape(h_ls.shape)
