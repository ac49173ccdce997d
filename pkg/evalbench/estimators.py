"""
Uniform wrappers around the estimators compared in the benchmarks.

Every wrapper maps a TrialBatch to estimates of the current (last) interval's channels,
shape (B, Q, N_R, N_T), and describes itself for the report.

Responsibilities:
- LsEstimator: tentative estimate of the current interval
- MmseEstimator: joint MMSE with a fixed covariance (ideal when built from the ensemble)
- SampleMmseEstimator: joint MMSE with a covariance estimated from each realization's LS
- CnnEstimator: SF/SFT network run over the Q subcarriers in groups of the network's Q
"""

import logging

import numpy as np

from chanmodel.scenario import ScenarioProfile
from chanmodel.system_config import SystemConfig
from classical.covariance import CovarianceModel, sample_covariance_from_ls
from classical.covariance_cache import cached_ensemble_covariance
from classical.estimators import ls_estimate, ls_noise_variance, mmse_refine
from classical.flops import flops_ls, flops_mmse, flops_mmse_covariance
from classical.joint_vector import JointLayout
from evalbench import evalbench_params as params
from evalbench.trials import TrialBatch
from neuralest.netspec import flops_cnn_total
from neuralest.network import TrainedEstimator, estimate_band
from pilotfront.pilot_config import PilotSchedule, pilot_config
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


def _joint_ls(trials: TrialBatch, s: int) -> tuple[np.ndarray, np.ndarray, JointLayout]:
    """LS joint vectors over the last s intervals and their per-entry error variances."""
    if s > trials.n_intervals:
        raise InvalidArgumentError(f"estimator needs {s} intervals, trials hold {trials.n_intervals}")
    schedule = PilotSchedule(trials.schedule.per_interval[-s:])
    layout = JointLayout.for_system(trials.cfg, trials.q, s)
    h_ls = ls_estimate(trials.pilots[-s:], schedule, trials.cfg)
    return h_ls, ls_noise_variance(schedule, trials.cfg, layout), layout


class LsEstimator:
    name = "ls"

    def estimate(self, trials: TrialBatch) -> np.ndarray:
        h_ls, _, layout = _joint_ls(trials, 1)
        return layout.unstack(h_ls)[:, :, -1]

    def flops(self, cfg: SystemConfig, q: int) -> int:
        return flops_ls(q, cfg)

    def describe(self) -> dict:
        return {"name": self.name, "family": "ls"}


class MmseEstimator:
    """
    Joint MMSE over cov.layout.s intervals with a covariance fixed in advance.
    """

    def __init__(self, cov: CovarianceModel, name: str = "mmse-ideal"):
        self.cov = cov
        self.name = name

    @classmethod
    def ideal(
        cls,
        profile: ScenarioProfile,
        cfg: SystemConfig,
        q: int,
        s: int = 1,
        n_mc: int = params.COVARIANCE_N_MC,
        seed: int = 0,
        rho: float | None = None,
        temporal_model: str = "gauss-markov",
        cache_dir=None,
        workers: int | None = None,
        name: str = "mmse-ideal",
    ) -> "MmseEstimator":
        """Ensemble covariance of the channels the trials are drawn from (same rho and temporal model)."""
        cov = cached_ensemble_covariance(
            profile,
            cfg,
            q,
            s,
            n_mc,
            seed,
            rho=rho,
            temporal_model=temporal_model,
            workers=workers,
            cache_dir=cache_dir,
        )
        return cls(cov, name=name)

    def estimate_all(self, trials: TrialBatch) -> np.ndarray:
        """Joint estimates of the last cov.layout.s intervals, (B, Q, S, N_R, N_T)."""
        layout = self.cov.layout
        if layout.q != trials.q:
            raise InvalidArgumentError(f"covariance is for Q={layout.q}, trials have Q={trials.q}")
        h_ls, noise_var, layout = _joint_ls(trials, layout.s)
        return layout.unstack(mmse_refine(h_ls, self.cov, noise_var))

    def estimate(self, trials: TrialBatch) -> np.ndarray:
        return self.estimate_all(trials)[:, :, -1]

    def flops(self, cfg: SystemConfig, q: int) -> int:
        return flops_mmse(q, self.cov.layout.s, cfg)

    def describe(self) -> dict:
        return {"name": self.name, "family": "mmse", "covariance": self.cov.describe()}


class SampleMmseEstimator:
    """Non-ideal MMSE: the covariance comes from the realization's own LS estimate."""

    def __init__(self, s: int = 1, loading: float | None = None, name: str = "mmse-sample"):
        self.s = s
        self.loading = loading
        self.name = name

    def estimate_all(self, trials: TrialBatch) -> np.ndarray:
        h_ls, noise_var, layout = _joint_ls(trials, self.s)
        refined = np.empty_like(h_ls)
        for r in range(trials.size):
            cov = sample_covariance_from_ls(h_ls[r], layout, loading=self.loading)
            refined[r] = mmse_refine(h_ls[r], cov, noise_var)
        return layout.unstack(refined)

    def estimate(self, trials: TrialBatch) -> np.ndarray:
        return self.estimate_all(trials)[:, :, -1]

    def flops(self, cfg: SystemConfig, q: int) -> int:
        return flops_mmse(q, self.s, cfg) + flops_mmse_covariance(q * self.s, cfg)

    def describe(self) -> dict:
        return {"name": self.name, "family": "mmse", "s": self.s, "loading": self.loading}


class CnnEstimator:
    """
    A trained SF or SFT network; a Q=1 network is applied to each subcarrier separately.
    """

    def __init__(self, net: TrainedEstimator, name: str | None = None):
        if net.spec.kind == "spr":
            raise InvalidArgumentError("SPR networks run per CEU; use overhead_experiment")
        self.net = net
        self.name = name or f"{net.spec.kind}-cnn-q{net.spec.q}"

    def estimate(self, trials: TrialBatch) -> np.ndarray:
        if trials.q < self.net.spec.q:
            raise InvalidArgumentError(
                f"{self.name} needs Q >= {self.net.spec.q} subcarriers, trials have {trials.q}"
            )
        return estimate_band(self.net, trials.te_stack(self.net.spec.depth))

    def flops(self, cfg: SystemConfig, q: int) -> int:
        groups = -(-q // self.net.spec.q)
        return groups * flops_cnn_total(self.net.spec, pilot_config(cfg, 1.0))

    def describe(self) -> dict:
        spec = self.net.spec
        return {"name": self.name, "family": "cnn", "net": spec.name, "q": spec.q, "depth": spec.depth}
