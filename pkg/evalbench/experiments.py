"""
NMSE experiments.

Responsibilities:
- snr_sweep: NMSE versus SNR for several estimators on paired realizations
- robustness_eval: the same sweep on the training scenario and on unseen scenarios
- overhead_experiment: SPR-CNN per CEU position under reduced pilots against a
  full-pilot SF-CNN, with the average pilot overhead
- evaluate_dataset: NMSE of a trained network on a stored dataset split

Realization r of SNR point i is drawn from derive_seed(seed, i, r, ...), independent of
the estimators and of the worker count, and every point records a hash of its realizations.
"""

import logging

import numpy as np

from chanmodel.scenario import ScenarioProfile, profile_hash
from chanmodel.system_config import SystemConfig
from classical.covariance_cache import cached_ensemble_covariance
from datapipe.storage import Dataset
from evalbench import evalbench_params as params
from evalbench.estimators import MmseEstimator, SampleMmseEstimator
from evalbench.metrics import confidence_half_width, nmse_ratios, to_db
from evalbench.report import Curve, CurvePoint, EvalReport
from evalbench.trials import draw_trials
from neuralest.ceu import CeuCache, sprcnn_run_ceu
from neuralest.network import TrainedEstimator, estimate_band, unstack_outputs
from pilotfront.front_end import (
    average_overhead,
    pilot_overhead,
    schedule_overhead,
    snr_db_to_power,
)
from pilotfront.pilot_config import PilotSchedule, pilot_config, uniform_schedule
from utils.binio import canonical_json_hash
from utils.errors import InvalidArgumentError
from utils.log_formatter import format_sweep_point, to_db_string, truncate_values

logger = logging.getLogger(__name__)


def _chunks(n_mc: int):
    if n_mc < 1:
        raise InvalidArgumentError(f"n_mc must be >= 1, got {n_mc}")
    return [range(a, min(a + params.MC_CHUNK, n_mc)) for a in range(0, n_mc, params.MC_CHUNK)]


def _point(snr_db: float, ratios: list[np.ndarray], digests: list[str]) -> CurvePoint:
    ratios = np.concatenate(ratios)
    value = float(np.mean(ratios)) if ratios.size else float("nan")
    return CurvePoint(
        snr_db=float(snr_db),
        nmse=value,
        nmse_db=to_db(value),
        half_width=confidence_half_width(ratios),
        n=int(ratios.size),
        realization_hash=canonical_json_hash(digests),
    )


def _sweep_profile(
    estimators, snr_db_list, profile, cfg, q, n_mc, seed, n_intervals, rho, temporal_model, workers
) -> dict[str, list[CurvePoint]]:
    points = {est.name: [] for est in estimators}
    for i, snr_db in enumerate(snr_db_list):
        schedule = uniform_schedule(pilot_config(cfg, snr_db_to_power(snr_db)), n_intervals)
        ratios = {est.name: [] for est in estimators}
        digests = []
        for realizations in _chunks(n_mc):
            trials = draw_trials(
                profile,
                cfg,
                q,
                schedule,
                seed,
                i,
                realizations,
                rho=rho,
                temporal_model=temporal_model,
                workers=workers,
            )
            digests.append(trials.digest())
            target = trials.target()
            for est in estimators:
                ratios[est.name].append(nmse_ratios(target, est.estimate(trials)))
        for est in estimators:
            point = _point(snr_db, ratios[est.name], digests)
            points[est.name].append(point)
            logger.info(f"    ✓ {format_sweep_point(est.name, snr_db, point.nmse, point.half_width)}")
    return points


def _check_names(estimators) -> None:
    names = [est.name for est in estimators]
    if not names:
        raise InvalidArgumentError("at least one estimator is required")
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"estimator names must be unique, got {names}")


def snr_sweep(
    estimators,
    snr_db_list,
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int = 2,
    n_mc: int = params.N_MC,
    seed: int = 0,
    n_intervals: int = 1,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    workers: int | None = None,
    experiment: str = "snr-sweep",
) -> EvalReport:
    """
    NMSE versus SNR with every estimator on identical realizations.
    Args:
        estimators (list): Wrappers from evalbench.estimators (unique names).
        snr_db_list (Sequence[float]): SNR points in dB.
        profile (ScenarioProfile): Test scenario.
        cfg (SystemConfig): System parameters.
        q (int): Subcarriers per realization.
        n_mc (int): Realizations per SNR point.
        seed (int): Master seed.
        n_intervals (int): Intervals per realization (S for the temporal estimators); the
            last one is estimated.
        rho (float, optional): Interval correlation override.
        temporal_model (str): 'gauss-markov' or 'doppler'.
        workers (int, optional): Thread count for drawing realizations.
        experiment (str): Experiment id stored in the report.
    Returns:
        EvalReport: One curve per estimator.
    """
    _check_names(estimators)
    snr_db_list = [float(v) for v in snr_db_list]
    logger.info(
        f"  ↳ {experiment}: {[e.name for e in estimators]} on '{profile.name}', "
        f"SNR {truncate_values(snr_db_list)} dB, n_mc={n_mc}"
    )
    points = _sweep_profile(
        estimators, snr_db_list, profile, cfg, q, n_mc, seed, n_intervals, rho, temporal_model, workers
    )
    digest = profile_hash(profile)
    return EvalReport(
        experiment=experiment,
        seed=seed,
        n_mc=n_mc,
        estimators=[est.describe() for est in estimators],
        curves=[Curve(est.name, profile.name, digest, points[est.name]) for est in estimators],
        flops={est.name: est.flops(cfg, q) for est in estimators},
        scenario={"train": profile.name, "test": [profile.name]},
        settings={
            "cfg": cfg.to_dict(),
            "q": q,
            "n_intervals": n_intervals,
            "rho": rho,
            "temporal_model": temporal_model,
            "snr_db": snr_db_list,
        },
    )


def robustness_eval(
    estimators,
    train_profile: ScenarioProfile,
    test_profiles,
    snr_db_list,
    cfg: SystemConfig,
    q: int = 2,
    n_mc: int = params.N_MC,
    seed: int = 0,
    n_intervals: int = 1,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    workers: int | None = None,
) -> EvalReport:
    """
    Evaluate estimators built for train_profile on several test scenarios.
    Curves are keyed by the test profile hash and flagged matched / mismatched; the test on
    the training profile reproduces snr_sweep with the same seed.
    """
    _check_names(estimators)
    train_hash = profile_hash(train_profile)
    test_profiles = list(test_profiles)
    if all(profile_hash(p) == train_hash for p in test_profiles):
        raise InvalidArgumentError("robustness_eval needs a test profile that differs from the training one")
    snr_db_list = [float(v) for v in snr_db_list]
    curves = []
    for profile in test_profiles:
        digest = profile_hash(profile)
        status = "matched" if digest == train_hash else "mismatched"
        logger.info(f"  ↳ Testing on '{profile.name}' ({status})")
        points = _sweep_profile(
            estimators, snr_db_list, profile, cfg, q, n_mc, seed, n_intervals, rho, temporal_model, workers
        )
        curves += [
            Curve(est.name, profile.name, digest, points[est.name], matched=digest == train_hash)
            for est in estimators
        ]
    return EvalReport(
        experiment="robustness",
        seed=seed,
        n_mc=n_mc,
        estimators=[est.describe() for est in estimators],
        curves=curves,
        flops={est.name: est.flops(cfg, q) for est in estimators},
        scenario={"train": train_profile.name, "test": [p.name for p in test_profiles]},
        settings={
            "cfg": cfg.to_dict(),
            "q": q,
            "n_intervals": n_intervals,
            "rho": rho,
            "temporal_model": temporal_model,
            "snr_db": snr_db_list,
        },
    )


def overhead_summary(schedule: PilotSchedule, cfg: SystemConfig) -> dict:
    """Per-interval and average pilot overhead of a schedule and its ratio to full pilots."""
    full = pilot_overhead(cfg.n_tx, cfg.n_rx, cfg.n_rx_rf)
    average = average_overhead(schedule, cfg.n_rx_rf)
    return {
        "per_interval": schedule_overhead(schedule, cfg.n_rx_rf),
        "average": average,
        "full": full,
        "ratio": average / full,
    }


def overhead_experiment(
    spr_nets: list[TrainedEstimator],
    sf_baseline: TrainedEstimator,
    schedule: PilotSchedule,
    snr_db_list,
    profile: ScenarioProfile,
    cfg: SystemConfig,
    q: int | None = None,
    n_mc: int = params.N_MC,
    seed: int = 0,
    rho: float | None = None,
    temporal_model: str = "gauss-markov",
    workers: int | None = None,
    cov_n_mc: int = params.COVARIANCE_N_MC,
    cov_cache_dir=None,
    joint_mmse: bool = True,
) -> EvalReport:
    """
    SPR-CNN over CEUs of len(schedule) intervals against an SF-CNN that gets full pilots in
    every interval. Both see the same channels; the baseline's noise is drawn separately.
    Args:
        spr_nets (list[TrainedEstimator]): D networks, depth d + 1 for position d (0-based).
        sf_baseline (TrainedEstimator): SF network (any Q dividing the evaluation Q).
        schedule (PilotSchedule): CEU schedule, full pilots first; its power is replaced by
            each SNR point.
        snr_db_list (Sequence[float]): SNR points in dB.
        profile (ScenarioProfile): Test scenario.
        cfg (SystemConfig): System parameters.
        q (int, optional): Subcarriers per realization; default the SPR networks' Q.
        n_mc (int): CEUs per SNR point.
        seed (int): Master seed.
        cov_n_mc (int): Draws of the ideal D-interval covariance.
        cov_cache_dir (str | Path | bool, optional): Covariance cache; False disables it.
        joint_mmse (bool): Add the ideal and sample MMSE curves over the whole CEU.
    Returns:
        EvalReport: 'spr-cnn' curves per CEU position and averaged, the 'sf-cnn' baseline,
        LS under the reduced schedule, the overhead summary and, with joint_mmse, ideal and
        sample MMSE that refine the whole CEU as one D-interval joint vector.
    """
    schedule.check_spr(cfg)
    n_intervals = len(schedule)
    if len(spr_nets) != n_intervals:
        raise InvalidArgumentError(f"{len(spr_nets)} SPR networks for a CEU of {n_intervals} intervals")
    q = q or spr_nets[0].spec.q
    snr_db_list = [float(v) for v in snr_db_list]
    overhead = overhead_summary(schedule, cfg)
    logger.info(
        f"  ↳ Overhead experiment on '{profile.name}': average overhead {overhead['average']:g} "
        f"of {overhead['full']} (ratio {overhead['ratio']:.3f})"
    )

    joint_estimators = []
    if joint_mmse:
        cov = cached_ensemble_covariance(
            profile,
            cfg,
            q,
            n_intervals,
            cov_n_mc,
            seed,
            rho=rho,
            temporal_model=temporal_model,
            workers=workers,
            cache_dir=cov_cache_dir,
        )
        joint_estimators = [
            MmseEstimator(cov, name="mmse-ideal-spr"),
            SampleMmseEstimator(s=n_intervals, name="mmse-sample-spr"),
        ]
    joint_names = [est.name for est in joint_estimators]

    summary_names = ["spr-cnn", "sf-cnn", "ls-spr"] + joint_names
    names = [f"spr-cnn-d{d + 1}" for d in range(n_intervals)] + summary_names
    points = {name: [] for name in names}
    for i, snr_db in enumerate(snr_db_list):
        power = snr_db_to_power(snr_db)
        spr = schedule.with_power(power)
        full = uniform_schedule(pilot_config(cfg, power), n_intervals)
        ratios = {name: [] for name in names}
        digests = []
        for realizations in _chunks(n_mc):
            common = dict(rho=rho, temporal_model=temporal_model, workers=workers)
            spr_trials = draw_trials(profile, cfg, q, spr, seed, i, realizations, **common)
            full_trials = draw_trials(
                profile, cfg, q, full, seed, i, realizations, noise_stream=2, **common
            )
            digests.append(spr_trials.digest())

            result = sprcnn_run_ceu(spr_nets, spr_trials.pilots, spr, CeuCache(n_intervals - 1), cfg)
            joint = {est.name: est.estimate_all(spr_trials) for est in joint_estimators}
            per_d_spr, per_d_sf, per_d_ls = [], [], []
            per_d_joint = {name: [] for name in joint_names}
            for d in range(n_intervals):
                truth = spr_trials.target(d)
                per_d_spr.append(nmse_ratios(truth, result.estimates[d]))
                baseline = estimate_band(sf_baseline, full_trials.te(d)[:, None])
                per_d_sf.append(nmse_ratios(truth, baseline))
                per_d_ls.append(nmse_ratios(truth, spr_trials.te(d)))
                for name in joint_names:
                    per_d_joint[name].append(nmse_ratios(truth, joint[name][:, :, d]))
                ratios[f"spr-cnn-d{d + 1}"].append(per_d_spr[-1])
            ratios["spr-cnn"].append(np.mean(per_d_spr, axis=0))
            ratios["sf-cnn"].append(np.mean(per_d_sf, axis=0))
            ratios["ls-spr"].append(np.mean(per_d_ls, axis=0))
            for name in joint_names:
                ratios[name].append(np.mean(per_d_joint[name], axis=0))
        for name in names:
            point = _point(snr_db, ratios[name], digests)
            points[name].append(point)
            logger.info(f"    ✓ {format_sweep_point(name, snr_db, point.nmse, point.half_width)}")

    digest = profile_hash(profile)
    curves = [
        Curve("spr-cnn", profile.name, digest, points[f"spr-cnn-d{d + 1}"], interval=d + 1)
        for d in range(n_intervals)
    ]
    curves += [Curve(name, profile.name, digest, points[name]) for name in summary_names]
    return EvalReport(
        experiment="overhead",
        seed=seed,
        n_mc=n_mc,
        estimators=[
            {"name": "spr-cnn", "family": "cnn", "nets": [net.name for net in spr_nets]},
            {"name": "sf-cnn", "family": "cnn", "net": sf_baseline.name, "q": sf_baseline.spec.q},
            {"name": "ls-spr", "family": "ls"},
            *(est.describe() for est in joint_estimators),
        ],
        curves=curves,
        overhead=overhead,
        scenario={"train": profile.name, "test": [profile.name]},
        settings={
            "cfg": cfg.to_dict(),
            "q": q,
            "schedule": schedule.describe(),
            "rho": rho,
            "temporal_model": temporal_model,
            "snr_db": snr_db_list,
            "cov_n_mc": cov_n_mc if joint_mmse else None,
        },
    )


def evaluate_dataset(net: TrainedEstimator, dataset: Dataset) -> dict:
    """
    NMSE of a network on stored (TE stack, scaled target) pairs.
    Returns:
        dict: estimator, dataset kind, count, nmse, nmse_db and 95% half-width.
    """
    manifest = dataset.manifest
    if (net.spec.input_maps, net.spec.output_maps) != (manifest.input_maps, manifest.output_maps):
        raise InvalidArgumentError(
            f"network {net.name} ({net.spec.input_maps} -> {net.spec.output_maps} maps) does not "
            f"fit dataset {manifest.net_kind} ({manifest.input_maps} -> {manifest.output_maps})"
        )
    truth = unstack_outputs(dataset.targets.astype(np.float64)) * manifest.scale_c
    ratios = nmse_ratios(truth, net.estimate(dataset.inputs))
    value = float(np.mean(ratios)) if ratios.size else float("nan")
    result = {
        "estimator": net.name,
        "dataset": manifest.net_kind,
        "split": manifest.split,
        "count": int(ratios.size),
        "nmse": value,
        "nmse_db": to_db(value),
        "half_width": confidence_half_width(ratios),
    }
    logger.info(
        f"    ✓ {net.name} on {result['count']} {manifest.net_kind} samples: "
        f"NMSE={value:.4g} ({to_db_string(value)}) ±{result['half_width']:.2g}"
    )
    return result
