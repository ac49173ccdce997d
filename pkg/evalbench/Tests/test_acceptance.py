"""
Scaled reproductions of the estimator orderings. Each trains networks for tens of minutes
on a CPU, so they only run with MMW_RUN_SLOW=1.
"""

import pytest

from chanmodel.scenario import load_profile, profile_hash
from chanmodel.system_config import SystemConfig
from datapipe.generator import build_datasets
from datapipe.manifest import new_manifest
from datapipe.splitting import split
from evalbench.estimators import CnnEstimator, LsEstimator, MmseEstimator, SampleMmseEstimator
from evalbench.experiments import overhead_experiment, robustness_eval, snr_sweep
from neuralest.netspec import build_net
from neuralest.training import TrainConfig, train
from pilotfront.pilot_config import spr_schedule

pytestmark = pytest.mark.slow

COUNT = 10_000
EPOCHS = 60
N_MC = 2000


def _datasets(kind, q, depth=1, snr_db=10.0, seed=0):
    profile = load_profile("umi-nlos-like")
    manifest = new_manifest(profile, SystemConfig(), kind, q, COUNT, seed, snr_db=snr_db, depth=depth)
    return build_datasets(manifest, profile=profile)


def _fit(dataset, seed=0):
    manifest = dataset.manifest
    train_part, val_part, _ = split(dataset, (0.9, 0.1, 0.0), seed=seed)
    spec = build_net(manifest.net_kind, manifest.q, manifest.depth)
    return train(spec, train_part, val_part, TrainConfig.scaled(EPOCHS, seed=seed)).estimator


def _train(kind, q, depth=1):
    return _fit(_datasets(kind, q, depth)[0])


@pytest.fixture(scope="module")
def cfg():
    return SystemConfig()


@pytest.fixture(scope="module")
def umi():
    return load_profile("umi-nlos-like")


@pytest.fixture(scope="module")
def sf_q2():
    return _train("sf", 2)


@pytest.fixture(scope="module")
def sf_q1():
    return _train("sf", 1)


def test_ideal_mmse_dominates_ls(cfg, umi):
    mmse = MmseEstimator.ideal(umi, cfg, q=2, seed=1)
    report = snr_sweep([LsEstimator(), mmse], [0.0, 10.0, 20.0], umi, cfg, q=2, n_mc=N_MC, seed=2)
    for ls, ideal in zip(report.curve("ls").points, report.curve("mmse-ideal").points):
        assert ideal.nmse <= 1.02 * ls.nmse


def test_sf_cnn_ordering(cfg, umi, sf_q2, sf_q1):
    estimators = [
        CnnEstimator(sf_q2, name="sf-q2"),
        CnnEstimator(sf_q1, name="sf-q1"),
        LsEstimator(),
        SampleMmseEstimator(),
    ]
    report = snr_sweep(estimators, [10.0], umi, cfg, q=2, n_mc=N_MC, seed=3)
    nmse = {name: report.curve(name).points[0].nmse for name in ("sf-q2", "sf-q1", "ls", "mmse-sample")}
    assert nmse["sf-q2"] < nmse["sf-q1"] < nmse["ls"]
    assert nmse["sf-q2"] < nmse["mmse-sample"]


def test_sft_cnn_beats_sf_cnn(cfg, umi, sf_q2):
    sft = _train("sft", 2, depth=2)
    estimators = [CnnEstimator(sft, name="sft"), CnnEstimator(sf_q2, name="sf")]
    report = snr_sweep(estimators, [10.0], umi, cfg, q=2, n_mc=N_MC, seed=4, n_intervals=2)
    assert report.curve("sft").points[0].nmse < report.curve("sf").points[0].nmse


def test_spr_cnn_close_to_full_pilots(cfg, umi, sf_q1):
    mixed = [5.0, 10.0, 15.0]
    nets = [_fit(dataset) for dataset in _datasets("spr", 1, depth=4, snr_db=mixed)]
    schedule = spr_schedule(cfg, 1.0)
    report = overhead_experiment(nets, sf_q1, schedule, mixed, umi, cfg, q=1, n_mc=N_MC, seed=5, joint_mmse=False)
    assert report.overhead["average"] == 88
    for snr_db in mixed:
        gap = report.curve("spr-cnn").nmse_at(snr_db) / report.curve("sf-cnn").nmse_at(snr_db)
        assert gap < 10 ** 0.3


def test_sf_cnn_robust_to_unseen_scenario(cfg, umi, sf_q2):
    uma = load_profile("uma-nlos-like")
    estimators = [
        CnnEstimator(sf_q2, name="sf-q2"),
        MmseEstimator.ideal(umi, cfg, q=2, seed=6),
        SampleMmseEstimator(),
    ]
    report = robustness_eval(estimators, umi, [umi, uma], [10.0], cfg, q=2, n_mc=N_MC, seed=7)
    uma_hash, umi_hash = profile_hash(uma), profile_hash(umi)
    cnn_on_uma = report.curve("sf-q2", uma_hash).points[0]
    sample_on_uma = report.curve("mmse-sample", uma_hash).points[0]
    assert cnn_on_uma.nmse + cnn_on_uma.half_width < sample_on_uma.nmse
    assert report.curve("mmse-ideal", uma_hash).points[0].nmse > report.curve("mmse-ideal", umi_hash).points[0].nmse
