import math

import numpy as np
import pytest

from chanmodel.scenario import AngleSpread, ScenarioProfile
from chanmodel.system_config import SystemConfig
from chanmodel.temporal import draw_channel_block
from classical.covariance import CovarianceModel, ensemble_covariance, sample_covariance_from_ls
from classical.estimators import ls_estimate, ls_noise_variance, mmse_filter, mmse_refine
from classical.flops import flops_ls, flops_mmse, flops_mmse_covariance
from classical.joint_vector import JointLayout
from pilotfront.front_end import received_pilots
from pilotfront.pilot_config import pilot_config, spr_schedule
from utils.errors import NumericalRankError
from utils.seeding import derive_seed


def _nmse(truth, estimate):
    return np.mean(np.sum(np.abs(truth - estimate) ** 2, axis=-1) / np.sum(np.abs(truth) ** 2, axis=-1))


def _pilot_run(block, pc, seed, noiseless=False):
    """Pilots per interval for a ChannelTensor: list over n of (Q, M_R, M_T)."""
    return [
        received_pilots(block.interval(n), pc, seed=derive_seed(seed, n), noiseless=noiseless)
        for n in range(block.n_intervals)
    ]


def _random_pd(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return a @ a.conj().T + dim * np.eye(dim)


def test_noiseless_ls_recovers_joint_vector(small_cfg, tiny_profile):
    pc = pilot_config(small_cfg, power=2.0)
    block = draw_channel_block(tiny_profile, small_cfg, q=2, n_intervals=2, seed=3)
    layout = JointLayout.for_system(small_cfg, q=2, s=2)
    h_ls = ls_estimate(_pilot_run(block, pc, 0, noiseless=True), pc, small_cfg)
    assert np.max(np.abs(h_ls - layout.stack(block.entries))) < 1e-9


def test_ls_of_zero_pilots_is_zero(small_cfg):
    pc = pilot_config(small_cfg, power=1.0)
    h_ls = ls_estimate([np.zeros((2, 4, 8))], pc, small_cfg)
    assert h_ls.shape == (64,)
    assert not np.any(h_ls)


@pytest.mark.parametrize("power", [1.0, 10.0, 100.0])
def test_ls_nmse_is_inverse_power(reference_cfg, umi_profile, power):
    """
    Full unitary pilots, unit gain variance: LS NMSE within 5% of 1/P over 2000 realizations.
    """
    pc = pilot_config(reference_cfg, power=power)
    layout = JointLayout.for_system(reference_cfg, q=1)
    truths, estimates = [], []
    for i in range(2000):
        block = draw_channel_block(umi_profile, reference_cfg, q=1, n_intervals=1, seed=derive_seed(17, i))
        estimates.append(ls_estimate(_pilot_run(block, pc, derive_seed(18, i)), pc, reference_cfg))
        truths.append(layout.stack(block.entries))
    nmse = _nmse(np.array(truths), np.array(estimates))
    assert abs(nmse - 1 / power) / (1 / power) < 0.05


def test_ls_noise_variance_for_spr_schedule(reference_cfg):
    schedule = spr_schedule(reference_cfg, power=10.0)
    layout = JointLayout.for_system(reference_cfg, q=1, s=4)
    diag = ls_noise_variance(schedule, reference_cfg, layout)
    assert diag.shape == (layout.dim,)
    assert diag[:512] == pytest.approx(np.full(512, 0.1))
    assert diag[512:1024] == pytest.approx(np.full(512, 64 / 512 / 10))


def test_deterministic_single_path_covariance_is_rank_one(small_cfg):
    profile = ScenarioProfile(
        name="single",
        n_paths=1,
        delay_spread_s=1e-9,
        aoa_spread=AngleSpread(center_rad=0.4),
        aod_spread=AngleSpread(center_rad=1.3),
        power_profile=(1.0,),
    )
    cov = ensemble_covariance(profile, small_cfg, q=1, s=1, n_mc=50, seed=0)
    eig = np.linalg.eigvalsh(cov.matrix)
    assert eig[-2] < 1e-6 * eig[-1]


def test_ensemble_trace_matches_channel_energy(small_cfg, tiny_profile):
    cov = ensemble_covariance(tiny_profile, small_cfg, q=2, s=1, n_mc=10_000, seed=4)
    assert np.real(np.trace(cov.matrix)) / 2 == pytest.approx(8 * 4, rel=0.03)
    assert cov.source == "ensemble-true"
    assert cov.n_mc == 10_000
    assert np.max(np.abs(cov.matrix - cov.matrix.conj().T)) < 1e-10


def test_ensemble_covariance_converges(small_cfg, tiny_profile):
    reference = ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=8000, seed=2).matrix
    coarse = ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=250, seed=2).matrix
    finer = ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=2000, seed=2).matrix
    assert np.linalg.norm(finer - reference) < np.linalg.norm(coarse - reference)


def test_ensemble_covariance_ignores_worker_count(small_cfg, tiny_profile):
    one = ensemble_covariance(tiny_profile, small_cfg, q=1, s=2, n_mc=600, seed=8, workers=1)
    four = ensemble_covariance(tiny_profile, small_cfg, q=1, s=2, n_mc=600, seed=8, workers=4)
    assert np.array_equal(one.matrix, four.matrix)


def test_ensemble_warns_when_rank_deficient(small_cfg, tiny_profile, caplog):
    ensemble_covariance(tiny_profile, small_cfg, q=1, s=1, n_mc=10, seed=0)
    assert "below the covariance dimension" in caplog.text


def test_sample_covariance_of_zero_is_loading():
    layout = JointLayout(q=2, s=1, n_rx=2, n_tx=2)
    cov = sample_covariance_from_ls(np.zeros(layout.dim), layout, loading=0.5)
    assert np.array_equal(cov.matrix, 0.5 * np.eye(layout.dim))


def test_sample_covariance_single_block_is_outer_product():
    layout = JointLayout(q=1, s=1, n_rx=2, n_tx=3)
    rng = np.random.default_rng(1)
    h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    cov = sample_covariance_from_ls(h, layout, loading=0.25)
    assert np.allclose(cov.matrix, np.outer(h, h.conj()) + 0.25 * np.eye(6), atol=1e-12)


def test_sample_covariance_is_hermitian_psd_and_block_toeplitz():
    layout = JointLayout(q=3, s=2, n_rx=2, n_tx=2)
    rng = np.random.default_rng(2)
    h = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    cov = sample_covariance_from_ls(h, layout, loading=0.0)
    assert np.max(np.abs(cov.matrix - cov.matrix.conj().T)) < 1e-10
    assert np.linalg.eigvalsh(cov.matrix).min() > -1e-8
    b = layout.block_dim

    def block(i, j):
        return cov.matrix[i * b : (i + 1) * b, j * b : (j + 1) * b]

    # block index = q * S + s; (q=0, s=0)-(q=1, s=0) and (q=1, s=0)-(q=2, s=0) share lag (-1, 0)
    assert np.allclose(block(0, 2), block(2, 4), atol=1e-12)


def test_sample_covariance_default_loading():
    layout = JointLayout(q=1, s=1, n_rx=1, n_tx=2)
    cov = sample_covariance_from_ls(np.array([1.0, 1.0j]), layout)
    assert cov.loading == pytest.approx(1e-3 * 2 / 2)


def test_mmse_with_zero_covariance_returns_zero():
    layout = JointLayout(q=1, s=1, n_rx=2, n_tx=2)
    cov = CovarianceModel(np.zeros((4, 4), dtype=complex), "ensemble-true", layout)
    assert np.array_equal(mmse_refine(np.ones(4, dtype=complex), cov, 1.0), np.zeros(4))


def test_mmse_approaches_ls_for_vanishing_noise():
    layout = JointLayout(q=1, s=1, n_rx=2, n_tx=3)
    rng = np.random.default_rng(3)
    cov = CovarianceModel(_random_pd(rng, 6), "ensemble-true", layout)
    h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    assert np.allclose(mmse_refine(h, cov, 1e-10), h, atol=1e-8)


def test_mmse_filter_matches_refine():
    layout = JointLayout(q=1, s=1, n_rx=2, n_tx=2)
    rng = np.random.default_rng(4)
    cov = CovarianceModel(_random_pd(rng, 4), "ensemble-true", layout)
    h = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    noise = np.array([0.1, 0.2, 0.3, 0.4])
    expected = h @ mmse_filter(cov, noise).T
    assert np.allclose(mmse_refine(h, cov, noise), expected, atol=1e-10)


def test_mmse_raises_for_indefinite_system():
    layout = JointLayout(q=1, s=1, n_rx=1, n_tx=2)
    cov = CovarianceModel(-10 * np.eye(2, dtype=complex), "ensemble-true", layout)
    with pytest.raises(NumericalRankError):
        mmse_refine(np.ones(2, dtype=complex), cov, 1.0)


def test_ideal_mmse_beats_ls(small_cfg, tiny_profile):
    """
    Paired comparison on 500 realizations: ideal MMSE never exceeds LS NMSE (2% slack).
    """
    q = 2
    cov = ensemble_covariance(tiny_profile, small_cfg, q=q, s=1, n_mc=4000, seed=1)
    for snr_db in (0.0, 10.0, 20.0):
        power = 10 ** (snr_db / 10)
        pc = pilot_config(small_cfg, power=power)
        truths, ls = [], []
        for i in range(500):
            block = draw_channel_block(tiny_profile, small_cfg, q=q, n_intervals=1, seed=derive_seed(50, i))
            truths.append(JointLayout.for_system(small_cfg, q).stack(block.entries))
            ls.append(ls_estimate(_pilot_run(block, pc, derive_seed(51, i)), pc, small_cfg))
        truths, ls = np.array(truths), np.array(ls)
        refined = mmse_refine(ls, cov, 1 / power)
        assert _nmse(truths, refined) <= 1.02 * _nmse(truths, ls)


def test_flops():
    reference = SystemConfig()
    assert flops_mmse(2, 1, reference) == 8 * 32768 * 4096 == 1_073_741_824
    assert flops_mmse(2, 2, reference) == 8 * flops_mmse(2, 1, reference)
    unit = SystemConfig(n_tx=1, n_rx=1, n_tx_rf=1, n_rx_rf=1)
    assert flops_mmse(1, 1, unit) == 1
    assert flops_ls(2, reference) == 2 * 32**2 * 16**2
    assert flops_mmse_covariance(2, reference) == 4 * 32**2 * 16**2
    assert math.log10(flops_mmse(2, 1, reference)) == pytest.approx(9.03, abs=0.01)
