import numpy as np
import pytest

from chanmodel.system_config import SystemConfig
from neuralest.ceu import CeuCache, sftcnn_run_sequence, sprcnn_run_ceu
from neuralest.network import stack_inputs
from pilotfront.front_end import received_pilots, tentative_estimate
from pilotfront.pilot_config import pilot_config, spr_schedule, uniform_schedule
from utils.errors import ProtocolError


@pytest.fixture
def cfg():
    return SystemConfig(n_tx=8, n_rx=4, n_tx_rf=2, n_rx_rf=2, n_subcarriers=16)


def _channels(seed, q=1):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((q, 4, 8)) + 1j * rng.standard_normal((q, 4, 8))


def _ceu_pilots(schedule, seed):
    return [received_pilots(_channels(seed + d), pc, seed=seed + d) for d, pc in enumerate(schedule.per_interval)]


@pytest.fixture
def spr_nets(make_net):
    return [make_net("spr", q=1, s_or_d=d, seed=d) for d in range(1, 5)]


@pytest.fixture
def schedule(cfg):
    return spr_schedule(cfg, power=10.0, ceu_length=4, reduced_m_tx=4, reduced_m_rx=2)


def test_input_arity_grows_through_the_ceu(cfg, spr_nets, schedule):
    cache = CeuCache(capacity=3)
    result = sprcnn_run_ceu(spr_nets, _ceu_pilots(schedule, 0), schedule, cache, cfg)
    assert result.input_matrices == [1, 2, 3, 4]
    assert [est.shape for est in result.estimates] == [(1, 4, 8)] * 4
    assert cache.depth == 0


def test_reference_arity_with_two_subcarriers(cfg, make_net):
    nets = [make_net("spr", q=2, s_or_d=d) for d in range(1, 5)]
    schedule = spr_schedule(cfg, power=1.0, ceu_length=4, reduced_m_tx=4, reduced_m_rx=2)
    pilots = [received_pilots(_channels(d, q=2), pc, seed=d) for d, pc in enumerate(schedule.per_interval)]
    result = sprcnn_run_ceu(nets, pilots, schedule, CeuCache(capacity=3), cfg)
    assert result.input_matrices == [2, 4, 6, 8]


def test_consecutive_ceus_do_not_leak_state(cfg, spr_nets, schedule):
    cache = CeuCache(capacity=3)
    first = sprcnn_run_ceu(spr_nets, _ceu_pilots(schedule, 3), schedule, cache, cfg)
    second = sprcnn_run_ceu(spr_nets, _ceu_pilots(schedule, 3), schedule, cache, cfg)
    for a, b in zip(first.estimates, second.estimates):
        assert np.array_equal(a, b)


def test_last_interval_sees_all_cached_stacks(cfg, spr_nets, schedule):
    pilots = _ceu_pilots(schedule, 5)
    result = sprcnn_run_ceu(spr_nets, pilots, schedule, CeuCache(capacity=3), cfg)
    stacks = [tentative_estimate(y, pc, cfg) for y, pc in zip(pilots, schedule.per_interval)]
    expected = spr_nets[3].estimate(stack_inputs(np.concatenate(stacks, axis=-3)))
    assert np.array_equal(result.estimates[3], expected)


def test_dirty_cache_is_a_protocol_error(cfg, spr_nets, schedule):
    cache = CeuCache(capacity=3)
    cache.push(np.zeros((1, 4, 8), dtype=complex))
    with pytest.raises(ProtocolError):
        sprcnn_run_ceu(spr_nets, _ceu_pilots(schedule, 0), schedule, cache, cfg)


def test_network_order_mismatch_is_a_protocol_error(cfg, spr_nets, schedule):
    with pytest.raises(ProtocolError):
        sprcnn_run_ceu(spr_nets[::-1], _ceu_pilots(schedule, 0), schedule, CeuCache(capacity=3), cfg)


def test_reduced_first_interval_is_a_protocol_error(cfg, spr_nets):
    reduced = uniform_schedule(pilot_config(cfg, 1.0, m_tx=4, m_rx=2), 4)
    with pytest.raises(ProtocolError):
        sprcnn_run_ceu(spr_nets, _ceu_pilots(reduced, 0), reduced, CeuCache(capacity=3), cfg)


def test_pilot_shape_must_follow_schedule(cfg, spr_nets, schedule):
    pilots = _ceu_pilots(schedule, 0)
    pilots[2] = pilots[0]
    with pytest.raises(ProtocolError):
        sprcnn_run_ceu(spr_nets, pilots, schedule, CeuCache(capacity=3), cfg)


def test_failed_ceu_leaves_the_cache_empty(cfg, spr_nets, schedule):
    cache = CeuCache(capacity=3)
    pilots = _ceu_pilots(schedule, 0)
    pilots[2] = pilots[0]
    with pytest.raises(ProtocolError):
        sprcnn_run_ceu(spr_nets, pilots, schedule, cache, cfg)
    assert cache.depth == 0

    result = sprcnn_run_ceu(spr_nets, _ceu_pilots(schedule, 0), schedule, cache, cfg)
    assert result.input_matrices == [1, 2, 3, 4]


def test_cache_capacity_is_enforced():
    cache = CeuCache(capacity=1)
    cache.push(np.zeros(1))
    with pytest.raises(ProtocolError):
        cache.push(np.zeros(1))


def test_sft_sequence_uses_previous_interval(cfg, make_net):
    net = make_net("sft", q=1, s_or_d=2)
    pc = pilot_config(cfg, power=10.0)
    pilots = [received_pilots(_channels(n), pc, seed=n) for n in range(3)]
    estimates = sftcnn_run_sequence(net, pilots, pc, cfg)
    te = [tentative_estimate(y, pc, cfg) for y in pilots]
    first = net.estimate(stack_inputs(np.concatenate([te[0], te[0]], axis=-3)))
    third = net.estimate(stack_inputs(np.concatenate([te[1], te[2]], axis=-3)))
    assert len(estimates) == 3
    assert np.array_equal(estimates[0], first)
    assert np.array_equal(estimates[2], third)
