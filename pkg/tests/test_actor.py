import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmstdp import actor as act
from fmstdp.actor import ActorConfig, PolicyState
from fmstdp.errors import ConfigError


def entropy(drive):
    s = act.softmax(drive)
    return -np.sum(s * np.log(s))


def fd_entropy_grad(rho, alpha, h=1e-6):
    g = np.zeros_like(rho)
    for k in range(rho.size):
        up, dn = rho.copy(), rho.copy()
        up[k] += h
        dn[k] -= h
        g[k] = (entropy(alpha * up) - entropy(alpha * dn)) / (2 * h)
    return g


def test_equal_rates_uniform():
    s = act.action_probs([0.2, 0.2, 0.2], [0, 0, 0], ActorConfig(k=3))
    assert np.allclose(s, 1 / 3)


def test_known_softmax_value():
    s = act.action_probs([0.10, 0.08], [0.0, 0.0], ActorConfig(alpha=25))
    e = np.exp([2.5, 2.0])
    assert np.allclose(s, e / e.sum(), atol=1e-15)
    assert s[0] == pytest.approx(0.6225, abs=5e-5)


def test_zero_temperature_is_uniform():
    s = act.action_probs([0.9, 0.0, 0.3], [0, 0, 0], ActorConfig(k=3, alpha=0.0))
    assert np.allclose(s, 1 / 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=6), st.floats(-100, 100))
def test_softmax_shift_invariance(x, c):
    x = np.array(x)
    assert np.max(np.abs(act.softmax(x) - act.softmax(x + c))) <= 1e-12


def test_softmax_extreme_drive_stays_finite():
    s = act.softmax([1e4, -1e4])
    assert np.isfinite(s).all() and s[0] == 1.0


def test_inhibitory_rates_subtract():
    cfg = ActorConfig(k=2, n_e=2, n_i=1, alpha=10)
    rho = np.array([0.2, 0.2, 0.1, 0.1, 0.2, 0.0])  # exc a0, exc a1, inh a0, inh a1
    re, ri = act.mean_rates_by_action(rho, cfg)
    assert np.allclose(re, [0.2, 0.1]) and np.allclose(ri, [0.2, 0.0])
    s = act.action_probs(re, ri, cfg)
    assert s[1] > s[0]


def test_column_layout():
    cfg = ActorConfig(k=3, n_e=2, n_i=1)
    assert cfg.action_of_column.tolist() == [0, 0, 1, 1, 2, 2, 0, 1, 2]
    assert cfg.signs.tolist() == [1] * 6 + [-1] * 3


def test_resample_every_step():
    st_ = PolicyState(2, resample_every=1)
    rng = np.random.default_rng(0)
    draws = [act.sample_or_hold(st_, [0.5, 0.5], rng) for _ in range(200)]
    assert st_.steps_since_resample == 1
    assert 0 < sum(draws) < 200


def test_hold_between_draws():
    st_ = PolicyState(2, resample_every=2)
    rng = np.random.default_rng(1)
    a = act.sample_or_hold(st_, [0.0, 1.0], rng)
    assert a == 1 and st_.steps_since_resample == 1
    # next call holds even though the distribution now favours action 0
    assert act.sample_or_hold(st_, [1.0, 0.0], rng) == 1
    assert st_.s.tolist() == [0.0, 1.0]
    assert act.sample_or_hold(st_, [1.0, 0.0], rng) == 0


def test_degenerate_distribution_is_certain():
    rng = np.random.default_rng(2)
    st_ = PolicyState(3)
    assert all(act.sample_or_hold(st_, [1.0, 0.0, 0.0], rng) == 0 for _ in range(100))
    assert act.draw_action([0.2, 0.8], 0.0) == 0
    assert act.draw_action([0.2, 0.8], 0.999999) == 1


def test_draw_frequencies(rng):
    s = np.array([0.1, 0.6, 0.3])
    counts = np.bincount([act.draw_action(s, rng.random()) for _ in range(20000)], minlength=3)
    assert np.allclose(counts / counts.sum(), s, atol=0.015)


def test_feedback_signal():
    assert act.feedback_signal(0, [0.5, 0.5]).tolist() == [0.5, -0.5]
    assert act.feedback_signal(2, [0.25] * 4).tolist() == [-0.25, -0.25, 0.75, -0.25]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=6), st.data())
def test_feedback_sums_to_zero(raw, data):
    s = np.array(raw) / np.sum(raw)
    a = data.draw(st.integers(0, len(raw) - 1))
    assert abs(act.feedback_signal(a, s).sum()) <= 1e-12


def test_entropy_gate_uniform_is_zero():
    assert np.allclose(act.entropy_gate([0.25] * 4), 0.0, atol=1e-15)


def test_entropy_gate_two_actions():
    g = act.entropy_gate([0.9, 0.1])
    # frozen from the finite-difference oracle (alpha = 1)
    rho = np.log([0.9, 0.1])
    assert np.allclose(g, fd_entropy_grad(rho, 1.0), atol=1e-8)
    assert g[0] == pytest.approx(-0.1977502, abs=1e-7)
    assert g[1] == pytest.approx(0.1977502, abs=1e-7)


@pytest.mark.parametrize("alpha", [2.0, 15.0, 25.0])
def test_entropy_gate_matches_finite_difference(alpha):
    r = np.random.default_rng(int(alpha))
    for _ in range(20):
        k = int(r.integers(2, 6))
        rho = r.uniform(0, 0.3, size=k)
        s = act.softmax(alpha * rho)
        fd = fd_entropy_grad(rho, alpha)
        assert np.max(np.abs(alpha * act.entropy_gate(s) - fd)) <= 1e-6


def test_actor_update_plain_td_term():
    cfg = ActorConfig()
    one = np.ones((1, 1))
    assert act.actor_delta_w(0.2, 0.3 * one, one, one, 0.0, 0.0, cfg, 1.0)[0, 0] == pytest.approx(6e-4)
    assert not act.actor_delta_w(0.0, one, one, one, 0.1, 0.0, cfg, 1.0).any()


def test_actor_update_weight_decay_only():
    cfg = ActorConfig(c_w=1e-8)
    w = np.full((1, 1), 2.0)
    dw = act.actor_delta_w(0.0, np.zeros((1, 1)), np.zeros((1, 1)), w, 0.0, 0.0, cfg, 1.0)
    assert dw[0, 0] == pytest.approx(-cfg.eta * 1e-8)


def test_actor_update_entropy_and_target_terms():
    cfg = ActorConfig(c_e=1e-4, c_t=5e-6, rho_target=5e-3, eta=1.0)
    z = np.full((1, 2), 3.0)
    gate = np.array([0.2, -0.2])
    dw = act.actor_delta_w(0.0, np.zeros_like(z), z, np.zeros_like(z), 0.015, gate, cfg, np.array([1.0, -1.0]))
    want = np.array([1e-4 * 0.2 * 3, -1e-4 * -0.2 * 3]) - 5e-6 * (0.015 - 5e-3) * 3
    assert np.allclose(dw[0], want, rtol=1e-12)


def test_ablated_update_ignores_which_action_was_taken():
    # with q replaced by z, both actions' populations get the same update for the same spike history
    cfg = ActorConfig(k=2, n_e=1)
    z = np.full((3, 2), 0.7)
    dw = act.actor_delta_w(0.4, z, z, np.zeros_like(z), 0.0, 0.0, cfg, cfg.signs)
    assert np.array_equal(dw[:, 0], dw[:, 1])


def test_invalid_config():
    with pytest.raises(ConfigError):
        ActorConfig(k=1)
    with pytest.raises(ConfigError):
        ActorConfig(resample_every=0)
    with pytest.raises(ConfigError):
        ActorConfig(c_e=-1)
