import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmstdp.traces import (
    ExpTrace,
    RateEstimator,
    StdpTraceSet,
    feedback_gate_update,
    rate_update,
    stdp_update,
)


def conv(signal, tau):
    """Direct summation of sum_{s<=t} exp(-(t-s)/tau) * signal[s] (independent of the recursion)."""
    signal = np.asarray(signal, dtype=float)
    out = np.zeros_like(signal)
    for t in range(len(signal)):
        lags = t - np.arange(t + 1)
        out[t] = np.sum(np.exp(-lags / tau)[..., None] * signal[: t + 1].reshape(t + 1, -1), axis=0).reshape(signal.shape[1:])
    return out


def test_rate_single_spike_then_decay():
    est = RateEstimator(1, tau_n=20.0)
    assert rate_update(est, [1.0])[0] == pytest.approx(0.05)
    assert rate_update(est, [0.0])[0] == pytest.approx(0.05 * math.exp(-1 / 20), abs=1e-15)
    assert rate_update.__name__  # keeps the module import honest
    est2 = RateEstimator(1)
    est2.rho[:] = 0.05
    assert rate_update(est2, [0.0])[0] == pytest.approx(0.047561, abs=5e-7)


def test_rate_stationary_mean_under_bernoulli():
    r = np.random.default_rng(7)
    p, tau = 0.1, 20.0
    est = RateEstimator(1, tau_n=tau)
    spikes = r.random(100_000) < p
    acc = 0.0
    for s in spikes:
        acc += rate_update(est, [float(s)])[0]
    mean = acc / spikes.size
    want = p * (1 / tau) / (1 - math.exp(-1 / tau))  # ~0.10252
    assert want == pytest.approx(0.102521, abs=1e-6)
    assert abs(mean - want) <= 0.02 * want


@pytest.mark.parametrize("tau", [20.0, 40.0])
def test_exptrace_equals_direct_convolution(tau):
    r = np.random.default_rng(int(tau))
    x = (r.random(1000) < 0.3).astype(float)
    tr = ExpTrace((), tau)
    rec = np.array([float(tr.step(v)) for v in x])
    ref = conv(x, tau)
    assert np.max(np.abs(rec - ref)) <= 1e-9 * np.max(np.abs(ref))


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=60),
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
)
def test_exptrace_is_linear(sig, a, b):
    s1 = np.array(sig)
    s2 = np.cos(np.arange(len(sig)))
    def run(x):
        tr = ExpTrace((), 20.0)
        return np.array([float(tr.step(v)) for v in x])
    lhs = run(a * s1 + b * s2)
    rhs = a * run(s1) + b * run(s2)
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


def test_no_spikes_means_pure_decay():
    t = StdpTraceSet(3, 2)
    t.p_pre[:] = 1.0
    t.p_post[:] = 2.0
    t.z[:] = 3.0
    t.q[:] = 4.0
    d_p, d_z, d_q = t.decays
    stdp_update(t, np.zeros(3), np.zeros(2))
    feedback_gate_update(t, np.zeros(2))
    assert np.allclose(t.p_pre, d_p)
    assert np.allclose(t.p_post, 2 * d_p)
    assert np.allclose(t.z, 3 * d_z)
    assert np.allclose(t.q, 4 * d_q)


def test_pre_then_post_potentiates():
    t = StdpTraceSet(1, 1, a_plus=1.0, a_minus=0.0, tau_p=20.0, tau_z=20.0)
    stdp_update(t, [1.0], [0.0])
    assert t.z[0, 0] == 0.0
    stdp_update(t, [0.0], [1.0])
    assert t.z[0, 0] == pytest.approx(math.exp(-1 / 20), abs=1e-12)
    assert t.z[0, 0] == pytest.approx(0.951229, abs=1e-6)


def test_post_then_pre_without_ltd_leaves_z_zero():
    t = StdpTraceSet(1, 1, a_plus=1.0, a_minus=0.0)
    stdp_update(t, [0.0], [1.0])
    stdp_update(t, [1.0], [0.0])
    assert t.z[0, 0] == 0.0


def test_ltd_side_depresses():
    t = StdpTraceSet(1, 1, a_plus=1.0, a_minus=0.5)
    stdp_update(t, [0.0], [1.0])
    stdp_update(t, [1.0], [0.0])
    assert t.z[0, 0] == pytest.approx(-0.5 * math.exp(-1 / 20))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_z_nonnegative_without_ltd(seed):
    r = np.random.default_rng(seed)
    t = StdpTraceSet(4, 3)
    for _ in range(100):
        stdp_update(t, r.random(4) < 0.3, r.random(3) < 0.3)
        assert np.all(t.z >= 0)


def test_q_single_increment():
    t = StdpTraceSet(1, 1, tau_q=40.0)
    t.z[:] = 1.0
    feedback_gate_update(t, [0.5])
    assert t.q[0, 0] == 0.5


def test_q_equals_nested_convolution():
    r = np.random.default_rng(99)
    n = 1000
    t = StdpTraceSet(2, 3, tau_q=40.0)
    pre = (r.random((n, 2)) < 0.3).astype(float)
    post = (r.random((n, 3)) < 0.2).astype(float)
    fb = r.uniform(-1, 1, size=(n, 3))
    q_rec, z_rec = [], []
    for k in range(n):
        z_rec.append(stdp_update(t, pre[k], post[k]).copy())
        q_rec.append(feedback_gate_update(t, fb[k]).copy())
    q_rec = np.array(q_rec)
    # oracle: z from convolutions of the raw spikes, then q as a convolution of fb*z
    p_pre = conv(pre, 20.0)
    z_ref = conv(p_pre[:, :, None] * post[:, None, :], 20.0)
    q_ref = conv(fb[:, None, :] * z_ref, 40.0)
    assert np.max(np.abs(np.array(z_rec) - z_ref)) <= 1e-9 * np.max(np.abs(z_ref))
    assert np.max(np.abs(q_rec - q_ref)) <= 1e-9 * np.max(np.abs(q_ref))


def test_reset_zeroes_everything():
    t = StdpTraceSet(2, 2)
    stdp_update(t, [1, 1], [1, 1])
    feedback_gate_update(t, [1, -1])
    t.reset()
    assert not t.z.any() and not t.q.any() and not t.p_pre.any() and not t.p_post.any()
