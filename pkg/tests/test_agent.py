import dataclasses

import numpy as np
import pytest

from fmstdp import envs
from fmstdp.agent import Agent
from fmstdp.config import load_profile
from fmstdp.runner import RunStreams, run_episode


def default_cfg(**kw):
    return load_profile("cartpole-default").with_(**kw)


def make_agent(cfg, seed=0, engine="fast"):
    env = envs.make("cartpole")
    streams = RunStreams(seed)
    return Agent(cfg, env.feature_dim, env.n_actions, streams.init, engine=engine), env, streams


def variants():
    base = default_cfg()
    yield "default", base
    yield "ablated", base.with_(ablate_feedback=True)
    yield "live-feedback", base.with_(feedback_mode="live")
    yield "regularized-inhibitory", base.with_(
        actor=dataclasses.replace(base.actor, n_i=5, c_e=1e-3, c_w=1e-4, c_t=1e-2, rho_target=0.05, resample_every=2),
        critic=dataclasses.replace(base.critic, n_i=10),
        actor_plasticity=dataclasses.replace(base.actor_plasticity, a_minus=0.3),
    )
    yield "adam-batched", base.with_(
        optim=dataclasses.replace(base.optim, kind="adam", beta1=0.995, beta2=0.99995, batch_size=2),
    )


@pytest.mark.parametrize("name,cfg", list(variants()), ids=[n for n, _ in variants()])
def test_compiled_loop_matches_reference(name, cfg):
    out = {}
    for engine in ("fast", "reference"):
        agent, env, streams = make_agent(cfg, seed=11, engine=engine)
        steps = [run_episode(agent, env, streams, cfg.protocol)[0] for _ in range(4)]
        out[engine] = (steps, agent.w_critic.copy(), agent.w_actor.copy(), agent.v_prev)
    fast, ref = out["fast"], out["reference"]
    assert fast[0] == ref[0]
    assert np.max(np.abs(fast[1] - ref[1])) <= 1e-10
    assert np.max(np.abs(fast[2] - ref[2])) <= 1e-10
    assert fast[3] == pytest.approx(ref[3], abs=1e-12)


def test_warmup_charges_rates_without_learning():
    agent, env, streams = make_agent(default_cfg())
    features = env.reset(streams.env)
    state_before = env.state
    agent.reset_episode()
    wc, wa = agent.w_critic.copy(), agent.w_actor.copy()
    agent.warmup(features, streams.spikes, 100)
    assert np.array_equal(wc, agent.w_critic) and np.array_equal(wa, agent.w_actor)
    assert not agent.critic_traces.z.any() and not agent.actor_traces.q.any()
    assert agent.critic_rates.rho.max() > 0 and agent.actor_rates.rho.max() > 0
    assert env.state == state_before
    assert agent.v_prev == agent.value()


def test_reset_episode_clears_state():
    cfg = default_cfg()
    agent, env, streams = make_agent(cfg)
    run_episode(agent, env, streams, cfg.protocol)
    agent.reset_episode()
    assert not agent.critic_pop.u.any() and not agent.actor_rates.rho.any()
    assert not agent.actor_traces.z.any() and agent.v_prev == 0.0


def test_ablation_swaps_q_for_z_and_nothing_else():
    cfg = default_cfg()
    a, _, _ = make_agent(cfg, engine="reference")
    b, _, _ = make_agent(cfg.with_(ablate_feedback=True), engine="reference")
    rng = np.random.default_rng(4)
    a.policy.held_action = b.policy.held_action = 1
    a.policy.s = b.policy.s = np.array([0.3, 0.7])
    signs, eta = b.actor_signs, b.cfg.actor.eta
    for t in range(60):
        x = (rng.random(a.n_inputs) < 0.5).astype(float)
        wb = b.w_actor.copy()
        da = a.step_ms(x, True, 0.001)
        db = b.step_ms(x, True, 0.001)
        # the critic never sees the actor, so it is unaffected by the flag
        assert da == db
        assert np.array_equal(a.w_critic, b.w_critic)
        assert np.allclose(b.w_actor - wb, signs * eta * db * b.actor_traces.z, rtol=1e-12, atol=1e-15)


def test_rates_are_reported_in_hz():
    cfg = default_cfg()
    agent, env, streams = make_agent(cfg)
    run_episode(agent, env, streams, cfg.protocol)
    actor_hz, critic_hz = agent.mean_rates_hz()
    assert 10 < actor_hz < 1000 and 10 < critic_hz < 1000


@pytest.mark.parametrize("profile", ["cartpole-default", "cartpole-bio"])
def test_initial_rates_in_moderate_band(profile):
    """Fresh networks fire at roughly 10-100 Hz on typical CartPole states."""
    cfg = load_profile(profile)
    rates = []
    for seed in range(4):
        agent, env, streams = make_agent(cfg, seed=seed)
        features = env.reset(streams.env)
        agent.reset_episode()
        agent.warmup(features, streams.spikes, cfg.protocol.warmup_ms)
        agent.run_env_step(features, np.zeros(400), np.zeros(400, dtype=bool), streams.spikes)
        rates.append(agent.mean_rates_hz())
    actor_hz, critic_hz = np.mean(rates, axis=0)
    assert 10.0 <= actor_hz <= 100.0
    assert 10.0 <= critic_hz <= 100.0
