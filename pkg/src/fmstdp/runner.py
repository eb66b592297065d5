"""Episode loop: warm-up, env stepping, reward spreading, terminal handling."""

from __future__ import annotations

import logging
import time

import numpy as np

from . import envs
from .agent import Agent
from .config import EpisodeProtocol, RunConfig
from .errors import SimulationFault
from .metrics import EpisodeLog, RunSummary, compute_metrics

log = logging.getLogger(__name__)


class RunStreams:
    """Independent generators for weights, env resets, input spikes and action draws."""

    def __init__(self, seed: int):
        ss = np.random.SeedSequence(seed)
        init, env, spikes, policy = ss.spawn(4)
        self.init = np.random.default_rng(init)
        self.env = np.random.default_rng(env)
        self.spikes = np.random.default_rng(spikes)
        self.policy = np.random.default_rng(policy)


def step_rewards(raw_reward: float, done: bool, protocol: EpisodeProtocol):
    """Per-ms rewards and zero-target flags for one env step."""
    n = protocol.snn_ms_per_env_step
    rewards = np.full(n, raw_reward * protocol.reward_scale / n)
    terminal = np.zeros(n, dtype=bool)
    if done:
        terminal[n - protocol.terminal_zero_ms :] = True
    return rewards, terminal


def run_env_step(env, action: int, protocol: EpisodeProtocol):
    """Advance the environment once; returns (per-ms rewards, next features, done, terminal flags)."""
    features, raw, done = env.step(action)
    zero_target = done and (protocol.zero_target_at_cap or getattr(env, "failed", True))
    rewards, terminal = step_rewards(raw, zero_target, protocol)
    return rewards, features, done, terminal


def warmup(agent: Agent, initial_features, rng, protocol: EpisodeProtocol) -> None:
    agent.warmup(initial_features, rng, protocol.warmup_ms)


def run_episode(agent: Agent, env, streams: RunStreams, protocol: EpisodeProtocol):
    features = env.reset(streams.env)
    agent.reset_episode()
    warmup(agent, features, streams.spikes, protocol)
    ret = 0.0
    done = False
    while not done:
        action = agent.select_action(streams.policy)
        rewards, features, done, terminal = run_env_step(env, action, protocol)
        agent.run_env_step(features, rewards, terminal, streams.spikes)
        ret += float(rewards.sum())
    agent.end_episode()
    return env.steps, ret


def train(cfg: RunConfig, engine: str = "fast", progress: bool = False) -> RunSummary:
    env = envs.make(cfg.env)
    streams = RunStreams(cfg.seed)
    agent = Agent(cfg, env.feature_dim, env.n_actions, streams.init, engine=engine)
    rows: list[EpisodeLog] = []
    started = time.perf_counter()
    for ep in range(1, cfg.episodes + 1):
        try:
            steps, ret = run_episode(agent, env, streams, cfg.protocol)
        except SimulationFault as exc:
            _dump_state(agent, ep)
            raise SimulationFault(f"episode {ep}: {exc}") from exc
        actor_hz, critic_hz = agent.mean_rates_hz()
        rows.append(EpisodeLog(ep, int(steps), ret, actor_hz, critic_hz))
        if progress:
            log.info(
                "seed %d ep %d steps %d actor %.1f Hz critic %.1f Hz (%.0fs)",
                cfg.seed, ep, steps, actor_hz, critic_hz, time.perf_counter() - started,
            )
    summary = compute_metrics([r.steps for r in rows], perfect=env.max_steps)
    summary.log = rows
    return summary


def _dump_state(agent: Agent, episode: int) -> None:
    log.error(
        "episode %d state: critic w [%g, %g], actor w [%g, %g], v_prev %r",
        episode,
        np.nanmin(agent.w_critic), np.nanmax(agent.w_critic),
        np.nanmin(agent.w_actor), np.nanmax(agent.w_actor),
        agent.v_prev,
    )
