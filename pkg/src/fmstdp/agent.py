"""Spiking actor-critic agent: two LIF networks fed by the same input spikes."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import actor as act
from . import critic as crit
from .config import RunConfig
from .encoding import SpikeCoder
from .errors import ConfigError, SimulationFault
from .optim import AdamState, BatchAccumulator, adam_step, apply_plain, batch_commit
from .snn import LifPopulation, forward, init_weights, reset
from .traces import (
    RateEstimator,
    StdpTraceSet,
    decay_factor,
    feedback_gate_update,
    rate_update,
    stdp_update,
)


class Agent:
    """Holds both networks, their traces and the policy state.

    ``engine="fast"`` runs each env step through the compiled kernel;
    ``engine="reference"`` steps the numpy module functions millisecond by
    millisecond. Both consume random numbers identically.
    """

    def __init__(self, cfg: RunConfig, n_features: int, n_actions: int, rng, engine="fast"):
        if cfg.actor.k != n_actions:
            raise ConfigError(f"profile has K={cfg.actor.k} but environment has {n_actions} actions")
        if engine not in ("fast", "reference"):
            raise ConfigError(f"unknown engine {engine!r}")
        self.cfg = cfg
        self.engine = engine
        self.coder = SpikeCoder(cfg.neurons_per_feature)
        self.n_inputs = self.coder.n_inputs(n_features)
        lif = cfg.neuron
        cc, ac = cfg.critic, cfg.actor
        cp, ap = cfg.critic_plasticity, cfg.actor_plasticity

        self.w_critic = init_weights(self.n_inputs, cc.n, cfg.critic_w0, rng)
        self.w_actor = init_weights(self.n_inputs, ac.n, cfg.actor_w0, rng)
        self.critic_pop = LifPopulation(lif, cc.n)
        self.actor_pop = LifPopulation(lif, ac.n)
        self.critic_rates = RateEstimator(cc.n, cp.tau_n, lif.dt)
        self.actor_rates = RateEstimator(ac.n, ap.tau_n, lif.dt)
        self.critic_traces = StdpTraceSet(
            self.n_inputs, cc.n, cp.a_plus, cp.a_minus, cp.tau_p, cp.tau_z, 1.0, lif.dt
        )
        self.actor_traces = StdpTraceSet(
            self.n_inputs, ac.n, ap.a_plus, ap.a_minus, ap.tau_p, ap.tau_z, ac.tau_q, lif.dt
        )
        self.policy = act.PolicyState(ac.k, ac.resample_every)
        self.critic_signs = cc.signs
        self.actor_signs = ac.signs
        self.action_of_column = ac.action_of_column
        self.live_policy = cfg.feedback_mode == "live"
        self.v_prev = 0.0
        self.spike_counts = np.zeros(2)
        self.learn_ms = 0

        self.adam = cfg.optim.kind == "adam"
        if self.adam:
            o = cfg.optim
            self.critic_adam = AdamState(self.w_critic.shape, cc.eta, o.beta1, o.beta2, o.epsilon)
            self.actor_adam = AdamState(self.w_actor.shape, ac.eta, o.beta1, o.beta2, o.epsilon)
            self.critic_batch = BatchAccumulator(self.w_critic.shape, o.batch_size)
            self.actor_batch = BatchAccumulator(self.w_actor.shape, o.batch_size)
            self.critic_pending = np.zeros(self.w_critic.shape)
            self.actor_pending = np.zeros(self.w_actor.shape)
        # In Adam mode the per-ms updates accumulate without the learning rate.
        self._critic_eta = 1.0 if self.adam else cc.eta
        self._actor_cfg = replace(ac, eta=1.0) if self.adam else ac
        self._build_kernel_params()

    def _build_kernel_params(self):
        cfg = self.cfg
        lif = cfg.neuron
        cp, ap, ac = cfg.critic_plasticity, cfg.actor_plasticity, self._actor_cfg
        self._lif = np.array([lif.e_rest, lif.v_thresh, lif.decay, lif.gain, lif.dt])
        self._par_c = np.array(
            [
                decay_factor(cp.tau_n, lif.dt),
                1.0 / cp.tau_n,
                decay_factor(cp.tau_p, lif.dt),
                decay_factor(cp.tau_z, lif.dt),
                cp.a_plus,
                cp.a_minus,
                self._critic_eta,
            ]
        )
        self._par_a = np.array(
            [
                decay_factor(ap.tau_n, lif.dt),
                1.0 / ap.tau_n,
                decay_factor(ap.tau_p, lif.dt),
                decay_factor(ap.tau_z, lif.dt),
                ap.a_plus,
                ap.a_minus,
                ac.eta,
                decay_factor(ac.tau_q, lif.dt),
                ac.c_e,
                ac.c_w,
                ac.c_t,
                ac.rho_target,
            ]
        )
        cc = cfg.critic
        self._readout = np.array(
            [
                cc.alpha,
                cc.beta,
                cc.n_e,
                cc.n_i,
                decay_factor(cfg.protocol.tau_gamma, lif.dt),
                decay_factor(2.0 * cfg.protocol.tau_gamma, lif.dt),
                ac.k * ac.n_e,
            ]
        )

    # -- readouts -----------------------------------------------------------

    def value(self) -> float:
        cc = self.cfg.critic
        rho = self.critic_rates.rho
        return crit.value(rho[: cc.n_e], rho[cc.n_e :], cc)

    def action_probs(self) -> np.ndarray:
        e, i = act.mean_rates_by_action(self.actor_rates.rho, self.cfg.actor)
        return act.action_probs(e, i, self.cfg.actor)

    # -- episode lifecycle --------------------------------------------------

    def reset_episode(self) -> None:
        for pop in (self.critic_pop, self.actor_pop):
            reset(pop)
        self.critic_rates.reset()
        self.actor_rates.reset()
        self.critic_traces.reset()
        self.actor_traces.reset()
        self.policy.reset()
        self.v_prev = 0.0
        self.spike_counts[:] = 0.0
        self.learn_ms = 0
        if self.adam:
            self.critic_pending[:] = 0.0
            self.actor_pending[:] = 0.0

    def warmup(self, features, rng, ms: int) -> None:
        """Present ``features`` for ``ms`` steps with dynamics only; no traces, TD or updates."""
        self._simulate(features, rng, ms, learn=False)
        self.v_prev = self.value()

    def select_action(self, rng) -> int:
        return act.sample_or_hold(self.policy, self.action_probs(), rng)

    def run_env_step(self, features, rewards, terminal, rng) -> None:
        """Simulate one env step's milliseconds with learning enabled."""
        self._simulate(features, rng, len(rewards), True, rewards, terminal)

    def end_episode(self) -> None:
        if not self.adam:
            return
        for batch, st, w, pending in (
            (self.critic_batch, self.critic_adam, self.w_critic, self.critic_pending),
            (self.actor_batch, self.actor_adam, self.w_actor, self.actor_pending),
        ):
            flushed = batch_commit(batch, pending)
            if flushed is not None:
                apply_plain(w, adam_step(st, flushed))

    def mean_rates_hz(self) -> tuple[float, float]:
        """Mean (actor, critic) firing rate in Hz over the learning milliseconds of the episode."""
        if self.learn_ms == 0:
            return 0.0, 0.0
        per_ms = 1000.0 / self.cfg.neuron.dt
        critic = self.spike_counts[0] / (self.critic_pop.n * self.learn_ms) * per_ms
        actor = self.spike_counts[1] / (self.actor_pop.n * self.learn_ms) * per_ms
        return float(actor), float(critic)

    # -- simulation ---------------------------------------------------------

    def _targets(self):
        if self.adam:
            return self.critic_pending, self.actor_pending
        return self.w_critic, self.w_actor

    def _feedback_columns(self):
        s = self.action_probs() if self.live_policy else self.policy.s
        fb = act.feedback_signal(self.policy.held_action, s)[self.action_of_column]
        gate = act.entropy_gate(s)[self.action_of_column]
        return fb, gate

    def _simulate(self, features, rng, ms, learn, rewards=None, terminal=None):
        probs = self.coder.probabilities(features)
        if rewards is None:
            rewards = np.zeros(ms)
            terminal = np.zeros(ms, dtype=bool)
        if learn:
            self.learn_ms += ms
        if self.engine == "reference":
            for t in range(ms):
                x = (rng.random(probs.shape[0]) < probs).astype(np.float64)
                self.step_ms(x, learn, rewards[t], bool(terminal[t]))
            return

        from .kernel import run_block

        u = rng.random((ms, probs.shape[0]))
        fb, gate = self._feedback_columns()
        target_c, target_a = self._targets()
        state = np.array([self.v_prev])
        if learn:
            # counts in the kernel only cover learning ms; warm-up spikes are not logged
            counts = self.spike_counts
        else:
            counts = np.zeros(2)
        ct, at = self.critic_traces, self.actor_traces
        cpop, apop = self.critic_pop, self.actor_pop
        run_block(
            u,
            probs,
            learn,
            self.cfg.ablate_feedback,
            self._lif,
            self.w_critic,
            cpop.u,
            self.critic_rates.rho,
            ct.p_pre,
            ct.p_post,
            ct.z,
            target_c,
            self.critic_signs,
            self._par_c,
            self.w_actor,
            apop.u,
            self.actor_rates.rho,
            at.p_pre,
            at.p_post,
            at.z,
            at.q,
            target_a,
            self.actor_signs,
            self._par_a,
            fb,
            gate,
            self.action_of_column,
            self.policy.held_action,
            self.live_policy,
            self.cfg.actor.alpha,
            self._readout,
            np.asarray(rewards, dtype=np.float64),
            np.asarray(terminal, dtype=np.bool_),
            state,
            counts,
        )
        self.v_prev = float(state[0])
        if learn:
            _check(self.w_critic, "critic")
            _check(self.w_actor, "actor")

    def step_ms(self, x, learn: bool, reward_per_ms: float = 0.0, terminal: bool = False) -> float:
        """One millisecond through the module functions; returns the TD error (0 when not learning)."""
        cfg = self.cfg
        f_c = forward(self.critic_pop, self.w_critic, x)
        f_a = forward(self.actor_pop, self.w_actor, x)
        rate_update(self.critic_rates, f_c)
        rate_update(self.actor_rates, f_a)
        if learn:
            self.spike_counts[0] += f_c.sum()
            self.spike_counts[1] += f_a.sum()
        if not learn:
            return 0.0

        v_now = self.value()
        delta = crit.td_error(
            self.v_prev, v_now, reward_per_ms, cfg.neuron.dt, cfg.protocol.tau_gamma, terminal
        )
        self.v_prev = v_now

        target_c, target_a = self._targets()
        z_c = stdp_update(self.critic_traces, x, f_c)
        target_c += crit.critic_delta_w(delta, z_c, self.critic_signs, self._critic_eta)

        rates_e, _ = act.mean_rates_by_action(self.actor_rates.rho, cfg.actor)
        rates_mean = float(rates_e.mean())
        fb, gate = self._feedback_columns()
        z_a = stdp_update(self.actor_traces, x, f_a)
        q_a = feedback_gate_update(self.actor_traces, fb)
        elig = z_a if cfg.ablate_feedback else q_a
        target_a += act.actor_delta_w(
            delta, elig, z_a, self.w_actor, rates_mean, gate, self._actor_cfg, self.actor_signs
        )
        _check(self.w_critic, "critic")
        _check(self.w_actor, "actor")
        return delta


def _check(w: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(w)):
        raise SimulationFault(f"non-finite {name} weights")
