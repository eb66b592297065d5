"""Exponential low-pass filters: firing rates, STDP traces, eligibility traces.

All filters use the exact one-step recursion ``x <- exp(-dt/tau) * x + input``,
which is the discrete convolution of the input with ``k_tau(t) = exp(-t/tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def decay_factor(tau: float, dt: float = 1.0) -> float:
    return math.exp(-dt / tau)


@dataclass
class ExpTrace:
    """A vector or matrix trace with a single time constant."""

    shape: tuple
    tau: float
    dt: float = 1.0
    value: np.ndarray = field(init=False)

    def __post_init__(self):
        self.value = np.zeros(self.shape)
        self._decay = decay_factor(self.tau, self.dt)

    def step(self, increment) -> np.ndarray:
        self.value = self._decay * self.value + increment
        return self.value

    def reset(self) -> None:
        self.value = np.zeros(self.shape)


@dataclass
class RateEstimator:
    """Filtered firing rate in spikes per ms.

    Each spike adds ``1/tau_n``, so a neuron spiking every step settles at
    ``1 / (tau_n * (1 - exp(-dt/tau_n)))`` rather than exactly 1.
    """

    n: int
    tau_n: float = 20.0
    dt: float = 1.0
    rho: np.ndarray = field(init=False)

    def __post_init__(self):
        self.rho = np.zeros(self.n)
        self._decay = decay_factor(self.tau_n, self.dt)

    def reset(self) -> None:
        self.rho = np.zeros(self.n)

    def stationary_gain(self) -> float:
        return (1.0 / self.tau_n) / (1.0 - self._decay)


def rate_update(est: RateEstimator, spikes) -> np.ndarray:
    est.rho = est._decay * est.rho + np.asarray(spikes, dtype=np.float64) / est.tau_n
    return est.rho


@dataclass
class StdpTraceSet:
    """Pre/post spike traces plus per-synapse eligibility ``z`` and feedback-gated ``q``.

    Matrices are ``(n_pre, n_post)``, matching the weight layout.
    """

    n_pre: int
    n_post: int
    a_plus: float = 1.0
    a_minus: float = 0.0
    tau_p: float = 20.0
    tau_z: float = 20.0
    tau_q: float = 40.0
    dt: float = 1.0
    p_pre: np.ndarray = field(init=False)
    p_post: np.ndarray = field(init=False)
    z: np.ndarray = field(init=False)
    q: np.ndarray = field(init=False)

    def __post_init__(self):
        self.reset()

    def reset(self) -> None:
        self.p_pre = np.zeros(self.n_pre)
        self.p_post = np.zeros(self.n_post)
        self.z = np.zeros((self.n_pre, self.n_post))
        self.q = np.zeros((self.n_pre, self.n_post))

    @property
    def decays(self) -> tuple[float, float, float]:
        return (
            decay_factor(self.tau_p, self.dt),
            decay_factor(self.tau_z, self.dt),
            decay_factor(self.tau_q, self.dt),
        )


def stdp_update(t: StdpTraceSet, pre_spikes, post_spikes) -> np.ndarray:
    """Post trace, then pre trace, then ``z`` from the just-updated traces."""
    pre = np.asarray(pre_spikes, dtype=np.float64)
    post = np.asarray(post_spikes, dtype=np.float64)
    d_p, d_z, _ = t.decays
    t.p_post = d_p * t.p_post + post
    t.p_pre = d_p * t.p_pre + pre
    z = d_z * t.z
    if t.a_plus:
        z += t.a_plus * np.outer(t.p_pre, post)
    if t.a_minus:
        z -= t.a_minus * np.outer(pre, t.p_post)
    t.z = z
    return z


def feedback_gate_update(t: StdpTraceSet, feedback) -> np.ndarray:
    """``q <- exp(-dt/tau_q) q + feedback * z``; ``feedback`` has one entry per postsynaptic neuron."""
    _, _, d_q = t.decays
    t.q = d_q * t.q + np.asarray(feedback, dtype=np.float64)[np.newaxis, :] * t.z
    return t.q
