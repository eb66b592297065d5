"""Leaky integrate-and-fire populations stepped at a fixed resolution.

Each step decays the membrane toward rest by ``exp(-dt/tau_m)`` and adds an
impulse of ``(R / tau_m) * sum_i w_ij * x_i`` for the presynaptic spikes of
that step. A neuron whose updated voltage exceeds threshold emits a spike and
is reset to rest; there is no refractory period.

Internally the membrane is stored as its deviation from rest, which keeps
small post-synaptic responses at full floating-point precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SimulationFault


@dataclass(frozen=True)
class LifParams:
    e_rest: float = -65.0  # mV
    v_thresh: float = -52.0  # mV
    tau_m: float = 100.0  # ms
    resistance: float = 1.0  # Ohm
    dt: float = 1.0  # ms

    def __post_init__(self):
        if not self.v_thresh > self.e_rest:
            raise ConfigError("v_thresh must exceed e_rest")
        if not (self.tau_m > 0 and self.dt > 0):
            raise ConfigError("tau_m and dt must be positive")
        if self.dt > self.tau_m:
            raise ConfigError("dt must not exceed tau_m")

    @property
    def decay(self) -> float:
        return math.exp(-self.dt / self.tau_m)

    @property
    def gain(self) -> float:
        """Voltage jump per unit of weighted presynaptic spike."""
        return self.resistance / self.tau_m


@dataclass
class LifPopulation:
    params: LifParams
    n: int
    u: np.ndarray = field(init=False)  # voltage - e_rest
    fired: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("population size must be non-negative")
        self.u = np.zeros(self.n, dtype=np.float64)
        self.fired = np.zeros(self.n, dtype=bool)

    @property
    def voltage(self) -> np.ndarray:
        """Membrane potential in mV (a copy; assign to change it)."""
        return self.params.e_rest + self.u

    @voltage.setter
    def voltage(self, v) -> None:
        self.u = np.asarray(v, dtype=np.float64) - self.params.e_rest

    def step(self, weighted_input: np.ndarray) -> np.ndarray:
        return lif_step(self, weighted_input)

    def reset(self) -> None:
        reset(self)


def lif_step(pop: LifPopulation, weighted_input) -> np.ndarray:
    """Advance ``pop`` by one step and return its 0/1 spike vector.

    ``weighted_input[j]`` must already be ``sum_i w_ij * x_i`` for this step.
    """
    current = np.asarray(weighted_input, dtype=np.float64)
    if current.shape != (pop.n,):
        raise ConfigError(f"expected {pop.n} input currents, got shape {current.shape}")
    bad = np.flatnonzero(~np.isfinite(current))
    if bad.size:
        raise SimulationFault(f"non-finite input current at neuron {int(bad[0])}")

    p = pop.params
    u = pop.u * p.decay + p.gain * current
    fired = u > p.v_thresh - p.e_rest
    u[fired] = 0.0
    pop.u = u
    pop.fired = fired
    return fired.astype(np.float64)


def forward(pop: LifPopulation, w: np.ndarray, input_spikes) -> np.ndarray:
    """Weighted sum of presynaptic spikes followed by one LIF step."""
    x = np.asarray(input_spikes, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != x.shape[0] or w.shape[1] != pop.n:
        raise ConfigError(
            f"weights {w.shape} incompatible with {x.shape[0]} inputs and {pop.n} neurons"
        )
    return lif_step(pop, x @ w)


def reset(pop: LifPopulation) -> None:
    pop.u[:] = 0.0
    pop.fired[:] = False


def init_weights(n_in: int, n_out: int, w0: float, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform weights on ``[0, w0]``, shape ``(n_in, n_out)``."""
    return rng.uniform(0.0, w0, size=(n_in, n_out))
