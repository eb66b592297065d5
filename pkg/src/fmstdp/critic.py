"""Value readout, TD error and the critic's TD-modulated STDP update."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class CriticConfig:
    n_e: int = 40
    n_i: int = 0
    alpha: float = 2.0
    beta: float = -0.2
    eta: float = 2.5e-3
    tau_gamma: float = 1000.0  # ms

    def __post_init__(self):
        if self.n_e < 1 or self.n_i < 0:
            raise ConfigError("critic needs n_e >= 1 and n_i >= 0")
        if self.tau_gamma <= 0:
            raise ConfigError("tau_gamma must be positive")

    @property
    def n(self) -> int:
        return self.n_e + self.n_i

    @property
    def signs(self) -> np.ndarray:
        """+1 for excitatory columns, -1 for inhibitory ones."""
        return np.concatenate([np.ones(self.n_e), -np.ones(self.n_i)])


def _mean(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(x.mean()) if x.size else 0.0


def value(rates_e, rates_i, cfg: CriticConfig) -> float:
    return cfg.alpha * (_mean(rates_e) - _mean(rates_i)) + cfg.beta


def td_error(
    v_now: float,
    v_next: float,
    reward_per_ms: float,
    dt: float,
    tau_gamma: float,
    terminal: bool = False,
) -> float:
    """One-step TD error with the reward discounted over half the step."""
    target = 0.0 if terminal else v_next
    return (
        math.exp(-dt / tau_gamma) * target
        + math.exp(-dt / (2.0 * tau_gamma)) * reward_per_ms * dt
        - v_now
    )


def critic_delta_w(delta: float, z: np.ndarray, sign, eta: float) -> np.ndarray:
    """``sign * eta * delta * z``; ``sign`` may be a scalar or a per-column vector."""
    return np.asarray(sign, dtype=np.float64) * (eta * delta) * z
