"""Softmax policy over actor population rates and the feedback-modulated update.

Actor columns are laid out as ``[exc action 0 | exc action 1 | ... | inh action 0 | ...]``,
each block ``n_e`` (or ``n_i``) neurons wide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class ActorConfig:
    k: int = 2
    n_e: int = 20
    n_i: int = 0
    alpha: float = 25.0
    eta: float = 1e-2
    tau_q: float = 40.0
    resample_every: int = 1
    c_e: float = 0.0
    c_w: float = 0.0
    c_t: float = 0.0
    rho_target: float = 0.0  # spikes/ms

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("need at least two actions")
        if self.n_e < 1 or self.n_i < 0:
            raise ConfigError("actor needs n_e >= 1 and n_i >= 0")
        if self.resample_every < 1:
            raise ConfigError("resample_every must be >= 1")
        if min(self.c_e, self.c_w, self.c_t) < 0:
            raise ConfigError("regularizer strengths must be non-negative")

    @property
    def n(self) -> int:
        return self.k * (self.n_e + self.n_i)

    @property
    def signs(self) -> np.ndarray:
        return np.concatenate([np.ones(self.k * self.n_e), -np.ones(self.k * self.n_i)])

    @property
    def action_of_column(self) -> np.ndarray:
        exc = np.repeat(np.arange(self.k), self.n_e)
        inh = np.repeat(np.arange(self.k), self.n_i)
        return np.concatenate([exc, inh])


@dataclass
class PolicyState:
    k: int
    resample_every: int = 1
    s: np.ndarray = field(init=False)
    held_action: int = 0
    steps_since_resample: int = field(init=False)

    def __post_init__(self):
        self.reset()

    def reset(self) -> None:
        self.s = np.full(self.k, 1.0 / self.k)
        self.held_action = 0
        # forces a draw on the first env step
        self.steps_since_resample = self.resample_every


def mean_rates_by_action(rho, cfg: ActorConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-action mean excitatory and inhibitory rates from the per-neuron rate vector."""
    rho = np.asarray(rho, dtype=np.float64)
    n_exc = cfg.k * cfg.n_e
    rates_e = rho[:n_exc].reshape(cfg.k, cfg.n_e).mean(axis=1)
    if cfg.n_i:
        rates_i = rho[n_exc:].reshape(cfg.k, cfg.n_i).mean(axis=1)
    else:
        rates_i = np.zeros(cfg.k)
    return rates_e, rates_i


def softmax(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    shifted = x - x.max()
    log_z = np.log(np.exp(shifted).sum())
    return np.exp(shifted - log_z)


def action_probs(rates_e_by_action, rates_i_by_action, cfg: ActorConfig) -> np.ndarray:
    drive = np.asarray(rates_e_by_action, dtype=np.float64) - np.asarray(
        rates_i_by_action, dtype=np.float64
    )
    return softmax(cfg.alpha * drive)


def draw_action(s, u: float) -> int:
    """Inverse-CDF draw from ``s`` using one uniform ``u`` in [0, 1)."""
    cdf = np.cumsum(s)
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(idx, len(cdf) - 1)


def sample_or_hold(state: PolicyState, s, rng: np.random.Generator) -> int:
    """Draw a fresh action every ``resample_every`` calls, otherwise keep the held one.

    The probabilities used for the draw are stored on ``state.s`` and stay
    attached to the held action until the next draw.
    """
    if state.steps_since_resample >= state.resample_every:
        state.s = np.array(s, dtype=np.float64)
        state.held_action = draw_action(state.s, rng.random())
        state.steps_since_resample = 1
    else:
        state.steps_since_resample += 1
    return state.held_action


def feedback_signal(held_action: int, s) -> np.ndarray:
    fb = -np.asarray(s, dtype=np.float64)
    fb[held_action] += 1.0
    return fb


def entropy_gate(s) -> np.ndarray:
    """Entropy gradient w.r.t. each action's drive, without the softmax temperature."""
    s = np.asarray(s, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(s > 0, s * (np.log(s) + 1.0), 0.0)
    # -sum_m u_m (I{m=k} - s_k) = -(u_k - s_k * sum(u))
    return -(u - s * u.sum())


def actor_delta_w(
    delta: float,
    q: np.ndarray,
    z: np.ndarray,
    w: np.ndarray,
    rates_mean: float,
    gate,
    cfg: ActorConfig,
    sign,
) -> np.ndarray:
    """Combined actor update: TD term, entropy bonus, weight decay and target-rate pull.

    ``gate`` and ``sign`` are per-column (or scalar); ``q`` may be swapped for
    ``z`` to ablate the feedback modulation.
    """
    sign = np.asarray(sign, dtype=np.float64)
    dw = sign * delta * q
    if cfg.c_e:
        dw = dw + sign * cfg.c_e * np.asarray(gate, dtype=np.float64) * z
    if cfg.c_w:
        dw = dw - 0.5 * cfg.c_w * w
    if cfg.c_t:
        dw = dw - cfg.c_t * (rates_mean - cfg.rho_target) * z
    return cfg.eta * dw
