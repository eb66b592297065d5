"""Applying plasticity updates: direct integration, Adam, episode batching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationFault


def _check_finite(w: np.ndarray) -> None:
    if not np.all(np.isfinite(w)):
        idx = np.unravel_index(int(np.flatnonzero(~np.isfinite(w))[0]), w.shape)
        raise SimulationFault(f"non-finite weight at {tuple(int(i) for i in idx)}")


def apply_plain(w: np.ndarray, delta_w) -> None:
    w += delta_w
    _check_finite(w)


@dataclass
class AdamState:
    shape: tuple
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: np.ndarray = field(init=False)
    v: np.ndarray = field(init=False)

    def __post_init__(self):
        self.m = np.zeros(self.shape)
        self.v = np.zeros(self.shape)


def adam_step(st: AdamState, grad_estimate) -> np.ndarray:
    """Advance the moment estimates and return the bias-corrected ascent step."""
    g = np.asarray(grad_estimate, dtype=np.float64)
    st.t += 1
    st.m = st.beta1 * st.m + (1.0 - st.beta1) * g
    st.v = st.beta2 * st.v + (1.0 - st.beta2) * g * g
    m_hat = st.m / (1.0 - st.beta1**st.t) if st.beta1 < 1.0 else st.m
    v_hat = st.v / (1.0 - st.beta2**st.t) if st.beta2 < 1.0 else st.v
    return st.lr * m_hat / (np.sqrt(v_hat) + st.epsilon)


def apply_adam(st: AdamState, w: np.ndarray, grad_estimate) -> None:
    """Ascend along ``grad_estimate`` (the update direction before the learning rate)."""
    apply_plain(w, adam_step(st, grad_estimate))


@dataclass
class BatchAccumulator:
    shape: tuple
    batch_size: int = 16
    pending: np.ndarray = field(init=False)
    episodes_accumulated: int = 0

    def __post_init__(self):
        self.pending = np.zeros(self.shape)


def batch_commit(acc: BatchAccumulator, episode_update) -> np.ndarray | None:
    """Add one episode's summed update; return the batch mean once ``batch_size`` is reached."""
    acc.pending = acc.pending + episode_update
    acc.episodes_accumulated += 1
    if acc.episodes_accumulated < acc.batch_size:
        return None
    flushed = acc.pending / acc.batch_size
    acc.pending = np.zeros(acc.shape)
    acc.episodes_accumulated = 0
    return flushed
