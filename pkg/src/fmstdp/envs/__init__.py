"""Environment registry.

An environment exposes ``name``, ``n_actions``, ``feature_dim``, ``max_steps``,
``reset(rng) -> features`` and ``step(action) -> (features, raw_reward, done)``.
Features are already in [0, 1] and ready for spike coding.
"""

from __future__ import annotations

from typing import Callable, Protocol

import numpy as np

from ..errors import ConfigError
from .cartpole import CartPoleEnv, CartPoleState, physics_step


class Environment(Protocol):
    name: str
    n_actions: int
    feature_dim: int
    max_steps: int

    def reset(self, rng: np.random.Generator) -> np.ndarray: ...

    def step(self, action: int) -> tuple[np.ndarray, float, bool]: ...


REGISTRY: dict[str, Callable[[], Environment]] = {"cartpole": CartPoleEnv}


def register(name: str, factory: Callable[[], Environment]) -> None:
    REGISTRY[name] = factory


def make(name: str) -> Environment:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise ConfigError(
            f"unknown environment {name!r}; available: {', '.join(sorted(REGISTRY))}"
        ) from None


__all__ = ["CartPoleEnv", "CartPoleState", "Environment", "make", "physics_step", "register"]
