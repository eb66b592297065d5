"""Cart-pole balancing with the classic Euler-integrated dynamics.

Constants and termination limits follow the widely used v1 benchmark:
0.02 s per step, +-10 N push, episode cut at 500 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..encoding import encode_cartpole
from ..errors import SimulationFault

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
HALF_LENGTH = 0.5
POLEMASS_LENGTH = POLE_MASS * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02  # seconds per env step
X_LIMIT = 2.4
THETA_LIMIT = 12 * 2 * math.pi / 360  # ~0.2095 rad
MAX_STEPS = 500


@dataclass(frozen=True)
class CartPoleState:
    x: float
    x_dot: float
    theta: float
    theta_dot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.x_dot, self.theta, self.theta_dot])

    def negated(self) -> "CartPoleState":
        return CartPoleState(-self.x, -self.x_dot, -self.theta, -self.theta_dot)

    @property
    def within_limits(self) -> bool:
        return abs(self.x) <= X_LIMIT and abs(self.theta) <= THETA_LIMIT


def physics_step(s: CartPoleState, action: int, force: float | None = None) -> CartPoleState:
    """One Euler step. ``action`` 1 pushes right, 0 pushes left.

    ``force`` overrides the push (e.g. ``0.0`` to watch the pole fall freely).
    """
    if force is None:
        force = FORCE_MAG if action == 1 else -FORCE_MAG
    cos_t = math.cos(s.theta)
    sin_t = math.sin(s.theta)
    temp = (force + POLEMASS_LENGTH * s.theta_dot**2 * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t**2 / TOTAL_MASS)
    )
    x_acc = temp - POLEMASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
    return CartPoleState(
        x=s.x + TAU * s.x_dot,
        x_dot=s.x_dot + TAU * x_acc,
        theta=s.theta + TAU * s.theta_dot,
        theta_dot=s.theta_dot + TAU * theta_acc,
    )


class CartPoleEnv:
    name = "cartpole"
    n_actions = 2
    feature_dim = 81
    max_steps = MAX_STEPS

    def __init__(self):
        self.state: CartPoleState | None = None
        self.steps = 0
        self.done = True
        self.failed = False  # done because a limit was crossed, not the step cap

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        x = rng.uniform(-0.05, 0.05, size=4)
        self.state = CartPoleState(*map(float, x))
        self.steps = 0
        self.done = False
        self.failed = False
        return self.features()

    def features(self) -> np.ndarray:
        return encode_cartpole(self.state.as_array())

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        """Advance one step; returns (features, raw reward, done)."""
        if self.done:
            raise SimulationFault("step() called on a finished episode")
        self.state = physics_step(self.state, action)
        self.steps += 1
        self.failed = not self.state.within_limits
        self.done = self.failed or self.steps >= self.max_steps
        return self.features(), 1.0, self.done
