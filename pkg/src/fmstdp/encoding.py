"""State features: cosine Fourier bases rescaled to [0, 1], and Bernoulli spike coding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EncodingFault

CARTPOLE_BOUNDS = (
    (-2.4, 2.4),
    (-3.0, 3.0),
    (-0.2095, 0.2095),
    (-3.5, 3.5),
)

# x, y, vx, vy, angle, angular velocity, left leg contact, right leg contact
LANDER_BOUNDS = (
    (-1.0, 1.0),
    (-0.5, 1.5),
    (-2.0, 2.0),
    (-2.0, 2.0),
    (-3.14159, 3.14159),
    (-5.0, 5.0),
    (0.0, 1.0),
    (0.0, 1.0),
)


@dataclass
class FourierEncoder:
    """Cosine Fourier basis ``cos(pi * c . x~)`` over normalized state ``x~``.

    With ``cross_terms`` every ``c`` in ``{0..order}^d`` is used, enumerated
    lexicographically (last dimension fastest, as ``itertools.product``).
    Without cross terms the coefficients are ``j * e_i`` for ``j = 1..order``,
    ordered by dimension then by ``j``.
    """

    order: int
    bounds: tuple
    cross_terms: bool = True
    coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.bounds = tuple(tuple(map(float, b)) for b in self.bounds)
        if any(hi <= lo for lo, hi in self.bounds):
            raise ConfigError("each bound must satisfy low < high")
        d = len(self.bounds)
        if self.cross_terms:
            coeffs = list(itertools.product(range(self.order + 1), repeat=d))
        else:
            coeffs = []
            for i in range(d):
                for j in range(1, self.order + 1):
                    c = [0] * d
                    c[i] = j
                    coeffs.append(c)
        self.coefficients = np.array(coeffs, dtype=np.float64).reshape(-1, d)

    @property
    def state_dim(self) -> int:
        return len(self.bounds)

    @property
    def output_dim(self) -> int:
        return self.coefficients.shape[0]

    def normalize(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=np.float64)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return (np.clip(state, lo, hi) - lo) / (hi - lo)

    def basis(self, state) -> np.ndarray:
        """Raw cosine outputs in [-1, 1]."""
        return np.cos(np.pi * self.coefficients @ self.normalize(state))


def cartpole_encoder() -> FourierEncoder:
    return FourierEncoder(order=2, bounds=CARTPOLE_BOUNDS, cross_terms=True)


def lander_encoder() -> FourierEncoder:
    return FourierEncoder(order=1, bounds=LANDER_BOUNDS, cross_terms=False)


_CARTPOLE = None
_LANDER = None


def encode_cartpole(state) -> np.ndarray:
    """81 features ``(o + 1) / 2`` from the order-2 Fourier basis of the cart-pole state."""
    global _CARTPOLE
    if _CARTPOLE is None:
        _CARTPOLE = cartpole_encoder()
    return (_CARTPOLE.basis(state) + 1.0) / 2.0


def split_relu(o) -> np.ndarray:
    o = np.asarray(o, dtype=np.float64)
    return np.maximum(np.concatenate([o, -o, [1.0]]), 0.0)


def encode_lander_style(state) -> np.ndarray:
    """17 features: ReLU of the 8 order-1 outputs, their negatives, and a bias of 1."""
    global _LANDER
    if _LANDER is None:
        _LANDER = lander_encoder()
    return split_relu(_LANDER.basis(state))


@dataclass(frozen=True)
class SpikeCoder:
    neurons_per_feature: int = 1

    def n_inputs(self, n_features: int) -> int:
        return n_features * self.neurons_per_feature

    def probabilities(self, features) -> np.ndarray:
        f = np.asarray(features, dtype=np.float64)
        if np.any(~np.isfinite(f)) or np.any(f < 0.0) or np.any(f > 1.0):
            bad = int(np.flatnonzero(~((f >= 0.0) & (f <= 1.0)))[0])
            raise EncodingFault(f"feature {bad} = {f[bad]!r} outside [0, 1]")
        return np.repeat(f, self.neurons_per_feature)

    def spikes(self, features, rng: np.random.Generator) -> np.ndarray:
        p = self.probabilities(features)
        return (rng.random(p.shape[0]) < p).astype(np.float64)


def spikes(features, rng: np.random.Generator, neurons_per_feature: int = 1) -> np.ndarray:
    return SpikeCoder(neurons_per_feature).spikes(features, rng)
