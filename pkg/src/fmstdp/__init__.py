"""Spiking actor-critic trained with feedback-modulated TD-STDP.

The library side exposes the neuron model, traces, critic and actor rules,
optimizers, encoders, the CartPole environment and the training loop; the
``fmstdp`` command wraps training, verification and reporting.
"""

from .config import RunConfig, available_profiles, load_profile
from .errors import ConfigError, EncodingFault, SimulationFault
from .metrics import EpisodeLog, RunSummary, compute_metrics
from .runner import train
from .verify import verify

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EncodingFault",
    "EpisodeLog",
    "RunConfig",
    "RunSummary",
    "SimulationFault",
    "available_profiles",
    "compute_metrics",
    "load_profile",
    "train",
    "verify",
]
