"""Run configuration and the shipped hyperparameter profiles.

Profiles are JSON files in ``fmstdp/profiles`` whose keys mirror the usual
hyperparameter table names (``N_e``, ``eta``, ``tau_q``, ``c_e`` ...).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

from .actor import ActorConfig
from .critic import CriticConfig
from .errors import ConfigError
from .snn import LifParams


@dataclass(frozen=True)
class PlasticityConfig:
    a_plus: float = 1.0
    a_minus: float = 0.0
    tau_n: float = 20.0
    tau_p: float = 20.0
    tau_z: float = 20.0


@dataclass(frozen=True)
class EpisodeProtocol:
    warmup_ms: int = 100
    snn_ms_per_env_step: int = 20
    reward_scale: float = 0.02
    tau_gamma: float = 1000.0  # ms
    terminal_zero_ms: int = 2
    zero_target_at_cap: bool = True  # treat the step cap like a failure when computing TD

    @property
    def reward_per_ms(self) -> float:
        """Scaled reward of one env step spread evenly over its milliseconds (for raw reward 1)."""
        return self.reward_scale / self.snn_ms_per_env_step


@dataclass(frozen=True)
class OptimConfig:
    kind: str = "plain"  # "plain" | "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 1

    def __post_init__(self):
        if self.kind not in ("plain", "adam"):
            raise ConfigError(f"unknown optimizer {self.kind!r}")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    profile: str
    env: str = "cartpole"
    episodes: int = 400
    seed: int = 0
    neuron: LifParams = field(default_factory=LifParams)
    critic: CriticConfig = field(default_factory=CriticConfig)
    actor: ActorConfig = field(default_factory=ActorConfig)
    critic_plasticity: PlasticityConfig = field(default_factory=PlasticityConfig)
    actor_plasticity: PlasticityConfig = field(default_factory=PlasticityConfig)
    protocol: EpisodeProtocol = field(default_factory=EpisodeProtocol)
    optim: OptimConfig = field(default_factory=OptimConfig)
    neurons_per_feature: int = 1
    critic_w0: float = 1.0
    actor_w0: float = 1.0
    ablate_feedback: bool = False
    feedback_mode: str = "held"  # "held": s at the last draw; "live": s(t) every ms

    def __post_init__(self):
        if self.feedback_mode not in ("held", "live"):
            raise ConfigError(f"unknown feedback_mode {self.feedback_mode!r}")

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def _network(section: dict, which: str) -> tuple[dict, PlasticityConfig, float]:
    s = dict(section)
    plast = PlasticityConfig(
        a_plus=s.pop("A_plus", 1.0),
        a_minus=s.pop("A_minus", 0.0),
        tau_n=s.pop("tau_n", 20.0),
        tau_p=s.pop("tau_p", 20.0),
        tau_z=s.pop("tau_z", 20.0),
    )
    w0 = s.pop("w0")
    names = {"N_e": "n_e", "N_i": "n_i", "eta": "eta", "alpha": "alpha"}
    if which == "critic":
        names.update(beta="beta")
    else:
        names.update(
            K="k",
            tau_q="tau_q",
            c_e="c_e",
            c_w="c_w",
            c_t="c_t",
            rho_target="rho_target",
            resample_every="resample_every",
        )
    out = {}
    for key, value in s.items():
        if key not in names:
            raise ConfigError(f"unknown {which} key {key!r}")
        out[names[key]] = value
    return out, plast, w0


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    d = copy.deepcopy(data)
    try:
        neuron = d.get("neuron", {})
        lif = LifParams(
            e_rest=neuron.get("E_rest", -65.0),
            v_thresh=neuron.get("theta", -52.0),
            tau_m=neuron.get("tau", 100.0),
            resistance=neuron.get("R", 1.0),
            dt=neuron.get("dt", 1.0),
        )
        proto = d.get("protocol", {})
        protocol = EpisodeProtocol(
            warmup_ms=proto.get("warmup_ms", 100),
            snn_ms_per_env_step=proto.get("snn_ms_per_env_step", 20),
            reward_scale=proto.get("reward_scale", 0.02),
            tau_gamma=proto.get("tau_discount", 1000.0),
            terminal_zero_ms=proto.get("terminal_zero_ms", 2),
            zero_target_at_cap=proto.get("zero_target_at_cap", True),
        )
        c_kw, c_plast, c_w0 = _network(d["critic"], "critic")
        a_kw, a_plast, a_w0 = _network(d["actor"], "actor")
        critic = CriticConfig(tau_gamma=protocol.tau_gamma, **c_kw)
        actor = ActorConfig(**a_kw)
        opt = d.get("optimizer", {})
        optim = OptimConfig(
            kind=opt.get("type", "plain"),
            beta1=opt.get("beta1", 0.9),
            beta2=opt.get("beta2", 0.999),
            epsilon=opt.get("epsilon", 1e-8),
            batch_size=opt.get("batch_size", 1),
        )
        return RunConfig(
            profile=d["name"],
            env=d.get("env", "cartpole"),
            episodes=d.get("episodes", 400),
            neuron=lif,
            critic=critic,
            actor=actor,
            critic_plasticity=c_plast,
            actor_plasticity=a_plast,
            protocol=protocol,
            optim=optim,
            neurons_per_feature=d.get("encoding", {}).get("neurons_per_feature", 1),
            critic_w0=c_w0,
            actor_w0=a_w0,
            feedback_mode=d.get("feedback_mode", "held"),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed profile: {exc}") from exc


def available_profiles() -> list[str]:
    root = resources.files("fmstdp") / "profiles"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_profile(name_or_path: str) -> RunConfig:
    """Load a shipped profile by name, or any profile file by path."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        text = path.read_text()
    else:
        res = resources.files("fmstdp") / "profiles" / f"{name_or_path}.json"
        if not res.is_file():
            raise ConfigError(
                f"unknown profile {name_or_path!r}; available: {', '.join(available_profiles())}"
            )
        text = res.read_text()
    return config_from_dict(json.loads(text))
