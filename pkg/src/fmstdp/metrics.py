"""Learning-speed metrics: first perfect episode and first solved episode."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EpisodeLog:
    episode: int  # 1-based
    steps: int
    ret: float  # scaled return
    actor_hz: float
    critic_hz: float


@dataclass
class RunSummary:
    t_f: int | None
    t_s: int | None
    episodes: int
    log: list[EpisodeLog] = field(default_factory=list, repr=False)


def compute_metrics(steps, perfect: int = 500, window: int = 100) -> RunSummary:
    """``t_f``: first episode reaching ``perfect`` steps. ``t_s``: first episode
    ``e >= window`` such that episodes ``e-window+1 .. e`` are all perfect. Both 1-based.
    """
    steps = np.asarray(steps)
    if steps.size == 0:
        raise ValueError("need at least one episode")
    ok = steps >= perfect
    hits = np.flatnonzero(ok)
    t_f = int(hits[0]) + 1 if hits.size else None
    t_s = None
    run = 0
    for idx, good in enumerate(ok):
        run = run + 1 if good else 0
        if run >= window:
            t_s = idx + 1
            break
    return RunSummary(t_f=t_f, t_s=t_s, episodes=int(steps.size))


def aggregate(values) -> tuple[float | None, float | None, int]:
    """Mean and population std over runs that reached the milestone, plus their count."""
    got = [v for v in values if v is not None]
    if not got:
        return None, None, 0
    arr = np.asarray(got, dtype=np.float64)
    return float(arr.mean()), float(arr.std()), len(got)
