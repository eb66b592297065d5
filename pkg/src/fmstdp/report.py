"""Aggregate a directory of runs and render the learning-curve figure."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .export import read_csv
from .metrics import EpisodeLog, aggregate


@dataclass
class RunRecord:
    stem: str
    summary: dict
    log: list[EpisodeLog]


@dataclass
class Aggregate:
    runs: int
    t_f: tuple[float | None, float | None, int]
    t_s: tuple[float | None, float | None, int]
    final_steps: float  # mean over runs of the last-100-episode mean length
    actor_hz: float
    critic_hz: float

    def lines(self) -> list[str]:
        def fmt(name, stats):
            mean, std, n = stats
            if mean is None:
                return f"{name}: none of {self.runs} runs"
            return f"{name}: {mean:.2f} +/- {std:.2f} ({n}/{self.runs} runs)"

        return [
            f"runs: {self.runs}",
            fmt("T_f", self.t_f),
            fmt("T_s", self.t_s),
            f"final-100 mean steps: {self.final_steps:.1f}",
            f"mean rates: actor {self.actor_hz:.1f} Hz, critic {self.critic_hz:.1f} Hz",
        ]


def load_runs(directory: str | Path) -> list[RunRecord]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"no such directory: {d}")
    runs = []
    for js in sorted(d.glob("*.json")):
        csv_path = js.with_suffix(".csv")
        if not csv_path.exists():
            continue
        runs.append(RunRecord(js.stem, json.loads(js.read_text()), read_csv(csv_path)))
    if not runs:
        raise FileNotFoundError(f"no run files (*.csv + *.json) in {d}")
    return runs


def summarize(runs: list[RunRecord], tail: int = 100) -> Aggregate:
    finals, a_hz, c_hz = [], [], []
    for r in runs:
        last = r.log[-tail:]
        finals.append(np.mean([e.steps for e in last]))
        a_hz.append(np.mean([e.actor_hz for e in last]))
        c_hz.append(np.mean([e.critic_hz for e in last]))
    return Aggregate(
        runs=len(runs),
        t_f=aggregate([r.summary.get("t_f") for r in runs]),
        t_s=aggregate([r.summary.get("t_s") for r in runs]),
        final_steps=float(np.mean(finals)),
        actor_hz=float(np.mean(a_hz)),
        critic_hz=float(np.mean(c_hz)),
    )


def plot_learning_curves(runs: list[RunRecord], path: str | Path, max_steps: int = 500) -> Path:
    """Per-run episode lengths (thin) and their mean across runs (thick) as a PNG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = min(len(r.log) for r in runs)
    steps = np.array([[e.steps for e in r.log[:n]] for r in runs], dtype=float)
    ep = np.arange(1, n + 1)

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for row in steps:
        ax.plot(ep, row, color="0.75", lw=0.6)
    ax.plot(ep, steps.mean(axis=0), color="C0", lw=1.8, label=f"mean of {len(runs)} runs")
    ax.axhline(max_steps, color="k", ls=":", lw=0.8)
    ax.set_xlabel("episode")
    ax.set_ylabel("steps survived")
    ax.set_xlim(1, n)
    ax.set_ylim(0, max_steps * 1.05)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
