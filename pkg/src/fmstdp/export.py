"""Per-run CSV and JSON summary files."""

from __future__ import annotations

import csv
import json
import subprocess
from pathlib import Path

from .metrics import EpisodeLog, RunSummary

CSV_HEADER = ("episode", "steps", "return", "actor_hz", "critic_hz")


def git_describe(cwd: str | Path | None = None) -> str | None:
    """``git describe --always --dirty`` of the source tree, or None outside a checkout."""
    if cwd is None:
        cwd = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=cwd, capture_output=True, text=True, timeout=10, check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None


def _fmt(x: float) -> str:
    # repr round-trips exactly and does not depend on locale
    return repr(float(x))


def write_csv(rows: list[EpisodeLog], path: str | Path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([r.episode, r.steps, _fmt(r.ret), _fmt(r.actor_hz), _fmt(r.critic_hz)])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path: str | Path) -> list[EpisodeLog]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
            return [
                EpisodeLog(
                    int(row["episode"]),
                    int(row["steps"]),
                    float(row["return"]),
                    float(row["actor_hz"]),
                    float(row["critic_hz"]),
                )
                for row in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def summary_dict(profile: str, seed: int, summary: RunSummary, describe: str | None) -> dict:
    return {
        "profile": profile,
        "seed": seed,
        "t_f": summary.t_f,
        "t_s": summary.t_s,
        "episodes": summary.episodes,
        "git_describe": describe,
    }


def write_json(data: dict, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(data, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def run_stem(profile: str, seed: int, ablate: bool = False) -> str:
    tag = "-ablate" if ablate else ""
    return f"{profile}{tag}_seed{seed:03d}"


def export(
    summary: RunSummary,
    out_dir: str | Path,
    profile: str,
    seed: int,
    ablate: bool = False,
    describe: str | None = None,
) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.json`` into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from exc
    stem = run_stem(profile, seed, ablate)
    csv_path = write_csv(summary.log, out / f"{stem}.csv")
    json_path = write_json(summary_dict(profile, seed, summary, describe), out / f"{stem}.json")
    return csv_path, json_path
