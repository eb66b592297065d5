"""Command line: ``fmstdp train | verify | metrics``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import envs, export, report
from .config import available_profiles, load_profile
from .errors import ConfigError, SimulationFault
from .runner import train
from .verify import verify

log = logging.getLogger("fmstdp")


def _run_one(job):
    profile, seed, episodes, ablate, out, describe, progress = job
    cfg = load_profile(profile).with_(seed=seed, ablate_feedback=ablate)
    if episodes is not None:
        cfg = cfg.with_(episodes=episodes)
    summary = train(cfg, progress=progress)
    export.export(summary, out, cfg.profile, seed, ablate=ablate, describe=describe)
    return seed, summary.t_f, summary.t_s


def cmd_train(args) -> int:
    try:
        envs.make(load_profile(args.profile).env)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    describe = export.git_describe()
    seeds = range(args.seed, args.seed + args.seeds)
    jobs = [
        (args.profile, s, args.episodes, args.ablate_feedback, args.out, describe, args.verbose)
        for s in seeds
    ]
    workers = max(1, min(args.workers or os.cpu_count() or 1, len(jobs)))
    try:
        if workers == 1:
            results = [_run_one(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_one, jobs))
    except SimulationFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    for seed, t_f, t_s in results:
        print(f"seed {seed}: t_f={t_f} t_s={t_s}")
    runs = report.load_runs(args.out)
    for line in report.summarize(runs).lines():
        print(line)
    return 0


def cmd_verify(args) -> int:
    rep = verify(seed=args.seed, steps=args.steps)
    for line in rep.lines():
        print(line)
    if not rep.passed:
        print("FAILED: " + ", ".join(f"{c.family}/{c.name}" for c in rep.failures), file=sys.stderr)
        return 1
    return 0


def cmd_metrics(args) -> int:
    try:
        runs = report.load_runs(args.input)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    agg = report.summarize(runs)
    for line in agg.lines():
        print(line)
    if not args.no_plot:
        path = report.plot_learning_curves(runs, os.path.join(args.input, "learning_curve.png"))
        print(f"figure: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fmstdp", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log every episode")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on one or more seeds and write CSV/JSON per seed")
    t.add_argument("--profile", default="cartpole-default",
                   help=f"profile name or .json path ({', '.join(available_profiles())})")
    t.add_argument("--episodes", type=int, default=None, help="override the profile's episode count")
    t.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    t.add_argument("--seed", type=int, default=0, help="first seed")
    t.add_argument("--out", required=True, help="output directory")
    t.add_argument("--ablate-feedback", action="store_true",
                   help="use z instead of the feedback-gated q in the actor TD term")
    t.add_argument("--workers", type=int, default=None, help="parallel seed workers (default: CPU count)")
    t.set_defaults(func=cmd_train)

    v = sub.add_parser("verify", help="numerical checks of the learning-rule identities")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--steps", type=int, default=1000)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("metrics", help="aggregate a run directory and plot learning curves")
    m.add_argument("--in", dest="input", required=True, help="directory written by train")
    m.add_argument("--no-plot", action="store_true")
    m.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
