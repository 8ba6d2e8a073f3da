"""Command line entry point.

    occnlos run CONFIG.json [--out DIR]
    occnlos preset NAME [--out DIR] [--seed S] [--full-size] [--replications R]
    occnlos preset --list
    occnlos plot SOURCE.csv PLOT.json [--out FILE.svg]

Without ``--out`` results go to ``$OCCNLOS_OUTPUT_DIR/<name>`` (default
``./results/<name>``).  Any failure prints one ``error:`` line on stderr and
exits with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .presets import NAMES, preset
from .runner import run_experiment
from .svg import PlotError, render_plot


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="occnlos", description="Occluder-aided NLOS experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("config")
    run.add_argument("--out", help="output directory")
    run.add_argument("--no-plots", action="store_true")

    pre = sub.add_parser("preset", help="run a built-in experiment")
    pre.add_argument("name", nargs="?", help=f"one of: {', '.join(NAMES)}")
    pre.add_argument("--out")
    pre.add_argument("--seed", type=int)
    pre.add_argument("--replications", type=int, help="override the replication count")
    pre.add_argument("--full-size", action="store_true", help="full-resolution grids (slow)")
    pre.add_argument("--list", action="store_true", help="list presets and exit")
    pre.add_argument("--no-plots", action="store_true")

    plot = sub.add_parser("plot", help="render a plot spec against a CSV table")
    plot.add_argument("source")
    plot.add_argument("spec")
    plot.add_argument("--out", help="SVG path (default: the spec's 'file' next to the source)")
    return p


def _summary(report) -> str:
    lines = [f"{report.config.name}: {len(report.records)} records -> {report.out_dir}"]
    for row in report.aggregates[:12]:
        keys = [k for k in row if not k.startswith(("mean_", "std_")) and k != "n"]
        means = [k for k in row if k.startswith("mean_")][:4]
        point = ", ".join(f"{k}={row[k]}" for k in keys) or "(single point)"
        lines.append(f"  {point}: " + ", ".join(f"{k[5:]}={row[k]:.4g}" for k in means))
    if len(report.aggregates) > 12:
        lines.append(f"  ... {len(report.aggregates) - 12} more points in aggregates.csv")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            report = run_experiment(cfg, args.out, plots=not args.no_plots)
            print(_summary(report))
        elif args.command == "preset":
            if args.list or not args.name:
                print("\n".join(NAMES))
                return 0
            cfg = preset(args.name, seed=args.seed, full_size=args.full_size,
                         replications=args.replications)
            report = run_experiment(cfg, args.out, plots=not args.no_plots)
            print(_summary(report))
        else:
            spec = json.loads(Path(args.spec).read_text())
            target = args.out or Path(args.source).parent / spec.get("file", "plot.svg")
            print(render_plot(args.source, spec, target))
    except (ConfigError, PlotError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
