"""Running an experiment and writing its report.

Files written into the output directory:

``records.csv``     one row per (sweep point, replication)
``aggregates.csv``  mean and standard deviation per sweep point
``report.json``     provenance (config hash, seed, versions), the config itself
                    and the aggregates
``timings.csv``     wall-clock milliseconds per record; the only file that
                    differs between identical runs
plus any auxiliary tables of the experiment and the SVG plots it asks for.
"""

from __future__ import annotations

import csv
import json
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..selection import SelectionResult
from .config import ExperimentConfig
from .experiments import RUNNERS
from .svg import render_plot

ENV_OUTPUT = "OCCNLOS_OUTPUT_DIR"
NON_METRICS = {"replication", "seed"}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns: list, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in columns])


def _write_table(path, table) -> None:
    if isinstance(table, SelectionResult):
        table.to_csv(path)
        return
    cols = list(table)
    n = len(next(iter(table.values())))
    write_csv(path, cols, [{c: table[c][i] for c in cols} for i in range(n)])


@dataclass
class ExperimentReport:
    """Raw records, per-point aggregates and provenance of one run."""

    config: ExperimentConfig
    columns: list
    records: list
    aggregates: list
    provenance: dict
    out_dir: Path | None = None
    files: list = field(default_factory=list)
    timings: list = field(default_factory=list)

    def metric_columns(self) -> list:
        axes = set(self.axis_columns())
        return [c for c in self.columns if c not in axes and c not in NON_METRICS]

    def axis_columns(self) -> list:
        return self.columns[: self.columns.index("replication")]

    def column(self, name) -> np.ndarray:
        return np.array([r[name] for r in self.records])

    def mean(self, metric: str, **where) -> float:
        """Average of ``metric`` over the records matching ``where`` (axis=value)."""
        vals = [r[metric] for r in self.records
                if all(np.isclose(r[k], v) if isinstance(v, (int, float)) else r[k] == v
                       for k, v in where.items())]
        if not vals:
            raise KeyError(f"no records match {where}")
        return float(np.mean(vals))


def aggregate(records: list, axes: list, metrics: list) -> list[dict]:
    groups: dict = {}
    for r in records:
        groups.setdefault(tuple(_fmt(r[a]) for a in axes), []).append(r)
    out = []
    for recs in groups.values():
        row = {a: recs[0][a] for a in axes}
        row["n"] = len(recs)
        for m in metrics:
            v = np.array([rec[m] for rec in recs], float)
            row["mean_" + m] = float(np.mean(v))
            row["std_" + m] = float(np.std(v))
        out.append(row)
    return out


def provenance(cfg: ExperimentConfig) -> dict:
    return {
        "experiment": cfg.name,
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "replications": cfg.replications,
        "replication_seeds": "master XOR replication index",
        "package": "occnlos",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _prepare_dir(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc.strerror or exc}") from exc
    return out


def default_output_dir(name: str) -> Path:
    return Path(os.environ.get(ENV_OUTPUT, "results")) / name


def run_experiment(cfg: ExperimentConfig, out_dir=None, write: bool = True,
                   plots: bool = True) -> ExperimentReport:
    """Run ``cfg`` and (unless ``write`` is false) write its files.

    ``out_dir`` defaults to the config's ``out_dir``, then to
    ``$OCCNLOS_OUTPUT_DIR/<name>``, then ``./results/<name>``.
    """
    cfg.validate()
    out = None
    if write:
        target = out_dir or cfg.out_dir or default_output_dir(cfg.name)
        out = _prepare_dir(target)
    outcome = RUNNERS[cfg.kind](cfg)
    records = []
    for rec in outcome.records:
        rec = dict(rec)
        rec.pop("_order", None)
        records.append(rec)
    columns = list(records[0]) if records else []
    for rec in records[1:]:
        for c in rec:
            if c not in columns:
                columns.append(c)
    axes = columns[: columns.index("replication")]
    metrics = [c for c in columns if c not in axes and c not in NON_METRICS]
    aggs = aggregate(records, axes, metrics)
    report = ExperimentReport(cfg, columns, records, aggs, provenance(cfg), out,
                              timings=outcome.timings)
    if out is None:
        return report

    write_csv(out / "records.csv", columns, records)
    agg_cols = list(aggs[0]) if aggs else []
    write_csv(out / "aggregates.csv", agg_cols, aggs)
    files = ["records.csv", "aggregates.csv"]
    for name, table in outcome.tables.items():
        _write_table(out / name, table)
        files.append(name)
    write_csv(out / "timings.csv", ["point", "replication", "wall_ms"], outcome.timings)
    if plots:
        for spec in cfg.plots:
            render_plot(out / spec.get("source", "records.csv"), spec, out / spec["file"])
            files.append(spec["file"])
    report.files = files
    doc = {"provenance": report.provenance, "config": cfg.to_dict(),
           "aggregates": [{k: (float(v) if isinstance(v, (float, np.floating)) else v)
                           for k, v in row.items()} for row in aggs],
           "files": files}
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return report
