"""Experiment configuration: a JSON-serializable description of one run.

Example (abridged)::

    {"name": "occluder-demo", "kind": "sweep",
     "scene": {"D": 2.0, "room": {"width": 1.0}, "occluders": [...]},
     "plan": {"type": "random", "K": 30},
     "prior": {"sigma_f2": 0.1}, "noise": {"snr_db": 25},
     "solver": {"type": "mmse"},
     "sweep": {"dt_ps": [50, 100, 200]},
     "replications": 10, "seed": 0}

Sweep axes override the scalar value of the same parameter.  The recognised
axes are listed in :data:`AXES`; their order there fixes the column order and
the nesting of sweep points (first axis outermost).
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = {
    "sweep": {"mmse"},
    "greedy_vs_random": {"mmse"},
    "mismatch": {"mmse"},
    "depth_search": {"depth_search"},
    "tv_widefov": {"tv"},
}
PLANS = {"random", "pairs", "greedy", "raster"}
AXES = ("sigma_f2", "D", "K", "snr_db", "dt_ps", "mismatch")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    kind: str
    scene: dict
    plan: dict
    prior: dict
    noise: dict
    solver: dict
    sweep: dict = field(default_factory=dict)
    replications: int = 1
    seed: int = 0
    options: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)
    out_dir: str | None = None

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------
    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; choose from {sorted(KINDS)}")
        if not isinstance(self.solver, dict) or "type" not in self.solver:
            raise ConfigError("config needs exactly one solver, given as {'type': ...}")
        if self.solver["type"] not in KINDS[self.kind]:
            raise ConfigError(f"solver {self.solver['type']!r} does not fit a {self.kind!r} experiment")
        if self.plan.get("type") not in PLANS:
            raise ConfigError(f"measurement plan type must be one of {sorted(PLANS)}")
        if int(self.replications) < 1:
            raise ConfigError("replications must be at least 1")
        for axis, values in self.sweep.items():
            if axis not in AXES:
                raise ConfigError(f"unknown sweep axis {axis!r}; known axes: {', '.join(AXES)}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep axis {axis!r} must be a nonempty list")
        if "snr_db" not in self.noise and "sigma2" not in self.noise and "snr_db" not in self.sweep:
            raise ConfigError("noise needs either 'snr_db' or 'sigma2'")
        if "sigma_f2" not in self.prior and "sigma_f2" not in self.sweep:
            raise ConfigError("prior needs 'sigma_f2'")
        if self.kind == "depth_search" and not self.solver.get("candidates"):
            raise ConfigError("depth search needs a nonempty candidate list")
        if self.kind == "tv_widefov" and not self.solver.get("lam"):
            raise ConfigError("TV solver needs at least one regularization weight 'lam'")

    # -- helpers ----------------------------------------------------------
    def axes(self) -> list[str]:
        return [a for a in AXES if a in self.sweep]

    def param(self, name, point: dict | None = None, default=None):
        """Value of ``name`` at a sweep point, falling back to the scalar settings."""
        if point and name in point:
            return point[name]
        for block in (self.noise, self.prior, self.plan, self.options):
            if name in block:
                return block[name]
        if name == "D":
            return self.scene["D"]
        return default

    def to_dict(self) -> dict:
        d = {k: copy.deepcopy(getattr(self, k)) for k in (
            "name", "kind", "scene", "plan", "prior", "noise", "solver", "sweep",
            "replications", "seed", "options", "plots")}
        if self.out_dir is not None:
            d["out_dir"] = self.out_dir
        return d

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, excluding the output directory."""
        d = self.to_dict()
        d.pop("out_dir", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        required = ("name", "kind", "scene", "plan", "prior", "noise", "solver")
        missing = [k for k in required if k not in d]
        if missing:
            raise ConfigError(f"config is missing {', '.join(missing)}")
        known = set(required) | {"sweep", "replications", "seed", "options", "plots", "out_dir"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        d = copy.deepcopy(d)
        d["replications"] = int(d.get("replications", 1))
        d["seed"] = int(d.get("seed", 0))
        return cls(**d)


def load_config(path) -> ExperimentConfig:
    try:
        with open(Path(path)) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data)
