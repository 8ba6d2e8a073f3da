"""Config-driven experiments: presets, runner, SVG plots and the CLI."""

from .config import ConfigError, ExperimentConfig, load_config
from .presets import NAMES as PRESETS
from .presets import preset
from .runner import ExperimentReport, run_experiment
from .svg import PlotError, render_plot

__all__ = ["ConfigError", "ExperimentConfig", "ExperimentReport", "PRESETS", "PlotError",
           "load_config", "preset", "render_plot", "run_experiment"]
