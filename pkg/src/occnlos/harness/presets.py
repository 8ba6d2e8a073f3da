"""Built-in experiment configurations.

2D presets share the 1 m room with the hidden wall 2 m away, 100 hidden
patches and a 100-point laser/camera grid.  The wide-FOV preset runs at a
reduced 32 x 32 raster / 24 x 24 hidden grid unless ``full_size`` is set.
"""

from __future__ import annotations

import copy

from .config import ConfigError, ExperimentConfig

TWO_OCCLUDERS = [
    {"type": "flat", "H": 1.0, "intervals": [[0.45, 0.55]]},
    {"type": "flat", "H": 0.6, "intervals": [[0.15, 0.30]]},
]
ONE_OCCLUDER = TWO_OCCLUDERS[:1]
DT_GRID_PS = [50, 100, 200, 400, 800, 1600, 2000]


def _room(D=2.0, occluders=()):
    return {"D": D, "room": {"width": 1.0, "n_hidden": 100, "n_illum": 100},
            "occluders": list(copy.deepcopy(occluders))}


def _nmse_line(name, x, y, group=None, logx=False, title=""):
    spec = {"type": "line", "source": "records.csv", "file": name, "x": x, "y": y,
            "logx": logx, "title": title}
    if group:
        spec["group"] = group
    return spec


_PRESETS = {
    "fig3": dict(
        kind="sweep", scene=_room(), plan={"type": "random", "K": 8},
        prior={"sigma_f2": 0.1}, noise={"snr_db": 13.7}, solver={"type": "mmse"},
        options={"dt_ps": 100, "export": ["estimates", "matrix"]},
        replications=1, seed=0,
        plots=[
            {"type": "line", "source": "estimate_p0.csv", "file": "reconstruction.svg",
             "x": "x", "y": ["truth", "estimate"], "title": "TR reconstruction"},
            {"type": "heatmap", "source": "matrix_p0.csv", "file": "matrix.svg",
             "value": "value", "title": "measurement matrix"},
        ]),
    "fig4a": dict(
        kind="sweep", scene=_room(), plan={"type": "random", "K": 30},
        prior={"sigma_f2": 0.1}, noise={}, solver={"type": "mmse"},
        sweep={"snr_db": [10, 20, 30], "dt_ps": DT_GRID_PS},
        replications=10, seed=0,
        plots=[_nmse_line("nmse_vs_dt.svg", "dt_ps", "nmse", "snr_db", True, "NMSE vs bin width")]),
    "fig4b": dict(
        kind="sweep", scene=_room(), plan={"type": "random", "K": 30},
        prior={"sigma_f2": 0.1}, noise={"snr_db": 20}, solver={"type": "mmse"},
        sweep={"D": [0.5, 1.0, 2.0, 4.0], "dt_ps": DT_GRID_PS},
        replications=10, seed=0,
        plots=[_nmse_line("nmse_vs_dt.svg", "dt_ps", "nmse", "D", True, "NMSE vs bin width")]),
    "fig5": dict(
        kind="sweep", scene=_room(occluders=TWO_OCCLUDERS), plan={"type": "random", "K": 30},
        prior={"sigma_f2": 0.1}, noise={"snr_db": 25}, solver={"type": "mmse"},
        options={"compare_unoccluded": True, "export": ["estimates", "spectra"]},
        replications=50, seed=0,
        plots=[
            {"type": "line", "source": "estimate_p0.csv", "file": "reconstruction.svg", "x": "x",
             "y": ["truth", "estimate", "estimate_unoccluded"], "title": "with and without occluders"},
            {"type": "line", "source": "spectra_p0.csv", "file": "singular_values.svg", "x": "index",
             "y": ["occluded", "unoccluded"], "logy": True, "title": "singular values"},
        ]),
    "fig7": dict(
        kind="greedy_vs_random", scene=_room(occluders=ONE_OCCLUDER),
        plan={"type": "greedy", "grid": 20, "diagonal_only": False},
        prior={}, noise={"snr_db": 10}, solver={"type": "mmse"},
        sweep={"sigma_f2": [0.05, 0.1, 0.2], "K": list(range(1, 31))},
        replications=20, seed=0,
        plots=[
            _nmse_line("nmse_vs_budget.svg", "K", ["nmse_greedy", "nmse_random"], "sigma_f2",
                       title="greedy vs random"),
            {"type": "scatter", "source": "selection_p0.csv", "background": "candidates.csv",
             "file": "selection.svg", "x": "laser_0", "y": "camera_0", "label": "iteration",
             "title": "greedy picks"},
        ]),
    "fig8": dict(
        kind="sweep", scene=_room(occluders=TWO_OCCLUDERS), plan={"type": "random", "K": 30},
        prior={"sigma_f2": 0.1}, noise={"snr_db": 25}, solver={"type": "mmse"},
        options={"compare_unoccluded": True}, sweep={"dt_ps": DT_GRID_PS},
        replications=10, seed=0,
        plots=[_nmse_line("nmse_vs_dt.svg", "dt_ps", ["nmse", "nmse_unoccluded"], logx=True,
                          title="occluded vs unoccluded")]),
    "fig9": dict(
        kind="mismatch",
        scene={"D": 5.0, "room": {"width": 1.0, "n_hidden": 100, "n_illum": 100},
               "occluders": [{"type": "flat", "H": 2.0, "intervals": [[0.375, 0.625]]}]},
        plan={"type": "random", "K": 100, "distinct": True},
        prior={"sigma_f2": 0.005}, noise={"snr_db": 35}, solver={"type": "mmse"},
        sweep={"mismatch": [[0.0, 0.0], [0.02, 0.0], [0.05, 0.0], [0.0, 0.1], [0.0, 0.3]]},
        options={"export": ["estimates"]},
        replications=8, seed=0,
        plots=[{"type": "line", "source": "estimate_p1.csv", "file": "shifted.svg", "x": "x",
                "y": ["truth", "estimate_matched", "estimate"], "title": "transverse mismatch"},
               {"type": "line", "source": "estimate_p3.csv", "file": "scaled.svg", "x": "x",
                "y": ["truth", "estimate_matched", "estimate"], "title": "depth mismatch"}]),
    "fig10": dict(
        kind="depth_search", scene=_room(occluders=TWO_OCCLUDERS), plan={"type": "random", "K": 30},
        prior={"sigma_f2": 0.05}, noise={},
        solver={"type": "depth_search", "candidates": [1.6, 1.7, 1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4],
                "full_likelihood": False},
        sweep={"snr_db": [15, 20, 25, 30, 35]},
        replications=200, seed=0,
        plots=[
            {"type": "line", "source": "nll.csv", "file": "nll.svg", "x": "candidate", "y": "nll",
             "group": "snr_db", "title": "negative log-likelihood"},
            _nmse_line("errors_vs_snr.svg", "snr_db", ["distance_error", "error"],
                       title="distance and reflectivity error"),
        ]),
    "fig13": dict(
        kind="tv_widefov",
        scene={
            "D": 1.06,
            "illumination_wall": {"origin": [-0.6, -0.6, 0.0], "axes": [[1, 0, 0], [0, 1, 0]],
                                  "extents": [1.2, 1.2], "counts": [4, 4], "normal": [0, 0, 1]},
            "hidden_wall": {"origin": [-0.15, -0.15, 1.06], "axes": [[1, 0, 0], [0, 1, 0]],
                            "extents": [0.3, 0.3], "counts": [24, 24], "normal": [0, 0, -1]},
            "occluders": [{"type": "flat", "H": 0.37, "discs": [{"center": [0.0, 0.0], "radius": 0.017}]}],
        },
        plan={"type": "raster", "n": 32, "lower": [-0.11, -0.11], "upper": [0.11, 0.11],
              "camera": [-0.4, 0.0, 1.56],
              "fov": {"lower": [-0.6, -0.2], "upper": [-0.2, 0.2], "counts": [8, 8]}},
        prior={"sigma_f2": 0.02}, noise={"snr_db": 30},
        solver={"type": "tv", "lam": [3e-5, 1e-4, 3e-4], "iters": 3000, "tol": 1e-7},
        options={"pattern": "F", "mmse_noise_scale": [1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0],
                 "export": ["estimates", "measurements"]},
        replications=1, seed=0,
        plots=[
            {"type": "heatmap", "source": "measurements_p0.csv", "file": "raw.svg", "value": "y",
             "title": "raw measurements"},
            {"type": "heatmap", "source": "estimate_p0.csv", "file": "truth.svg", "value": "truth",
             "title": "ground truth"},
            {"type": "heatmap", "source": "estimate_p0.csv", "file": "tv.svg", "value": "tv",
             "title": "TV estimate"},
            {"type": "heatmap", "source": "estimate_p0.csv", "file": "mmse.svg", "value": "mmse",
             "title": "Gaussian-prior estimate"},
        ]),
}

FULL_SIZE = {
    "fig13": {"plan": {"n": 100}, "hidden_counts": [48, 48]},
}

NAMES = tuple(_PRESETS)


def preset(name: str, seed: int | None = None, full_size: bool = False,
           replications: int | None = None) -> ExperimentConfig:
    """Configuration for a named preset (see :data:`NAMES`)."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(NAMES)}")
    d = copy.deepcopy(_PRESETS[name])
    d["name"] = name
    if seed is not None:
        d["seed"] = int(seed)
    if replications is not None:
        d["replications"] = int(replications)
    if full_size and name in FULL_SIZE:
        extra = FULL_SIZE[name]
        d["plan"].update(extra.get("plan", {}))
        if "hidden_counts" in extra:
            d["scene"]["hidden_wall"]["counts"] = list(extra["hidden_counts"])
    return ExperimentConfig.from_dict(d)
