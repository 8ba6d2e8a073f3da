import csv
import json

import numpy as np
import pytest

from occnlos.harness import (
    ConfigError, ExperimentConfig, PlotError, load_config, preset, render_plot, run_experiment,
)
from occnlos.harness.cli import main
from occnlos.harness.experiments import draw_pairs, letter_pattern, peak_lag, replication_seed
from occnlos.harness.presets import NAMES
from occnlos.harness.runner import ENV_OUTPUT


def small_config(**over):
    d = {
        "name": "small", "kind": "sweep",
        "scene": {"D": 2.0, "room": {"width": 1.0, "n_hidden": 20, "n_illum": 20},
                  "occluders": [{"type": "flat", "H": 1.0, "intervals": [[0.45, 0.55]]}]},
        "plan": {"type": "random", "K": 6},
        "prior": {"sigma_f2": 0.1}, "noise": {"snr_db": 20}, "solver": {"type": "mmse"},
        "sweep": {"dt_ps": [100, 400]}, "replications": 3, "seed": 5,
        "options": {"compare_unoccluded": True},
        "plots": [{"type": "line", "source": "records.csv", "file": "nmse.svg",
                   "x": "dt_ps", "y": ["nmse", "nmse_unoccluded"], "logx": True}],
    }
    d.update(over)
    return d


# -- config ----------------------------------------------------------------------

@pytest.mark.parametrize("change, msg", [
    ({"kind": "nope"}, "unknown experiment kind"),
    ({"solver": {"type": "tv"}}, "does not fit"),
    ({"solver": {}}, "exactly one solver"),
    ({"replications": 0}, "at least 1"),
    ({"sweep": {"dt_ps": []}}, "nonempty"),
    ({"sweep": {"colour": [1]}}, "unknown sweep axis"),
    ({"noise": {}}, "noise needs"),
    ({"prior": {}}, "sigma_f2"),
    ({"plan": {"type": "magic"}}, "plan type"),
    ({"extra": 1}, "unknown config keys"),
])
def test_config_errors(change, msg):
    with pytest.raises(ConfigError, match=msg):
        ExperimentConfig.from_dict(small_config(**change))


def test_missing_keys():
    d = small_config()
    del d["scene"]
    with pytest.raises(ConfigError, match="missing scene"):
        ExperimentConfig.from_dict(d)


def test_digest_ignores_output_dir():
    a = ExperimentConfig.from_dict(small_config())
    b = ExperimentConfig.from_dict(small_config(out_dir="/tmp/x"))
    c = ExperimentConfig.from_dict(small_config(seed=6))
    assert a.digest() == b.digest() != c.digest()


def test_load_config_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)


def test_all_presets_validate():
    for name in NAMES:
        cfg = preset(name)
        assert cfg.name == name
    with pytest.raises(ConfigError, match="unknown preset"):
        preset("fig99")


# -- helpers -----------------------------------------------------------------------

def test_replication_seeds_distinct():
    assert replication_seed(0, 3) == 3
    assert len({replication_seed(12345, r) for r in range(100)}) == 100


def test_draw_pairs():
    rng = np.random.default_rng(0)
    p = draw_pairs(100, 30, rng)
    assert p.shape == (30, 2)
    assert len({tuple(r) for r in p.tolist()}) == 30
    q = draw_pairs(100, 40, np.random.default_rng(1), distinct=True)
    assert np.all(q[:, 0] != q[:, 1])


def test_peak_lag_recovers_roll(rng):
    f = np.convolve(rng.normal(size=120), np.ones(7) / 7, mode="same")
    window = slice(20, 100)
    assert peak_lag(np.roll(f, 4), f, window) == 4
    assert peak_lag(np.roll(f, -3), f, window) == -3


def test_letter_pattern():
    img = letter_pattern("F", (24, 24))
    assert img.shape == (24, 24)
    assert set(np.unique(img)) == {0.0, 1.0}
    assert 0.1 < img.mean() < 0.5


# -- running ------------------------------------------------------------------------

def _read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_writes_everything(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config())
    rep = run_experiment(cfg, tmp_path / "out")
    for f in ("records.csv", "aggregates.csv", "report.json", "timings.csv", "nmse.svg"):
        assert (tmp_path / "out" / f).exists()
    rows = _read(tmp_path / "out" / "records.csv")
    assert len(rows) == 2 * 3
    assert {"dt_ps", "replication", "seed", "nmse", "snr_db", "nmse_unoccluded"} <= set(rows[0])
    assert [r["dt_ps"] for r in rows] == ["100", "100", "100", "400", "400", "400"]
    doc = json.loads((tmp_path / "out" / "report.json").read_text())
    assert doc["provenance"]["config_sha256"] == cfg.digest()
    assert doc["config"] == cfg.to_dict()
    assert rep.axis_columns() == ["dt_ps"]


def test_aggregates_are_record_means(tmp_path):
    rep = run_experiment(ExperimentConfig.from_dict(small_config()), tmp_path)
    for agg in rep.aggregates:
        vals = [r["nmse"] for r in rep.records if r["dt_ps"] == agg["dt_ps"]]
        assert agg["mean_nmse"] == pytest.approx(np.mean(vals), rel=1e-14)
        assert agg["std_nmse"] == pytest.approx(np.std(vals), rel=1e-12)
        assert agg["n"] == 3
    assert rep.mean("nmse", dt_ps=100) == pytest.approx(rep.aggregates[0]["mean_nmse"])


def test_rerun_is_byte_identical(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config())
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    for f in ("records.csv", "aggregates.csv", "report.json", "nmse.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_measured_snr_matches_target(tmp_path):
    rep = run_experiment(ExperimentConfig.from_dict(small_config()), write=False)
    np.testing.assert_allclose(rep.column("snr_db"), 20.0, atol=1e-9)
    assert rep.out_dir is None


def test_noise_variance_config(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config(noise={"sigma2": 1e-6}))
    rep = run_experiment(cfg, write=False)
    assert np.all(np.isfinite(rep.column("nmse")))


def test_occluder_helps_in_small_scene(tmp_path):
    rep = run_experiment(ExperimentConfig.from_dict(small_config()), write=False)
    assert rep.mean("nmse") < rep.mean("nmse_unoccluded")


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="not writable"):
        run_experiment(ExperimentConfig.from_dict(small_config()), blocker / "sub")


# -- plots --------------------------------------------------------------------------

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def test_line_plot_single_series(tmp_path):
    _write_csv(tmp_path / "t.csv", ["dt_ps", "nmse"], [[50, 0.1], [100, 0.2], [1600, 0.4]])
    out = render_plot(tmp_path / "t.csv", {"type": "line", "x": "dt_ps", "y": "nmse", "logx": True},
                      tmp_path / "p.svg")
    text = out.read_text()
    assert text.startswith("<svg") or text.startswith("<?xml")
    assert text.count("<polyline") == 1


def test_heatmap_one_rect_per_cell(tmp_path):
    rows = [[r, c, r * c] for r in range(100) for c in range(100)]
    _write_csv(tmp_path / "m.csv", ["row", "col", "value"], rows)
    text = render_plot(tmp_path / "m.csv", {"type": "heatmap", "value": "value"},
                       tmp_path / "m.svg").read_text()
    assert text.count('fill="rgb(') == 10_000
    assert 'fill="rgb(0,0,0)"' in text and 'fill="rgb(255,255,255)"' in text


def test_scatter_red_crosses(tmp_path):
    _write_csv(tmp_path / "s.csv", ["iteration", "laser_0", "camera_0"], [[1, 0.2, 0.3], [2, 0.8, 0.1]])
    text = render_plot(tmp_path / "s.csv", {"type": "scatter", "x": "laser_0", "y": "camera_0",
                                            "label": "iteration"}, tmp_path / "s.svg").read_text()
    assert text.count('stroke="red"') == 2
    assert ">2</text>" in text


@pytest.mark.parametrize("spec", [
    {"type": "line", "x": "dt_ps", "y": "missing"},
    {"type": "heatmap", "value": "missing"},
    {"type": "pie"},
])
def test_plot_errors(tmp_path, spec):
    _write_csv(tmp_path / "t.csv", ["dt_ps", "nmse"], [[50, 0.1]])
    with pytest.raises(PlotError):
        render_plot(tmp_path / "t.csv", spec, tmp_path / "p.svg")


# -- CLI ----------------------------------------------------------------------------

def test_cli_list(capsys):
    assert main(["preset", "--list"]) == 0
    assert capsys.readouterr().out.split() == list(NAMES)


def test_cli_run_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(small_config(replications=1)))
    monkeypatch.setenv(ENV_OUTPUT, str(tmp_path / "env"))
    assert main(["run", str(cfg)]) == 0
    assert (tmp_path / "env" / "small" / "records.csv").exists()
    assert main(["run", str(cfg), "--out", str(tmp_path / "explicit"), "--no-plots"]) == 0
    assert not (tmp_path / "explicit" / "nmse.svg").exists()
    assert "small:" in capsys.readouterr().out


def test_cli_plot(tmp_path):
    _write_csv(tmp_path / "t.csv", ["x", "y"], [[0, 1], [1, 2]])
    (tmp_path / "spec.json").write_text(json.dumps({"type": "line", "x": "x", "y": "y", "file": "o.svg"}))
    assert main(["plot", str(tmp_path / "t.csv"), str(tmp_path / "spec.json")]) == 0
    assert (tmp_path / "o.svg").exists()


@pytest.mark.parametrize("argv", [
    ["preset", "fig99"],
    ["run", "/nonexistent/config.json"],
])
def test_cli_errors(argv, capsys):
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1


def test_cli_bad_config(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(small_config(replications=0)))
    assert main(["run", str(p)]) == 1
    assert "replications" in capsys.readouterr().err


def test_cli_missing_plot_column(tmp_path, capsys):
    _write_csv(tmp_path / "t.csv", ["x", "y"], [[0, 1]])
    (tmp_path / "spec.json").write_text(json.dumps({"type": "line", "x": "x", "y": "z"}))
    assert main(["plot", str(tmp_path / "t.csv"), str(tmp_path / "spec.json")]) == 1
    assert "'z'" in capsys.readouterr().err
