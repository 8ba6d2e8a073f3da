"""Three-bounce measurement operators.

Every row of a measurement matrix is a midpoint-rule quadrature of the
laser -> l -> x -> c -> camera transport over the hidden-wall patches:

    a_n = V(x_n, l) V(x_n, c) G(x_n, l, c) / (|x_n - l|^2 |x_n - c|^2) * area_n

optionally restricted to one time bin (time-resolved rows) or integrated over
a camera field of view on the illumination wall (wide-FOV rows).  Occluder
effects enter only through the binary visibility factors, so for non-TR rows
``A == A0 * V_1 * ... * V_L`` holds exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .geometry import PatchSet, Scene, visibility

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class PulseShape:
    """Laser pulse: ideal delta or a boxcar of ``width`` seconds."""

    kind: str = "delta"
    width: float = 0.0

    def __post_init__(self):
        if self.kind not in ("delta", "boxcar"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.kind == "boxcar" and not self.width > 0:
            raise ValueError("boxcar pulse needs a positive width")

    @property
    def path_extent(self) -> float:
        """Pulse duration expressed as a path length in meters."""
        return SPEED_OF_LIGHT * self.width if self.kind == "boxcar" else 0.0


DELTA = PulseShape()


def boxcar(width: float) -> PulseShape:
    return PulseShape("boxcar", width)


# ---------------------------------------------------------------------------
# Measurement specifications
# ---------------------------------------------------------------------------

def _point(p) -> tuple:
    return tuple(float(v) for v in np.ravel(p))


@dataclass(frozen=True)
class FocusedPair:
    """Non-time-resolved measurement with laser spot ``laser`` and camera focus ``camera``."""

    laser: tuple
    camera: tuple

    def __post_init__(self):
        object.__setattr__(self, "laser", _point(self.laser))
        object.__setattr__(self, "camera", _point(self.camera))


@dataclass(frozen=True)
class FocusedPairTR:
    """Time bin ``tau`` (1-based) of a focused pair with bin width ``dt`` seconds."""

    laser: tuple
    camera: tuple
    tau: int
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "laser", _point(self.laser))
        object.__setattr__(self, "camera", _point(self.camera))
        if int(self.tau) < 1:
            raise ValueError("time bin index starts at 1")
        if not self.dt > 0:
            raise ValueError("bin width must be positive")


@dataclass(frozen=True, eq=False)
class WideFOV:
    """Single unfocused detector at ``camera`` integrating over ``region``."""

    laser: tuple
    camera: tuple
    region: PatchSet

    def __post_init__(self):
        object.__setattr__(self, "laser", _point(self.laser))
        object.__setattr__(self, "camera", _point(self.camera))
        if len(self.region) == 0:
            raise ValueError("field-of-view region must contain at least one cell")


MeasurementSpec = Union[FocusedPair, FocusedPairTR, WideFOV]


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Assembled M x N operator together with the specs of its rows."""

    entries: np.ndarray
    specs: tuple
    patches: PatchSet = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, float)
        if a.ndim != 2 or a.shape[1] != len(self.patches) or a.shape[0] != len(self.specs):
            raise ValueError("matrix shape does not match specs and patches")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ValueError("measurement matrix entries must be finite and nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "specs", tuple(self.specs))

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_csv(self, path) -> None:
        """Row-major CSV: a ``# M=.. N=..`` header, then spec metadata and entries per row."""
        m, n = self.shape
        with open(path, "w", newline="") as fh:
            fh.write(f"# measurement_matrix M={m} N={n}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kind", "laser", "camera", "tau", "dt"] + [f"a{j}" for j in range(n)])
            for spec, row in zip(self.specs, self.entries):
                w.writerow(_spec_fields(spec) + [format(v, ".17g") for v in row])


def _spec_fields(spec) -> list:
    fmt = lambda p: ";".join(format(v, ".17g") for v in p)
    if isinstance(spec, FocusedPairTR):
        return ["tr", fmt(spec.laser), fmt(spec.camera), str(spec.tau), format(spec.dt, ".17g")]
    if isinstance(spec, FocusedPair):
        return ["pair", fmt(spec.laser), fmt(spec.camera), "", ""]
    return ["widefov", fmt(spec.laser), fmt(spec.camera), "", ""]


def read_matrix_csv(path) -> tuple[np.ndarray, list[dict]]:
    """Read back a matrix written by :meth:`MeasurementMatrix.to_csv`."""
    with open(path, newline="") as fh:
        header = fh.readline()
        m = int(header.split("M=")[1].split()[0])
        rows = list(csv.DictReader(fh))
    if len(rows) != m:
        raise ValueError(f"header declares {m} rows, found {len(rows)}")
    meta, data = [], []
    for r in rows:
        meta.append({k: r[k] for k in ("kind", "laser", "camera", "tau", "dt")})
        data.append([float(v) for k, v in r.items() if k.startswith("a")])
    return np.array(data).reshape(m, -1), meta


# ---------------------------------------------------------------------------
# Transport kernels
# ---------------------------------------------------------------------------

def _facing_cos(v, n, r):
    return np.maximum(0.0, np.einsum("...i,...i->...", v, n) / r)


def brdf_G(x, l, c, n_x, n_l, n_c) -> np.ndarray:
    """Lambertian factor: product of the four front-facing cosines.

    Cosines are measured so that a point in front of each surface gives a
    positive value; any back-facing (negative) cosine zeroes the product.
    All arguments broadcast, coordinates on the last axis.
    """
    x, l, c = (np.asarray(a, float) for a in (x, l, c))
    dl = x - l
    dc = x - c
    rl = np.linalg.norm(dl, axis=-1)
    rc = np.linalg.norm(dc, axis=-1)
    return (_facing_cos(dl, n_l, rl) * _facing_cos(-dl, n_x, rl)
            * _facing_cos(-dc, n_x, rc) * _facing_cos(dc, n_c, rc))


def _pair_terms(scene: Scene, lasers, cameras, occluders=None):
    """Per-pair transport rows (K, N) with visibility, and path lengths (K, N)."""
    occluders = scene.occluders if occluders is None else occluders
    p = scene.patches
    x = p.centers[None, :, :]
    l = np.asarray(lasers, float)[:, None, :]
    c = np.asarray(cameras, float)[:, None, :]
    n_w = scene.illumination.normal
    rl = np.linalg.norm(x - l, axis=-1)
    rc = np.linalg.norm(x - c, axis=-1)
    g = brdf_G(x, l, c, p.normals[None], n_w, n_w)
    base = g / (rl**2 * rc**2) * p.areas[None, :]
    if occluders:
        base = base * visibility(x, l, occluders) * visibility(x, c, occluders)
    return base, rl + rc


@dataclass(frozen=True)
class TimeGrid:
    """Shared bin grid: bin ``tau`` covers path lengths
    ``[origin + (tau-1) c dt, origin + tau c dt)``."""

    origin: float
    dt: float
    n_bins: int

    @property
    def bin_length(self) -> float:
        return SPEED_OF_LIGHT * self.dt

    def weights(self, path, pulse: PulseShape = DELTA) -> np.ndarray:
        """Fraction of each patch's (delayed) pulse landing in every bin, shape (..., T)."""
        path = np.asarray(path, float)
        w = self.bin_length
        if pulse.kind == "delta":
            idx = np.floor((path - self.origin) / w).astype(np.int64)
            return (idx[..., None] == np.arange(self.n_bins)).astype(float)
        edges = self.origin + w * np.arange(self.n_bins + 1)
        lo = path[..., None]
        hi = lo + pulse.path_extent
        overlap = np.clip(np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1]), 0.0, None)
        return overlap / pulse.path_extent


def time_grid(scene: Scene, pairs, dt: float, pulse: PulseShape = DELTA) -> TimeGrid:
    """Global grid for a batch: t=0 at the shortest path over all patches and pairs."""
    pairs = np.asarray(pairs, float).reshape(-1, 2, scene.dim)
    x = scene.patches.centers[None]
    path = (np.linalg.norm(x - pairs[:, None, 0], axis=-1)
            + np.linalg.norm(x - pairs[:, None, 1], axis=-1))
    origin = float(path.min())
    w = SPEED_OF_LIGHT * dt
    if pulse.kind == "delta":
        n_bins = int(np.floor((path.max() - origin) / w)) + 1
    else:
        n_bins = max(1, math.ceil((path.max() + pulse.path_extent - origin) / w))
    return TimeGrid(origin, dt, n_bins)


# ---------------------------------------------------------------------------
# Rows
# ---------------------------------------------------------------------------

def nontr_row(spec: FocusedPair, scene: Scene) -> np.ndarray:
    """Time-integrated row for one (laser, camera) pair."""
    base, _ = _pair_terms(scene, [spec.laser], [spec.camera])
    return base[0]


def tr_row(spec: FocusedPairTR, scene: Scene, pulse: PulseShape = DELTA,
           grid: TimeGrid | None = None) -> np.ndarray:
    """Row for time bin ``spec.tau``: patches inside the corresponding elliptical annulus.

    Without an explicit ``grid`` the time origin is taken from this pair alone.
    """
    if grid is None:
        grid = time_grid(scene, [(spec.laser, spec.camera)], spec.dt, pulse)
    if not math.isclose(grid.dt, spec.dt, rel_tol=1e-12):
        raise ValueError("spec bin width differs from the time grid")
    if spec.tau > grid.n_bins:
        raise ValueError(f"bin {spec.tau} lies beyond the horizon of {grid.n_bins} bins")
    base, path = _pair_terms(scene, [spec.laser], [spec.camera])
    return base[0] * grid.weights(path[0], pulse)[:, spec.tau - 1]


def widefov_row(spec: WideFOV, scene: Scene) -> np.ndarray:
    """Row for a wide field-of-view detector, by direct quadrature over the FOV cells."""
    p = scene.patches
    reg = spec.region
    x = p.centers[:, None, :]
    l = np.asarray(spec.laser)
    cam = np.asarray(spec.camera)
    c = reg.centers[None, :, :]
    n_w = scene.illumination.normal
    cam_off = np.einsum("ij,ij->i", cam - reg.centers, reg.normals)
    if np.any(np.abs(cam_off) < 1e-12):
        raise ValueError("camera must be off the illumination-wall plane")
    rl2 = np.sum((x[:, 0] - l) ** 2, axis=-1)
    rc2 = np.sum((x - c) ** 2, axis=-1)
    rg2 = np.sum((cam - reg.centers) ** 2, axis=-1)
    g = brdf_G(x, l, c, p.normals[:, None, :], n_w, reg.normals[None])
    cos_g = _facing_cos(cam - reg.centers, reg.normals, np.sqrt(rg2))
    vc = visibility(x, c, scene.occluders)
    vl = visibility(p.centers, l, scene.occluders)
    inner = np.sum(vc * g * cos_g[None] / (rc2 * rg2[None]) * reg.areas[None], axis=1)
    return vl / rl2 * inner * p.areas


def _widefov_batch(scene: Scene, lasers, camera, region: PatchSet) -> np.ndarray:
    """All wide-FOV rows sharing one detector; the Lambertian factor splits
    into a laser-side and a camera-side part, so the FOV sum is done once."""
    p = scene.patches
    x = p.centers
    cam = np.asarray(camera, float)
    n_w = scene.illumination.normal
    c = region.centers
    rg = np.linalg.norm(cam - c, axis=-1)
    cos_g = _facing_cos(cam - c, region.normals, rg)
    dc = x[:, None, :] - c[None]
    rc = np.linalg.norm(dc, axis=-1)
    cam_side = (_facing_cos(-dc, p.normals[:, None, :], rc) * _facing_cos(dc, region.normals[None], rc)
                * visibility(x[:, None, :], c[None], scene.occluders))
    inner = np.sum(cam_side * (cos_g / rg**2 * region.areas)[None] / rc**2, axis=1)
    l = np.asarray(lasers, float)[:, None, :]
    dl = x[None] - l
    rl = np.linalg.norm(dl, axis=-1)
    las_side = (_facing_cos(dl, n_w, rl) * _facing_cos(-dl, p.normals[None], rl)
                * visibility(x[None], l, scene.occluders))
    return las_side / rl**2 * inner[None] * p.areas[None]


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------

def pair_specs(pairs) -> list[FocusedPair]:
    return [FocusedPair(l, c) for l, c in np.asarray(pairs, float)]


def tr_specs(pairs, dt: float, n_bins: int) -> list[FocusedPairTR]:
    """Time-major ordering: bin 1 for every pair, then bin 2, and so on."""
    pairs = np.asarray(pairs, float)
    return [FocusedPairTR(l, c, tau, dt) for tau in range(1, n_bins + 1) for l, c in pairs]


def assemble_matrix(specs: Sequence[MeasurementSpec], scene: Scene, pulse: PulseShape = DELTA,
                    grid: TimeGrid | None = None, n_rows: int | None = None) -> MeasurementMatrix:
    """Stack the rows of ``specs`` (in order) into a :class:`MeasurementMatrix`.

    Batches must be homogeneous in kind; time-resolved batches share ``dt``
    and, unless ``grid`` is given, one global time origin.
    """
    specs = list(specs)
    if n_rows is not None and n_rows != len(specs):
        raise ValueError(f"expected {n_rows} rows, got {len(specs)} specs")
    n = len(scene.patches)
    if not specs:
        return MeasurementMatrix(np.zeros((0, n)), (), scene.patches)
    kinds = {type(s) for s in specs}
    if len(kinds) != 1:
        raise ValueError("measurement batch mixes spec kinds")
    kind = kinds.pop()

    if kind is FocusedPair:
        lasers = [s.laser for s in specs]
        cameras = [s.camera for s in specs]
        rows, _ = _pair_terms(scene, lasers, cameras)

    elif kind is FocusedPairTR:
        dts = {s.dt for s in specs}
        if len(dts) != 1:
            raise ValueError("time-resolved batch must share one bin width")
        dt = dts.pop()
        uniq = {}
        for s in specs:
            uniq.setdefault((s.laser, s.camera), len(uniq))
        pairs = np.array([[l, c] for l, c in uniq])
        if grid is None:
            grid = time_grid(scene, pairs, dt, pulse)
        too_late = [s.tau for s in specs if s.tau > grid.n_bins]
        if too_late:
            raise ValueError(f"bin {max(too_late)} lies beyond the horizon of {grid.n_bins} bins")
        base, path = _pair_terms(scene, pairs[:, 0], pairs[:, 1])
        weights = grid.weights(path, pulse)
        rows = np.empty((len(specs), n))
        for i, s in enumerate(specs):
            k = uniq[(s.laser, s.camera)]
            rows[i] = base[k] * weights[k, :, s.tau - 1]

    else:
        rows = np.empty((len(specs), n))
        groups = {}
        for i, s in enumerate(specs):
            groups.setdefault((s.camera, id(s.region)), []).append(i)
        for (camera, _), idx in groups.items():
            region = specs[idx[0]].region
            rows[idx] = _widefov_batch(scene, [specs[i].laser for i in idx], camera, region)

    return MeasurementMatrix(rows, tuple(specs), scene.patches)


def assemble_tr(scene: Scene, pairs, dt: float, pulse: PulseShape = DELTA) -> MeasurementMatrix:
    """All bins for ``pairs`` on their global grid: M = K * T rows, time-major."""
    grid = time_grid(scene, pairs, dt, pulse)
    specs = tr_specs(pairs, dt, grid.n_bins)
    return assemble_matrix(specs, scene, pulse, grid=grid, n_rows=len(pairs) * grid.n_bins)


def assemble_pairs(scene: Scene, pairs) -> MeasurementMatrix:
    return assemble_matrix(pair_specs(pairs), scene)


def grid_pairs(scene: Scene, index_pairs) -> np.ndarray:
    """(K, 2, d) points from (laser, camera) indices into the illumination-wall grid."""
    pts = scene.illumination.patches.centers
    idx = np.asarray(index_pairs, int).reshape(-1, 2)
    return np.stack([pts[idx[:, 0]], pts[idx[:, 1]]], axis=1)
