"""Scene geometry: walls, occluders and the visibility function.

Coordinates follow one convention throughout the package.  The last axis is
depth: the illumination wall lies in the plane ``depth == 0`` and the hidden
wall in the plane ``depth == D``.  The leading ``d - 1`` axes are *transverse*
coordinates shared by every plane parallel to the walls, so a flat occluder at
depth ``H`` is described by a set in the same transverse coordinates.

Occluders are fully absorbing.  A segment that only grazes an occluder
boundary is treated as unobstructed (strict-interior rule).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

_EPS = 1e-12


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurfacePatch:
    """One cell of a discretized wall (midpoint-rule quadrature node)."""

    center: np.ndarray
    normal: np.ndarray
    area: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center))
        object.__setattr__(self, "normal", _frozen(self.normal))
        if not np.all(np.isfinite(self.center)):
            raise ValueError("patch center must be finite")
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-12:
            raise ValueError("patch normal must be a unit vector")
        if not self.area > 0:
            raise ValueError("patch area must be positive")


class PatchSet(Sequence[SurfacePatch]):
    """Ordered collection of patches stored as arrays.

    Indexing yields :class:`SurfacePatch` objects; the array attributes
    ``centers`` (N, d), ``normals`` (N, d) and ``areas`` (N,) are what the
    numerical code uses.  ``shape`` holds the per-axis patch counts so that
    grid-aware operators (total variation) can reshape the flat vector.
    """

    def __init__(self, centers, normals, areas, shape=None):
        self.centers = _frozen(np.atleast_2d(centers))
        n, d = self.centers.shape
        self.normals = _frozen(np.broadcast_to(normals, (n, d)))
        self.areas = _frozen(np.broadcast_to(areas, (n,)))
        self.shape = tuple(int(s) for s in shape) if shape is not None else (n,)
        if int(np.prod(self.shape)) != n:
            raise ValueError(f"shape {self.shape} does not match {n} patches")
        if np.any(self.areas <= 0):
            raise ValueError("patch areas must be positive")
        if not np.allclose(np.linalg.norm(self.normals, axis=1), 1.0, atol=1e-12):
            raise ValueError("patch normals must be unit vectors")

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def __len__(self) -> int:
        return self.centers.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return SurfacePatch(self.centers[i], self.normals[i], float(self.areas[i]))

    def __iter__(self) -> Iterator[SurfacePatch]:
        for i in range(len(self)):
            yield self[i]

    def __repr__(self) -> str:
        return f"PatchSet(n={len(self)}, shape={self.shape}, dim={self.dim})"

    @property
    def transverse(self) -> np.ndarray:
        """Transverse coordinates of the centers, shape (N, d - 1)."""
        return self.centers[:, :-1]


@dataclass(frozen=True, eq=False)
class Wall:
    """Planar rectangular (d=3) or segment (d=2) wall.

    ``origin`` is a corner; ``axes`` are orthonormal in-plane directions and
    ``extents``/``counts`` give the size and number of cells along each.
    """

    origin: np.ndarray
    axes: np.ndarray
    extents: tuple
    counts: tuple
    normal: np.ndarray

    def __post_init__(self):
        origin = _frozen(self.origin)
        d = origin.shape[0]
        if d not in (2, 3):
            raise ValueError("walls live in 2D or 3D")
        axes = _frozen(np.reshape(self.axes, (-1, d)))
        normal = _frozen(self.normal)
        extents = tuple(float(e) for e in self.extents)
        counts = tuple(int(c) for c in self.counts)
        if axes.shape[0] != d - 1 or len(extents) != d - 1 or len(counts) != d - 1:
            raise ValueError(f"a wall in {d}D needs {d - 1} span axes")
        if not np.allclose(axes @ axes.T, np.eye(d - 1), atol=1e-12):
            raise ValueError("span axes must be orthonormal")
        if abs(np.linalg.norm(normal) - 1.0) > 1e-12 or np.any(np.abs(axes @ normal) > 1e-12):
            raise ValueError("normal must be a unit vector orthogonal to the span axes")
        if any(e <= 0 for e in extents) or any(c < 1 for c in counts):
            raise ValueError("extents must be positive and counts at least 1")
        for name, val in (("origin", origin), ("axes", axes), ("normal", normal),
                          ("extents", extents), ("counts", counts)):
            object.__setattr__(self, name, val)

    @classmethod
    def at_depth(cls, depth, lower, upper, counts, facing=+1) -> "Wall":
        """Axis-aligned wall at a given depth spanning ``[lower, upper]``.

        ``facing=+1`` orients the normal towards increasing depth (the
        illumination wall); ``-1`` towards decreasing depth (the hidden wall).
        """
        lower = np.atleast_1d(np.asarray(lower, float))
        upper = np.atleast_1d(np.asarray(upper, float))
        d = lower.size + 1
        origin = np.append(lower, depth)
        axes = np.eye(d)[: d - 1]
        normal = np.zeros(d)
        normal[-1] = 1.0 if facing > 0 else -1.0
        return cls(origin, axes, tuple(upper - lower), tuple(np.atleast_1d(counts)), normal)

    @property
    def dim(self) -> int:
        return self.origin.shape[0]

    @property
    def area(self) -> float:
        return float(np.prod(self.extents))

    @property
    def cell_size(self) -> np.ndarray:
        return np.array(self.extents) / np.array(self.counts)

    @property
    def depth(self) -> float:
        return float(self.origin[-1])

    @cached_property
    def patches(self) -> PatchSet:
        return discretize_wall(self)


def discretize_wall(wall: Wall) -> PatchSet:
    """Midpoint grid on ``wall``, ordered lexicographically by axis index."""
    steps = wall.cell_size
    ticks = [(np.arange(n) + 0.5) * h for n, h in zip(wall.counts, steps)]
    mesh = np.meshgrid(*ticks, indexing="ij")
    local = np.stack([m.ravel() for m in mesh], axis=1)
    centers = wall.origin + local @ wall.axes
    return PatchSet(centers, wall.normal, float(np.prod(steps)), shape=wall.counts)


# ---------------------------------------------------------------------------
# Occluders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Occupied interval ``(lo, hi)`` on a 2D-world occluder line."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("interval must have positive length")

    def contains(self, p: np.ndarray) -> np.ndarray:
        p = p[..., 0]
        return (p > self.lo) & (p < self.hi)

    def boundary_distance(self, p: np.ndarray) -> np.ndarray:
        p = p[..., 0]
        return np.minimum(np.abs(p - self.lo), np.abs(p - self.hi))


@dataclass(frozen=True)
class Rect:
    """Axis-aligned occupied rectangle on a 3D occluder plane."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != 2 or not all(h > l for l, h in zip(self.lo, self.hi)):
            raise ValueError("rect needs 2D corners with positive extent")

    def contains(self, p: np.ndarray) -> np.ndarray:
        lo, hi = np.array(self.lo), np.array(self.hi)
        return np.all((p > lo) & (p < hi), axis=-1)

    def boundary_distance(self, p: np.ndarray) -> np.ndarray:
        lo, hi = np.array(self.lo), np.array(self.hi)
        outside = np.linalg.norm(np.maximum(0.0, np.maximum(lo - p, p - hi)), axis=-1)
        inside = np.min(np.minimum(p - lo, hi - p), axis=-1)
        return np.where(self.contains(p), inside, outside)


@dataclass(frozen=True)
class Disc:
    """Occupied disc on a 3D occluder plane."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if len(self.center) != 2 or not self.radius > 0:
            raise ValueError("disc needs a 2D center and positive radius")

    def contains(self, p: np.ndarray) -> np.ndarray:
        return np.linalg.norm(p - np.array(self.center), axis=-1) < self.radius

    def boundary_distance(self, p: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(p - np.array(self.center), axis=-1) - self.radius)


FlatShape = Union[Interval, Rect, Disc]


@dataclass(frozen=True)
class FlatOccluder:
    """Absorbing set lying in the plane at depth ``height`` (parallel to the walls)."""

    height: float
    shapes: tuple

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        if not self.shapes:
            raise ValueError("flat occluder needs at least one occupied shape")
        if not self.height > 0:
            raise ValueError("occluder height must be positive")

    @property
    def dim(self) -> int:
        return 2 if isinstance(self.shapes[0], Interval) else 3

    def occupied(self, p) -> np.ndarray:
        """Boolean mask, true where transverse point(s) ``p`` lie strictly inside."""
        p = np.asarray(p, float)
        out = np.zeros(p.shape[:-1], bool)
        for s in self.shapes:
            out |= s.contains(p)
        return out

    def occupancy(self, p) -> np.ndarray:
        """The occupancy function s(p): 0 on the occluder, 1 elsewhere."""
        return (~self.occupied(p)).astype(np.int8)

    def boundary_distance(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        return np.min([s.boundary_distance(p) for s in self.shapes], axis=0)

    def shifted(self, dx=0.0, dh=0.0) -> "FlatOccluder":
        """Copy displaced by ``dx`` along the first transverse axis and ``dh`` in depth."""
        moved = []
        for s in self.shapes:
            if isinstance(s, Interval):
                moved.append(Interval(s.lo + dx, s.hi + dx))
            elif isinstance(s, Rect):
                moved.append(Rect((s.lo[0] + dx, s.lo[1]), (s.hi[0] + dx, s.hi[1])))
            else:
                moved.append(Disc((s.center[0] + dx, s.center[1]), s.radius))
        return FlatOccluder(self.height + dh, tuple(moved))

    def as_general(self, n_disc_sides: int | None = None) -> "GeneralOccluder":
        """Same absorbing set expressed as generic 2D segments / 3D polygons and discs."""
        h = self.height
        prims = []
        for s in self.shapes:
            if isinstance(s, Interval):
                prims.append(Segment((s.lo, h), (s.hi, h)))
            elif isinstance(s, Rect):
                (x0, y0), (x1, y1) = s.lo, s.hi
                prims.append(Polygon([(x0, y0, h), (x1, y0, h), (x1, y1, h), (x0, y1, h)]))
            else:
                prims.append(Disc3D((*s.center, h), (0.0, 0.0, 1.0), s.radius))
        return GeneralOccluder(tuple(prims))


@dataclass(frozen=True)
class Segment:
    """Absorbing line segment in a 2D world."""

    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))

    def hits(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        a, b = np.array(self.a), np.array(self.b)
        r = q - p
        s = b - a
        denom = r[..., 0] * s[1] - r[..., 1] * s[0]
        ap = a - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (ap[..., 0] * s[1] - ap[..., 1] * s[0]) / denom
            u = (ap[..., 0] * r[..., 1] - ap[..., 1] * r[..., 0]) / denom
        ok = np.abs(denom) > _EPS
        return ok & (t > 0) & (t < 1) & (u > 0) & (u < 1)


def _plane_crossing(p, q, point, normal):
    """Parameter and location where segment p->q crosses a plane (nan if parallel)."""
    d = q - p
    denom = d @ normal
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((point - p) @ normal) / denom
    t = np.where(np.abs(denom) > _EPS, t, np.nan)
    return t, p + t[..., None] * d


@dataclass(frozen=True)
class Polygon:
    """Planar convex absorbing polygon in 3D (vertices in order)."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 3:
            raise ValueError("polygon needs >= 3 vertices in 3D")
        object.__setattr__(self, "vertices", tuple(map(tuple, v)))

    @cached_property
    def _frame(self):
        v = np.array(self.vertices)
        n = np.cross(v[1] - v[0], v[2] - v[0])
        n /= np.linalg.norm(n)
        return v, n

    def hits(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        v, n = self._frame
        t, x = _plane_crossing(p, q, v[0], n)
        inside = (t > 0) & (t < 1)
        for k in range(len(v)):
            e = v[(k + 1) % len(v)] - v[k]
            inside &= (np.cross(e, x - v[k]) @ n) > 0
        return inside


@dataclass(frozen=True)
class Disc3D:
    """Absorbing disc with arbitrary orientation in 3D."""

    center: tuple
    normal: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "normal", tuple(float(v) for v in self.normal))
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")

    def hits(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        c = np.array(self.center, float)
        n = np.array(self.normal, float)
        n = n / np.linalg.norm(n)
        t, x = _plane_crossing(p, q, c, n)
        return (t > 0) & (t < 1) & (np.linalg.norm(x - c, axis=-1) < self.radius)


@dataclass(frozen=True)
class GeneralOccluder:
    """Collection of absorbing primitives; blocks a ray if any primitive does."""

    primitives: tuple

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))


Occluder = Union[FlatOccluder, GeneralOccluder]


def _depth_span(prim) -> tuple[float, float]:
    """Smallest and largest depth (last coordinate) reached by a primitive."""
    if isinstance(prim, Segment):
        d = (prim.a[-1], prim.b[-1])
    elif isinstance(prim, Polygon):
        d = tuple(v[-1] for v in prim.vertices)
    else:
        n = np.array(prim.normal) / np.linalg.norm(prim.normal)
        half = prim.radius * np.sqrt(max(0.0, 1.0 - n[-1] ** 2))
        d = (prim.center[-1] - half, prim.center[-1] + half)
    return float(min(d)), float(max(d))


# ---------------------------------------------------------------------------
# Visibility
# ---------------------------------------------------------------------------

def segment_blocked(a, b, occ: GeneralOccluder) -> np.ndarray:
    """True where the open segment ``a -> b`` passes through the occluder interior.

    ``a`` and ``b`` broadcast against each other, with coordinates on the last
    axis; the result has the broadcast leading shape.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape[:-1], bool)
    for prim in occ.primitives:
        out |= prim.hits(a, b)
    return out


def flat_visibility(x, z, occ: FlatOccluder, D: float) -> np.ndarray:
    """Closed-form visibility ``s(alpha*x + (1 - alpha)*z)`` with ``alpha = H / D``.

    ``x`` (hidden wall) and ``z`` (illumination wall) are transverse
    coordinates; in a 2D world scalars are accepted.
    """
    alpha = occ.height / D
    if not 0 < alpha < 1:
        raise ValueError("occluder must lie strictly between the walls")
    x = np.asarray(x, float)
    z = np.asarray(z, float)
    if occ.dim == 2:
        x = x[..., None] if x.ndim == 0 or x.shape[-1] != 1 else x
        z = z[..., None] if z.ndim == 0 or z.shape[-1] != 1 else z
    return occ.occupancy(alpha * x + (1 - alpha) * z)


def _flat_crossing(x, z, occ: FlatOccluder):
    depth_x = x[..., -1]
    depth_z = z[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = (occ.height - depth_z) / (depth_x - depth_z)
    between = (alpha > 0) & (alpha < 1)
    p = alpha[..., None] * x[..., :-1] + (1 - alpha[..., None]) * z[..., :-1]
    return between, p


def visibility(x, z, occluders: Sequence[Occluder]) -> np.ndarray:
    """Product of per-occluder visibilities between points ``x`` and ``z``.

    Flat occluders use the closed form at the plane crossing; general
    occluders use the segment test.  Returns an ``int8`` array of 0/1.
    """
    x = np.asarray(x, float)
    z = np.asarray(z, float)
    shape = np.broadcast_shapes(x.shape, z.shape)[:-1]
    v = np.ones(shape, np.int8)
    for occ in occluders:
        if isinstance(occ, FlatOccluder):
            between, p = _flat_crossing(x, z, occ)
            blocked = between & occ.occupied(p)
        else:
            blocked = segment_blocked(x, z, occ)
        v = v * (~blocked).astype(np.int8)
    return v


def visibility_matrix(pairs, patches: PatchSet, occluders: Sequence[Occluder]) -> np.ndarray:
    """Binary K x N matrix with entries ``V(x_n, l_k) V(x_n, c_k)``.

    ``pairs`` is an array-like of shape (K, 2, d) holding (laser, camera) points.
    """
    pairs = np.asarray(pairs, float)
    if pairs.ndim != 3 or pairs.shape[1] != 2 or len(pairs) == 0 or len(patches) == 0:
        raise ValueError("need a nonempty (K, 2, d) pair array and nonempty patches")
    x = patches.centers[None, :, :]
    vl = visibility(x, pairs[:, None, 0, :], occluders)
    vc = visibility(x, pairs[:, None, 1, :], occluders)
    return vl * vc


# ---------------------------------------------------------------------------
# Scene
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Scene:
    """Parallel illumination / hidden walls separated by ``D`` plus occluders."""

    illumination: Wall
    hidden: Wall
    D: float
    occluders: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "occluders", tuple(self.occluders))
        if self.illumination.dim != self.hidden.dim:
            raise ValueError("walls must share a dimension")
        n = self.illumination.normal
        if not np.allclose(np.abs(n @ self.hidden.normal), 1.0, atol=1e-12):
            raise ValueError("walls must be parallel")
        sep = float((self.hidden.origin - self.illumination.origin) @ n)
        if not self.D > 0 or abs(sep - self.D) > 1e-9 * max(1.0, self.D):
            raise ValueError(f"wall separation {sep} does not match D={self.D}")
        for occ in self.occluders:
            if isinstance(occ, FlatOccluder):
                if occ.dim != self.dim:
                    raise ValueError("occluder dimension does not match the scene")
                if not 0 < occ.height < self.D:
                    raise ValueError("flat occluder must satisfy 0 < H < D")
            else:
                z0 = self.illumination.depth
                for prim in occ.primitives:
                    lo, hi = _depth_span(prim)
                    if not (z0 < lo and hi < z0 + self.D):
                        raise ValueError("occluder primitives must not touch either wall")

    @property
    def dim(self) -> int:
        return self.illumination.dim

    @property
    def patches(self) -> PatchSet:
        return self.hidden.patches

    def without_occluders(self) -> "Scene":
        return Scene(self.illumination, self.hidden, self.D, ())

    def with_occluders(self, occluders) -> "Scene":
        return Scene(self.illumination, self.hidden, self.D, tuple(occluders))

    def with_depth(self, D: float) -> "Scene":
        """Move the hidden wall to depth ``D``; occluders keep their absolute position."""
        origin = np.array(self.hidden.origin)
        origin[-1] = self.illumination.depth + D
        hidden = Wall(origin, self.hidden.axes, self.hidden.extents,
                      self.hidden.counts, self.hidden.normal)
        return Scene(self.illumination, hidden, D, self.occluders)


def room(width=1.0, D=2.0, n_hidden=100, n_illum=100, occluders=()) -> Scene:
    """2D-world room: both walls span ``[0, width]`` transversally."""
    illum = Wall.at_depth(0.0, [0.0], [width], (n_illum,), facing=+1)
    hidden = Wall.at_depth(D, [0.0], [width], (n_hidden,), facing=-1)
    return Scene(illum, hidden, D, tuple(occluders))


# ---------------------------------------------------------------------------
# JSON description
# ---------------------------------------------------------------------------

def _wall_from_dict(d: dict) -> Wall:
    return Wall(np.asarray(d["origin"], float), np.asarray(d["axes"], float),
                tuple(d["extents"]), tuple(d["counts"]), np.asarray(d["normal"], float))


def _wall_to_dict(w: Wall) -> dict:
    return {"origin": w.origin.tolist(), "axes": w.axes.tolist(),
            "extents": list(w.extents), "counts": list(w.counts), "normal": w.normal.tolist()}


def _occluder_from_dict(d: dict) -> Occluder:
    kind = d.get("type", "flat")
    if kind == "flat":
        shapes = [Interval(*iv) for iv in d.get("intervals", [])]
        shapes += [Rect(r["lo"], r["hi"]) for r in d.get("rects", [])]
        shapes += [Disc(c["center"], c["radius"]) for c in d.get("discs", [])]
        return FlatOccluder(float(d["H"]), tuple(shapes))
    if kind == "general":
        prims = [Segment(*s) for s in d.get("segments", [])]
        prims += [Polygon(p) for p in d.get("polygons", [])]
        prims += [Disc3D(c["center"], c["normal"], c["radius"]) for c in d.get("discs", [])]
        return GeneralOccluder(tuple(prims))
    raise ValueError(f"unknown occluder type {kind!r}")


def _occluder_to_dict(occ: Occluder) -> dict:
    if isinstance(occ, FlatOccluder):
        out = {"type": "flat", "H": occ.height}
        iv = [[s.lo, s.hi] for s in occ.shapes if isinstance(s, Interval)]
        rc = [{"lo": list(s.lo), "hi": list(s.hi)} for s in occ.shapes if isinstance(s, Rect)]
        dc = [{"center": list(s.center), "radius": s.radius} for s in occ.shapes if isinstance(s, Disc)]
        for key, val in (("intervals", iv), ("rects", rc), ("discs", dc)):
            if val:
                out[key] = val
        return out
    out = {"type": "general"}
    seg = [[list(p.a), list(p.b)] for p in occ.primitives if isinstance(p, Segment)]
    pol = [[list(v) for v in p.vertices] for p in occ.primitives if isinstance(p, Polygon)]
    dsc = [{"center": list(p.center), "normal": list(p.normal), "radius": p.radius}
           for p in occ.primitives if isinstance(p, Disc3D)]
    for key, val in (("segments", seg), ("polygons", pol), ("discs", dsc)):
        if val:
            out[key] = val
    return out


def scene_from_dict(d: dict) -> Scene:
    """Build a scene from its JSON form (all lengths in meters).

    Either full wall descriptions (``illumination_wall``/``hidden_wall``) or
    the 2D shorthand ``{"room": {"width": 1, "n_hidden": 100}}`` are accepted.
    """
    occluders = tuple(_occluder_from_dict(o) for o in d.get("occluders", []))
    D = float(d["D"])
    if "room" in d:
        r = d["room"]
        return room(r.get("width", 1.0), D, r.get("n_hidden", 100), r.get("n_illum", 100), occluders)
    return Scene(_wall_from_dict(d["illumination_wall"]), _wall_from_dict(d["hidden_wall"]),
                 D, occluders)


def scene_to_dict(scene: Scene) -> dict:
    return {
        "D": scene.D,
        "illumination_wall": _wall_to_dict(scene.illumination),
        "hidden_wall": _wall_to_dict(scene.hidden),
        "occluders": [_occluder_to_dict(o) for o in scene.occluders],
    }


def load_scene(path) -> Scene:
    with open(Path(path)) as fh:
        return scene_from_dict(json.load(fh))
