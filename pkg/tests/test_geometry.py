import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from occnlos.geometry import (
    Disc, Disc3D, FlatOccluder, GeneralOccluder, Interval, PatchSet, Rect, Scene, Segment,
    Wall, discretize_wall, flat_visibility, load_scene, room, scene_from_dict, scene_to_dict,
    segment_blocked, visibility, visibility_matrix,
)

from conftest import random_flat_occluder


# -- walls --------------------------------------------------------------------

def test_single_cell_wall():
    p = discretize_wall(Wall.at_depth(0.0, [0.0], [1.0], (1,)))
    assert len(p) == 1
    assert p.centers[0, 0] == pytest.approx(0.5)
    assert p.areas[0] == pytest.approx(1.0)


def test_hundred_cell_wall_midpoints():
    p = discretize_wall(Wall.at_depth(0.0, [0.0], [1.0], (100,)))
    np.testing.assert_allclose(p.centers[:, 0], 0.005 + 0.01 * np.arange(100), atol=1e-12)
    np.testing.assert_allclose(p.areas, 0.01)
    assert np.all(p.centers[:, 1] == 0.0)


def test_square_wall_partition():
    w = Wall.at_depth(1.0, [0.0, 0.0], [1.0, 1.0], (4, 4), facing=-1)
    p = w.patches
    assert len(p) == 16 and p.shape == (4, 4)
    np.testing.assert_allclose(p.areas, 0.0625)
    assert p.areas.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(p.normals, [[0, 0, -1]] * 16)


@given(st.integers(1, 7), st.integers(1, 7), st.floats(0.1, 3.0), st.floats(0.1, 3.0))
def test_patch_count_and_area(n0, n1, e0, e1):
    p = Wall.at_depth(0.0, [0.0, 0.0], [e0, e1], (n0, n1)).patches
    assert len(p) == n0 * n1
    np.testing.assert_allclose(p.areas, e0 * e1 / (n0 * n1))
    assert p.areas.sum() == pytest.approx(e0 * e1)


@pytest.mark.parametrize("kwargs, msg", [
    (dict(axes=[[1.0, 0.0], [0.0, 1.0]]), "span axes"),
    (dict(normal=[1.0, 0.0]), "normal"),
    (dict(counts=(0,)), "counts"),
])
def test_wall_validation(kwargs, msg):
    base = dict(origin=[0.0, 0.0], axes=[[1.0, 0.0]], extents=(1.0,), counts=(4,), normal=[0.0, 1.0])
    base.update(kwargs)
    with pytest.raises(ValueError, match=msg):
        Wall(np.array(base["origin"]), np.array(base["axes"]), base["extents"], base["counts"],
             np.array(base["normal"]))


def test_patchset_rejects_bad_normals():
    with pytest.raises(ValueError):
        PatchSet([[0.0, 0.0]], [[0.0, 2.0]], 1.0)


# -- scenes -------------------------------------------------------------------

def test_scene_checks_height():
    with pytest.raises(ValueError, match="0 < H < D"):
        room(D=2.0, occluders=[FlatOccluder(2.0, (Interval(0.4, 0.6),))])


def test_scene_rejects_primitive_touching_wall():
    seg = GeneralOccluder((Segment((0.2, 0.0), (0.4, 1.0)),))
    with pytest.raises(ValueError, match="touch"):
        room(D=2.0, occluders=[seg])
    room(D=2.0, occluders=[GeneralOccluder((Segment((0.2, 0.5), (0.4, 1.0)),))])


def test_scene_separation_must_match_D():
    s = room(D=2.0)
    with pytest.raises(ValueError, match="separation"):
        Scene(s.illumination, s.hidden, 1.5)


def test_with_depth_moves_hidden_wall():
    s = room(D=2.0, occluders=[FlatOccluder(1.0, (Interval(0.4, 0.6),))])
    t = s.with_depth(2.4)
    assert t.D == 2.4
    np.testing.assert_allclose(t.patches.centers[:, 1], 2.4)
    assert t.occluders == s.occluders


def test_scene_json_round_trip(tmp_path):
    s = room(D=1.5, n_hidden=10, n_illum=12,
             occluders=[FlatOccluder(0.7, (Interval(0.2, 0.3), Interval(0.6, 0.65)))])
    d = scene_to_dict(s)
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(d))
    t = load_scene(path)
    assert scene_to_dict(t) == d
    np.testing.assert_array_equal(t.patches.centers, s.patches.centers)


def test_room_shorthand():
    s = scene_from_dict({"D": 2.0, "room": {"width": 1.0, "n_hidden": 50}})
    assert len(s.patches) == 50 and s.D == 2.0


# -- segment_blocked ----------------------------------------------------------

def test_perpendicular_crossing():
    occ = GeneralOccluder((Segment((-1, 1), (1, 1)),))
    assert segment_blocked([0, 0], [0, 2], occ)


def test_disjoint_segment():
    occ = GeneralOccluder((Segment((1, 1), (2, 1)),))
    assert not segment_blocked([0, 0], [0, 2], occ)


def _disc_oracle(a, b, c, n, r):
    # Points a + t(b-a) with (p - c).n = 0, then |p - c| < r.
    d = b - a
    den = d @ n
    if abs(den) < 1e-14:
        return False
    t = ((c - a) @ n) / den
    if not 0 < t < 1:
        return False
    p = a + t * d - c
    return p @ p < r * r


def test_random_disc_matches_oracle(rng):
    c = rng.uniform(-0.5, 0.5, 3)
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    r = 0.4
    occ = GeneralOccluder((Disc3D(tuple(c), tuple(n), r),))
    a = rng.uniform(-1.5, 1.5, (1000, 3))
    b = rng.uniform(-1.5, 1.5, (1000, 3))
    got = segment_blocked(a, b, occ)
    want = np.array([_disc_oracle(a[i], b[i], c, n, r) for i in range(1000)])
    assert 30 < want.sum() < 970
    np.testing.assert_array_equal(got, want)


# -- visibility -----------------------------------------------------------------

def test_no_occluder_visible(rng):
    x = rng.uniform(0, 1, (50, 2))
    z = rng.uniform(0, 1, (50, 2))
    assert np.all(visibility(x, z, []) == 1)


def test_one_blocker_zeroes_product():
    blocker = FlatOccluder(1.0, (Interval(0.4, 0.6),))
    harmless = FlatOccluder(1.5, (Interval(0.9, 0.95),))
    x, z = np.array([0.5, 2.0]), np.array([0.5, 0.0])
    assert visibility(x, z, [harmless]) == 1
    assert visibility(x, z, [blocker, harmless]) == 0
    assert visibility(x, z, [harmless, blocker]) == 0


def test_flat_visibility_examples():
    occ = FlatOccluder(1.0, (Interval(0.4, 0.6),))
    assert flat_visibility(0.2, 0.8, occ, 2.0) == 0
    assert flat_visibility(0.9, 0.9, occ, 2.0) == 1


def test_product_equals_union_ray_test(rng):
    # Several flat occluders: per-occluder product vs one pass against all primitives.
    occs = [random_flat_occluder(rng) for _ in range(3)]
    union = GeneralOccluder(tuple(p for o in occs for p in o.as_general().primitives))
    x = np.column_stack([rng.uniform(0, 1, 10_000), np.full(10_000, 2.0)])
    z = np.column_stack([rng.uniform(0, 1, 10_000), np.zeros(10_000)])
    want = (~segment_blocked(x, z, union)).astype(int)
    np.testing.assert_array_equal(visibility(x, z, occs), want)


def test_flat_matches_general_on_grid():
    D = 2.0
    occ = FlatOccluder(0.8, (Interval(0.31, 0.47), Interval(0.7, 0.74)))
    g = np.linspace(0, 1, 201)
    xx, zz = np.meshgrid(g, g, indexing="ij")
    alpha = occ.height / D
    comb = alpha * xx + (1 - alpha) * zz
    keep = occ.boundary_distance(comb[..., None]) > 1e-9
    flat = flat_visibility(xx[..., None], zz[..., None], occ, D)
    ray = ~segment_blocked(np.stack([xx, np.full_like(xx, D)], -1),
                           np.stack([zz, np.zeros_like(zz)], -1), occ.as_general())
    np.testing.assert_array_equal(flat[keep], ray[keep].astype(np.int8))


def test_flat_matches_general_3d(rng):
    D = 1.0
    occ = FlatOccluder(0.4, (Rect((0.1, 0.2), (0.5, 0.4)), Disc((0.7, 0.7), 0.1)))
    x = rng.uniform(0, 1, (20_000, 2))
    z = rng.uniform(0, 1, (20_000, 2))
    alpha = occ.height / D
    keep = occ.boundary_distance(alpha * x + (1 - alpha) * z) > 1e-6
    flat = flat_visibility(x, z, occ, D)
    xa = np.column_stack([x, np.full(len(x), D)])
    za = np.column_stack([z, np.zeros(len(z))])
    ray = ~segment_blocked(xa, za, occ.as_general())
    assert (flat == 0).sum() > 1000
    np.testing.assert_array_equal(flat[keep], ray[keep].astype(np.int8))


def test_grazing_boundary_is_visible():
    occ = FlatOccluder(1.0, (Interval(0.4, 0.6),))
    assert flat_visibility(0.4, 0.4, occ, 2.0) == 1


def test_visibility_matrix_unoccluded_all_ones():
    s = room(n_hidden=20, n_illum=10)
    pts = s.illumination.patches.centers
    pairs = np.stack([pts[:5], pts[5:]], axis=1)
    v = visibility_matrix(pairs, s.patches, [])
    assert v.shape == (5, 20) and np.all(v == 1)


def test_visibility_matrix_is_banded():
    # alpha = 1/2 and equal grids: stepping l=c by one cell moves the shadow by one cell.
    n = 60
    occ = FlatOccluder(1.0, (Interval(0.403, 0.597),))
    s = room(D=2.0, n_hidden=n, n_illum=n, occluders=[occ])
    pts = s.illumination.patches.centers
    pairs = np.stack([pts, pts], axis=1)
    v = visibility_matrix(pairs, s.patches, s.occluders)
    zeros = [np.flatnonzero(r == 0) for r in v]
    widths = {len(z) for z in zeros[20:40]}
    assert len(widths) == 1
    starts = [z[0] for z in zeros[20:40]]
    assert np.all(np.diff(starts) == -1)
    for k in range(21, 40):
        np.testing.assert_array_equal(v[k][:-1], v[k - 1][1:])


def test_visibility_matrix_shape_errors():
    s = room(n_hidden=5, n_illum=5)
    with pytest.raises(ValueError):
        visibility_matrix(np.zeros((0, 2, 2)), s.patches, [])


@settings(max_examples=60)
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.8), st.floats(0.05, 0.2))
def test_shifted_occluder_moves_shadow(alpha, lo, width):
    occ = FlatOccluder(2.0 * alpha, (Interval(lo, lo + width),))
    moved = occ.shifted(dx=0.1)
    z = np.linspace(0, 1, 101)
    x = 0.3
    a = flat_visibility(x, z, occ, 2.0)
    b = flat_visibility(x + 0.1 / alpha, z, moved, 2.0)
    comb = alpha * x + (1 - alpha) * z
    keep = occ.boundary_distance(comb[:, None]) > 1e-9
    np.testing.assert_array_equal(a[keep], b[keep])
