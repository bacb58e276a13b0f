import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hcce.coordmap import CoordinateMap
from hcce.correspondence import (
    BACK,
    FRONT,
    MID,
    CorrespondenceSet,
    build_correspondences,
    interp_count,
    sample_between,
)
from hcce.geometry import avg_nn_distance, raycast_front_back
from conftest import random_pose


def tiny_map(front, back, mask):
    h, w = mask.shape
    f = np.full((h, w, 3), np.nan)
    b = np.full((h, w, 3), np.nan)
    f[mask] = front
    b[mask] = back
    return CoordinateMap(mask, f, b)


def segment_map(lengths, d_bar=0.01):
    """One row of pixels whose front/back points are ``lengths`` apart along z."""
    n = len(lengths)
    mask = np.ones((1, n), bool)
    front = np.zeros((n, 3))
    front[:, 0] = np.arange(n) * 0.1
    back = front.copy()
    back[:, 2] = lengths
    return tiny_map(front, back, mask)


class TestInterpCount:
    def test_same_point(self):
        assert interp_count([1, 2, 3], [1, 2, 3], 0.01) == 0

    def test_five(self):
        assert interp_count([0, 0, 0], [0, 0, 0.05], 0.01) == 5

    def test_just_below(self):
        assert interp_count([0, 0, 0], [0, 0, 0.0099], 0.01) == 0

    @pytest.mark.parametrize("d", [0.0, -1.0])
    def test_bad_dbar(self, d):
        with pytest.raises(ValueError):
            interp_count([0, 0, 0], [0, 0, 1], d)

    def test_vectorized(self):
        q2 = np.array([[0, 0, 0.031], [0, 0, 0.0], [0.02, 0, 0]])
        assert interp_count(np.zeros((3, 3)), q2, 0.01).tolist() == [3, 0, 2]


class TestSampleBetween:
    def test_zero(self):
        assert sample_between([0, 0, 1], [0, 0, 0], 0).shape == (0, 3)

    def test_midpoint(self):
        np.testing.assert_allclose(sample_between([0, 0, 1], [0, 0, 0], 1), [[0, 0, 0.5]])

    def test_equal_gaps(self):
        s = sample_between([0, 0, 0.06], [0, 0, 0], 5)
        # a ascending walks from q2 towards q1
        pts = np.vstack([[0, 0, 0], s, [0, 0, 0.06]])
        np.testing.assert_allclose(np.linalg.norm(np.diff(pts, axis=0), axis=1), 0.01, atol=1e-15)

    @given(st.integers(1, 50), st.lists(st.floats(-1, 1), min_size=6, max_size=6))
    def test_interior_and_collinear(self, n, coords):
        q1, q2 = np.array(coords[:3]), np.array(coords[3:])
        s = sample_between(q1, q2, n)
        seg = q2 - q1
        length = np.linalg.norm(seg)
        if length == 0:
            return
        resid = np.linalg.norm(np.cross(s - q1, seg), axis=1) / length
        assert np.all(resid < 1e-9 * max(length, 1e-300) + 1e-15)
        along = (s - q2) @ (q1 - q2) / length ** 2  # this is a
        assert np.all((along > 0) & (along < 1))


class TestBuild:
    def test_front_only(self):
        cmap = segment_map([0.02, 0.0, 0.05])
        cs = build_correspondences(cmap, "f")
        assert len(cs) == 3
        assert np.all(cs.source == FRONT)

    def test_back_only(self):
        cs = build_correspondences(segment_map([0.02, 0.01, 0.05]), "b")
        assert np.all(cs.source == BACK)

    def test_bf_doubles(self):
        cs = build_correspondences(segment_map([0.02, 0.01, 0.05]), "bf")
        assert len(cs) == 6
        assert cs.source.tolist() == [FRONT, BACK] * 3

    def test_bfu_seven_per_pixel(self):
        cs = build_correspondences(segment_map([0.05] * 4), "bfu", d_bar=0.01)
        assert len(cs) == 28
        assert cs.group_sizes.tolist() == [7] * 4
        assert cs.source[:7].tolist() == [FRONT, BACK] + [MID] * 5

    def test_mid_order_a_ascending(self):
        cs = build_correspondences(segment_map([0.05]), "bfu", d_bar=0.01)
        mids = cs.points[cs.source == MID]
        # a ascending means moving from back (z = 0.05) towards front (z = 0)
        np.testing.assert_allclose(mids[:, 2], [0.05 * (1 - a) for a in np.arange(1, 6) / 6], atol=1e-15)

    def test_coincident_surfaces_emitted_once(self):
        cs = build_correspondences(segment_map([0.0, 0.03]), "bfu", d_bar=0.01)
        assert cs.group_sizes.tolist() == [1, 5]
        assert cs.source[0] == FRONT

    def test_groups_are_pixel_indices(self):
        mask = np.zeros((3, 4), bool)
        mask[0, 1] = mask[2, 3] = mask[1, 0] = True
        pts = np.arange(9, dtype=float).reshape(3, 3)
        cs = build_correspondences(tiny_map(pts, pts + 1, mask), "bf")
        assert cs.group.tolist() == [1, 1, 4, 4, 11, 11]
        np.testing.assert_array_equal(cs.pixels[::2], [[1.5, 0.5], [0.5, 1.5], [3.5, 2.5]])

    def test_empty_mask(self):
        cs = build_correspondences(CoordinateMap.empty(4, 3), "bfu")
        assert len(cs) == 0 and cs.n_groups == 0

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            build_correspondences(segment_map([0.01]), "fb")

    def test_max_interp_cap(self):
        cs = build_correspondences(segment_map([1.0]), "bfu", d_bar=1e-6, max_interp=10)
        assert len(cs) == 12

    def test_auto_dbar_uses_both_surfaces(self, icosphere, K):
        cmap = raycast_front_back(icosphere, random_pose(np.random.default_rng(0)), K)
        cs = build_correspondences(cmap, "bfu")
        f, b = cmap.front[cmap.mask], cmap.back[cmap.mask]
        same = np.all(f == b, axis=1)
        assert cs.d_bar == avg_nn_distance(np.vstack([f, b[~same]]))

    def test_auto_dbar_subsamples(self, icosphere, K):
        cmap = raycast_front_back(icosphere, random_pose(np.random.default_rng(0)), K)
        cs = build_correspondences(cmap, "bfu", max_nn_points=500)
        f, b = cmap.front[cmap.mask], cmap.back[cmap.mask]
        pts = np.vstack([f, b[~np.all(f == b, axis=1)]])
        stride = -(-len(pts) // 500)
        assert cs.d_bar == avg_nn_distance(pts[::stride])


class TestRenderedInvariants:
    @pytest.fixture
    def rendered(self, builtin_mesh, K):
        pose = random_pose(np.random.default_rng(11))
        return pose, raycast_front_back(builtin_mesh, pose, K)

    def test_mode_monotonicity(self, rendered):
        _, cmap = rendered
        sets = {m: build_correspondences(cmap, m) for m in ("f", "bf", "bfu")}
        as_set = lambda cs: {(tuple(p), tuple(q), s) for p, q, s in zip(cs.pixels, cs.points, cs.source)}  # noqa: E731
        assert as_set(sets["f"]) <= as_set(sets["bf"]) <= as_set(sets["bfu"])

    def test_mids_are_convex_combinations(self, rendered):
        _, cmap = rendered
        cs = build_correspondences(cmap, "bfu")
        starts = cs.group_starts
        owner = np.repeat(np.arange(cs.n_groups), cs.group_sizes)
        mid = cs.source == MID
        f = cs.points[starts][owner[mid]]
        b = cs.points[starts + 1][owner[mid]]
        seg = f - b
        length = np.linalg.norm(seg, axis=1)
        resid = np.linalg.norm(np.cross(cs.points[mid] - b, seg), axis=1) / length
        assert np.all(resid < 1e-9 * length)
        a = np.einsum("ij,ij->i", cs.points[mid] - b, seg) / length ** 2
        assert np.all((a > 0) & (a < 1))

    def test_reprojection_under_true_pose(self, rendered, K):
        pose, cmap = rendered
        cs = build_correspondences(cmap, "bfu")
        cam = pose.apply(cs.points)
        uv = np.stack([K.fx * cam[:, 0] / cam[:, 2] + K.cx, K.fy * cam[:, 1] / cam[:, 2] + K.cy], axis=1)
        assert np.max(np.linalg.norm(uv - cs.pixels, axis=1)) <= 0.71

    def test_deterministic(self, rendered):
        _, cmap = rendered
        assert build_correspondences(cmap, "bfu").equals(build_correspondences(cmap, "bfu"))


class TestSetType:
    def test_rejects_unsorted_groups(self):
        with pytest.raises(ValueError):
            CorrespondenceSet(np.zeros((2, 2)), np.zeros((2, 3)), [0, 0], [3, 1])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            CorrespondenceSet(np.zeros((2, 2)), np.zeros((3, 3)), [0, 0], [0, 1])

    def test_select_keeps_groups(self):
        cs = build_correspondences(segment_map([0.05] * 3), "bfu", d_bar=0.01)
        sub = cs.select(cs.source != MID)
        assert sub.n_groups == 3 and len(sub) == 6

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(0, 0.2), min_size=1, max_size=30))
    def test_counts_match_formula(self, lengths):
        cs = build_correspondences(segment_map(lengths), "bfu", d_bar=0.01)
        want = [1 if l == 0 else 2 + int(np.floor(l / 0.01)) for l in lengths]
        assert cs.group_sizes.tolist() == want
