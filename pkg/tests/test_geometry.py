import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ballcover import (Ball, BallSystem, DegenerateInput, HalfSpace, Orientation,
                       PairRelation, Tolerances, TrivialVerdict, classify_pair,
                       hyperplane, preprocess, strict_membership)
from oracles import sample_on_sphere, sphere_pair_intersection_samples


def ball(center, radius):
    return Ball(np.array(center, dtype=float), radius)


class TestClassifyPair:
    def test_disjoint(self):
        assert classify_pair(ball([0, 0], 1), ball([3, 0], 1)) is PairRelation.DISJOINT

    def test_first_inside_second(self):
        assert classify_pair(ball([0, 0], 1), ball([0.5, 0], 3)) \
            is PairRelation.FIRST_INSIDE_SECOND

    def test_crossing(self):
        # circle equations x^2+y^2=1 and (x-2)^2+y^2=4 meet at (1/4, +-sqrt(15)/4)
        a, b = ball([0, 0], 1), ball([2, 0], 2)
        assert classify_pair(a, b) is PairRelation.CROSSING_SPHERES
        pts = np.array([[0.25, np.sqrt(15) / 4], [0.25, -np.sqrt(15) / 4]])
        for p in pts:
            assert abs(np.linalg.norm(p - a.center) - a.radius) < 1e-12
            assert abs(np.linalg.norm(p - b.center) - b.radius) < 1e-12

    def test_tangent_band(self):
        assert classify_pair(ball([0, 0], 1), ball([2, 0], 1)) is PairRelation.TANGENT

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            classify_pair(ball([0, 0], 1), ball([0, 0, 0], 1))

    def test_coincident_centers(self):
        with pytest.raises(ValueError, match="coincident"):
            classify_pair(ball([1, 2], 1), ball([1, 2], 2))

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_symmetry_with_tag_mirroring(self, seed):
        rng = np.random.default_rng(seed)
        a = ball(rng.normal(0, 3, 2), float(rng.uniform(0.2, 4)))
        b = ball(rng.normal(0, 3, 2), float(rng.uniform(0.2, 4)))
        if np.array_equal(a.center, b.center):
            return
        mirrored = {
            PairRelation.FIRST_INSIDE_SECOND: PairRelation.SECOND_INSIDE_FIRST,
            PairRelation.SECOND_INSIDE_FIRST: PairRelation.FIRST_INSIDE_SECOND,
        }
        rel = classify_pair(a, b)
        assert classify_pair(b, a) is mirrored.get(rel, rel)


class TestHyperplane:
    def test_quarter_plane_example(self):
        hs = hyperplane(ball([0, 0], 1), ball([2, 0], 2), Orientation.KEEP_OTHER_SIDE)
        # -4 x1 + 1 <= 0, i.e. x1 >= 1/4 (unit-normalized)
        assert np.allclose(hs.normal, [-1, 0])
        assert hs.offset == pytest.approx(-0.25)

    def test_symmetric_equal_radii(self):
        hs = hyperplane(ball([0, 0], 1), ball([0, 1], 1), Orientation.KEEP_OTHER_SIDE)
        assert np.allclose(hs.normal, [0, -1])
        assert hs.offset == pytest.approx(-0.5)

    def test_orientation_flip(self):
        hs = hyperplane(ball([0, 0], 1), ball([0, 1], 1), Orientation.KEEP_REF_SIDE)
        assert np.allclose(hs.normal, [0, 1])
        assert hs.offset == pytest.approx(0.5)

    def test_non_crossing_rejected(self):
        with pytest.raises(ValueError, match="cross"):
            hyperplane(ball([0, 0], 1), ball([3, 0], 1), Orientation.KEEP_OTHER_SIDE)

    @pytest.mark.parametrize("seed", range(8))
    def test_radical_plane_property(self, seed):
        # every point on both spheres lies on the hyperplane
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        c1 = rng.normal(0, 2, n)
        c2 = rng.normal(0, 2, n)
        r1 = float(rng.uniform(1.0, 3.0))
        d = np.linalg.norm(c1 - c2)
        r2 = float(rng.uniform(abs(d - r1) + 0.2, d + r1 - 0.2))
        a, b = Ball(c1, r1), Ball(c2, r2)
        if classify_pair(a, b) is not PairRelation.CROSSING_SPHERES:
            pytest.skip("degenerate draw")
        hs = hyperplane(a, b, Orientation.KEEP_OTHER_SIDE)
        pts = sphere_pair_intersection_samples(rng, c1, r1, c2, r2, 200)
        scale = max(1.0, abs(hs.offset))
        assert np.max(np.abs(pts @ hs.normal - hs.offset)) <= 1e-9 * scale

    @pytest.mark.parametrize("seed", range(8))
    def test_sphere_slice_equivalences(self, seed):
        # on the reference sphere, the half-space test is exactly ball
        # membership (other-side) / complement membership (ref-side)
        rng = np.random.default_rng(100 + seed)
        ref = Ball(rng.normal(0, 2, 3), float(rng.uniform(1.0, 2.5)))
        d = float(rng.uniform(0.5, ref.radius * 1.4))
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        other = Ball(ref.center + d * direction,
                     float(rng.uniform(abs(d - ref.radius) + 0.2, d + ref.radius - 0.2)))
        if classify_pair(ref, other) is not PairRelation.CROSSING_SPHERES:
            pytest.skip("degenerate draw")
        keep_other = hyperplane(ref, other, Orientation.KEEP_OTHER_SIDE)
        keep_ref = hyperplane(ref, other, Orientation.KEEP_REF_SIDE)
        band = 1e-9
        for x in sample_on_sphere(rng, ref.center, ref.radius, 1000):
            h = keep_other.value(x)
            if abs(h) <= band:
                continue
            assert (h < 0.0) == (other.signed_sq_distance(x) < 0.0)
            assert (keep_ref.value(x) < 0.0) == (other.signed_sq_distance(x) > 0.0)

    @pytest.mark.parametrize("seed", range(4))
    def test_difference_containment(self, seed):
        # points of other \ ref satisfy the other-side inequality;
        # points of ref \ other satisfy the ref-side inequality
        rng = np.random.default_rng(200 + seed)
        ref = Ball(np.zeros(2), 1.5)
        other = Ball(np.array([1.0, 0.3]), 1.2)
        assert classify_pair(ref, other) is PairRelation.CROSSING_SPHERES
        keep_other = hyperplane(ref, other, Orientation.KEEP_OTHER_SIDE)
        keep_ref = hyperplane(ref, other, Orientation.KEEP_REF_SIDE)
        box_lo, box_hi = np.array([-3.0, -3.0]), np.array([3.0, 3.0])
        pts = rng.uniform(box_lo, box_hi, size=(4000, 2))
        for x in pts:
            in_ref = ref.signed_sq_distance(x) < 0
            in_other = other.signed_sq_distance(x) < 0
            if in_other and not in_ref:
                assert keep_other.value(x) <= 1e-12
            if in_ref and not in_other:
                assert keep_ref.value(x) <= 1e-12


class TestHalfSpace:
    def test_normalized_on_construction(self):
        hs = HalfSpace(np.array([3.0, 4.0]), 10.0)
        assert np.linalg.norm(hs.normal) == pytest.approx(1.0)
        assert hs.offset == pytest.approx(2.0)

    def test_zero_normal_rejected(self):
        with pytest.raises(DegenerateInput):
            HalfSpace(np.zeros(2), 1.0)


class TestPreprocess:
    def test_identical_centers_rejected(self):
        with pytest.raises(ValueError, match="coincident"):
            preprocess([ball([0, 0], 1)], [ball([0, 0], 1)])

    def test_disjoint_intersection_balls(self):
        verdict = preprocess([ball([0, 0], 2), ball([10, 0], 1)], [ball([1, 1], 1)])
        assert isinstance(verdict, TrivialVerdict)
        assert verdict.covered and "empty" in verdict.reason

    def test_superset_intersection_ball_dropped(self):
        result = preprocess([ball([0, 0], 2), ball([0.1, 0], 5)], [ball([2, 0], 2)])
        assert isinstance(result, BallSystem)
        assert result.p == 1
        assert result.lam[0].radius == 2

    def test_lambda_ball_inside_union_ball(self):
        verdict = preprocess([ball([0, 0], 1)], [ball([0.1, 0], 4)])
        assert isinstance(verdict, TrivialVerdict) and verdict.covered

    def test_unreachable_union_ball_dropped(self):
        result = preprocess([ball([0, 0], 1)], [ball([10, 0], 1), ball([0.5, 0], 1)])
        assert isinstance(result, BallSystem)
        assert result.q == 1

    def test_contained_union_ball_dropped(self):
        result = preprocess([ball([0, 0], 3)],
                            [ball([1, 0], 1.5), ball([1.2, 0], 0.5)])
        assert isinstance(result, BallSystem)
        assert result.q == 1
        assert result.v[0].radius == 1.5

    def test_all_union_balls_dropped_gives_witness(self):
        verdict = preprocess([ball([0, 0], 1)], [ball([10, 0], 1)])
        assert isinstance(verdict, TrivialVerdict)
        assert not verdict.covered
        assert verdict.witness is not None
        assert np.linalg.norm(verdict.witness) < 1.0
        assert np.linalg.norm(verdict.witness - [10, 0]) > 1.0

    def test_tangent_pair_degenerate(self):
        with pytest.raises(DegenerateInput):
            preprocess([ball([0, 0], 1), ball([2, 0], 1)], [ball([1, 1], 1)])


class TestStrictMembership:
    def test_margins(self):
        system = BallSystem(2, (ball([0, 0], 2),), (ball([3, 0], 1),))
        assert strict_membership(system, np.array([0.5, 0.0]))
        assert not strict_membership(system, np.array([2.5, 0.0]))   # inside v ball
        assert not strict_membership(system, np.array([0, 2.0]))     # on lam sphere
