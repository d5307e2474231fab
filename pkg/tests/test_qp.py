import numpy as np
import pytest

from ballcover import (Ball, DegenerateDecision, HalfSpace, QpStatus, Tolerances)
from ballcover.polyhedron import HPolyhedron
from ballcover.qp import (ConvexQp, interior_point_of_intersection,
                          kkt_residual, solve_qp)
from oracles import brute_force_qp_min


def hs(normal, offset):
    return HalfSpace(np.array(normal, dtype=float), offset)


def projection(point, rows):
    """Projection of ``point`` onto the rows, as 1/2-free QP data."""
    point = np.array(point, dtype=float)
    n = point.shape[0]
    return ConvexQp(2.0 * np.eye(n), -2.0 * point, HPolyhedron(n, rows))


class TestSolveQp:
    def test_project_onto_halfplane(self):
        out = solve_qp(projection([0, 0], [hs([-1, 0], -1.0)]))
        assert out.status is QpStatus.OPTIMAL
        assert np.allclose(out.argument, [1, 0], atol=1e-9)
        assert float(out.argument @ out.argument) == pytest.approx(1.0)
        assert out.kkt_residual <= 1e-8

    def test_project_onto_quarter_constraint(self):
        out = solve_qp(projection([0, 0], [hs([-1, 0], -0.25)]))
        assert np.allclose(out.argument, [0.25, 0], atol=1e-12)
        assert float(out.argument @ out.argument) == pytest.approx(1.0 / 16.0)

    def test_project_onto_shifted_square(self):
        rows = [hs([-1, 0], -1), hs([1, 0], 2), hs([0, -1], -1), hs([0, 1], 2)]
        out = solve_qp(projection([0, 0], rows))
        assert np.allclose(out.argument, [1, 1], atol=1e-9)

    def test_infeasible(self):
        out = solve_qp(projection([0, 0], [hs([1, 0], -1.0), hs([-1, 0], 0.0)]))
        assert out.status is QpStatus.INFEASIBLE

    def test_early_exit_below_threshold(self):
        out = solve_qp(projection([0, 0], [hs([-1, 0], -1.0)]), stop_below=5.0)
        assert out.status is QpStatus.BELOW_THRESHOLD
        # the iterate is feasible, so its value bounds the minimum above
        assert out.value < 5.0

    def test_psd_validation(self):
        with pytest.raises(ValueError, match="semidefinite"):
            ConvexQp(-np.eye(2), np.zeros(2), HPolyhedron(2, []))

    @pytest.mark.parametrize("seed", range(60))
    def test_matches_exhaustive_active_sets(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, 10))
        a = rng.normal(0, 1, (m, n))
        b = rng.uniform(-0.3, 2.0, m)
        rows = [HalfSpace(ai, bi) for ai, bi in zip(a, b)]
        poly = HPolyhedron(n, rows)
        target = rng.normal(0, 2, n)
        problem = ConvexQp(2.0 * np.eye(n), -2.0 * target, poly)
        out = solve_qp(problem)
        brute_val, brute_x = brute_force_qp_min(problem.quadratic, problem.linear,
                                                poly.a, poly.b)
        if out.status is QpStatus.INFEASIBLE:
            assert brute_val is None
            return
        assert brute_val is not None
        assert out.value == pytest.approx(brute_val, abs=1e-7)
        assert np.allclose(out.argument, brute_x, atol=1e-6)
        assert out.kkt_residual <= 1e-8

    @pytest.mark.parametrize("seed", range(20))
    def test_kkt_residual_independent_check(self, seed):
        rng = np.random.default_rng(500 + seed)
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 8))
        a = rng.normal(0, 1, (m, n))
        b = rng.uniform(0.2, 2.0, m)
        poly = HPolyhedron(n, [HalfSpace(ai, bi) for ai, bi in zip(a, b)])
        problem = ConvexQp(2.0 * np.eye(n), -2.0 * rng.normal(0, 2, n), poly)
        out = solve_qp(problem)
        if out.status is not QpStatus.OPTIMAL:
            return
        recomputed = kkt_residual(problem, out.argument, out.active_set,
                                  out.multipliers)
        assert recomputed <= 1e-8

    @pytest.mark.parametrize("seed", range(10))
    def test_projection_idempotent(self, seed):
        rng = np.random.default_rng(900 + seed)
        n = 3
        a = rng.normal(0, 1, (6, n))
        b = rng.uniform(0.2, 2.0, 6)
        poly = HPolyhedron(n, [HalfSpace(ai, bi) for ai, bi in zip(a, b)])
        problem = ConvexQp(2.0 * np.eye(n), -2.0 * rng.normal(0, 2, n), poly)
        first = solve_qp(problem)
        if first.status is not QpStatus.OPTIMAL:
            return
        again = solve_qp(problem, start=first.argument)
        assert np.allclose(again.argument, first.argument, atol=1e-9)


class TestInteriorPoint:
    def test_single_ball(self):
        got = interior_point_of_intersection([Ball(np.zeros(2), 1.0)])
        assert np.allclose(got.point, [0, 0], atol=1e-9)
        assert got.margin == pytest.approx(1.0)

    def test_two_ball_lens(self):
        got = interior_point_of_intersection([Ball(np.array([-1.0, 0]), 2.0),
                                              Ball(np.array([1.0, 0]), 2.0)])
        assert np.allclose(got.point, [0, 0], atol=1e-8)
        assert got.margin == pytest.approx(3.0)

    def test_disjoint_balls_empty(self):
        got = interior_point_of_intersection([Ball(np.zeros(2), 1.0),
                                              Ball(np.array([3.0, 0]), 1.0)])
        assert got is None

    def test_tangent_balls_degenerate(self):
        with pytest.raises(DegenerateDecision):
            interior_point_of_intersection([Ball(np.zeros(2), 1.0),
                                            Ball(np.array([2.0, 0]), 1.0)])

    @pytest.mark.parametrize("seed", range(15))
    def test_margin_claim(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        centers = rng.normal(0, 2, (4, n))
        balls = [Ball(c, float(np.linalg.norm(c)) + 1.0) for c in centers]
        got = interior_point_of_intersection(balls)
        assert got is not None, "balls share the origin"
        for ball in balls:
            assert float(np.sum((got.point - ball.center) ** 2)) \
                <= ball.radius ** 2 - got.margin + 1e-7
