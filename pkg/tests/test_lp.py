import math

import numpy as np
import pytest

from ballcover import (Ball, HalfSpace, LinearProgram, LpStatus, Tolerances,
                       chebyshev_center, separating_direction, solve_lp)


def hs(normal, offset):
    return HalfSpace(np.array(normal, dtype=float), offset)


class TestSolveLp:
    def test_bounded(self):
        out = solve_lp(LinearProgram(np.array([1.0]), [hs([1], 3.0)]))
        assert out.status is LpStatus.OPTIMAL
        assert out.value == pytest.approx(3.0)

    def test_unbounded_with_ray(self):
        out = solve_lp(LinearProgram(np.array([1.0]), [hs([-1], 0.0)]))
        assert out.status is LpStatus.UNBOUNDED
        assert out.ray is not None and out.ray[0] > 0

    def test_infeasible(self):
        out = solve_lp(LinearProgram(np.array([0.0]), [hs([1], -1.0), hs([-1], 0.0)]))
        assert out.status is LpStatus.INFEASIBLE

    def test_bounds_translate_to_rows(self):
        lp = LinearProgram(np.array([1.0, 1.0]), [], bounds=[(0.0, 2.0), (-1.0, 5.0)])
        out = solve_lp(lp)
        assert out.status is LpStatus.OPTIMAL
        assert out.value == pytest.approx(7.0)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError, match="arity"):
            LinearProgram(np.array([1.0, 0.0]), [hs([1], 1.0)])

    @pytest.mark.parametrize("seed", range(20))
    def test_optimum_feasible_and_matches_dual(self, seed):
        # random bounded feasible LP; dual built by transposition
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        m = int(rng.integers(n + 1, 8))
        a = np.vstack([np.eye(n), -np.eye(n), rng.normal(0, 1, (m, n))])
        b = np.concatenate([np.full(2 * n, 5.0), rng.uniform(0.5, 3.0, m)])
        c = rng.normal(0, 1, n)
        rows = [HalfSpace(ai, bi) for ai, bi in zip(a, b)]
        # HalfSpace normalizes rows; recover the solver-facing data
        a_used = np.array([r.normal for r in rows])
        b_used = np.array([r.offset for r in rows])
        primal = solve_lp(LinearProgram(c, rows))
        assert primal.status is LpStatus.OPTIMAL
        assert np.max(a_used @ primal.argument - b_used) <= 1e-8
        # dual: min b.y s.t. A^T y = c, y >= 0 == max -b.y
        mm = a_used.shape[0]
        eq_rows = [HalfSpace(a_used.T[i], c[i]) for i in range(n)]
        eq_rows += [HalfSpace(-a_used.T[i], -c[i]) for i in range(n)]
        dual = solve_lp(LinearProgram(-b_used, eq_rows,
                                      bounds=[(0.0, None)] * mm))
        assert dual.status is LpStatus.OPTIMAL
        assert -dual.value == pytest.approx(primal.value, abs=1e-6)


class TestChebyshevCenter:
    def test_unit_square(self):
        rows = [hs([1, 0], 1), hs([-1, 0], 1), hs([0, 1], 1), hs([0, -1], 1)]
        center, radius = chebyshev_center(rows, 2)
        assert np.allclose(center, [0, 0], atol=1e-9)
        assert radius == pytest.approx(1.0)

    def test_zero_width_slab(self):
        center, radius = chebyshev_center([hs([1, 0], 0), hs([-1, 0], 0)], 2)
        assert radius == pytest.approx(0.0, abs=1e-9)

    def test_halfplane_unbounded(self):
        center, radius = chebyshev_center([hs([-1, 0], -0.25)], 2)
        assert math.isinf(radius)
        assert center is not None and center[0] >= 0.25

    def test_empty_polyhedron_negative_radius(self):
        center, radius = chebyshev_center([hs([1, 0], 0.0), hs([-1, 0], -1.0)], 2)
        assert radius < 0
        assert center is None

    def test_no_rows_is_all_space(self):
        center, radius = chebyshev_center([], 3)
        assert math.isinf(radius)

    @pytest.mark.parametrize("seed", range(10))
    def test_center_has_claimed_clearance(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 4))
        m = int(rng.integers(n + 1, 9))
        a = np.vstack([np.eye(n), -np.eye(n), rng.normal(0, 1, (m, n))])
        b = np.concatenate([np.full(2 * n, 3.0), rng.uniform(0.5, 2.0, m)])
        rows = [HalfSpace(ai, bi) for ai, bi in zip(a, b)]
        center, radius = chebyshev_center(rows, n)
        assert radius > 0
        worst = max(r.value(center) for r in rows)
        assert worst <= -radius + 1e-8


class TestSeparatingDirection:
    def test_single_lambda_ball(self):
        d = separating_direction(Ball(np.zeros(2), 1.0), [Ball(np.array([-1.0, 0]), 1.0)], [])
        assert d is not None
        assert (np.zeros(2) - np.array([-1.0, 0])) @ d >= 1.0 - 1e-9

    def test_opposed_centers(self):
        ref = Ball(np.zeros(2), 1.0)
        d = separating_direction(ref, [Ball(np.array([-1.0, 0]), 1.0)],
                                 [Ball(np.array([1.0, 0]), 1.0)])
        assert d is not None
        assert (ref.center - np.array([-1.0, 0])) @ d >= 1.0 - 1e-9
        assert (ref.center - np.array([1.0, 0])) @ d <= -1.0 + 1e-9

    def test_contradictory_centers(self):
        ref = Ball(np.zeros(2), 1.0)
        d = separating_direction(ref, [Ball(np.array([-1.0, 0]), 1.0),
                                       Ball(np.array([1.0, 0]), 1.0)], [])
        assert d is None
