"""Small dense linear programming: two-phase tableau simplex with Bland's rule.

Used for Chebyshev centers (the full-dimensionality proxy), linear
separability probes, and feasibility checks.  Problem sizes are tiny, so
the implementation favors robustness over speed: dense arithmetic,
reduced costs recomputed from scratch at every pivot, and Bland's
anti-cycling rule throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MaxIterationsExceeded
from .geometry import Ball, HalfSpace, Tolerances

_ENTER_TOL = 1e-9
_PIVOT_TOL = 1e-10


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass
class LpOutcome:
    """Result of :func:`solve_lp`.

    ``argument``/``value`` are set for OPTIMAL; for UNBOUNDED, ``ray`` is a
    certifying recession direction of the feasible set along which the
    objective increases, and ``argument`` is the feasible point the
    simplex stopped at.
    """

    status: LpStatus
    argument: np.ndarray | None = None
    value: float | None = None
    ray: np.ndarray | None = None


@dataclass
class LinearProgram:
    """maximize objective . y  subject to half-space constraints on y.

    Variables are free unless restricted through ``bounds``, a list of
    ``(lo, hi)`` pairs (either end may be None) which are translated into
    extra constraint rows internally.
    """

    objective: np.ndarray
    constraints: list[HalfSpace] = field(default_factory=list)
    bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        k = self.objective.shape[0]
        for hs in self.constraints:
            if hs.dim != k:
                raise ValueError(f"constraint arity {hs.dim} != objective arity {k}")
        if self.bounds is not None and len(self.bounds) != k:
            raise ValueError("bounds list must match the number of variables")


def _rows_as_arrays(lp: LinearProgram):
    k = lp.objective.shape[0]
    rows = [(hs.normal, hs.offset) for hs in lp.constraints]
    if lp.bounds is not None:
        eye = np.eye(k)
        for j, bound in enumerate(lp.bounds):
            if bound is None:
                continue
            lo, hi = bound
            if lo is not None:
                rows.append((-eye[j], -float(lo)))
            if hi is not None:
                rows.append((eye[j], float(hi)))
    if rows:
        a = np.array([r[0] for r in rows], dtype=float)
        b = np.array([r[1] for r in rows], dtype=float)
    else:
        a = np.zeros((0, k))
        b = np.zeros(0)
    return a, b


def _bland_iterate(tableau, basis, cost, allowed, max_iter):
    """Run primal simplex pivots in place until optimal or unbounded.

    ``tableau`` is (m, ncols+1) with the rhs in the last column; ``cost``
    is the full cost vector (maximization).  Returns ``None`` at
    optimality or the entering column index when the LP is unbounded.
    """
    m = tableau.shape[0]
    for _ in range(max_iter):
        reduced = cost - cost[basis] @ tableau[:, :-1]
        reduced[~allowed] = -np.inf
        candidates = np.nonzero(reduced > _ENTER_TOL)[0]
        if candidates.size == 0:
            return None
        enter = int(candidates[0])                     # Bland: smallest index
        col = tableau[:, enter]
        rows = np.nonzero(col > _PIVOT_TOL)[0]
        if rows.size == 0:
            return enter                               # unbounded direction
        ratios = tableau[rows, -1] / col[rows]
        best = np.min(ratios)
        ties = rows[ratios <= best + 1e-12]
        leave = int(ties[np.argmin([basis[r] for r in ties])])
        pivot = tableau[leave, enter]
        tableau[leave] /= pivot
        for i in range(m):
            if i != leave and abs(tableau[i, enter]) > 0.0:
                tableau[i] -= tableau[i, enter] * tableau[leave]
        basis[leave] = enter
    raise MaxIterationsExceeded("simplex hit its iteration cap")


def _simplex_free(c, a, b, tol: Tolerances):
    """maximize c . y over {A y <= b} with free y, by variable splitting."""
    m, k = a.shape
    nreal = 2 * k + m                                  # u, v, slacks
    neg = b < 0.0
    art_rows = np.nonzero(neg)[0]
    nart = art_rows.size
    ncols = nreal + nart

    tableau = np.zeros((m, ncols + 1))
    tableau[:, :k] = a
    tableau[:, k:2 * k] = -a
    tableau[:, -1] = b
    tableau[neg] *= -1.0                               # make rhs nonnegative
    for i in range(m):
        tableau[i, 2 * k + i] = -1.0 if neg[i] else 1.0
    basis = np.empty(m, dtype=int)
    basis[:] = 2 * k + np.arange(m)                    # slacks
    for t, i in enumerate(art_rows):
        tableau[i, nreal + t] = 1.0
        basis[i] = nreal + t

    max_iter = 2000 + 50 * (m + ncols)
    allowed = np.ones(ncols, dtype=bool)

    if nart:
        cost1 = np.zeros(ncols)
        cost1[nreal:] = -1.0
        enter = _bland_iterate(tableau, basis, cost1, allowed, max_iter)
        assert enter is None, "phase-1 objective is bounded by construction"
        phase1 = cost1[basis] @ tableau[:, -1]
        if phase1 < -tol.lp:
            return LpOutcome(LpStatus.INFEASIBLE)
        # pivot artificials out of the basis; a row where that is
        # impossible is linearly dependent and gets dropped
        drop = []
        for r in range(m):
            if basis[r] < nreal:
                continue
            pivots = np.nonzero(np.abs(tableau[r, :nreal]) > _PIVOT_TOL)[0]
            if pivots.size == 0:
                drop.append(r)
                continue
            enter = int(pivots[0])
            pivot = tableau[r, enter]
            tableau[r] /= pivot
            for i in range(m):
                if i != r and abs(tableau[i, enter]) > 0.0:
                    tableau[i] -= tableau[i, enter] * tableau[r]
            basis[r] = enter
        if drop:
            keep = [i for i in range(m) if i not in drop]
            tableau = tableau[keep]
            basis = basis[keep]
            m = len(keep)
        allowed[nreal:] = False

    cost2 = np.zeros(ncols)
    cost2[:k] = c
    cost2[k:2 * k] = -c
    enter = _bland_iterate(tableau, basis, cost2, allowed, max_iter)

    solution = np.zeros(ncols)
    solution[basis] = tableau[:, -1]
    y = solution[:k] - solution[k:2 * k]

    if enter is not None:
        direction = np.zeros(ncols)
        direction[enter] = 1.0
        direction[basis] = -tableau[:, enter]
        ray = direction[:k] - direction[k:2 * k]
        return LpOutcome(LpStatus.UNBOUNDED, argument=y, ray=ray)
    return LpOutcome(LpStatus.OPTIMAL, argument=y, value=float(c @ y))


def solve_lp(lp: LinearProgram, tol: Tolerances | None = None) -> LpOutcome:
    """Solve a small dense LP exactly (up to the stated tolerances).

    Optimal arguments are re-checked for feasibility within ``tol.lp``;
    unbounded outcomes carry a certifying ray r with A r <= 0 and
    objective . r > 0.
    """
    tol = tol or Tolerances()
    a, b = _rows_as_arrays(lp)
    out = _simplex_free(lp.objective, a, b, tol)
    if out.status is LpStatus.OPTIMAL and a.shape[0]:
        worst = float(np.max(a @ out.argument - b))
        if worst > tol.lp:
            raise MaxIterationsExceeded(
                f"simplex returned an infeasible optimum (violation {worst:.3e})")
    return out


def chebyshev_center(rows, dim: int, tol: Tolerances | None = None):
    """Center and signed inradius of the largest ball inscribed in the
    polyhedron given by ``rows`` (unit-normal half-spaces in dimension
    ``dim``).

    Solves  max r  s.t.  a_i . x + r <= b_i.  The returned radius is

    * ``+inf`` when the inscribed radius is unbounded (the center is then
      some feasible point with clearance >= 1),
    * ``>= 0``  for a nonempty polyhedron (positive iff full-dimensional),
    * ``< 0``   when the polyhedron is empty (center then None).
    """
    tol = tol or Tolerances()
    rows = list(rows)
    if not rows:
        return np.zeros(dim), math.inf
    lifted = [HalfSpace(np.append(hs.normal, 1.0), hs.offset) for hs in rows]
    objective = np.zeros(dim + 1)
    objective[dim] = 1.0
    out = solve_lp(LinearProgram(objective, lifted), tol)
    if out.status is LpStatus.UNBOUNDED:
        cap = HalfSpace(objective, 1.0)
        out = solve_lp(LinearProgram(objective, lifted + [cap]), tol)
        return out.argument[:dim], math.inf
    if out.status is LpStatus.INFEASIBLE:          # cannot happen: r is free
        return None, -math.inf
    radius = float(out.value)
    if radius < -tol.lp:
        return None, radius
    return out.argument[:dim], radius


def separating_direction(ref: Ball, lam, vballs,
                         tol: Tolerances | None = None) -> np.ndarray | None:
    """Direction d with (c - c_i) . d >= 1 for every intersection ball and
    (c - c_j) . d <= -1 for every union ball, c being the reference
    center; None when no such direction exists.

    The margin 1 is a normalization only: the condition is positively
    homogeneous in d, so any strictly separating direction can be scaled
    to meet it.
    """
    tol = tol or Tolerances()
    dim = ref.dim
    if not lam and not vballs:
        d = np.zeros(dim)
        d[0] = 1.0
        return d
    rows = [HalfSpace(ball.center - ref.center, -1.0) for ball in lam]
    rows += [HalfSpace(ref.center - ball.center, -1.0) for ball in vballs]
    out = solve_lp(LinearProgram(np.zeros(dim), rows), tol)
    if out.status is not LpStatus.OPTIMAL:
        return None
    d = out.argument
    margins = [float((ref.center - ball.center) @ d) for ball in lam]
    margins += [float(-(ref.center - ball.center) @ d) for ball in vballs]
    worst = min(margins)
    if worst <= 0.0:
        return None
    return d / worst
