"""Convex quadratic programming over half-space constraints.

A primal active-set method: starting from a feasible point (the Chebyshev
center by default), it alternates equality-constrained solves with
constraint addition along blocked steps and removal of the most negative
multiplier.  Every optimum is returned with a KKT certificate.  Positive
semidefinite Hessians with curvature-free directions (as in the epigraph
formulation below) are handled through a null-space fallback.

The objective convention is  f(x) = 1/2 x^T Q x + g^T x;  callers add
their own constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDecision, MaxIterationsExceeded
from .geometry import Ball, HalfSpace, Tolerances
from .polyhedron import HPolyhedron

_STEP_TOL = 1e-11
_MULT_TOL = 1e-9


class QpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    BELOW_THRESHOLD = "below_threshold"


@dataclass
class QpOutcome:
    status: QpStatus
    argument: np.ndarray | None = None
    value: float | None = None
    active_set: tuple = ()
    kkt_residual: float | None = None
    multipliers: np.ndarray | None = None


@dataclass
class ConvexQp:
    """minimize 1/2 x^T Q x + g^T x over an H-polyhedron.

    Q must be symmetric positive semidefinite (eigenvalue floor -1e-10
    after symmetrization).
    """

    quadratic: np.ndarray
    linear: np.ndarray
    constraints: HPolyhedron

    def __post_init__(self):
        q = np.asarray(self.quadratic, dtype=float)
        g = np.asarray(self.linear, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("quadratic term must be a square matrix")
        if g.shape != (q.shape[0],):
            raise ValueError("linear term length must match the quadratic term")
        if self.constraints.dim != q.shape[0]:
            raise ValueError("constraint arity must match the variable count")
        sym = 0.5 * (q + q.T)
        if np.max(np.abs(sym - q)) > 1e-8 * (1.0 + np.max(np.abs(q))):
            raise ValueError("quadratic term must be symmetric")
        offdiag = sym - np.diag(np.diag(sym))
        if np.any(offdiag):
            floor = float(np.min(np.linalg.eigvalsh(sym)))
        else:
            floor = float(np.min(np.diag(sym)))
        if floor < -1e-10 * (1.0 + np.max(np.abs(sym))):
            raise ValueError(f"quadratic term is not positive semidefinite (floor {floor:.3e})")
        self.quadratic = sym
        self.linear = g

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.quadratic @ x + self.linear @ x)

    def gradient(self, x) -> np.ndarray:
        return self.quadratic @ np.asarray(x, dtype=float) + self.linear


def kkt_residual(problem: ConvexQp, x, active, multipliers) -> float:
    """Independent KKT check: the largest violation among stationarity,
    primal feasibility, dual feasibility, and complementary slackness."""
    x = np.asarray(x, dtype=float)
    a = problem.constraints.a
    b = problem.constraints.b
    grad = problem.gradient(x)
    active = list(active)
    mu = np.asarray(multipliers, dtype=float) if len(active) else np.zeros(0)
    stat = grad.copy()
    for idx, m in zip(active, mu):
        stat += m * a[idx]
    residual = float(np.max(np.abs(stat)))
    if a.shape[0]:
        residual = max(residual, float(np.max(a @ x - b)))
    if mu.size:
        residual = max(residual, float(np.max(-mu)))
        slack = a[active] @ x - b[active]
        residual = max(residual, float(np.max(np.abs(mu * slack))))
    return residual


def _kkt_solve(q, a_w, rhs_top, rhs_bot):
    """Solve [[Q, A^T], [A, 0]] [x; mu] = [rhs_top; rhs_bot] with one step
    of iterative refinement; falls back to least squares when singular."""
    n = q.shape[0]
    w = a_w.shape[0]
    kkt = np.zeros((n + w, n + w))
    kkt[:n, :n] = q
    if w:
        kkt[:n, n:] = a_w.T
        kkt[n:, :n] = a_w
    rhs = np.concatenate([rhs_top, rhs_bot])
    try:
        sol = np.linalg.solve(kkt, rhs)
        sol += np.linalg.solve(kkt, rhs - kkt @ sol)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:n], sol[n:]


def _direction(problem, x, work_rows):
    """Step to the optimum of the equality-constrained subproblem at x.

    Returns ``(p, curved)``: ``curved`` is False when p is a descent
    direction of zero curvature (the subproblem is unbounded along it),
    in which case the caller must find a blocking constraint.

    The regular path is a direct dense KKT solve; the null-space
    eigendecomposition below is the fallback for singular systems
    (semidefinite Hessians with too few active rows).
    """
    q = problem.quadratic
    grad = problem.gradient(x)
    n = q.shape[0]
    a_w = problem.constraints.a[work_rows] if work_rows else np.zeros((0, n))
    w = a_w.shape[0]
    kkt = np.zeros((n + w, n + w))
    kkt[:n, :n] = q
    if w:
        kkt[:n, n:] = a_w.T
        kkt[n:, :n] = a_w
    rhs = np.concatenate([-grad, np.zeros(w)])
    try:
        sol = np.linalg.solve(kkt, rhs)
        residual = float(np.max(np.abs(kkt @ sol - rhs)))
        if residual <= 1e-9 * (1.0 + float(np.max(np.abs(rhs)))):
            p = sol[:n]
            if w:
                # the step must lie in the active-set null space exactly;
                # solve noise off it makes iterates creep on ill-conditioned
                # nearly-parallel rows
                gram = a_w @ a_w.T
                p = p - a_w.T @ np.linalg.lstsq(gram, a_w @ p, rcond=None)[0]
            return p, True
    except np.linalg.LinAlgError:
        pass
    if work_rows:
        qmat, _ = np.linalg.qr(a_w.T, mode="complete")
        z = qmat[:, w:]
    else:
        z = np.eye(n)
    if z.shape[1] == 0:
        return np.zeros(n), True
    h = z.T @ q @ z
    rhs = -z.T @ grad
    evals, evecs = np.linalg.eigh(h)
    scale = max(1.0, float(evals[-1])) if evals.size else 1.0
    null = evals < 1e-12 * scale
    if np.any(null):
        coeff = evecs[:, null].T @ rhs
        if np.max(np.abs(coeff)) > 1e-10 * (1.0 + np.linalg.norm(rhs)):
            # descent along a curvature-free direction: subproblem unbounded
            j = int(np.argmax(np.abs(coeff)))
            y = evecs[:, null][:, j] * np.sign(coeff[j])
            return z @ y, False
        pos = ~null
        y = evecs[:, pos] @ ((evecs[:, pos].T @ rhs) / evals[pos]) if np.any(pos) \
            else np.zeros(h.shape[0])
    else:
        y = np.linalg.solve(h, rhs)
    return z @ y, True


def solve_qp(problem: ConvexQp, start=None, stop_below: float | None = None,
             tol: Tolerances | None = None) -> QpOutcome:
    """Minimize the QP with a primal active-set loop.

    ``start`` may supply a feasible point; otherwise the Chebyshev center
    of the constraints is used (an infeasible system yields status
    INFEASIBLE).  When ``stop_below`` is given, the solve may return early
    with status BELOW_THRESHOLD as soon as an iterate's value drops below
    it; iterates are feasible throughout, so the early value is a valid
    upper bound on the minimum.
    """
    tol = tol or Tolerances()
    poly = problem.constraints
    a = poly.a
    b = poly.b
    m = a.shape[0]
    n = problem.quadratic.shape[0]

    x = None if start is None else np.asarray(start, dtype=float)
    if x is None or (m and float(np.max(a @ x - b)) > tol.lp):
        center, radius = poly.chebyshev(tol)
        if center is None or radius < -tol.lp:
            return QpOutcome(QpStatus.INFEASIBLE)
        x = np.asarray(center, dtype=float)
    if stop_below is not None and problem.value(x) < stop_below:
        return QpOutcome(QpStatus.BELOW_THRESHOLD, argument=x, value=problem.value(x))

    work: list[int] = []
    cap = 50 * max(m, 1) + 25
    for _ in range(cap):
        p, curved = _direction(problem, x, work)
        step_scale = _STEP_TOL * (1.0 + float(np.linalg.norm(x)))
        if curved and float(np.linalg.norm(p)) <= step_scale:
            a_w = a[work] if work else np.zeros((0, n))
            grad = problem.gradient(x)
            if work:
                mu = np.linalg.lstsq(a_w.T, -grad, rcond=None)[0]
            else:
                mu = np.zeros(0)
            if mu.size == 0 or float(np.min(mu)) >= -_MULT_TOL:
                return _certify(problem, x, work, tol)
            work.pop(int(np.argmin(mu)))
            continue
        # ratio test toward the nearest blocking constraint
        limit = 1.0 if curved else np.inf
        blocker = -1
        if m:
            ap = a @ p
            slack = b - a @ x
            for i in range(m):
                if i in work or ap[i] <= tol.pivot:
                    continue
                ratio = slack[i] / ap[i]
                if ratio < limit - 1e-15:
                    limit = ratio
                    blocker = i
        if not curved and blocker < 0:
            raise MaxIterationsExceeded(
                "objective unbounded below over the constraints (non-convex data?)")
        if limit > 0.0:
            x = x + min(limit, 1.0 if curved else limit) * p
        if blocker >= 0 and limit < (1.0 if curved else np.inf):
            work.append(blocker)
        if stop_below is not None and problem.value(x) < stop_below:
            return QpOutcome(QpStatus.BELOW_THRESHOLD, argument=x,
                             value=problem.value(x))
    raise MaxIterationsExceeded("active-set loop hit its safety cap")


def _certify(problem, x, work, tol):
    """Polish the optimum with a direct KKT solve on the final active set
    and attach the certificate."""
    a = problem.constraints.a
    b = problem.constraints.b
    n = problem.quadratic.shape[0]
    work = sorted(work)
    a_w = a[work] if work else np.zeros((0, n))
    b_w = b[work] if work else np.zeros(0)
    x_ref, mu = _kkt_solve(problem.quadratic, a_w, -problem.linear, b_w)
    feasible = (not a.shape[0]) or float(np.max(a @ x_ref - b)) <= tol.lp
    if feasible and np.all(np.isfinite(x_ref)):
        x = x_ref
    else:
        mu = np.linalg.lstsq(a_w.T, -problem.gradient(x), rcond=None)[0] if work \
            else np.zeros(0)
    mu = np.maximum(mu, 0.0) if mu.size else mu
    residual = kkt_residual(problem, x, work, mu)
    return QpOutcome(QpStatus.OPTIMAL, argument=x, value=problem.value(x),
                     active_set=tuple(work), kkt_residual=residual,
                     multipliers=mu)


@dataclass(frozen=True)
class InteriorPoint:
    """A point strictly inside the intersection, with its squared clearance:
    ||point - c_i||^2 <= R_i^2 - margin for every intersection ball."""

    point: np.ndarray
    margin: float


def interior_point_of_intersection(lam, tol: Tolerances | None = None) -> InteriorPoint | None:
    """Deepest point of the intersection of the given balls.

    Minimizes  max_i (||x - c_i||^2 - R_i^2)  through its epigraph
    formulation: over (x, s), minimize ||x||^2 + s subject to
    s >= -2 c_i . x + ||c_i||^2 - R_i^2.  At the optimum the objective
    equals the min-max value f*.  Returns the point and margin -f* when
    f* is clearly negative, None when f* is clearly positive (empty
    intersection), and raises ``DegenerateDecision`` inside the band.
    """
    tol = tol or Tolerances()
    lam = list(lam)
    if not lam:
        raise ValueError("need at least one ball")
    n = lam[0].dim
    rows = []
    for ball in lam:
        normal = np.append(-2.0 * ball.center, -1.0)
        offset = ball.radius ** 2 - float(ball.center @ ball.center)
        rows.append(HalfSpace(normal, offset))
    poly = HPolyhedron(n + 1, rows)
    q = np.zeros((n + 1, n + 1))
    q[:n, :n] = 2.0 * np.eye(n)
    g = np.zeros(n + 1)
    g[n] = 1.0
    problem = ConvexQp(q, g, poly)

    x0 = np.mean([ball.center for ball in lam], axis=0)
    s0 = max(float(np.sum((x0 - ball.center) ** 2)) - ball.radius ** 2 for ball in lam)
    start = np.append(x0, s0 - float(x0 @ x0) + 1.0)
    out = solve_qp(problem, start=start, tol=tol)
    assert out.status is QpStatus.OPTIMAL
    f_star = out.value
    band = tol.base * (1.0 + max(ball.radius ** 2 for ball in lam))
    if f_star <= -band:
        return InteriorPoint(out.argument[:n], -f_star)
    if f_star >= band:
        return None
    raise DegenerateDecision(
        "deepest point of the intersection sits on the boundary within tolerance",
        margin=f_star)
