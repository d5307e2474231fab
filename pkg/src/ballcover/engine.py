"""The coverage decision procedure.

For each union ball the engine builds the attached polyhedron, checks its
dimensionality, and solves the distance extremum problems over it.  A
feasible point strictly inside the reference ball together with one
strictly outside (case A) certifies that the intersection sticks out of
the union; a witness point is then extracted by crossing the reference
sphere and stepping outward.  When every reference ball ends in case B,
the intersection avoids the union's boundary entirely and a single
interior point settles the verdict by direct membership.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDecision, WitnessExtractionFailed
from .geometry import Ball, BallSystem, Tolerances, strict_membership
from .polyhedron import (FromLambda, FromV, HPolyhedron, build_polyhedron,
                         enumerate_vertices, shortcut_unbounded)
from .qp import ConvexQp, QpStatus, interior_point_of_intersection, solve_qp


class Case(enum.Enum):
    CASE_A = "case_a"                        # sphere crossed: not covered
    CASE_B_MIN_OUTSIDE = "case_b_min_outside"
    CASE_B_MAX_INSIDE = "case_b_max_inside"
    INFEASIBLE_PLUS = "infeasible_plus"      # intersection inside this ball
    INFEASIBLE_MINUS = "infeasible_minus"    # ball redundant in the union
    VOLUME_ZERO = "volume_zero"


@dataclass
class SubproblemCertificate:
    """Outcome of the extremum tests for one reference ball.

    Values are in the shifted objective ||x - c||^2 - R^2 of the reference
    ball; ``max_value`` is +inf when the polyhedron is unbounded, with
    ``ray`` the recession direction and ``shortcut`` naming the check that
    established it.
    """

    ref_index: int
    case: Case
    x_minus: np.ndarray | None = None
    x_plus: np.ndarray | None = None
    ray: np.ndarray | None = None
    min_value: float | None = None
    max_value: float | None = None
    shortcut: str | None = None
    interior_hint: np.ndarray | None = None   # a deep feasible point of the polyhedron


@dataclass
class DecisionReport:
    covered: bool
    witness: np.ndarray | None = None
    trivial_reason: str | None = None
    certificates: list = field(default_factory=list)
    i_empty: bool = False
    timings: dict = field(default_factory=dict)
    witness_verified: bool = True


class _Phase:
    """Accumulates wall-clock durations per phase of the decision."""

    def __init__(self):
        self.durations = {}

    def add(self, name, t0):
        self.durations[name] = self.durations.get(name, 0.0) + (time.perf_counter() - t0)


def verify_witness(system: BallSystem, x, tol: Tolerances | None = None) -> bool:
    """Solver-free certificate check for "not covered" witnesses."""
    return strict_membership(system, x, tol)


def _banded(value: float, band: float, ref_index: int, what: str) -> bool:
    """True for clearly-positive, False for clearly-negative, raises inside
    the tolerance band where no strict branch can be certified."""
    if value >= band:
        return True
    if value <= -band:
        return False
    raise DegenerateDecision(
        f"{what} lies within tolerance of the reference sphere", ref_index=ref_index,
        margin=value)


def _subproblem(system: BallSystem, ref_index: int, tol: Tolerances,
                use_shortcuts: bool, phase: _Phase) -> SubproblemCertificate:
    ref = system.v[ref_index]
    band = tol.decision(ref.radius)
    shift = float(ref.center @ ref.center) - ref.radius ** 2

    t0 = time.perf_counter()
    poly = build_polyhedron(system, ref_index, tol)
    phase.add("build", t0)

    t0 = time.perf_counter()
    center, radius = poly.chebyshev(tol)
    threshold = poly.fulldim_threshold(tol)
    if radius <= threshold:
        plus = poly.restricted(FromLambda)
        _, r_plus = plus.chebyshev(tol)
        if r_plus <= plus.fulldim_threshold(tol):
            phase.add("volume", t0)
            return SubproblemCertificate(ref_index, Case.INFEASIBLE_PLUS)
        minus = poly.restricted(FromV)
        _, r_minus = minus.chebyshev(tol)
        phase.add("volume", t0)
        if r_minus <= minus.fulldim_threshold(tol):
            return SubproblemCertificate(ref_index, Case.INFEASIBLE_MINUS)
        return SubproblemCertificate(ref_index, Case.VOLUME_ZERO)
    phase.add("volume", t0)

    # minimum of ||x - c||^2 - R^2 over the polyhedron
    t0 = time.perf_counter()
    problem = ConvexQp(2.0 * np.eye(system.dim), -2.0 * ref.center, poly)
    outcome = solve_qp(problem, start=center, stop_below=-band - shift, tol=tol)
    if outcome.status is QpStatus.INFEASIBLE:   # defensive; chebyshev said nonempty
        phase.add("qp_min", t0)
        return SubproblemCertificate(ref_index, Case.VOLUME_ZERO)
    min_value = outcome.value + shift
    phase.add("qp_min", t0)
    if outcome.status is QpStatus.OPTIMAL and _banded(min_value, band, ref_index,
                                                      "the distance minimum"):
        return SubproblemCertificate(ref_index, Case.CASE_B_MIN_OUTSIDE,
                                     min_value=min_value)
    x_minus = outcome.argument

    t0 = time.perf_counter()
    if use_shortcuts:
        evidence = shortcut_unbounded(poly, tol, feasible_point=center)
        if evidence is not None:
            phase.add("qp_max", t0)
            return SubproblemCertificate(ref_index, Case.CASE_A, x_minus=x_minus,
                                         ray=evidence.ray, min_value=min_value,
                                         max_value=math.inf, shortcut=evidence.via,
                                         interior_hint=center)
    vrep = enumerate_vertices(poly, tol)
    if vrep.rays:
        phase.add("qp_max", t0)
        return SubproblemCertificate(ref_index, Case.CASE_A, x_minus=x_minus,
                                     ray=vrep.rays[0], min_value=min_value,
                                     max_value=math.inf, shortcut="enumeration",
                                     interior_hint=center)
    values = [ref.signed_sq_distance(v) for v in vrep.vertices]
    phase.add("qp_max", t0)
    if not values:                              # defensive: nonempty and bounded
        return SubproblemCertificate(ref_index, Case.VOLUME_ZERO)
    best = int(np.argmax(values))
    max_value = values[best]
    if not _banded(max_value, band, ref_index, "the distance maximum"):
        return SubproblemCertificate(ref_index, Case.CASE_B_MAX_INSIDE,
                                     min_value=min_value, max_value=max_value)
    return SubproblemCertificate(ref_index, Case.CASE_A, x_minus=x_minus,
                                 x_plus=vrep.vertices[best], min_value=min_value,
                                 max_value=max_value, interior_hint=center)


def _try_crossing(check_system, ref, x_minus, x_plus, ray, outward, tol):
    x_minus = np.asarray(x_minus, dtype=float)
    if ray is not None:
        direction = np.asarray(ray, dtype=float)
    else:
        direction = np.asarray(x_plus, dtype=float) - x_minus
    norm = float(np.linalg.norm(direction))
    if norm <= tol.pivot:
        return None
    u = direction / norm

    # unique positive root of ||x_minus + t u - c||^2 = R^2
    w = x_minus - ref.center
    bq = 2.0 * float(u @ w)
    cq = float(w @ w) - ref.radius ** 2
    disc = bq * bq - 4.0 * cq
    if disc <= 0.0 or cq >= 0.0:
        return None
    t0 = 0.5 * (-bq + math.sqrt(disc))
    if ray is None and t0 >= norm:
        return None
    crossing = x_minus + t0 * u

    sign = 1.0 if outward else -1.0
    delta = ref.radius * 1e-3
    for _ in range(60):
        candidate = crossing + sign * delta * u
        if strict_membership(check_system, candidate, tol):
            return candidate
        delta *= 0.5
    return None


def _witness_from_crossing(check_system: BallSystem, ref: Ball, x_minus,
                           x_plus=None, ray=None, outward: bool = True,
                           tol: Tolerances | None = None,
                           interior_hint=None) -> np.ndarray:
    """Cross the reference sphere along the segment (or ray) from x_minus
    and step off it until the candidate passes strict membership in
    ``check_system``.  ``outward`` steps away from the reference center,
    otherwise into it.

    The extremum points may sit on a common face of the polyhedron, in
    which case the crossing lies on its boundary and no step verifies;
    pulling the endpoints toward an interior point (``interior_hint``,
    typically the Chebyshev center) by an escalating amount moves the
    segment through the open polyhedron, where sphere points are
    guaranteed to belong to the uncovered region."""
    tol = tol or Tolerances()
    witness = _try_crossing(check_system, ref, x_minus, x_plus, ray, outward, tol)
    if witness is not None:
        return witness
    if interior_hint is not None:
        hint = np.asarray(interior_hint, dtype=float)
        x_minus = np.asarray(x_minus, dtype=float)
        for theta in (1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.3):
            near = x_minus + theta * (hint - x_minus)
            if ref.signed_sq_distance(near) >= 0.0:
                continue
            if ray is not None:
                witness = _try_crossing(check_system, ref, near, None, ray,
                                        outward, tol)
            else:
                far = np.asarray(x_plus, dtype=float)
                far = far + theta * (hint - far)
                if ref.signed_sq_distance(far) <= 0.0:
                    continue
                witness = _try_crossing(check_system, ref, near, far, None,
                                        outward, tol)
            if witness is not None:
                return witness
    raise WitnessExtractionFailed(
        "no verifiable point within the halving budget around the crossing")


def extract_witness(cert: SubproblemCertificate, system: BallSystem,
                    ref_index: int, tol: Tolerances | None = None) -> np.ndarray:
    """Turn a case-A certificate into a verified point of the intersection
    that lies outside the whole union."""
    if cert.case is not Case.CASE_A:
        raise ValueError("witness extraction needs a case-A certificate")
    tol = tol or Tolerances()
    ref = system.v[ref_index]
    hint = cert.interior_hint
    if hint is None:
        poly = build_polyhedron(system, ref_index, tol)
        hint, radius = poly.chebyshev(tol)
        if radius <= poly.fulldim_threshold(tol):
            hint = None
    return _witness_from_crossing(system, ref, cert.x_minus, x_plus=cert.x_plus,
                                  ray=cert.ray, outward=True, tol=tol,
                                  interior_hint=hint)


def _finish_with_interior_point(system, certs, tol, timing, t_total):
    t0 = time.perf_counter()
    interior = interior_point_of_intersection(system.lam, tol)
    timing.add("final_test", t0)
    if interior is None:
        report = DecisionReport(True, certificates=certs, i_empty=True,
                                timings=timing.durations)
    else:
        margins = [ball.signed_sq_distance(interior.point) for ball in system.v]
        bands = [tol.decision(ball.radius) for ball in system.v]
        if any(m <= -b for m, b in zip(margins, bands)):
            report = DecisionReport(True, certificates=certs, timings=timing.durations)
        elif all(m >= b for m, b in zip(margins, bands)):
            report = DecisionReport(False, witness=interior.point, certificates=certs,
                                    timings=timing.durations)
        else:
            worst = min(margins, key=abs)
            raise DegenerateDecision(
                "interior point sits on a union sphere within tolerance", margin=worst)
    timing.durations["total"] = time.perf_counter() - t_total
    return report


def _case_a_report(system, cert, certs, tol, timing, t_total):
    t0 = time.perf_counter()
    try:
        witness = extract_witness(cert, system, cert.ref_index, tol)
        verified = True
    except WitnessExtractionFailed:
        witness = None
        verified = False
    timing.add("witness", t0)
    timing.durations["total"] = time.perf_counter() - t_total
    return DecisionReport(False, witness=witness, certificates=certs,
                          timings=timing.durations, witness_verified=verified)


def decide(system: BallSystem, config: Tolerances | None = None, *,
           use_shortcuts: bool = True, early_exit: bool = True) -> DecisionReport:
    """Decide whether the intersection of the open balls is covered by the
    union of the closed balls.

    The system must already be preprocessed (see
    :func:`ballcover.geometry.preprocess`).  A "not covered" report
    carries a witness point that passes the solver-free strict membership
    check; "covered" reports either come from a per-ball containment
    certificate or from the final interior-point membership test.
    ``use_shortcuts`` toggles the unboundedness shortcuts, ``early_exit``
    the return at the first case-A ball; neither changes the verdict.
    """
    tol = config or Tolerances()
    timing = _Phase()
    t_total = time.perf_counter()
    certs: list[SubproblemCertificate] = []
    first_case_a = None
    for j in range(system.q):
        cert = _subproblem(system, j, tol, use_shortcuts, timing)
        certs.append(cert)
        if cert.case is Case.INFEASIBLE_PLUS:
            timing.durations["total"] = time.perf_counter() - t_total
            return DecisionReport(True, certificates=certs, timings=timing.durations)
        if cert.case is Case.CASE_A:
            if early_exit:
                return _case_a_report(system, cert, certs, tol, timing, t_total)
            if first_case_a is None:
                first_case_a = cert
    if first_case_a is not None:
        return _case_a_report(system, first_case_a, certs, tol, timing, t_total)
    return _finish_with_interior_point(system, certs, tol, timing, t_total)


def decide_concave(system: BallSystem, config: Tolerances | None = None, *,
                   use_shortcuts: bool = True) -> DecisionReport:
    """Specialized decision for a single union ball.

    With one union ball the polyhedron has no union-side rows, and the
    maximum test alone can certify coverage: if the farthest feasible
    point stays inside the ball, the whole intersection does, with no
    final membership test needed.
    """
    if system.q != 1:
        raise ValueError("the concave path requires exactly one union ball")
    tol = config or Tolerances()
    timing = _Phase()
    t_total = time.perf_counter()
    cert = _subproblem(system, 0, tol, use_shortcuts, timing)
    certs = [cert]
    if cert.case in (Case.INFEASIBLE_PLUS, Case.CASE_B_MAX_INSIDE):
        timing.durations["total"] = time.perf_counter() - t_total
        return DecisionReport(True, certificates=certs, timings=timing.durations)
    if cert.case is Case.CASE_A:
        return _case_a_report(system, cert, certs, tol, timing, t_total)
    return _finish_with_interior_point(system, certs, tol, timing, t_total)


def decide_instance(lam, v, config: Tolerances | None = None, *,
                    use_shortcuts: bool = True, early_exit: bool = True) -> DecisionReport:
    """Preprocess raw ball lists and decide; convenience front door.

    Verdicts settled during preprocessing are reported with their reason
    and, for uncovered ones, the interior-point witness."""
    from .geometry import TrivialVerdict, preprocess

    tol = config or Tolerances()
    t0 = time.perf_counter()
    prepared = preprocess(lam, v, tol)
    elapsed = time.perf_counter() - t0
    if isinstance(prepared, TrivialVerdict):
        return DecisionReport(prepared.covered, witness=prepared.witness,
                              trivial_reason=prepared.reason,
                              i_empty="empty" in prepared.reason,
                              timings={"preprocess": elapsed, "total": elapsed})
    report = decide(prepared, tol, use_shortcuts=use_shortcuts, early_exit=early_exit)
    report.timings["preprocess"] = elapsed
    report.timings["total"] = report.timings.get("total", 0.0) + elapsed
    return report
