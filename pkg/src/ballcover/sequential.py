"""Incremental coverage testing: grow the intersection one ball at a time.

Instead of re-running the full per-union-ball decision after each added
intersection ball, the test is centered on the new ball's own sphere: a
single polyhedron detects whether the shrunken intersection still sticks
out of the union.  When the sphere test is negative, a stored witness
settles the verdict, provided the uncovered region is known to be
connected (verified through the radius inequalities of the unboundedness
theorem); otherwise the engine falls back to the batch decision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDecision, DegenerateInput, WitnessExtractionFailed
from .geometry import (Ball, BallSystem, Orientation, PairRelation, Tolerances,
                       TrivialVerdict, classify_pair, hyperplane, preprocess)
from .polyhedron import FromLambda, FromV, HPolyhedron, enumerate_vertices, shortcut_unbounded
from .qp import ConvexQp, QpStatus, solve_qp
from .engine import _banded, _witness_from_crossing, decide


class Verdict(enum.Enum):
    STILL_UNCOVERED = "still_uncovered"
    NOW_COVERED = "now_covered"
    BALL_REDUNDANT = "ball_redundant"
    UNKNOWN = "unknown"


@dataclass
class SequentialState:
    """Rolling state of the incremental test.

    ``witness`` is a verified point of the current intersection outside
    the union; None means the intersection is covered, which is permanent
    under further additions.  ``connected_ok`` records whether the last
    addition verified the connectedness conditions.
    """

    system: BallSystem
    witness: np.ndarray | None = None
    connected_ok: bool = False


def initial_state(system: BallSystem, config: Tolerances | None = None) -> SequentialState:
    """Seed the incremental test with a batch decision on the system."""
    report = decide(system, config)
    witness = report.witness if (not report.covered and report.witness_verified) else None
    if not report.covered and witness is None:
        raise WitnessExtractionFailed("batch decision produced no verified witness")
    return SequentialState(system, witness=witness, connected_ok=False)


def connectedness_conditions(lam, vballs, ref: Ball,
                             tol: Tolerances | None = None) -> bool:
    """Strict radius inequalities guaranteeing (with ``ref`` as reference)
    an unbounded polyhedron and a connected uncovered region:
    Ri^2 < R^2 + d_i^2 for intersection balls, Rj^2 > R^2 + d_j^2 for
    union balls.  Inequalities inside the tolerance band count as
    failures, which is the conservative direction."""
    tol = tol or Tolerances()
    for ball in lam:
        d2 = float(np.sum((ref.center - ball.center) ** 2))
        margin = tol.base * (1.0 + ref.radius ** 2 + ball.radius ** 2)
        if not ball.radius ** 2 < ref.radius ** 2 + d2 - margin:
            return False
    for ball in vballs:
        d2 = float(np.sum((ref.center - ball.center) ** 2))
        margin = tol.base * (1.0 + ref.radius ** 2 + ball.radius ** 2)
        if not ball.radius ** 2 > ref.radius ** 2 + d2 + margin:
            return False
    return True


def verify_connectedness_conditions(state: SequentialState, new_ball: Ball,
                                    tol: Tolerances | None = None) -> bool:
    return connectedness_conditions(state.system.lam, state.system.v, new_ball, tol)


def _resync(lam, v, tol) -> tuple[SequentialState, Verdict]:
    """Re-derive the state with a batch decision (verdict UNKNOWN signals
    that the incremental logic alone could not certify this step)."""
    raw = BallSystem(lam[0].dim, tuple(lam), tuple(v))
    prepared = preprocess(list(lam), list(v), tol)
    if isinstance(prepared, TrivialVerdict):
        witness = None if prepared.covered else prepared.witness
        return SequentialState(raw, witness=witness), Verdict.UNKNOWN
    report = decide(prepared, tol)
    witness = report.witness if (not report.covered and report.witness_verified) else None
    return SequentialState(prepared, witness=witness), Verdict.UNKNOWN


def add_ball(state: SequentialState, new_ball: Ball,
             config: Tolerances | None = None) -> tuple[SequentialState, Verdict]:
    """Add an intersection ball and report how coverage changed.

    Returns the updated state and one of:

    * ``BALL_REDUNDANT``: the ball contains the whole intersection and is
      not added;
    * ``STILL_UNCOVERED``: a verified witness of the shrunken intersection
      outside the union is carried in the state;
    * ``NOW_COVERED``: the shrunken intersection is covered (permanent);
    * ``UNKNOWN``: the incremental logic could not certify this step and
      the state was re-derived with a batch decision.
    """
    tol = config or Tolerances()
    system = state.system
    if new_ball.dim != system.dim:
        raise ValueError(f"dimension mismatch: {new_ball.dim} vs {system.dim}")
    if state.witness is None:
        # covered already; a smaller intersection stays covered
        return state, Verdict.NOW_COVERED

    lam = []
    lam_rel = []
    for ball in system.lam:
        rel = classify_pair(new_ball, ball, tol.pair(new_ball, ball))
        if rel is PairRelation.TANGENT:
            raise DegenerateInput("new ball tangent to an intersection ball",
                                  pair=(new_ball, ball))
        if rel is PairRelation.DISJOINT:
            # the new intersection is empty, hence covered
            return SequentialState(system, witness=None), Verdict.NOW_COVERED
        if rel is PairRelation.SECOND_INSIDE_FIRST:
            return state, Verdict.BALL_REDUNDANT
        if rel is PairRelation.FIRST_INSIDE_SECOND:
            continue                    # existing superset ball becomes redundant
        lam.append(ball)
        lam_rel.append(rel)
    v_rel = []
    for ball in system.v:
        rel = classify_pair(new_ball, ball, tol.pair(new_ball, ball))
        if rel is PairRelation.TANGENT:
            raise DegenerateInput("new ball tangent to a union ball",
                                  pair=(new_ball, ball))
        if rel is PairRelation.FIRST_INSIDE_SECOND:
            # the new ball (hence the new intersection) sits inside a union ball
            grown = BallSystem(system.dim, tuple(lam + [new_ball]), system.v)
            return SequentialState(grown, witness=None), Verdict.NOW_COVERED
        v_rel.append(rel)

    connected = connectedness_conditions(lam, system.v, new_ball, tol)
    grown = BallSystem(system.dim, tuple(lam + [new_ball]), system.v)

    rows, provenance = [], []
    for i, (ball, rel) in enumerate(zip(lam, lam_rel)):
        if rel is PairRelation.CROSSING_SPHERES:
            rows.append(hyperplane(new_ball, ball, Orientation.KEEP_OTHER_SIDE))
            provenance.append(FromLambda(i))
    for k, (ball, rel) in enumerate(zip(system.v, v_rel)):
        if rel is PairRelation.CROSSING_SPHERES:
            rows.append(hyperplane(new_ball, ball, Orientation.KEEP_REF_SIDE))
            provenance.append(FromV(k))
    # provenance indexes stay valid against ``grown``: the new ball is last
    poly = HPolyhedron(system.dim, rows, provenance, system=grown, ref_ball=new_ball)

    band = tol.decision(new_ball.radius)
    center, radius = poly.chebyshev(tol)
    if radius <= poly.fulldim_threshold(tol):
        plus = poly.restricted(FromLambda)
        _, r_plus = plus.chebyshev(tol)
        if r_plus <= plus.fulldim_threshold(tol):
            return state, Verdict.BALL_REDUNDANT      # intersection inside the new ball
        return _case_b(state, grown, new_ball, connected, band, tol)

    shift = float(new_ball.center @ new_ball.center) - new_ball.radius ** 2
    problem = ConvexQp(2.0 * np.eye(system.dim), -2.0 * new_ball.center, poly)
    outcome = solve_qp(problem, start=center, stop_below=-band - shift, tol=tol)
    if outcome.status is QpStatus.INFEASIBLE:
        return _case_b(state, grown, new_ball, connected, band, tol)
    min_value = outcome.value + shift
    try:
        if outcome.status is QpStatus.OPTIMAL and _banded(min_value, band, None,
                                                          "the distance minimum"):
            return _case_b(state, grown, new_ball, connected, band, tol)
    except DegenerateDecision:
        return _resync(lam + [new_ball], list(system.v), tol)
    x_minus = outcome.argument

    evidence = shortcut_unbounded(poly, tol, feasible_point=center)
    ray = evidence.ray if evidence is not None else None
    x_plus = None
    if ray is None:
        vrep = enumerate_vertices(poly, tol)
        if vrep.rays:
            ray = vrep.rays[0]
        else:
            values = [new_ball.signed_sq_distance(v) for v in vrep.vertices]
            if not values:
                return _case_b(state, grown, new_ball, connected, band, tol)
            best = int(np.argmax(values))
            try:
                if not _banded(values[best], band, None, "the distance maximum"):
                    return _case_b(state, grown, new_ball, connected, band, tol)
            except DegenerateDecision:
                return _resync(lam + [new_ball], list(system.v), tol)
            x_plus = vrep.vertices[best]

    try:
        witness = _witness_from_crossing(grown, new_ball, x_minus, x_plus=x_plus,
                                         ray=ray, outward=False, tol=tol,
                                         interior_hint=center)
    except WitnessExtractionFailed:
        return _resync(lam + [new_ball], list(system.v), tol)
    return (SequentialState(grown, witness=witness, connected_ok=connected),
            Verdict.STILL_UNCOVERED)


def _case_b(state, grown, new_ball, connected, band, tol):
    """The new sphere misses the uncovered region; the stored witness
    settles the verdict when the region is known connected."""
    if not connected:
        return _resync(list(grown.lam), list(grown.v), tol)
    margin = new_ball.signed_sq_distance(state.witness)
    if margin <= -band:
        return (SequentialState(grown, witness=state.witness, connected_ok=True),
                Verdict.STILL_UNCOVERED)
    if margin >= band:
        return SequentialState(grown, witness=None, connected_ok=True), Verdict.NOW_COVERED
    return _resync(list(grown.lam), list(grown.v), tol)
