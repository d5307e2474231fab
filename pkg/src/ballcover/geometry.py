"""Balls, pairwise sphere predicates, preprocessing, and radical half-spaces.

Conventions used throughout the package:

* an intersection ball ("lam" side) is an open ball,
* a union ball ("v" side) is a closed ball,
* a half-space is stored in ``a . x <= b`` form with a unit normal.

Two spheres that meet transversally intersect in an (n-2)-sphere lying on
their radical hyperplane; that hyperplane is the basic building block of
every polyhedron constructed here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput


@dataclass(frozen=True)
class Tolerances:
    """Numeric margins used by the solvers and predicates.

    The scale-free factors below are multiplied by a local scale (radii,
    offsets) at the point of use, so all comparisons stay commensurate.
    """

    base: float = 1e-9       # pair predicates, strict membership, decisions
    lp: float = 1e-8         # LP feasibility certification
    cheb: float = 1e-9       # full-dimensionality threshold factor
    active: float = 1e-7     # active-constraint detection
    pivot: float = 1e-10     # numeric floor for pivots / cancellations

    def pair(self, a: "Ball", b: "Ball") -> float:
        return self.base * (a.radius + b.radius)

    def decision(self, radius: float) -> float:
        return self.base * (1.0 + radius * radius)

    def chebyshev(self, offsets) -> float:
        off = 0.0 if len(offsets) == 0 else float(np.max(np.abs(offsets)))
        return self.cheb * (1.0 + off)


class PairRelation(enum.Enum):
    """Mutually exclusive relations between two balls (under tolerance)."""

    CROSSING_SPHERES = "crossing"
    FIRST_INSIDE_SECOND = "first_inside_second"
    SECOND_INSIDE_FIRST = "second_inside_first"
    DISJOINT = "disjoint"
    TANGENT = "tangent"


class Orientation(enum.Enum):
    """Which side of a radical hyperplane a half-space keeps."""

    KEEP_OTHER_SIDE = "keep_other_side"   # contains other_ball \ ref_ball
    KEEP_REF_SIDE = "keep_ref_side"       # contains ref_ball \ other_ball


@dataclass(frozen=True)
class Ball:
    """A ball given by its center and a positive radius.

    Whether the ball is treated as open or closed is decided by the family
    it belongs to, not stored here.
    """

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.array(self.center, dtype=float)
        if center.ndim != 1:
            raise ValueError("ball center must be a flat coordinate vector")
        if not np.all(np.isfinite(center)):
            raise ValueError("ball center must have finite coordinates")
        radius = float(self.radius)
        if not (np.isfinite(radius) and radius > 0.0):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius!r}")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def signed_sq_distance(self, x) -> float:
        """||x - center||^2 - radius^2 (negative inside, positive outside)."""
        d = np.asarray(x, dtype=float) - self.center
        return float(d @ d) - self.radius * self.radius


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space {x : normal . x <= offset} with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float)
        if normal.ndim != 1:
            raise ValueError("half-space normal must be a flat vector")
        norm = float(np.linalg.norm(normal))
        if not (np.isfinite(norm) and norm > 1e-12):
            raise DegenerateInput("half-space normal is numerically zero")
        normal /= norm
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def value(self, x) -> float:
        """normal . x - offset; nonpositive inside the half-space."""
        return float(self.normal @ np.asarray(x, dtype=float)) - self.offset

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.value(x) <= tol


@dataclass(frozen=True)
class BallSystem:
    """A validated pair of ball families over a common ambient space.

    ``lam`` holds the open balls whose intersection is tested, ``v`` the
    closed balls whose union is the candidate cover.  Construct through
    :func:`preprocess` to get the pairwise admissibility conditions
    enforced; direct construction only checks shapes.
    """

    dim: int
    lam: tuple[Ball, ...]
    v: tuple[Ball, ...]

    def __post_init__(self):
        lam = tuple(self.lam)
        v = tuple(self.v)
        if self.dim < 2:
            raise ValueError("ambient dimension must be at least 2")
        if len(lam) < 1 or len(v) < 1:
            raise ValueError("both ball families must be nonempty")
        for ball in lam + v:
            if ball.dim != self.dim:
                raise ValueError(
                    f"ball of dimension {ball.dim} in a {self.dim}-dimensional system")
        centers = np.array([b.center for b in lam + v])
        for i in range(len(centers)):
            for k in range(i + 1, len(centers)):
                if np.array_equal(centers[i], centers[k]):
                    raise ValueError("ball centers must be pairwise distinct")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "v", v)

    @property
    def p(self) -> int:
        return len(self.lam)

    @property
    def q(self) -> int:
        return len(self.v)


@dataclass(frozen=True)
class TrivialVerdict:
    """A coverage verdict settled during preprocessing, before any solver
    runs.  ``witness`` is set only for uncovered verdicts."""

    covered: bool
    reason: str
    witness: np.ndarray | None = None


def classify_pair(a: Ball, b: Ball, tol: float | None = None) -> PairRelation:
    """Classify the relative position of two balls.

    With ``d`` the center distance, the spheres cross iff
    ``|Ra - Rb| < d < Ra + Rb`` with margin ``tol`` on both sides; the
    containment and disjointness cases use the same margin.  Anything
    inside a margin band is reported ``TANGENT``.

    Raises ``ValueError`` on dimension mismatch or (near-)coincident
    centers.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if tol is None:
        tol = 1e-9 * (a.radius + b.radius)
    d = float(np.linalg.norm(a.center - b.center))
    if d <= tol:
        raise ValueError("ball centers are (numerically) coincident")
    if d > a.radius + b.radius + tol:
        return PairRelation.DISJOINT
    if d + a.radius <= b.radius - tol:
        return PairRelation.FIRST_INSIDE_SECOND
    if d + b.radius <= a.radius - tol:
        return PairRelation.SECOND_INSIDE_FIRST
    if abs(a.radius - b.radius) + tol < d < a.radius + b.radius - tol:
        return PairRelation.CROSSING_SPHERES
    return PairRelation.TANGENT


def hyperplane(center_ref: Ball, other: Ball, orientation: Orientation,
               tol: float | None = None) -> HalfSpace:
    """Oriented half-space bounded by the radical hyperplane of two
    crossing spheres.

    Writing (c, R) for the reference ball and (ci, Ri) for the other one,
    the radical hyperplane is the zero set of

        h(x) = sum_k (2 x_k - (c_k + ci_k)) (c_k - ci_k) + (R^2 - Ri^2),

    which satisfies h(x) = (||x - ci||^2 - Ri^2) - (||x - c||^2 - R^2).
    ``KEEP_OTHER_SIDE`` returns {h <= 0}, the side containing
    other \\ ref; ``KEEP_REF_SIDE`` returns {-h <= 0}, the side containing
    ref \\ other.  The result is normalized to a unit normal.
    """
    rel = classify_pair(center_ref, other, tol)
    if rel is not PairRelation.CROSSING_SPHERES:
        raise ValueError(f"spheres do not cross (pair is {rel.value}); no radical hyperplane")
    c, r = center_ref.center, center_ref.radius
    ci, ri = other.center, other.radius
    normal = 2.0 * (c - ci)
    offset = float(c @ c) - float(ci @ ci) - r * r + ri * ri
    if orientation is Orientation.KEEP_REF_SIDE:
        normal, offset = -normal, -offset
    return HalfSpace(normal, offset)


def strictly_inside(ball: Ball, x, margin: float) -> bool:
    return ball.signed_sq_distance(x) < -margin


def strictly_outside(ball: Ball, x, margin: float) -> bool:
    return ball.signed_sq_distance(x) > margin


def strict_membership(system: BallSystem, x, tol: Tolerances | None = None) -> bool:
    """True iff ``x`` lies strictly inside every intersection ball and
    strictly outside every union ball, each with its own scale-aware
    margin.  This is the certificate check for "not covered" witnesses;
    it involves no solver."""
    tol = tol or Tolerances()
    for ball in system.lam:
        if not strictly_inside(ball, x, tol.decision(ball.radius)):
            return False
    for ball in system.v:
        if not strictly_outside(ball, x, tol.decision(ball.radius)):
            return False
    return True


def preprocess(lam, v, tol: Tolerances | None = None):
    """Enforce the pairwise admissibility conditions by repair-or-decide.

    Checks every pair of input balls and either repairs the families or
    settles the coverage question outright:

    * two disjoint intersection balls -> intersection empty, covered;
    * an intersection ball containing another -> the larger is dropped;
    * an intersection ball inside a union ball -> covered;
    * a union ball disjoint from some intersection ball -> dropped (it
      cannot reach the intersection);
    * a union ball contained in another -> the contained one is dropped;
    * any pair within tolerance of tangency -> ``DegenerateInput``.

    Returns the repaired :class:`BallSystem`, or a :class:`TrivialVerdict`
    when the question is already settled (including the case where every
    union ball was dropped, certified by an interior point of the
    intersection).
    """
    tol = tol or Tolerances()
    lam = list(lam)
    v = list(v)
    if not lam or not v:
        raise ValueError("both ball families must be nonempty")
    dim = lam[0].dim
    for ball in lam + v:
        if ball.dim != dim:
            raise ValueError(f"dimension mismatch: {ball.dim} vs {dim}")
    if dim < 2:
        raise ValueError("ambient dimension must be at least 2")

    def classified(a, b):
        rel = classify_pair(a, b, tol.pair(a, b))
        if rel is PairRelation.TANGENT:
            raise DegenerateInput(
                "ball pair within tolerance of tangency; exactness cannot be certified",
                pair=(a, b))
        return rel

    keep_lam = [True] * len(lam)
    for i in range(len(lam)):
        if not keep_lam[i]:
            continue
        for k in range(i + 1, len(lam)):
            if not keep_lam[k]:
                continue
            rel = classified(lam[i], lam[k])
            if rel is PairRelation.DISJOINT:
                return TrivialVerdict(True, "two intersection balls are disjoint, "
                                            "so the intersection is empty")
            if rel is PairRelation.FIRST_INSIDE_SECOND:
                keep_lam[k] = False           # drop the larger, superset ball
            elif rel is PairRelation.SECOND_INSIDE_FIRST:
                keep_lam[i] = False
                break
    lam = [b for b, k in zip(lam, keep_lam) if k]

    keep_v = [True] * len(v)
    for k in range(len(v)):
        for a in lam:
            rel = classified(a, v[k])
            if rel is PairRelation.FIRST_INSIDE_SECOND:
                return TrivialVerdict(True, "an intersection ball lies inside a union ball")
            if rel is PairRelation.DISJOINT:
                keep_v[k] = False             # cannot reach the intersection
                break
    for i in range(len(v)):
        if not keep_v[i]:
            continue
        for k in range(i + 1, len(v)):
            if not keep_v[k]:
                continue
            rel = classified(v[i], v[k])
            if rel is PairRelation.FIRST_INSIDE_SECOND:
                keep_v[i] = False
                break
            if rel is PairRelation.SECOND_INSIDE_FIRST:
                keep_v[k] = False
    v = [b for b, k in zip(v, keep_v) if k]

    if not v:
        # No union ball can intersect the intersection set; any interior
        # point of the intersection is a witness (if one exists at all).
        from .qp import interior_point_of_intersection

        interior = interior_point_of_intersection(lam, tol)
        if interior is None:
            return TrivialVerdict(True, "the intersection is empty")
        return TrivialVerdict(False, "no union ball reaches the intersection",
                              witness=interior.point)

    return BallSystem(dim, tuple(lam), tuple(v))
