"""H-polyhedra, per-reference-ball polyhedron assembly, and vertex/ray
enumeration by the double description method.

The polyhedron attached to a reference ball collects one oriented radical
half-space per crossing sphere: rows sourced from intersection balls keep
the other ball's side, rows sourced from union balls keep the reference
side.  Pairs whose spheres do not cross contribute no row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInput, NumericallyDegenerate
from .geometry import (Ball, BallSystem, HalfSpace, Orientation, PairRelation,
                       Tolerances, classify_pair, hyperplane)
from .lp import chebyshev_center


class FromLambda(NamedTuple):
    """Row sourced from intersection ball ``index``."""
    index: int


class FromV(NamedTuple):
    """Row sourced from union ball ``index``."""
    index: int


@dataclass
class HPolyhedron:
    """Finite conjunction of unit-normal half-spaces in ``a . x <= b`` form.

    ``provenance`` tags each row with the ball it came from; ``ref_ball``
    is set when the polyhedron was assembled around a reference sphere.
    """

    dim: int
    rows: list[HalfSpace] = field(default_factory=list)
    provenance: list | None = None
    system: BallSystem | None = None
    ref_ball: Ball | None = None
    ref_index: int | None = None

    def __post_init__(self):
        for hs in self.rows:
            if hs.dim != self.dim:
                raise ValueError(f"row arity {hs.dim} != dimension {self.dim}")
        if self.provenance is not None and len(self.provenance) != len(self.rows):
            raise ValueError("provenance must tag every row")

    @property
    def a(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim))
        return np.array([hs.normal for hs in self.rows])

    @property
    def b(self) -> np.ndarray:
        return np.array([hs.offset for hs in self.rows])

    def contains(self, x, tol: float = 0.0) -> bool:
        if not self.rows:
            return True
        return bool(np.max(self.a @ np.asarray(x, dtype=float) - self.b) <= tol)

    def restricted(self, kind) -> "HPolyhedron":
        """Sub-polyhedron of the rows whose provenance is of type ``kind``."""
        if self.provenance is None:
            raise ValueError("polyhedron carries no provenance")
        picked = [(hs, src) for hs, src in zip(self.rows, self.provenance)
                  if isinstance(src, kind)]
        return HPolyhedron(self.dim, [hs for hs, _ in picked],
                           [src for _, src in picked],
                           system=self.system, ref_ball=self.ref_ball,
                           ref_index=self.ref_index)

    def chebyshev(self, tol: Tolerances | None = None):
        """(center, signed inradius); see :func:`ballcover.lp.chebyshev_center`."""
        return chebyshev_center(self.rows, self.dim, tol)

    def fulldim_threshold(self, tol: Tolerances) -> float:
        return tol.chebyshev(self.b if self.rows else np.zeros(0))


@dataclass
class VRepresentation:
    """Vertices and unit extreme rays produced by enumeration.

    For a non-pointed polyhedron (nonzero lineality space) the vertex list
    is empty and the rays include both directions of every lineality
    vector; that is enough to certify unboundedness, which is all the
    decision procedure needs from this case.
    """

    vertices: list
    rays: list

    @property
    def bounded(self) -> bool:
        return not self.rays


@dataclass
class UnboundednessEvidence:
    unbounded: bool
    ray: np.ndarray | None = None
    via: str | None = None


def build_polyhedron(system: BallSystem, ref_index: int,
                     tol: Tolerances | None = None) -> HPolyhedron:
    """Assemble the polyhedron attached to union ball ``ref_index``.

    One row per sphere crossing the reference sphere: intersection balls
    contribute their far-side half-space, other union balls the
    reference-side one.  Contained or disjoint pairs contribute nothing;
    a pair within tolerance of tangency raises ``DegenerateInput``.
    """
    tol = tol or Tolerances()
    ref = system.v[ref_index]
    rows, provenance = [], []
    for i, ball in enumerate(system.lam):
        rel = classify_pair(ref, ball, tol.pair(ref, ball))
        if rel is PairRelation.TANGENT:
            raise DegenerateInput("reference sphere tangent to an intersection sphere",
                                  pair=(ref, ball))
        if rel is PairRelation.CROSSING_SPHERES:
            rows.append(hyperplane(ref, ball, Orientation.KEEP_OTHER_SIDE, tol.pair(ref, ball)))
            provenance.append(FromLambda(i))
    for k, ball in enumerate(system.v):
        if k == ref_index:
            continue
        rel = classify_pair(ref, ball, tol.pair(ref, ball))
        if rel is PairRelation.TANGENT:
            raise DegenerateInput("reference sphere tangent to another union sphere",
                                  pair=(ref, ball))
        if rel is PairRelation.CROSSING_SPHERES:
            rows.append(hyperplane(ref, ball, Orientation.KEEP_REF_SIDE, tol.pair(ref, ball)))
            provenance.append(FromV(k))
    return HPolyhedron(system.dim, rows, provenance, system=system,
                       ref_ball=ref, ref_index=ref_index)


def _insertion_order(homogeneous):
    """Sort rows by angle to their mean direction for numerical balance."""
    if len(homogeneous) <= 2:
        return list(range(len(homogeneous)))
    mean = np.mean(homogeneous, axis=0)
    norm = np.linalg.norm(mean)
    if norm < 1e-12:
        return list(range(len(homogeneous)))
    mean /= norm
    angles = [float(np.arccos(np.clip(row @ mean, -1.0, 1.0))) for row in homogeneous]
    return sorted(range(len(homogeneous)), key=lambda i: (angles[i], i))


def _zero_set(ray, processed, band):
    return frozenset(i for i, row in enumerate(processed) if abs(row @ ray) <= band)


def enumerate_vertices(poly: HPolyhedron, tol: Tolerances | None = None) -> VRepresentation:
    """All vertices and extreme rays of the polyhedron, via incremental
    double description over the homogenization (x, t).

    Each inequality a . x <= b becomes the cone constraint
    a . x - b t <= 0 together with t >= 0; generators with positive
    t-component dehomogenize to vertices, the rest are recession rays.
    Raises ``NumericallyDegenerate`` when a pivot or a combined generator
    falls below the numeric floor.
    """
    tol = tol or Tolerances()
    n = poly.dim
    band = tol.active

    homo = []
    for hs in poly.rows:
        row = np.append(hs.normal, -hs.offset)
        homo.append(row / np.linalg.norm(row))
    order = _insertion_order(homo)
    t_row = np.zeros(n + 1)
    t_row[n] = -1.0
    inserts = [t_row] + [homo[i] for i in order]

    lineality = [np.eye(n + 1)[i] for i in range(n + 1)]
    rays: list[np.ndarray] = []
    zsets: list[frozenset] = []
    processed: list[np.ndarray] = []

    for row in inserts:
        lvals = [float(row @ l) for l in lineality]
        if lineality and np.max(np.abs(lvals)) > band:
            # a lineality direction violates the new constraint: it splits
            # into a one-sided ray while everything else is projected onto
            # the constraint hyperplane
            piv = int(np.argmax(np.abs(lvals)))
            l0 = lineality.pop(piv)
            v0 = lvals.pop(piv)
            if v0 > 0.0:
                l0, v0 = -l0, -v0
            new_lineality = []
            for l, lv in zip(lineality, lvals):
                vec = l - (lv / v0) * l0
                norm = np.linalg.norm(vec)
                if norm < tol.pivot:
                    raise NumericallyDegenerate("lineality basis collapsed during projection")
                new_lineality.append(vec / norm)
            lineality = new_lineality
            new_rays = []
            for r in rays:
                vec = r - (float(row @ r) / v0) * l0
                norm = np.linalg.norm(vec)
                if norm < tol.pivot:
                    raise NumericallyDegenerate("generator collapsed during projection")
                new_rays.append(vec / norm)
            rays = new_rays + [l0]
        else:
            vals = [float(row @ r) for r in rays]
            minus = [i for i, v in enumerate(vals) if v < -band]
            zero = [i for i, v in enumerate(vals) if abs(v) <= band]
            plus = [i for i, v in enumerate(vals) if v > band]
            if plus:
                combined = []
                for im in minus:
                    for ip in plus:
                        meet = zsets[im] & zsets[ip]
                        adjacent = True
                        for other in range(len(rays)):
                            if other in (im, ip):
                                continue
                            if meet <= zsets[other]:
                                adjacent = False
                                break
                        if not adjacent:
                            continue
                        vec = vals[ip] * rays[im] - vals[im] * rays[ip]
                        norm = np.linalg.norm(vec)
                        if norm < tol.pivot:
                            raise NumericallyDegenerate(
                                "combined generator vanished (cancellation)")
                        vec /= norm
                        if abs(float(row @ vec)) > 10.0 * band:
                            raise NumericallyDegenerate(
                                "combined generator misses the new hyperplane")
                        combined.append(vec)
                rays = [rays[i] for i in minus + zero] + combined
            else:
                rays = [rays[i] for i in minus + zero]
        processed.append(row)
        # refresh zero sets and drop duplicate directions
        unique: list[np.ndarray] = []
        for r in rays:
            if any(float(r @ u) > 1.0 - 1e-9 for u in unique):
                continue
            unique.append(r)
        rays = unique
        zsets = [_zero_set(r, processed, band) for r in rays]

    vertices: list[np.ndarray] = []
    directions: list[np.ndarray] = []
    if lineality:
        for l in lineality:
            directions.append(l[:n] / np.linalg.norm(l[:n]))
            directions.append(-l[:n] / np.linalg.norm(l[:n]))
        for r in rays:
            if r[n] <= band:
                vec = r[:n]
                norm = np.linalg.norm(vec)
                if norm > tol.pivot:
                    directions.append(vec / norm)
    else:
        for r in rays:
            if r[n] > band:
                vertices.append(r[:n] / r[n])
            else:
                vec = r[:n]
                norm = np.linalg.norm(vec)
                if norm > tol.pivot:
                    directions.append(vec / norm)

    deduped: list[np.ndarray] = []
    for vtx in vertices:
        if any(np.linalg.norm(vtx - u) <= 1e-7 * (1.0 + np.linalg.norm(u)) for u in deduped):
            continue
        deduped.append(vtx)
    unique_dirs: list[np.ndarray] = []
    for d in directions:
        if any(float(d @ u) > 1.0 - 1e-9 for u in unique_dirs):
            continue
        unique_dirs.append(d)
    return VRepresentation(deduped, unique_dirs)


def _kernel_ray(a):
    """Nonzero r with A r <= 0 for a system of at most dim rows."""
    m, n = a.shape
    if m == 0:
        ray = np.zeros(n)
        ray[0] = 1.0
        return ray
    _, s, vt = np.linalg.svd(a)
    null_mask = np.zeros(n, dtype=bool)
    null_mask[s.size:] = True
    null_mask[:s.size] = s <= 1e-10 * max(1.0, s[0])
    if np.any(null_mask):
        return vt[null_mask][0]
    # square nonsingular: push every constraint value down uniformly
    return np.linalg.solve(a, -np.ones(m))


def shortcut_unbounded(poly: HPolyhedron, tol: Tolerances | None = None,
                       feasible_point=None) -> UnboundednessEvidence | None:
    """Try the cheap sufficient conditions for unboundedness, in order:

    (radius)     every row's source ball satisfies the strict radius
                 inequality against the reference ball, which makes the
                 direction away from the reference center a recession ray;
    (dimension)  no more rows than dimensions: a kernel / linear-system
                 argument yields a recession ray;
    (separation) a direction linearly separating intersection-ball centers
                 from union-ball centers around the reference center; its
                 negation is a recession ray.

    Returns evidence with a verified ray, or None when no check fires.
    The checks assume the polyhedron is nonempty.
    """
    tol = tol or Tolerances()
    a = poly.a

    def verified(ray, via):
        ray = np.asarray(ray, dtype=float)
        norm = np.linalg.norm(ray)
        if norm < tol.pivot:
            return None
        ray = ray / norm
        if a.shape[0] and float(np.max(a @ ray)) > tol.active:
            return None
        return UnboundednessEvidence(True, ray, via)

    sourced = (poly.system is not None and poly.ref_ball is not None
               and poly.provenance is not None)
    if sourced and poly.rows:
        ref = poly.ref_ball
        ok = True
        for src in poly.provenance:
            if isinstance(src, FromLambda):
                ball = poly.system.lam[src.index]
                gap = (ref.radius ** 2 + float(np.sum((ref.center - ball.center) ** 2))
                       - ball.radius ** 2)
            else:
                ball = poly.system.v[src.index]
                gap = (ball.radius ** 2 - ref.radius ** 2
                       - float(np.sum((ref.center - ball.center) ** 2)))
            scale = tol.base * (1.0 + ref.radius ** 2 + ball.radius ** 2)
            if gap <= scale:
                ok = False
                break
        if ok:
            point = feasible_point
            if point is None:
                point, radius = poly.chebyshev(tol)
            if point is not None:
                evidence = verified(np.asarray(point) - ref.center, "radius")
                if evidence is not None:
                    return evidence

    if len(poly.rows) <= poly.dim:
        evidence = verified(_kernel_ray(a), "dimension")
        if evidence is not None:
            return evidence
        evidence = verified(-_kernel_ray(a), "dimension")
        if evidence is not None:
            return evidence

    if sourced:
        lam_src = [poly.system.lam[s.index] for s in poly.provenance
                   if isinstance(s, FromLambda)]
        v_src = [poly.system.v[s.index] for s in poly.provenance
                 if isinstance(s, FromV)]
        from .lp import separating_direction

        d = separating_direction(poly.ref_ball, lam_src, v_src, tol)
        if d is not None:
            evidence = verified(-d, "separation")
            if evidence is not None:
                return evidence
    return None


def is_unbounded(poly: HPolyhedron, tol: Tolerances | None = None,
                 feasible_point=None,
                 skip_enumeration: bool = False) -> UnboundednessEvidence:
    """Decide unboundedness of a nonempty polyhedron with an evidence ray.

    Runs the cheap shortcuts first and falls back to full double
    description unless ``skip_enumeration`` is set (in which case a
    negative answer means only that no shortcut fired).
    """
    tol = tol or Tolerances()
    evidence = shortcut_unbounded(poly, tol, feasible_point)
    if evidence is not None:
        return evidence
    if skip_enumeration:
        return UnboundednessEvidence(False, None, None)
    vrep = enumerate_vertices(poly, tol)
    if vrep.rays:
        return UnboundednessEvidence(True, vrep.rays[0], "enumeration")
    return UnboundednessEvidence(False, None, "enumeration")
