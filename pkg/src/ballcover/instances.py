"""Random instance generation and brute-force geometric oracles.

Generation draws ball centers from an isotropic normal and sets each
radius to the center's distance from the origin plus a fixed surplus
(doubled for union balls), so every ball contains the origin with a
known depth; draws violating the pairwise admissibility conditions are
thrown away wholesale and redrawn.

The oracles certify "not covered" without any solver: a lexicographic
grid scan (exact in low dimension) and a hit-and-run walk through the
intersection (dimension-scalable, probabilistic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, RetriesExhausted, StepTooCoarse
from .geometry import Ball, BallSystem, Tolerances, preprocess, strict_membership
from .qp import interior_point_of_intersection


@dataclass(frozen=True)
class GenConfig:
    """Parameters of the random instance generator."""

    dim: int
    p: int
    q: int
    sigma: float = 10.0
    epsilon: float = 5.0
    seed: int = 0
    max_retries: int = 1000

    def __post_init__(self):
        if self.dim < 2 or self.p < 1 or self.q < 1:
            raise ValueError("need dim >= 2 and at least one ball per family")
        if not (self.sigma > 0.0 and self.epsilon > 0.0):
            raise ValueError("sigma and epsilon must be positive")


@dataclass
class OracleVerdict:
    """``found_witness`` is a certified point of the intersection outside
    the union; absence of a witness is never proof of coverage, hence
    ``conclusive`` is True only when one was found."""

    found_witness: np.ndarray | None
    samples_used: int
    conclusive: bool


def generate(config: GenConfig, tol: Tolerances | None = None) -> BallSystem:
    """Draw a random admissible system, deterministic under the seed.

    Intersection radii are ||center|| + epsilon, union radii
    ||center|| + 2 epsilon.  A draw is accepted only if preprocessing
    passes it through unchanged (no trivial verdict, no dropped ball);
    otherwise the whole system is redrawn, up to ``max_retries`` times.
    """
    tol = tol or Tolerances()
    rng = np.random.default_rng(config.seed)
    for _ in range(config.max_retries):
        centers = rng.normal(0.0, config.sigma, size=(config.p + config.q, config.dim))
        lam = [Ball(c, float(np.linalg.norm(c)) + config.epsilon)
               for c in centers[:config.p]]
        v = [Ball(c, float(np.linalg.norm(c)) + 2.0 * config.epsilon)
             for c in centers[config.p:]]
        try:
            prepared = preprocess(lam, v, tol)
        except DegenerateInput:
            continue
        if isinstance(prepared, BallSystem) and prepared.p == config.p \
                and prepared.q == config.q:
            return prepared
    raise RetriesExhausted(
        f"no admissible draw in {config.max_retries} attempts for {config}")


def _axis_window(lo: float, step: float, count: int, want_lo: float, want_hi: float):
    """Index range of grid points lo + k*step falling inside [want_lo, want_hi]."""
    k_lo = max(0, int(math.ceil((want_lo - lo) / step)))
    k_hi = min(count - 1, int(math.floor((want_hi - lo) / step)))
    return k_lo, k_hi


def grid_oracle(system: BallSystem, step: float,
                tol: Tolerances | None = None) -> OracleVerdict:
    """Scan the bounding box of the smallest intersection ball on a grid of
    the given step, in lexicographic order, and report the first point
    strictly inside every intersection ball and strictly outside every
    union ball.

    Membership at grid points is tested by exact float comparison (margin
    zero); a found point is additionally re-checked with the standard
    margin before being returned.  Only dimensions 2 and 3 are supported.
    Grid points that provably lie outside the intersection are skipped
    analytically, which does not change the scan's outcome.
    """
    tol = tol or Tolerances()
    if system.dim not in (2, 3):
        raise ValueError("grid oracle supports dimensions 2 and 3 only")
    if step <= 0.0:
        raise ValueError("step must be positive")
    smallest = min(system.lam, key=lambda ball: ball.radius)
    lo = smallest.center - smallest.radius
    counts = [int(math.floor(2.0 * smallest.radius / step)) + 1] * system.dim
    total = 1
    for c in counts:
        total *= c
    if total < 1000:
        raise StepTooCoarse(
            f"step {step} yields only {total} grid points in the box")

    centers = np.array([ball.center for ball in system.lam])
    radii2 = np.array([ball.radius ** 2 for ball in system.lam])
    vcenters = np.array([ball.center for ball in system.v])
    vradii2 = np.array([ball.radius ** 2 for ball in system.v])

    # the intersection's bounding box: outside it no point can qualify
    box_lo = np.max(centers - np.sqrt(radii2)[:, None], axis=0)
    box_hi = np.min(centers + np.sqrt(radii2)[:, None], axis=0)

    samples_used = 0
    axis = system.dim - 1
    count_last = counts[axis]
    lo_last = lo[axis]

    def scan_line(prefix, d2_lam_prefix, d2_v_prefix):
        """Scan the last axis given fixed leading coordinates.

        The candidate index runs are derived analytically (intersection
        window minus the union-ball intervals), padded by one grid index
        at every seam; the retained points are then decided by the exact
        float comparison, so the outcome matches a full scan."""
        nonlocal samples_used
        room = radii2 - d2_lam_prefix
        if np.any(room <= 0.0):
            return None
        half = np.sqrt(room)
        want_lo = float(np.max(centers[:, axis] - half))
        want_hi = float(np.min(centers[:, axis] + half))
        k_lo, k_hi = _axis_window(lo_last, step, count_last, want_lo, want_hi)
        k_lo, k_hi = max(0, k_lo - 1), min(count_last - 1, k_hi + 1)
        if k_lo > k_hi:
            return None
        runs = [(k_lo, k_hi)]
        for i in range(vcenters.shape[0]):
            vroom = vradii2[i] - d2_v_prefix[i]
            if vroom <= 0.0:
                continue
            vhalf = float(np.sqrt(vroom))
            e_lo, e_hi = _axis_window(lo_last, step, count_last,
                                      vcenters[i, axis] - vhalf,
                                      vcenters[i, axis] + vhalf)
            e_lo, e_hi = e_lo + 1, e_hi - 1       # keep the seam points
            if e_lo > e_hi:
                continue
            pruned = []
            for r_lo, r_hi in runs:
                if e_hi < r_lo or e_lo > r_hi:
                    pruned.append((r_lo, r_hi))
                    continue
                if r_lo < e_lo:
                    pruned.append((r_lo, e_lo - 1))
                if e_hi < r_hi:
                    pruned.append((e_hi + 1, r_hi))
            runs = pruned
            if not runs:
                return None
        for r_lo, r_hi in runs:
            xs = lo_last + step * np.arange(r_lo, r_hi + 1)
            samples_used += xs.size
            inside = np.ones(xs.size, dtype=bool)
            for i in range(centers.shape[0]):
                inside &= d2_lam_prefix[i] + (xs - centers[i, axis]) ** 2 < radii2[i]
            for i in range(vcenters.shape[0]):
                inside &= d2_v_prefix[i] + (xs - vcenters[i, axis]) ** 2 > vradii2[i]
            hits = np.nonzero(inside)[0]
            for h in hits:
                candidate = np.array(prefix + [xs[h]])
                if strict_membership(system, candidate, tol):
                    return candidate
        return None

    k0_lo, k0_hi = _axis_window(lo[0], step, counts[0], box_lo[0], box_hi[0])
    for k0 in range(k0_lo, k0_hi + 1):
        x0 = lo[0] + step * k0
        d2_lam_0 = (x0 - centers[:, 0]) ** 2
        d2_v_0 = (x0 - vcenters[:, 0]) ** 2
        if system.dim == 2:
            found = scan_line([x0], d2_lam_0, d2_v_0)
            if found is not None:
                return OracleVerdict(found, samples_used, True)
        else:
            k1_lo, k1_hi = _axis_window(lo[1], step, counts[1], box_lo[1], box_hi[1])
            for k1 in range(k1_lo, k1_hi + 1):
                x1 = lo[1] + step * k1
                found = scan_line([x0, x1],
                                  d2_lam_0 + (x1 - centers[:, 1]) ** 2,
                                  d2_v_0 + (x1 - vcenters[:, 1]) ** 2)
                if found is not None:
                    return OracleVerdict(found, samples_used, True)
    return OracleVerdict(None, samples_used, False)


def hit_and_run_oracle(system: BallSystem, samples: int, seed: int = 0,
                       tol: Tolerances | None = None) -> OracleVerdict:
    """Random walk through the intersection looking for a point outside
    the union.

    From an interior point, each step picks a uniform direction, solves
    the chord's intersection with every intersection ball in closed form,
    and jumps to a uniform point of the common chord.  Each visited point
    is tested against the union; the first success is returned after the
    standard strict-membership re-check.  A miss after ``samples`` steps
    is inconclusive.
    """
    tol = tol or Tolerances()
    if samples <= 0:
        return OracleVerdict(None, 0, False)
    interior = interior_point_of_intersection(system.lam, tol)
    if interior is None:
        raise ValueError("the intersection is empty; nothing to sample")
    rng = np.random.default_rng(seed)
    x = np.array(interior.point)
    centers = np.array([ball.center for ball in system.lam])
    radii2 = np.array([ball.radius ** 2 for ball in system.lam])
    used = 0
    for _ in range(samples):
        u = rng.standard_normal(system.dim)
        u /= np.linalg.norm(u)
        w = x - centers
        bq = 2.0 * (w @ u)
        cq = np.sum(w * w, axis=1) - radii2
        disc = bq * bq - 4.0 * cq
        if np.any(disc <= 0.0):        # drifted onto a boundary; hold position
            continue
        roots = np.sqrt(disc)
        t_lo = float(np.max(0.5 * (-bq - roots)))
        t_hi = float(np.min(0.5 * (-bq + roots)))
        if t_hi <= t_lo:
            continue
        x = x + rng.uniform(t_lo, t_hi) * u
        used += 1
        if all(ball.signed_sq_distance(x) > 0.0 for ball in system.v) \
                and strict_membership(system, x, tol):
            return OracleVerdict(x.copy(), used, True)
    return OracleVerdict(None, used, False)
