"""Independent brute-force oracles used by the test suite.

Deliberately naive: subset enumeration and dense linear algebra only, no
shared code paths with the solvers under test.
"""

import itertools

import numpy as np


def brute_force_vertices(a, b, feas_tol=1e-7, dedup_tol=1e-7):
    """All vertices of {x : A x <= b} as solutions of n-subsets of tight
    rows, filtered by feasibility."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    found = []
    for subset in itertools.combinations(range(m), n):
        sub_a = a[list(subset)]
        sub_b = b[list(subset)]
        try:
            x = np.linalg.solve(sub_a, sub_b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.max(a @ x - b) > feas_tol:
            continue
        if any(np.linalg.norm(x - y) <= dedup_tol * (1.0 + np.linalg.norm(y))
               for y in found):
            continue
        found.append(x)
    return found


def match_point_sets(first, second, tol=1e-7):
    """True iff the two point collections coincide up to tolerance."""
    if len(first) != len(second):
        return False
    remaining = list(second)
    for x in first:
        hit = None
        for i, y in enumerate(remaining):
            if np.linalg.norm(np.asarray(x) - np.asarray(y)) \
                    <= tol * (1.0 + np.linalg.norm(y)):
                hit = i
                break
        if hit is None:
            return False
        remaining.pop(hit)
    return True


def brute_force_qp_min(q, g, a, b, feas_tol=1e-7, mult_tol=1e-7):
    """Global minimum of 1/2 x^T Q x + g^T x over {A x <= b} (Q positive
    definite) by exhausting every candidate active set."""
    q = np.asarray(q, dtype=float)
    g = np.asarray(g, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    best_val, best_x = None, None
    for size in range(0, min(m, n) + 1):
        for subset in itertools.combinations(range(m), size):
            rows = list(subset)
            a_s = a[rows]
            kkt = np.zeros((n + size, n + size))
            kkt[:n, :n] = q
            if size:
                kkt[:n, n:] = a_s.T
                kkt[n:, :n] = a_s
            rhs = np.concatenate([-g, b[rows]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            x, mu = sol[:n], sol[n:]
            if not np.all(np.isfinite(x)):
                continue
            if m and np.max(a @ x - b) > feas_tol:
                continue
            if size and np.min(mu) < -mult_tol:
                continue
            val = float(0.5 * x @ q @ x + g @ x)
            if best_val is None or val < best_val:
                best_val, best_x = val, x
    return best_val, best_x


def sample_on_sphere(rng, center, radius, count):
    """Uniform points on the sphere around ``center``."""
    center = np.asarray(center, dtype=float)
    raw = rng.standard_normal((count, center.shape[0]))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return center + radius * raw


def sphere_pair_intersection_samples(rng, c1, r1, c2, r2, count):
    """Points lying on both spheres (their common (n-2)-sphere)."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    n = c1.shape[0]
    axis = c2 - c1
    d = np.linalg.norm(axis)
    axis = axis / d
    along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    rho2 = r1 * r1 - along * along
    assert rho2 > 0.0, "spheres must cross"
    rho = np.sqrt(rho2)
    # orthonormal basis of the hyperplane orthogonal to the center line
    basis = np.linalg.qr(np.column_stack([axis, rng.standard_normal((n, n - 1))]))[0][:, 1:]
    raw = rng.standard_normal((count, n - 1))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return c1 + along * axis + rho * raw @ basis.T
