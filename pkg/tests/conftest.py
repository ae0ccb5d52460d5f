"""Shared fixtures and independent geometric oracles used across the suite.

The oracles here deliberately avoid the Lie-model code paths they check:
concircularity is decided by a brute-force circumcircle fit, torus membership
by the implicit surface equation, circle intersections by plane/plane cuts.
"""

import numpy as np
import pytest

from cyclidic import lie


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


# ---------------------------------------------------------------------------
# Euclidean oracles


def circumcircle_3pt(a, b, c):
    """Center/radius/normal of the circle through three points, or None if
    collinear.  Pure Euclidean computation (no Lie lifts)."""
    a, b, c = (np.asarray(p, float) for p in (a, b, c))
    u, w = b - a, c - a
    cr = np.cross(u, w)
    if np.linalg.norm(cr) < 1e-12 * max(np.linalg.norm(u), np.linalg.norm(w)) ** 2:
        return None
    n = cr / np.linalg.norm(cr)
    m = np.array([[u @ u, u @ w], [u @ w, w @ w]])
    rhs = 0.5 * np.array([u @ u, w @ w])
    st = np.linalg.solve(m, rhs)
    center = a + st[0] * u + st[1] * w
    return center, float(np.linalg.norm(a - center)), n


def concircular_oracle(pts, tol=1e-8):
    """Brute-force test: fit the circle through the first three points and
    measure the fourth point's distance to it; collinear triples fall back
    to a line test."""
    pts = [np.asarray(p, float) for p in pts]
    fit = circumcircle_3pt(*pts[:3])
    if fit is None:
        d = pts[1] - pts[0]
        d = d / np.linalg.norm(d)
        offs = [np.linalg.norm((p - pts[0]) - ((p - pts[0]) @ d) * d) for p in pts[3:]]
        return max(offs, default=0.0) <= tol
    center, radius, normal = fit
    for p in pts[3:]:
        v = p - center
        h = v @ normal
        dist = np.hypot(np.linalg.norm(v - h * normal) - radius, h)
        if dist > tol:
            return False
    return True


def sphere_fit(points):
    """Least-squares sphere through >= 4 points: returns (center, radius)."""
    pts = np.asarray(points, float)
    A = np.hstack([2 * pts, np.ones((len(pts), 1))])
    b = (pts**2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    center = sol[:3]
    radius = float(np.sqrt(sol[3] + center @ center))
    return center, radius


def torus_point(u, v, R=2.0, r=1.0):
    return np.array(
        [(R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u), r * np.sin(v)]
    )


def torus_implicit_residual(p, R=2.0, r=1.0):
    p = np.asarray(p, float)
    rho = np.hypot(p[0], p[1])
    return abs(np.hypot(rho - R, p[2]) - r)


def torus_frame(u, v, R=2.0, r=1.0):
    tu = np.array([-np.sin(u), np.cos(u), 0.0])
    tv = np.array([-np.cos(u) * np.sin(v), -np.sin(u) * np.sin(v), np.cos(v)])
    return tu, tv, np.cross(tu, tv)


# ---------------------------------------------------------------------------
# Random geometric data


def random_unit(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_circle_quad(rng, embedded=True):
    """Four concircular points in cyclic order (x, x1, x12, x2) on a random
    circle, plus the carrier data."""
    center = rng.uniform(-2, 2, size=3)
    radius = rng.uniform(0.5, 3.0)
    rot = random_rotation(rng)
    u, w, n = rot[:, 0], rot[:, 1], rot[:, 2]

    def at(theta):
        return center + radius * (np.cos(theta) * u + np.sin(theta) * w)

    start = rng.uniform(0, 2 * np.pi)
    gaps = rng.uniform(0.4, 1.2, size=4)
    gaps *= 2 * np.pi / gaps.sum()
    thetas = start + np.concatenate([[0.0], np.cumsum(gaps[:3])])
    x, x1, x12, x2 = (at(t) for t in thetas)
    if not embedded:
        x1, x12 = x12, x1
    return (x, x1, x12, x2), (center, radius, n)


def random_tangent_frame(rng, normal=None):
    """Random orthonormal frame (t1, t2, n); if normal given, t1/t2 span its
    orthogonal complement."""
    if normal is None:
        rot = random_rotation(rng)
        return rot[:, 0], rot[:, 1], rot[:, 2]
    n = np.asarray(normal, float)
    n = n / np.linalg.norm(n)
    seed = random_unit(rng)
    t1 = seed - (seed @ n) * n
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2, n


def random_generic_patch(rng, max_tries=20):
    """Random non-spherical cyclidic patch from a random circular quad and
    a random orthonormal frame."""
    from cyclidic.cyclide import VertexFrame, VertexQuad, is_spherical, patch_from_data
    from cyclidic.errors import OrientedContactDegenerate

    for _ in range(max_tries):
        (x, x1, x12, x2), _carrier = random_circle_quad(rng)
        quad = VertexQuad(x, x1, x12, x2)
        t1, t2, n = random_tangent_frame(rng)
        frame = VertexFrame(x, t1, t2, n)
        if is_spherical(quad, frame, tol=1e-4):
            continue
        try:
            patch = patch_from_data(quad, frame)
        except OrientedContactDegenerate:
            continue
        if patch.kind == "generic":
            return patch
    raise RuntimeError("could not generate a generic patch")


def random_spherical_cube(rng):
    """Seven vertices of a random spherical cube (three circular quads on a
    random sphere), plus the carrier sphere."""
    center = rng.uniform(-2, 2, size=3)
    radius = rng.uniform(0.8, 2.5)

    def on_sphere():
        return center + radius * random_unit(rng)

    def fourth_on_circle(a, b, c):
        fit = circumcircle_3pt(a, b, c)
        if fit is None:
            return None
        cc, r, n = fit
        u = a - cc
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        th = rng.uniform(0.6, 2 * np.pi - 0.6)
        return cc + r * (np.cos(th) * u + np.sin(th) * w)

    for _ in range(50):
        x, x1, x2, x3 = (on_sphere() for _ in range(4))
        x12 = fourth_on_circle(x, x1, x2)
        x13 = fourth_on_circle(x, x1, x3)
        x23 = fourth_on_circle(x, x2, x3)
        if any(p is None for p in (x12, x13, x23)):
            continue
        pts = [x, x1, x2, x3, x12, x13, x23]
        dists = [np.linalg.norm(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]]
        if min(dists) < 0.15 * radius:
            continue
        return pts, (center, radius)
    raise RuntimeError("could not generate a spherical cube")


def random_sphere(rng):
    return lie.ProperSphere(rng.uniform(-3, 3, size=3), rng.uniform(0.2, 2.5) * rng.choice([-1, 1]))


def random_plane(rng):
    return lie.OrientedPlane(random_unit(rng), rng.uniform(-2, 2))


def random_point_sphere(rng):
    return lie.PointSphere(rng.uniform(-3, 3, size=3))
