"""Projective model of Lie sphere geometry in R^{4,2}.

Oriented spheres, points and planes of compactified 3-space are represented
by isotropic homogeneous coordinate vectors in R^6 over the basis
(e1, e2, e3, e0, einf, er).  The inner product has signature (4,2):
the Euclidean part contributes the standard dot product, <e0,einf> = -1/2
(both isotropic), and <er,er> = -1.

All values are immutable after construction and every operation here is a
pure function, so everything is safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInput,
    IdenticalSpheres,
    NonIsotropic,
    NotInContact,
    ZeroVector,
)

DEFAULT_TOL = 1e-9

# component indices into a Lie vector
E0, EINF, ER = 3, 4, 5


class _Infinity:
    """The point at infinity of compactified 3-space (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = _Infinity()


def is_infinite(p) -> bool:
    return p is INF or isinstance(p, _Infinity)


def _vec3(x):
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise DegenerateInput(f"expected a 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class ProperSphere:
    """Oriented sphere with nonzero signed radius.

    Positive radius corresponds to the inward field of unit normals.
    """

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class PointSphere:
    """A point of compactified 3-space, viewed as a sphere of radius zero."""

    point: object  # 3-vector or INF

    def __post_init__(self):
        if not is_infinite(self.point):
            object.__setattr__(self, "point", _vec3(self.point))

    @property
    def is_infinity(self) -> bool:
        return is_infinite(self.point)


@dataclass(frozen=True)
class OrientedPlane:
    """Oriented plane <n,x> = d with unit normal n."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _vec3(self.normal)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))


@dataclass(frozen=True)
class ProperCircle:
    center: np.ndarray
    radius: float
    normal: np.ndarray  # unit normal of the carrier plane

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "normal", _vec3(self.normal))


@dataclass(frozen=True)
class Line3D:
    """A straight line, i.e. a circle through infinity."""

    point: np.ndarray
    direction: np.ndarray  # unit vector

    def __post_init__(self):
        object.__setattr__(self, "point", _vec3(self.point))
        d = _vec3(self.direction)
        n = np.linalg.norm(d)
        if n == 0:
            raise DegenerateInput("line with zero direction")
        object.__setattr__(self, "direction", d / n)


def lie_inner(a, b) -> float:
    """Signature-(4,2) inner product of two Lie vectors."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
        - 0.5 * (a[E0] * b[EINF] + a[EINF] * b[E0])
        - a[ER] * b[ER]
    )


def lie_norm(v) -> float:
    """Plain Euclidean 6-norm, used for relative tolerances."""
    return float(np.linalg.norm(v))


def is_isotropic(v, tol=DEFAULT_TOL) -> bool:
    n2 = float(np.dot(v, v))
    return abs(lie_inner(v, v)) <= tol * n2


def lift(s) -> np.ndarray:
    """Normalized homogeneous Lie coordinates of a generalized sphere."""
    if isinstance(s, ProperSphere):
        c, r = s.center, s.radius
        v = np.empty(6)
        v[:3] = c
        v[E0] = 1.0
        v[EINF] = float(np.dot(c, c)) - r * r
        v[ER] = r
        return v
    if isinstance(s, PointSphere):
        if s.is_infinity:
            v = np.zeros(6)
            v[EINF] = 1.0
            return v
        return lift_point(s.point)
    if isinstance(s, OrientedPlane):
        v = np.empty(6)
        v[:3] = s.normal
        v[E0] = 0.0
        v[EINF] = 2.0 * s.offset
        v[ER] = 1.0
        return v
    raise DegenerateInput(f"cannot lift object of type {type(s).__name__}")


def lift_point(x) -> np.ndarray:
    """Lie coordinates of a finite point (or INF)."""
    if is_infinite(x):
        v = np.zeros(6)
        v[EINF] = 1.0
        return v
    x = _vec3(x)
    v = np.empty(6)
    v[:3] = x
    v[E0] = 1.0
    v[EINF] = float(np.dot(x, x))
    v[ER] = 0.0
    return v


def project(v, tol=DEFAULT_TOL):
    """Inverse of lift, up to homogeneous scale.

    Classification: vanishing er-component -> point sphere, vanishing
    e0-component -> plane (or infinity if both vanish).
    """
    v = np.asarray(v, float)
    nv = lie_norm(v)
    if nv == 0.0:
        raise ZeroVector("cannot project the zero vector")
    if not is_isotropic(v, tol):
        raise NonIsotropic(
            f"vector is not on the Lie quadric: <v,v>={lie_inner(v, v):.3e}, |v|^2={nv * nv:.3e}"
        )
    point_like = abs(v[ER]) <= tol * nv
    plane_like = abs(v[E0]) <= tol * nv
    if point_like and plane_like:
        return PointSphere(INF)
    if point_like:
        return PointSphere(v[:3] / v[E0])
    if plane_like:
        w = v / v[ER]
        n = w[:3]
        # isotropy forces |n| = 1 once e0 vanishes
        return OrientedPlane(n / np.linalg.norm(n), 0.5 * w[EINF])
    w = v / v[E0]
    return ProperSphere(w[:3], w[ER])


def project_point(v, tol=DEFAULT_TOL):
    """Euclidean point (or INF) of a Lie vector known to be a point sphere."""
    s = project(v, tol)
    if not isinstance(s, PointSphere):
        raise NonIsotropic("vector does not represent a point sphere")
    return s.point


def oriented_contact(s1, s2, tol=DEFAULT_TOL) -> bool:
    """True iff the two generalized spheres are in oriented contact."""
    a, b = lift(s1), lift(s2)
    return abs(lie_inner(a, b)) <= tol * lie_norm(a) * lie_norm(b)


def contact_point_vector(a, b, tol=DEFAULT_TOL) -> np.ndarray:
    """Lie vector of the unique point sphere in the pencil of a and b.

    Takes the er-eliminating combination b_r*a - a_r*b, which is valid for
    arbitrary homogeneous scalings of the inputs (for e0-normalized sphere
    lifts it reduces to the radius-weighted combination, for a sphere/plane
    pair to s - r*p).  The caller normalizes afterwards.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    v = b[ER] * a - a[ER] * b
    if lie_norm(v) <= tol * max(lie_norm(a), lie_norm(b)):
        # both point spheres, or projectively equal inputs
        raise IdenticalSpheres("contact pencil degenerates to a single sphere")
    return v


def contact_point(s1, s2, tol=DEFAULT_TOL) -> PointSphere:
    """The point of tangency of two generalized spheres in oriented contact."""
    a, b = lift(s1), lift(s2)
    na, nb = lie_norm(a), lie_norm(b)
    if abs(lie_inner(a, b)) > tol * na * nb:
        raise NotInContact("spheres are not in oriented contact")
    cross = a / na - b / nb
    if lie_norm(cross) <= tol or lie_norm(a / na + b / nb) <= tol:
        raise IdenticalSpheres("spheres coincide projectively")
    v = contact_point_vector(a, b, tol)
    s = project(v, max(tol, 1e-7))
    if not isinstance(s, PointSphere):  # pragma: no cover - guarded by construction
        raise NotInContact("pencil combination is not a point sphere")
    return s


def concircular(points, tol=DEFAULT_TOL) -> bool:
    """True iff the given points of compactified 3-space lie on one circle.

    Points lie on a circle exactly when their lifts are coplanar; the rank
    decision uses singular values relative to the largest one.  Collinear
    points count as concircular (circle through infinity).
    """
    pts = list(points)
    if _distinct_count(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")
    rows = np.array([_unit(lift_point(p)) for p in pts])
    sv = np.linalg.svd(rows, compute_uv=False)
    if len(sv) < 4:
        return True
    return sv[3] <= max(tol, 1e-12) * sv[0]


def concircular_residual(points) -> float:
    """Rank-deficiency residual (4th singular value ratio) of the lifts."""
    rows = np.array([_unit(lift_point(p)) for p in points])
    sv = np.linalg.svd(rows, compute_uv=False)
    if len(sv) < 4 or sv[0] == 0.0:
        return 0.0
    return float(sv[3] / sv[0])


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n else v


def _distinct_count(pts, tol=1e-12):
    out = []
    for p in pts:
        if is_infinite(p):
            if not any(is_infinite(q) for q in out):
                out.append(p)
            continue
        p = _vec3(p)
        if not any(
            (not is_infinite(q)) and np.linalg.norm(p - q) <= tol * (1 + np.linalg.norm(p))
            for q in out
        ):
            out.append(p)
    return len(out)


def circle_through(p1, p2, p3, tol=DEFAULT_TOL):
    """Circle (or line) through three pairwise distinct points."""
    pts = [p1, p2, p3]
    if _distinct_count(pts) < 3:
        raise DegenerateInput("need three distinct points")
    finite = [p for p in pts if not is_infinite(p)]
    if len(finite) < 3:
        a, b = (_vec3(p) for p in finite[:2])
        return Line3D(a, b - a)
    a, b, c = (_vec3(p) for p in pts)
    u = b - a
    w = c - a
    cr = np.cross(u, w)
    scale = max(np.linalg.norm(u), np.linalg.norm(w))
    if np.linalg.norm(cr) <= max(tol, 1e-13) * scale * scale:
        return Line3D(a, u)
    n = cr / np.linalg.norm(cr)
    # solve for the circumcenter in the plane through a spanned by (u, w)
    m = np.array([[np.dot(u, u), np.dot(u, w)], [np.dot(u, w), np.dot(w, w)]])
    rhs = 0.5 * np.array([np.dot(u, u), np.dot(w, w)])
    st = np.linalg.solve(m, rhs)
    center = a + st[0] * u + st[1] * w
    return ProperCircle(center, float(np.linalg.norm(a - center)), n)


def circle_from_tangent(x, t, x2, tol=DEFAULT_TOL):
    """The unique circle through x and x2 that is tangent to t at x."""
    x = _vec3(x)
    t = _vec3(t)
    nt = np.linalg.norm(t)
    if nt == 0:
        raise DegenerateInput("zero tangent")
    t = t / nt
    if is_infinite(x2):
        return Line3D(x, t)
    x2 = _vec3(x2)
    d = x2 - x
    nd = np.linalg.norm(d)
    if nd <= tol * (1 + np.linalg.norm(x)):
        raise DegenerateInput("coincident points")
    perp = d - np.dot(d, t) * t
    npery = np.linalg.norm(perp)
    if npery <= max(tol, 1e-13) * nd:
        return Line3D(x, d)
    m = perp / npery
    alpha = float(np.dot(d, d) / (2.0 * np.dot(d, m)))
    center = x + alpha * m
    normal = np.cross(t, m)
    return ProperCircle(center, abs(alpha), normal / np.linalg.norm(normal))


def point_circle_distance(p, circle) -> float:
    """Euclidean distance from a finite point to a circle or line."""
    p = _vec3(p)
    if isinstance(circle, Line3D):
        d = p - circle.point
        return float(np.linalg.norm(d - np.dot(d, circle.direction) * circle.direction))
    d = p - circle.center
    h = np.dot(d, circle.normal)
    inplane = d - h * circle.normal
    return float(np.hypot(np.linalg.norm(inplane) - circle.radius, h))


def circle_point_at(circle, other_point_hint=None):
    """A deterministic point on the carrier (used by sampling helpers)."""
    if isinstance(circle, Line3D):
        return circle.point
    n = circle.normal
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = seed - np.dot(seed, n) * n
    u /= np.linalg.norm(u)
    return circle.center + circle.radius * u


def span_signature(vectors, tol=DEFAULT_TOL):
    """Counts (p, q, z) of positive/negative/near-zero eigenvalues of the
    Gram matrix of the given Lie vectors."""
    vs = [np.asarray(v, float) for v in vectors]
    if not vs:
        raise DegenerateInput("empty vector list")
    g = np.array([[lie_inner(a, b) for b in vs] for a in vs])
    w = np.linalg.eigvalsh(g)
    # scale by the vectors themselves: the Gram of isotropic spans is all
    # noise, so its own eigenvalues cannot provide the reference
    scale = max(max(float(np.dot(v, v)) for v in vs), 1e-300)
    thr = max(tol, 1e-12) * scale
    p = int(np.sum(w > thr))
    q = int(np.sum(w < -thr))
    z = len(vs) - p - q
    return (p, q, z)


def _projectively_close(a, b, tol):
    return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol


def spheres_equal(s1, s2, tol=1e-9, up_to_orientation=False) -> bool:
    """Equality of generalized spheres, optionally ignoring orientation."""
    a, b = lift(s1), lift(s2)
    a = a / lie_norm(a)
    b = b / lie_norm(b)
    if _projectively_close(a, b, tol):
        return True
    if up_to_orientation:
        flipped = b.copy()
        flipped[ER] = -flipped[ER]
        return _projectively_close(a, flipped, tol)
    return False
