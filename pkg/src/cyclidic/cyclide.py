"""Dupin cyclide patches from four concircular vertices and one vertex frame.

A generic patch is stored as two conics of sphere lifts, one per enveloping
family.  Family 1 holds the spheres supporting the two u-direction boundary
arcs (bottom at v=0, top at v=1) and is traversed by the v parameter; family
2 holds the left/right arc spheres and is traversed by u.  A surface point
is the contact point of the two family spheres selected by (u, v).

Spherical patches (all four contact elements sharing one support sphere)
are evaluated through a conformal chart instead: the support is flattened
by an inversion, the two orthogonal circle families are normalized to
coordinate lines of a log/Moebius map, and the patch becomes an axis-aligned
rectangle in that chart.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import lie
from .errors import (
    CoincidentPoints,
    DegenerateInput,
    DegenerateSubdomain,
    InvalidQuad,
    NonEmbeddedQuad,
    OrientedContactDegenerate,
    SingularVertex,
    ZeroDelta,
)
from .lie import (
    DEFAULT_TOL,
    E0,
    ER,
    INF,
    Line3D,
    OrientedPlane,
    ProperSphere,
    circle_through,
    concircular_residual,
    is_infinite,
    lie_inner,
    lie_norm,
    lift,
    lift_point,
)

SPHERICAL_SWITCH = 1e-7


# ---------------------------------------------------------------------------
# frames and quads


@dataclass(frozen=True)
class VertexFrame:
    """Orthonormal triple (t1, t2, n) attached to a base point x.

    Handedness is deliberately unconstrained: orientation flips carry
    geometric meaning for non-embedded quads.
    """

    x: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        for name in ("x", "t1", "t2", "n"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def gram_deviation(self) -> float:
        m = np.stack([self.t1, self.t2, self.n])
        return float(np.max(np.abs(m @ m.T - np.eye(3))))

    def require_orthonormal(self, tol=1e-8):
        dev = self.gram_deviation()
        if dev > tol:
            raise InvalidQuad(f"frame is not orthonormal: Gram deviation {dev:.3e}")

    def det(self) -> float:
        return float(np.linalg.det(np.stack([self.t1, self.t2, self.n])))

    def rotated(self, rot) -> "VertexFrame":
        rot = np.asarray(rot, float)
        return VertexFrame(self.x, rot @ self.t1, rot @ self.t2, rot @ self.n)


def reflect_in_bisector(x, xi, v):
    """Image of a vector under reflection in the perpendicular bisector
    plane of the segment [x, xi]."""
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    v = np.asarray(v, float)
    d = xi - x
    dd = float(d @ d)
    if dd == 0.0:
        raise CoincidentPoints("bisector of coincident points is undefined")
    return v - (2.0 * float(d @ v) / dd) * d


def _reflect_frame(frame: VertexFrame, x, xi, flip=None) -> VertexFrame:
    t1 = reflect_in_bisector(x, xi, frame.t1)
    t2 = reflect_in_bisector(x, xi, frame.t2)
    n = reflect_in_bisector(x, xi, frame.n)
    if flip == 1:
        t1 = -t1
    elif flip == 2:
        t2 = -t2
    return VertexFrame(np.asarray(xi, float), t1, t2, n)


@dataclass(frozen=True)
class VertexQuad:
    """Four concircular points in the cyclic order (x, x1, x12, x2)."""

    x: np.ndarray
    x1: np.ndarray
    x12: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        for name in ("x", "x1", "x12", "x2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def points(self):
        return (self.x, self.x1, self.x12, self.x2)

    def diameter(self) -> float:
        pts = np.stack(self.points())
        return float(max(np.linalg.norm(p - q) for p in pts for q in pts))

    def carrier(self):
        return circle_through(self.x, self.x1, self.x12)

    def circularity_residual(self) -> float:
        return concircular_residual(self.points())

    def validate(self, tol=1e-6):
        pts = self.points()
        diam = self.diameter()
        if diam == 0.0:
            raise InvalidQuad("all quad vertices coincide")
        for i in range(4):
            for j in range(i + 1, 4):
                if np.linalg.norm(pts[i] - pts[j]) <= 1e-12 * (1 + diam):
                    raise InvalidQuad(f"quad vertices {i} and {j} coincide")
        res = self.circularity_residual()
        if res > tol:
            raise InvalidQuad(f"quad is not concircular: residual {res:.3e}")

    def _angles(self):
        """Positions of the four vertices on the carrier, as angles."""
        carrier = self.carrier()
        if isinstance(carrier, Line3D):
            ts = [float((p - carrier.point) @ carrier.direction) for p in self.points()]
            scale = max(abs(t) for t in ts) or 1.0
            return [2.0 * math.atan(t / scale) for t in ts]
        u0 = self.x - carrier.center
        u0 = u0 / np.linalg.norm(u0)
        w0 = np.cross(carrier.normal, u0)
        out = []
        for p in self.points():
            d = p - carrier.center
            out.append(math.atan2(float(d @ w0), float(d @ u0)))
        return out

    def separated(self, pair_a, pair_b) -> bool:
        """True iff the vertex pair pair_a is separated by pair_b on the
        carrier circle (indices into (x, x1, x12, x2))."""
        th = self._angles()
        a, b = th[pair_a[0]], th[pair_a[1]]
        span = (b - a) % (2 * math.pi)

        def inside(t):
            return (t - a) % (2 * math.pi) < span

        return inside(th[pair_b[0]]) != inside(th[pair_b[1]])

    def is_embedded(self) -> bool:
        # cyclic order (x, x1, x12, x2) <=> the diagonals separate each other
        return self.separated((0, 2), (1, 3))


def vertex_frames(q: VertexQuad, frame: VertexFrame):
    """Patch vertex frames at all four quad vertices.

    Adjacent frames are related by reflection in the edge bisector, composed
    with the reversal of the non-corresponding tangent exactly when the edge
    endpoints are separated by the two other vertices on the carrier circle.
    """
    q.validate()
    frame.require_orthonormal()
    if np.linalg.norm(frame.x - q.x) > 1e-9 * (1 + q.diameter()):
        raise InvalidQuad("frame is not based at the quad vertex x")
    sep1 = q.separated((0, 1), (3, 2))  # x,x1 vs x2,x12
    sep2 = q.separated((0, 3), (1, 2))  # x,x2 vs x1,x12
    b1 = _reflect_frame(frame, q.x, q.x1, flip=2 if sep1 else None)
    b2 = _reflect_frame(frame, q.x, q.x2, flip=1 if sep2 else None)
    b12 = _reflect_frame(b1, q.x1, q.x12, flip=1 if sep2 else None)
    return frame, b1, b12, b2


# ---------------------------------------------------------------------------
# building blocks of the generic construction


def boundary_sphere(x, delta, n, tol=DEFAULT_TOL):
    """Principal curvature sphere through x and x+delta with normal n at x.

    Degenerates to the oriented plane through x when n is orthogonal to
    delta (then the two points and the normal are coplanar with the center
    at infinity).
    """
    x = np.asarray(x, float)
    delta = np.asarray(delta, float)
    n = np.asarray(n, float)
    nd = float(delta @ delta)
    if nd == 0.0:
        raise ZeroDelta("boundary sphere needs a nonzero edge vector")
    dn = float(delta @ n)
    if abs(dn) <= tol * math.sqrt(nd):
        return OrientedPlane(n, float(x @ n))
    r = nd / (2.0 * dn)
    return ProperSphere(x + r * n, r)


@dataclass(frozen=True)
class ArcMidpointData:
    """Midpoint of the circular arc from x to xi with tangent t at x."""

    direction: np.ndarray
    rho: float
    midpoint: object  # 3-vector or INF


def arc_midpoint(x, xi, t) -> ArcMidpointData:
    """Midpoint of the boundary arc determined by (x, xi, tangent t at x).

    The midpoint lies on the angular bisector of t and xi-x; it is infinite
    exactly when t points against the chord (the arc passes through INF).
    """
    x = np.asarray(x, float)
    xi = np.asarray(xi, float)
    t = np.asarray(t, float)
    d = xi - x
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        raise CoincidentPoints("arc endpoints coincide")
    v = nd * t + d
    denom = 2.0 * float(d @ v)
    if denom <= 1e-14 * nd * nd:
        return ArcMidpointData(v, math.inf, INF)
    rho = nd * nd / denom
    return ArcMidpointData(v, rho, x + rho * v)


def third_sphere(s, y, s_opp, tol=DEFAULT_TOL):
    """The family sphere through the arc point y: the unique member of the
    contact pencil of (s, y) that is polar to the opposite boundary sphere.

    Returns normalized Lie coordinates (unit e0-component for spheres and
    points, unit Euclidean part for planes).
    """
    s = np.asarray(s, float)
    y = np.asarray(y, float)
    s_opp = np.asarray(s_opp, float)
    a = lie_inner(s, s_opp)
    if abs(a) <= tol * lie_norm(s) * lie_norm(s_opp):
        raise OrientedContactDegenerate(
            "opposite boundary spheres are in oriented contact; "
            "the configuration is spherical"
        )
    sigma = lie_inner(y, s_opp) * s - a * y
    return normalize_support(sigma)


def normalize_support(v):
    """Scale a lift to the normalized form used by the radius formula."""
    v = np.asarray(v, float)
    nv = lie_norm(v)
    if nv == 0.0:
        raise DegenerateInput("zero support vector")
    if abs(v[E0]) > 1e-10 * nv:
        return v / v[E0]
    if abs(v[ER]) > 1e-10 * nv:
        return v / v[ER]
    raise DegenerateInput("support vector has neither e0 nor er component")


# ---------------------------------------------------------------------------
# conics of sphere lifts


_BASIS_AT_INF = np.array([2.0, -1.0, 2.0])


def _conic_basis(t):
    return np.array([2 * t * t - 3 * t + 1, t - t * t, 2 * t * t - t])


@dataclass(frozen=True)
class FamilyConic:
    """One enveloping family of spheres: the conic through three lifts.

    supports is a 3x6 array of normalized lifts; the parametrization hits
    supports[0] at t=0, supports[1] at t=1/2, supports[2] at t=1.
    """

    supports: np.ndarray
    grams: np.ndarray = field(default=None)  # (a23, a13, a12)

    def __post_init__(self):
        s = np.asarray(self.supports, float)
        if s.shape != (3, 6):
            raise DegenerateInput("FamilyConic needs three Lie vectors")
        object.__setattr__(self, "supports", s)
        if self.grams is None:
            g = np.array(
                [
                    lie_inner(s[1], s[2]),
                    lie_inner(s[0], s[2]),
                    lie_inner(s[0], s[1]),
                ]
            )
            object.__setattr__(self, "grams", g)
        else:
            object.__setattr__(self, "grams", np.asarray(self.grams, float))

    def eval(self, t):
        """Lie vector of the family sphere at parameter t (t may be INF)."""
        if t is INF or (isinstance(t, float) and math.isinf(t)):
            coeff = self.grams * _BASIS_AT_INF
        else:
            coeff = self.grams * _conic_basis(float(t))
        return coeff @ self.supports

    def radius_component(self, t) -> float:
        """er-component of eval(t): the radius scaled by the homogeneous
        e0 factor (the printed radius formula)."""
        return float(self.eval(t)[ER])

    def coefficient_curve(self):
        """The family as a quadratic 6-vector polynomial: rows are the
        coefficients of (t^2, t, 1)."""
        w = self.grams
        s = self.supports
        c2 = 2 * w[0] * s[0] - w[1] * s[1] + 2 * w[2] * s[2]
        c1 = -3 * w[0] * s[0] + w[1] * s[1] - w[2] * s[2]
        c0 = w[0] * s[0]
        return np.stack([c2, c1, c0])

    def signature(self, tol=1e-7):
        return lie.span_signature(list(self.supports), tol=tol)


def conic_eval(conic: FamilyConic, t):
    return conic.eval(t)


def family_radius(conic: FamilyConic, t) -> float:
    return conic.radius_component(t)


def _quadratic_roots(a, b, c):
    """Real roots of a t^2 + b t + c, scale-aware."""
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        return []
    a, b, c = a / scale, b / scale, c / scale
    if abs(a) < 1e-14:
        if abs(b) < 1e-14:
            return []
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        if disc > -1e-12 * (b * b + abs(4 * a * c)):
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    if b >= 0:
        q = -(b + sq) / 2
    else:
        q = -(b - sq) / 2
    roots = [q / a]
    if q != 0.0:
        roots.append(c / q)
    else:
        roots.append(0.0)
    return roots


# ---------------------------------------------------------------------------
# patches


class CyclidicPatch:
    """Curvature line parametrized piece of a Dupin cyclide over [0,1]^2.

    eval(0,0) = x, eval(1,0) = x1, eval(1,1) = x12, eval(0,1) = x2; the
    u-direction boundary arcs run from x to x1 (bottom) and x2 to x12 (top).
    """

    kind = "generic"

    def __init__(self, quad, frame, family1, family2, frames=None):
        self.quad = quad
        self.frame = frame
        self.family1 = family1  # traversed by v: bottom sphere at 0, top at 1
        self.family2 = family2  # traversed by u: left sphere at 0, right at 1
        self.frames = frames if frames is not None else vertex_frames(quad, frame)

    # -- evaluation

    def eval_vector(self, u, v):
        """Unnormalized Lie vector of the surface point."""
        a = self.family1.eval(v)
        b = self.family2.eval(u)
        w = a[ER] * b - b[ER] * a
        nw = lie_norm(w)
        if nw <= 1e-13 * max(lie_norm(a), lie_norm(b)):
            # both family spheres degenerate to the same point sphere
            return a / lie_norm(a)
        return w

    def eval(self, u, v):
        """Euclidean surface point (or INF) at parameters (u, v)."""
        w = self.eval_vector(u, v)
        nw = lie_norm(w)
        if abs(w[E0]) <= 1e-12 * nw:
            return INF
        return w[:3] / w[E0]

    def normal(self, u, v):
        """Unit surface normal, from the better-conditioned family sphere."""
        p = self.eval(u, v)
        a = self.family1.eval(v)
        b = self.family2.eval(u)
        cands = sorted((a, b), key=lambda s: -abs(s[ER]) / lie_norm(s))
        for s in cands:
            if abs(s[ER]) <= 1e-13 * lie_norm(s):
                continue
            if is_infinite(p):
                nvec = s[:3] / s[ER]
            else:
                nvec = (s[:3] - s[E0] * p) / s[ER]
            nn = np.linalg.norm(nvec)
            if nn > 1e-12:
                return nvec / nn
        raise SingularVertex("normal undefined at a singular point")

    def contact_element(self, u, v):
        a = self.family1.eval(v)
        b = self.family2.eval(u)
        return ContactElement(self.eval(u, v), self.normal(u, v), (a, b))

    # -- structure

    def corners(self):
        return self.quad.points()

    def boundary_sphere_vector(self, edge):
        """Lift of the principal sphere supporting one boundary arc.

        edge is one of 'v0' (bottom), 'v1' (top), 'u0' (left), 'u1' (right).
        """
        return {
            "v0": self.family1.supports[0],
            "v1": self.family1.supports[2],
            "u0": self.family2.supports[0],
            "u1": self.family2.supports[2],
        }[edge]

    def edge_point(self, edge, s):
        u, v = _edge_param(edge, s)
        return self.eval(u, v)

    def invert_edge_parameter(self, edge, p, tol=1e-7):
        """Parameter of a point known to lie on the given boundary arc.

        The boundary parametrization is a quadratic parametrization of a
        conic, hence a Moebius function of the stereographic coordinate on
        the carrier circle; three samples determine it and the inversion is
        closed-form (no ill-conditioned double root).
        """
        samples = [self.edge_point(edge, s) for s in (0.0, 0.5, 1.0)]
        lam0, lamm, lam1, lamp = _stereo_coords(samples, p)
        b = lam0
        m = np.array([[1.0, -lam1], [1.0, -lamm]])
        rhs = np.array([lam1 - b, 2 * lamm - 2 * b])
        det = np.linalg.det(m)
        if abs(det) < 1e-14 * (1 + abs(lam1) + abs(lamm)):
            raise DegenerateInput("degenerate boundary parametrization")
        a, c = np.linalg.solve(m, rhs)
        den = a - c * lamp
        if abs(den) < 1e-300:
            raise DegenerateInput("point maps to the parameter pole")
        s = float((lamp - b) / den)
        s = min(max(s, 0.0), 1.0)
        gap = _point_gap(self.edge_point(edge, s), p)
        if gap > tol * (1 + self.quad.diameter()):
            raise DegenerateInput(
                f"point does not lie on boundary arc {edge} (gap {gap:.3e})"
            )
        return s

    def parameter_line_circle(self, direction, s):
        """Carrier circle of the iso-parameter line u=s (direction 1) or
        v=s (direction 2)."""
        if direction == 1:
            pts = [self.eval(s, t) for t in (0.0, 0.5, 1.0)]
        else:
            pts = [self.eval(t, s) for t in (0.0, 0.5, 1.0)]
        if any(is_infinite(p) for p in pts):
            finite = [p for p in pts if not is_infinite(p)]
            return Line3D(finite[0], finite[1] - finite[0])
        return circle_through(*pts)

    def singular_parameters(self, tol=DEFAULT_TOL):
        """Roots of the family radius within [0,1]: parameters whose family
        sphere is a point sphere (a singular point of the cyclide)."""
        out = []
        for fam_id, conic in ((1, self.family1), (2, self.family2)):
            coeffs = conic.coefficient_curve()[:, ER]
            scale = max(np.max(np.abs(conic.supports)), 1.0)
            hits = []
            for r in _quadratic_roots(*coeffs):
                if -tol <= r <= 1 + tol and abs(np.polyval(coeffs, r)) <= 1e-6 * scale:
                    r = min(max(r, 0.0), 1.0)
                    # a double root (horn-type pinch) is one singular point
                    if not any(abs(r - h) <= 1e-6 for h in hits):
                        hits.append(r)
            out.extend((fam_id, r) for r in hits)
        return out

    def subpatch(self, u0, v0):
        """Restriction to [0,u0] x [0,v0], reparametrized to the unit square.

        The new family conics pass through the evaluated support spheres at
        {0, u0/2, u0} resp. {0, v0/2, v0}; the quadratic three-point
        parametrization then reproduces eval(u*u0, v*v0) identically.
        """
        if not (0 < u0 <= 1 and 0 < v0 <= 1):
            raise DegenerateSubdomain("subpatch corner must lie in (0,1]^2")
        corners = [self.eval(u0, 0.0), self.eval(u0, v0), self.eval(0.0, v0)]
        if any(is_infinite(c) for c in corners):
            raise SingularVertex("subpatch corner at infinity")
        quad = VertexQuad(self.quad.x, corners[0], corners[1], corners[2])
        try:
            quad.validate()
        except InvalidQuad as exc:
            raise SingularVertex(f"degenerate subpatch vertices: {exc}") from exc
        fam2 = FamilyConic(
            np.stack([normalize_support(self.family2.eval(t)) for t in (0.0, u0 / 2, u0)])
        )
        fam1 = FamilyConic(
            np.stack([normalize_support(self.family1.eval(t)) for t in (0.0, v0 / 2, v0)])
        )
        return CyclidicPatch(quad, self.frame, fam1, fam2)


@dataclass(frozen=True)
class ContactElement:
    """Oriented contact element: point + unit normal + a spanning pair of
    Lie vectors of the defining isotropic line."""

    point: object
    normal: np.ndarray
    span: tuple


def _edge_param(edge, s):
    return {
        "v0": (s, 0.0),
        "v1": (s, 1.0),
        "u0": (0.0, s),
        "u1": (1.0, s),
    }[edge]


def _point_gap(p, q):
    if is_infinite(p) and is_infinite(q):
        return 0.0
    if is_infinite(p) or is_infinite(q):
        return math.inf
    return float(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float)))


def _stereo_coords(samples, extra):
    """Finite stereographic coordinates of concircular points.

    The projection pole is placed in the largest angular gap between the
    data points, so every returned coordinate is finite.
    """
    pts = list(samples) + [extra]
    finite = [np.asarray(q, float) for q in pts if not is_infinite(q)]
    if len(finite) < 2:
        raise DegenerateInput("not enough finite points on the carrier")
    carrier = circle_through(*finite[:3]) if len(finite) >= 3 else Line3D(
        finite[0], finite[1] - finite[0]
    )
    if isinstance(carrier, Line3D):
        scale = max(float(np.linalg.norm(q - carrier.point)) for q in finite) or 1.0
        thetas = [
            math.pi
            if is_infinite(q)
            else 2.0 * math.atan(float((np.asarray(q, float) - carrier.point) @ carrier.direction) / scale)
            for q in pts
        ]
    else:
        if any(is_infinite(q) for q in pts):
            raise DegenerateInput("infinite point is not on a proper circle")
        u0 = finite[0] - carrier.center
        u0 = u0 / np.linalg.norm(u0)
        w0 = np.cross(carrier.normal, u0)
        thetas = []
        for q in pts:
            d = np.asarray(q, float) - carrier.center
            thetas.append(math.atan2(float(d @ w0), float(d @ u0)))
    order = sorted(thetas)
    gaps = [(order[(k + 1) % len(order)] - order[k]) % (2 * math.pi) for k in range(len(order))]
    k_max = int(np.argmax(gaps))
    pole = order[k_max] + gaps[k_max] / 2.0
    # tan is singular exactly at the pole angle, which no data point attains
    return [math.tan((((t - pole) % (2 * math.pi)) - math.pi) / 2.0) for t in thetas]


# ---------------------------------------------------------------------------
# spherical patches


def is_spherical(q: VertexQuad, frame: VertexFrame, tol=DEFAULT_TOL) -> bool:
    """True iff the normal line x + R*n meets the axis of the vertex circle
    or is parallel to it (the contact elements then share one sphere)."""
    carrier = q.carrier()
    n = frame.n
    if isinstance(carrier, Line3D):
        # carrier through infinity: fall back to the algebraic criterion
        return _opposite_spheres_in_contact(q, frame, tol)
    axis_dir = carrier.normal
    g = carrier.center - q.x
    det = float(np.linalg.det(np.stack([g, n, axis_dir])))
    scale = max(float(np.linalg.norm(g)), carrier.radius)
    return abs(det) <= max(tol, 1e-13) * max(scale, 1e-300)


def _opposite_spheres_in_contact(q, frame, tol):
    _, b1, _, b2 = vertex_frames(q, frame)
    s1 = lift(boundary_sphere(q.x, q.x1 - q.x, frame.n))
    s1o = lift(boundary_sphere(q.x2, q.x12 - q.x2, b2.n))
    s2 = lift(boundary_sphere(q.x, q.x2 - q.x, frame.n))
    s2o = lift(boundary_sphere(q.x1, q.x12 - q.x1, b1.n))
    d1 = abs(lie_inner(s1, s1o)) / (lie_norm(s1) * lie_norm(s1o))
    d2 = abs(lie_inner(s2, s2o)) / (lie_norm(s2) * lie_norm(s2o))
    return min(d1, d2) <= tol


class _PlanarChart:
    """Conformal identification of the support sphere/plane with C."""

    def __init__(self, support, anchor_points):
        self.support = support
        if isinstance(support, OrientedPlane):
            self.inversion_base = None
            o = anchor_points[0]
            self.plane_normal = support.normal
            d = anchor_points[1] - o
            d = d - (d @ self.plane_normal) * self.plane_normal
            u1 = d / np.linalg.norm(d)
            self.origin = o
            self.u1 = u1
            self.u2 = np.cross(self.plane_normal, u1)
            return
        center = support.center
        radius = abs(support.radius)
        self.inversion_base = _pick_inversion_base(center, radius, anchor_points)
        m = center - self.inversion_base
        self.plane_normal = m / np.linalg.norm(m)
        self.origin = self._invert(anchor_points[0])
        d = self._invert(anchor_points[1]) - self.origin
        d = d - (d @ self.plane_normal) * self.plane_normal
        self.u1 = d / np.linalg.norm(d)
        self.u2 = np.cross(self.plane_normal, self.u1)

    def _invert(self, p):
        d = np.asarray(p, float) - self.inversion_base
        return self.inversion_base + d / float(d @ d)

    def to_complex(self, p):
        if self.inversion_base is not None:
            p = self._invert(p)
        d = np.asarray(p, float) - self.origin
        return complex(float(d @ self.u1), float(d @ self.u2))

    def to_point(self, z):
        if is_infinite(z) or not (math.isfinite(z.real) and math.isfinite(z.imag)):
            # the chart plane's infinity is the inversion base point
            return self.inversion_base if self.inversion_base is not None else INF
        p = self.origin + z.real * self.u1 + z.imag * self.u2
        if self.inversion_base is not None:
            p = self._invert(p)
        return p


def _pick_inversion_base(center, radius, avoid):
    """Point on the sphere far away from the given surface points."""
    dirs = [np.array(v, float) for v in _CANDIDATE_DIRS]
    centroid = np.mean(np.stack(avoid), axis=0) - center
    if np.linalg.norm(centroid) > 1e-9 * radius:
        dirs.insert(0, -centroid / np.linalg.norm(centroid))
    best, best_d = None, -1.0
    for d in dirs:
        d = d / np.linalg.norm(d)
        p = center + radius * d
        dist = min(float(np.linalg.norm(p - a)) for a in avoid)
        if dist > best_d:
            best, best_d = p, dist
    if best_d < 1e-6 * radius:
        raise DegenerateInput("no usable inversion base on the support sphere")
    return best


_CANDIDATE_DIRS = [
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
    (1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1),
    (-1, -1, 1), (-1, 1, -1), (1, -1, -1), (-1, -1, -1),
]


def _circle2d(chart, pts3d):
    """Image carrier of a boundary circle in the chart, as ('circle', c, r)
    or ('line', p, dir) with complex entries."""
    zs = [chart.to_complex(p) for p in pts3d]
    (x0, y0), (x1, y1), (x2, y2) = ((z.real, z.imag) for z in zs)
    a = np.array([[x1 - x0, y1 - y0], [x2 - x0, y2 - y0]])
    rhs = 0.5 * np.array(
        [x1 * x1 - x0 * x0 + y1 * y1 - y0 * y0, x2 * x2 - x0 * x0 + y2 * y2 - y0 * y0]
    )
    scale = max(abs(zs[1] - zs[0]), abs(zs[2] - zs[0]))
    if abs(np.linalg.det(a)) <= 1e-12 * scale * scale:
        d = zs[1] - zs[0]
        return ("line", zs[0], d / abs(d))
    cx, cy = np.linalg.solve(a, rhs)
    c = complex(cx, cy)
    return ("circle", c, abs(zs[0] - c))


def _carrier_common_points(c1, c2):
    """Common points of two 2d carriers; INF marks a shared point at
    infinity (two lines)."""
    kind1, kind2 = c1[0], c2[0]
    if kind1 == "line" and kind2 == "line":
        p1, d1 = c1[1], c1[2]
        p2, d2 = c2[1], c2[2]
        cross = (d1.conjugate() * d2).imag
        if abs(cross) < 1e-12:
            return [INF]
        t = ((p2 - p1).conjugate() * d2).imag / (d1.conjugate() * d2).imag
        return [p1 + t * d1, INF]
    if kind1 == "circle" and kind2 == "circle":
        cA, rA = c1[1], c1[2]
        cB, rB = c2[1], c2[2]
        d = abs(cB - cA)
        scale = max(rA, rB, d)
        if d < 1e-12 * scale:
            return []
        x = (d * d + rA * rA - rB * rB) / (2 * d)
        h2 = rA * rA - x * x
        tol2 = 1e-9 * scale * scale
        u = (cB - cA) / d
        if h2 < -tol2:
            return []
        if h2 <= tol2:
            return [cA + x * u]
        h = math.sqrt(h2)
        return [cA + x * u + 1j * h * u, cA + x * u - 1j * h * u]
    if kind1 == "line":
        c1, c2 = c2, c1
    cC, rC = c1[1], c1[2]
    p, d = c2[1], c2[2]
    t0 = ((cC - p).conjugate() * d).real
    foot = p + t0 * d
    h2 = rC * rC - abs(foot - cC) ** 2
    tol2 = 1e-9 * max(rC, abs(foot - cC)) ** 2
    if h2 < -tol2:
        return []
    if h2 <= tol2:
        return [foot]
    h = math.sqrt(h2)
    return [foot + h * d, foot - h * d]


def _pencil_limit_points(c1, c2):
    """Limit points of the coaxial pencil spanned by two disjoint carriers."""

    def coeffs(c):
        if c[0] == "line":
            p, d = c[1], c[2]
            nx, ny = -d.imag, d.real
            return np.array([0.0, nx, ny, -(nx * p.real + ny * p.imag)])
        cc, r = c[1], c[2]
        return np.array([1.0, -2 * cc.real, -2 * cc.imag, abs(cc) ** 2 - r * r])

    g1, g2 = coeffs(c1), coeffs(c2)

    # point-circle condition B^2 + C^2 - 4 a D = 0 along (1-l) g1 + l g2
    def disc(g):
        return g[1] * g[1] + g[2] * g[2] - 4 * g[0] * g[3]

    ca = disc(g2 - g1)
    dg = g2 - g1
    cb = 2 * (g1[1] * dg[1] + g1[2] * dg[2] - 2 * (g1[0] * dg[3] + g1[3] * dg[0]))
    cc = disc(g1)
    roots = _quadratic_roots(ca, cb, cc)
    pts = []
    for lam in roots:
        g = g1 + lam * (g2 - g1)
        if abs(g[0]) < 1e-13 * max(abs(g[1]), abs(g[2]), 1e-300):
            pts.append(INF)
        else:
            pts.append(complex(-g[1] / (2 * g[0]), -g[2] / (2 * g[0])))
    if len(pts) == 1:
        # concentric pair: the second limit point of the pencil is infinity
        pts.append(INF)
    if len(pts) != 2:
        raise DegenerateInput("could not determine the conjugate pencil")
    return pts


class _Moebius:
    """z -> (a z + b) / (c z + d) over C u {INF}."""

    def __init__(self, a, b, c, d):
        self.m = (complex(a), complex(b), complex(c), complex(d))

    def __call__(self, z):
        a, b, c, d = self.m
        if is_infinite(z):
            return INF if abs(c) < 1e-300 else a / c
        den = c * z + d
        if abs(den) < 1e-300:
            return INF
        return (a * z + b) / den

    def inverse(self):
        a, b, c, d = self.m
        return _Moebius(d, -b, -c, a)


def _resolve_angular_end(v0, v_end_raw, v_interior_raw):
    """Branch of an angular end coordinate, resolved by an interior sample.

    The sweep from v0 to the end is monotone and shorter than a full turn;
    the interior sample must fall strictly between (it need not be the
    midpoint: the chart is conformal, not isometric).
    """
    candidates = []
    for k in (-1, 0, 1):
        v1 = v_end_raw + 2 * math.pi * k
        span = v1 - v0
        if abs(span) >= 2 * math.pi - 1e-9 or abs(span) < 1e-12:
            continue
        for j in (-2, -1, 0, 1, 2):
            vm = v_interior_raw + 2 * math.pi * j
            if 1e-12 < (vm - v0) / span < 1 - 1e-12:
                candidates.append(v1)
                break
    if not candidates:
        raise InvalidQuad("cannot resolve the angular branch of a boundary arc")
    return min(candidates, key=lambda v: abs(v - v0))


class MoebiusReparam:
    """Monotone [0,1]->[0,1] map pinning 1/2 to a prescribed value h."""

    def __init__(self, h=0.5):
        if not (0 < h < 1):
            raise DegenerateInput("reparametrization pin must be interior")
        self.h = float(h)

    def __call__(self, s):
        lam = self.h / (1 - self.h)
        return lam * s / (lam * s + (1 - s))

    def inverse_value(self, y):
        lam = self.h / (1 - self.h)
        return y / (lam + y - lam * y)


class SphericalPatch(CyclidicPatch):
    """Degenerate patch contained in a single support sphere or plane.

    Parametrized through a conformal chart zeta in which the two orthogonal
    circle families are the coordinate lines: family 1 (bottom/top) circles
    are level sets of the eta coordinate, family 2 (left/right) of xi, and
    the patch is the rectangle [xi0,xi1] x [eta0,eta1], u along xi.
    """

    kind = "spherical"

    def __init__(self, quad, frame, support, chart, transform, kind2d, xi_first,
                 xi_interval, eta_interval, xi_angular, eta_angular,
                 frames=None, reparam_u=None, reparam_v=None):
        self.quad = quad
        self.frame = frame
        self.support = support
        self.family1 = None
        self.family2 = None
        self.chart = chart
        self.transform = transform
        self.kind2d = kind2d      # 'log' or 'affine' map from the Moebius image
        self.xi_first = xi_first  # True iff xi is the real part of zeta
        self.xi_interval = xi_interval
        self.eta_interval = eta_interval
        self.xi_angular = xi_angular
        self.eta_angular = eta_angular
        self.reparam_u = reparam_u or MoebiusReparam(0.5)
        self.reparam_v = reparam_v or MoebiusReparam(0.5)
        self.frames = frames if frames is not None else vertex_frames(quad, frame)

    # chart plumbing -------------------------------------------------------

    def _zeta_of_point(self, p):
        z = self.chart.to_complex(p)
        w = self.transform(z)
        if is_infinite(w):
            raise SingularVertex("point maps to a chart pole")
        return cmath.log(w) if self.kind2d == "log" else w

    def _coords_of_point(self, p):
        z = self._zeta_of_point(p)
        return (z.real, z.imag) if self.xi_first else (z.imag, z.real)

    def _point_of_coords(self, xi, eta):
        zeta = complex(xi, eta) if self.xi_first else complex(eta, xi)
        w = cmath.exp(zeta) if self.kind2d == "log" else zeta
        z = self.transform.inverse()(w)
        return self.chart.to_point(z)

    def eval(self, u, v):
        xi0, xi1 = self.xi_interval
        eta0, eta1 = self.eta_interval
        xi = xi0 + self.reparam_u(u) * (xi1 - xi0)
        eta = eta0 + self.reparam_v(v) * (eta1 - eta0)
        return self._point_of_coords(xi, eta)

    def eval_vector(self, u, v):
        return lift_point(self.eval(u, v))

    def normal(self, u, v):
        p = self.eval(u, v)
        if isinstance(self.support, OrientedPlane):
            return self.support.normal
        if is_infinite(p):
            raise SingularVertex("normal undefined at infinity on a sphere")
        return (self.support.center - p) / self.support.radius

    def contact_element(self, u, v):
        p = self.eval(u, v)
        return ContactElement(p, self.normal(u, v), (lift(self.support), lift_point(p)))

    def boundary_sphere_vector(self, edge):
        # the support carries every boundary arc of a spherical patch
        return lift(self.support)

    def invert_edge_parameter(self, edge, p, tol=1e-7):
        xi, eta = self._coords_of_point(p)
        if edge in ("v0", "v1"):
            coord, (lo, hi), rep, angular = xi, self.xi_interval, self.reparam_u, self.xi_angular
        else:
            coord, (lo, hi), rep, angular = eta, self.eta_interval, self.reparam_v, self.eta_angular
        if angular:
            coord = lo + ((coord - lo + math.pi) % (2 * math.pi) - math.pi)
        s = rep.inverse_value((coord - lo) / (hi - lo))
        s = min(max(s, 0.0), 1.0)
        if _point_gap(self.edge_point(edge, s), p) > tol * (1 + self.quad.diameter()):
            raise DegenerateInput(f"point does not lie on boundary arc {edge}")
        return s

    def singular_parameters(self, tol=DEFAULT_TOL):
        # the family base points are excluded from any valid patch rectangle
        return []

    def subpatch(self, u0, v0):
        if not (0 < u0 <= 1 and 0 < v0 <= 1):
            raise DegenerateSubdomain("subpatch corner must lie in (0,1]^2")
        corners = [self.eval(u0, 0.0), self.eval(u0, v0), self.eval(0.0, v0)]
        if any(is_infinite(c) for c in corners):
            raise SingularVertex("subpatch corner at infinity")
        quad = VertexQuad(self.quad.x, *corners)
        xi0, xi1 = self.xi_interval
        eta0, eta1 = self.eta_interval
        return SphericalPatch(
            quad, self.frame, self.support, self.chart, self.transform,
            self.kind2d, self.xi_first,
            (xi0, xi0 + self.reparam_u(u0) * (xi1 - xi0)),
            (eta0, eta0 + self.reparam_v(v0) * (eta1 - eta0)),
            self.xi_angular, self.eta_angular,
            reparam_u=_ScaledReparam(self.reparam_u, u0),
            reparam_v=_ScaledReparam(self.reparam_v, v0),
        )


class _ScaledReparam:
    """Reparametrization of a sub-interval, rescaled back to [0,1]."""

    def __init__(self, rep, s0):
        self.rep, self.s0, self.scale = rep, s0, rep(s0)

    def __call__(self, s):
        return self.rep(self.s0 * s) / self.scale

    def inverse_value(self, y):
        return self.rep.inverse_value(y * self.scale) / self.s0


def spherical_patch(q: VertexQuad, frame: VertexFrame, y1=None, y2=None) -> SphericalPatch:
    """Construct the degenerate patch lying in the common support sphere.

    The two orthogonal circle families are normalized by classifying the
    common points of the bottom/top boundary circles: two common points
    map the pencil to lines through the origin, one to parallel lines,
    none to concentric circles around the pencil's limit points.
    """
    q.validate()
    frame.require_orthonormal()
    frames = vertex_frames(q, frame)
    support = boundary_sphere(q.x, q.x1 - q.x, frame.n)
    sup_lift = lift(support)
    for p in (q.x2, q.x12):
        gap = abs(lie_inner(sup_lift, lift_point(p)))
        if gap > 1e-6 * lie_norm(sup_lift) * lie_norm(lift_point(p)):
            raise InvalidQuad(
                "vertices do not lie on a common support sphere "
                f"(incidence residual {gap:.3e}); configuration is not spherical"
            )

    b, b1, b12, b2 = frames
    mid_bottom = arc_midpoint(q.x, q.x1, frame.t1).midpoint
    mid_left = arc_midpoint(q.x, q.x2, frame.t2).midpoint
    mid_top = arc_midpoint(q.x2, q.x12, b2.t1).midpoint
    mid_right = arc_midpoint(q.x1, q.x12, b1.t2).midpoint
    if any(is_infinite(p) for p in (mid_bottom, mid_left, mid_top, mid_right)):
        raise DegenerateInput("boundary arc through infinity is not supported here")

    anchors = [q.x, q.x1, q.x12, q.x2, mid_bottom, mid_left, mid_top, mid_right]
    chart = _PlanarChart(support, anchors)
    bottom = _circle2d(chart, [q.x, mid_bottom, q.x1])
    top = _circle2d(chart, [q.x2, mid_top, q.x12])

    # normalize one pair of opposite boundary circles; if the family-1 pair
    # coincides (all arcs on the quad carrier) the family-2 pair is distinct
    if _carriers_coincide(bottom, top):
        pair = (
            _circle2d(chart, [q.x, mid_left, q.x2]),
            _circle2d(chart, [q.x1, mid_right, q.x12]),
        )
        pair_is_family1 = False
    else:
        pair = (bottom, top)
        pair_is_family1 = True
    common = _carrier_common_points(*pair)

    if len(common) == 2:
        # intersecting pencil -> lines through the origin; the pencil-index
        # coordinate is the (angular) argument Im(log w)
        a_pt, b_pt = common
        if is_infinite(a_pt):
            a_pt, b_pt = b_pt, a_pt
        if is_infinite(b_pt):
            transform = _Moebius(1, -a_pt, 0, 1)
        else:
            transform = _Moebius(1, -a_pt, 1, -b_pt)
        kind2d, index_is_re, index_ang, along_ang = "log", False, True, False
    elif len(common) == 1:
        # tangent pencil -> parallel horizontal lines; index = Im, affine
        a_pt = common[0]
        if is_infinite(a_pt):
            if pair[0][0] != "line":
                raise DegenerateInput("tangency at infinity without line carriers")
            transform = _Moebius(1 / pair[0][2], 0, 0, 1)
        else:
            pre = _Moebius(0, 1, 1, -a_pt)
            ref = [q.x, mid_bottom, q.x1] if pair_is_family1 else [q.x, mid_left, q.x2]
            direction = _image_line_direction(pre, chart, ref)
            transform = _compose_moebius(_Moebius(1 / direction, 0, 0, 1), pre)
        kind2d, index_is_re, index_ang, along_ang = "affine", False, False, False
    else:
        # disjoint pencil -> concentric circles; index = Re(log w), and the
        # position along each circle is the angular coordinate
        l1, l2 = _pencil_limit_points(*pair)
        if is_infinite(l1):
            l1, l2 = l2, l1
        if is_infinite(l2):
            transform = _Moebius(1, -l1, 0, 1)
        else:
            transform = _Moebius(1, -l1, 1, -l2)
        kind2d, index_is_re, index_ang, along_ang = "log", True, False, True

    if pair_is_family1:
        # eta indexes family 1, xi runs along its circles
        xi_first = not index_is_re
        xi_angular, eta_angular = along_ang, index_ang
    else:
        # xi indexes family 2
        xi_first = index_is_re
        xi_angular, eta_angular = index_ang, along_ang

    patch = SphericalPatch(
        q, frame, support, chart, transform, kind2d, xi_first,
        (0.0, 1.0), (0.0, 1.0), xi_angular, eta_angular, frames=frames,
    )

    xi00, eta00 = patch._coords_of_point(q.x)
    xi10, eta10 = patch._coords_of_point(q.x1)
    xi01, eta01 = patch._coords_of_point(q.x2)
    xim, _ = patch._coords_of_point(np.asarray(mid_bottom, float))
    _, etam = patch._coords_of_point(np.asarray(mid_left, float))
    xi1 = _resolve_angular_end(xi00, xi10, xim) if xi_angular else xi10
    eta1 = _resolve_angular_end(eta00, eta01, etam) if eta_angular else eta01
    if abs(xi1 - xi00) < 1e-12 or abs(eta1 - eta00) < 1e-12:
        raise InvalidQuad("degenerate chart rectangle for spherical patch")
    patch.xi_interval = (xi00, xi1)
    patch.eta_interval = (eta00, eta1)

    # pin the half parameters to the prescribed third points (geometric arc
    # midpoints by default, matching the generic construction: the chart
    # coordinate is conformal, not arclength)
    patch.reparam_u = MoebiusReparam(_chart_fraction(patch, y1 if y1 is not None else mid_bottom, "u"))
    patch.reparam_v = MoebiusReparam(_chart_fraction(patch, y2 if y2 is not None else mid_left, "v"))

    _check_corner_contract(patch)
    return patch


def _compose_moebius(m2, m1):
    a1, b1, c1, d1 = m1.m
    a2, b2, c2, d2 = m2.m
    return _Moebius(a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * a1 + d2 * c1, c2 * b1 + d2 * d1)


def _carriers_coincide(c1, c2, tol=1e-9):
    if c1[0] != c2[0]:
        return False
    if c1[0] == "line":
        p1, d1 = c1[1], c1[2]
        p2, d2 = c2[1], c2[2]
        if abs((d1.conjugate() * d2).imag) > tol:
            return False
        return abs(((p2 - p1).conjugate() * d1).imag) <= tol * (1 + abs(p2 - p1))
    scale = max(c1[2], c2[2])
    return abs(c1[1] - c2[1]) <= tol * scale and abs(c1[2] - c2[2]) <= tol * scale


def _image_line_direction(moebius, chart, pts3d):
    zs = [moebius(chart.to_complex(p)) for p in pts3d]
    d = zs[2] - zs[0]
    return d / abs(d)


def _chart_fraction(patch, y, direction):
    xi, eta = patch._coords_of_point(np.asarray(y, float))
    if direction == "u":
        (lo, hi), coord, angular = patch.xi_interval, xi, patch.xi_angular
    else:
        (lo, hi), coord, angular = patch.eta_interval, eta, patch.eta_angular
    if angular:
        coord = lo + ((coord - lo + math.pi) % (2 * math.pi) - math.pi)
    frac = (coord - lo) / (hi - lo)
    if not (0.0 < frac < 1.0):
        raise DegenerateInput("half-line pin is not interior to its arc")
    return frac


def _check_corner_contract(patch, tol=1e-8):
    want = patch.quad.points()
    got = [patch.eval(0, 0), patch.eval(1, 0), patch.eval(1, 1), patch.eval(0, 1)]
    diam = patch.quad.diameter()
    for w, g in zip(want, got):
        if _point_gap(w, g) > tol * (1 + diam):
            raise InvalidQuad(
                f"corner contract violated: got {np.asarray(g)} for corner {np.asarray(w)}"
            )


# ---------------------------------------------------------------------------
# the main constructor


def patch_from_data(q: VertexQuad, frame: VertexFrame, y1=None, y2=None) -> CyclidicPatch:
    """Build the unique cyclidic patch with the given vertices and frame.

    y1/y2 override the default arc midpoints used as the third contact
    points on the bottom resp. left boundary arc (any interior arc point is
    admissible); the u=1/2, v=1/2 parameter lines then pass through them.
    Spherical configurations are routed to the degenerate construction.
    """
    q.validate()
    frame.require_orthonormal()
    if not q.is_embedded():
        raise NonEmbeddedQuad("patch construction requires an embedded vertex quad")
    if is_spherical(q, frame, tol=SPHERICAL_SWITCH) or _opposite_spheres_in_contact(
        q, frame, SPHERICAL_SWITCH
    ):
        return spherical_patch(q, frame, y1=y1, y2=y2)

    frames = vertex_frames(q, frame)
    _, b1, _, b2 = frames
    s1 = lift(boundary_sphere(q.x, q.x1 - q.x, frame.n))      # bottom
    s1_opp = lift(boundary_sphere(q.x2, q.x12 - q.x2, b2.n))  # top
    s2 = lift(boundary_sphere(q.x, q.x2 - q.x, frame.n))      # left
    s2_opp = lift(boundary_sphere(q.x1, q.x12 - q.x1, b1.n))  # right

    if y1 is None:
        y1 = arc_midpoint(q.x, q.x1, frame.t1).midpoint
    if y2 is None:
        y2 = arc_midpoint(q.x, q.x2, frame.t2).midpoint
    if is_infinite(y1) or is_infinite(y2):
        raise DegenerateInput("third arc point at infinity; reseat the patch anchor")

    sigma2 = third_sphere(s1, lift_point(y1), s1_opp)  # family 2 at u=1/2
    sigma1 = third_sphere(s2, lift_point(y2), s2_opp)  # family 1 at v=1/2

    family1 = FamilyConic(np.stack([normalize_support(s1), sigma1, normalize_support(s1_opp)]))
    family2 = FamilyConic(np.stack([normalize_support(s2), sigma2, normalize_support(s2_opp)]))
    patch = CyclidicPatch(q, frame, family1, family2, frames=frames)
    _check_corner_contract(patch)
    return patch
