"""Circular and cyclidic nets on finite grid boxes (m = 2, 3).

A circular net stores vertices on a Z^m box; a cyclidic net adds an
orthonormal m-frame per vertex, evolving between neighbors by reflection in
the edge bisector plane composed with reversal of the corresponding tangent.
Every elementary quad then carries a unique cyclidic patch and the patches
join C1 along shared boundary arcs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import lie
from .cyclide import (
    CyclidicPatch,
    VertexFrame,
    VertexQuad,
    arc_midpoint,
    boundary_sphere,
    patch_from_data,
    reflect_in_bisector,
)
from .errors import (
    ClosureViolation,
    CoincidentPoints,
    CollidingVertices,
    DegenerateInput,
    DegenerateMiquel,
    InvalidNet,
    PropagationConflict,
)
from .lie import INF, is_infinite, lie_norm, lift, lift_point

AXIS_PAIRS_3D = ((0, 1), (0, 2), (1, 2))


# ---------------------------------------------------------------------------
# circular nets


@dataclass
class CircularNet:
    """Vertices of a discrete orthogonal net on a finite box of Z^m."""

    vertices: np.ndarray  # shape dims + (3,)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, float)
        if self.vertices.ndim not in (3, 4) or self.vertices.shape[-1] != 3:
            raise InvalidNet("vertex array must have shape (n1,n2[,n3],3)")

    @property
    def m(self) -> int:
        return self.vertices.ndim - 1

    @property
    def extents(self):
        return self.vertices.shape[:-1]

    def point(self, z):
        return self.vertices[tuple(z)]

    def quad_points(self, base, da, db):
        """Vertices (x, x_a, x_ab, x_b) of the elementary quad at base."""
        z = np.asarray(base, int)
        ea = np.eye(self.m, dtype=int)[da]
        eb = np.eye(self.m, dtype=int)[db]
        return (
            self.point(z),
            self.point(z + ea),
            self.point(z + ea + eb),
            self.point(z + eb),
        )

    def iter_quads(self):
        """Yields (base, da, db) over all elementary quads."""
        dims = self.extents
        pairs = [(0, 1)] if self.m == 2 else AXIS_PAIRS_3D
        for da, db in pairs:
            ranges = []
            for d, n in enumerate(dims):
                top = n if d not in (da, db) else n - 1
                ranges.append(range(top))
            for z in itertools.product(*ranges):
                yield z, da, db

    def diameter(self) -> float:
        pts = self.vertices.reshape(-1, 3)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(np.linalg.norm(hi - lo))


@dataclass
class QuadCheck:
    base: tuple
    directions: tuple
    residual: float
    embedded: bool


@dataclass
class CircularReport:
    quads: list
    ok: bool
    max_residual: float

    def failing(self):
        return [q for q in self.quads if not (q.embedded and q.residual <= self.tol)]


def validate_circular(net: CircularNet, tol=1e-8) -> CircularReport:
    """Concircularity and embeddedness of every elementary quad."""
    checks = []
    ok = True
    worst = 0.0
    for base, da, db in net.iter_quads():
        pts = net.quad_points(base, da, db)
        quad = VertexQuad(*pts)
        try:
            quad.validate(tol=max(tol, 1e-6))
            res = quad.circularity_residual()
            emb = quad.is_embedded()
        except Exception:
            res, emb = math.inf, False
        checks.append(QuadCheck(tuple(base), (da, db), res, emb))
        worst = max(worst, res)
        if res > tol or not emb:
            ok = False
    report = CircularReport(checks, ok, worst)
    report.tol = tol
    return report


# ---------------------------------------------------------------------------
# frame evolution


def transport_tangents(x, xi, tangents, direction):
    """Evolution of a frame along the edge x -> xi: reflection in the edge
    bisector composed with reversal of the tangent of the traversed
    direction.  The map is an involution, so it also transports backward."""
    out = np.array([reflect_in_bisector(x, xi, t) for t in tangents])
    out[direction] = -out[direction]
    return out


@dataclass
class CyclidicNet:
    """Circular net plus orthonormal tangent frames at every vertex."""

    net: CircularNet
    tangents: np.ndarray  # dims + (m, 3)
    seed_index: tuple = None

    def __post_init__(self):
        self.tangents = np.asarray(self.tangents, float)
        want = self.net.extents + (self.net.m, 3)
        if self.tangents.shape != want:
            raise InvalidNet(f"tangent array must have shape {want}")

    @property
    def m(self):
        return self.net.m

    def normal(self, z):
        t = self.tangents[tuple(z)]
        return np.cross(t[0], t[1]) if self.m == 2 else None

    def frame(self, z, da=0, db=1) -> VertexFrame:
        """Vertex frame (t_da, t_db, n) at z for the quad plane (da, db)."""
        t = self.tangents[tuple(z)]
        n = np.cross(t[da], t[db])
        return VertexFrame(self.net.point(z), t[da], t[db], n)

    def gram_deviation(self) -> float:
        t = self.tangents.reshape(-1, self.m, 3)
        grams = np.einsum("vij,vkj->vik", t, t)
        return float(np.max(np.abs(grams - np.eye(self.m))))


def propagate_frames(net: CircularNet, z0, tangents0, validate=True) -> CyclidicNet:
    """Extend a seed frame at z0 to the whole net by the edge evolution.

    Consistency (independence of the propagation path) holds exactly for
    circular nets because the bisector planes of a circular quad intersect
    in the circle axis; it is verified on every elementary quad.
    """
    z0 = tuple(int(v) for v in z0)
    m = net.m
    t0 = np.asarray(tangents0, float)
    if t0.shape != (m, 3):
        raise InvalidNet(f"seed frame must provide {m} tangent vectors")
    if np.max(np.abs(t0 @ t0.T - np.eye(m))) > 1e-8:
        raise InvalidNet("seed frame is not orthonormal")

    dims = net.extents
    tangents = np.full(dims + (m, 3), np.nan)
    tangents[z0] = t0
    # sweep outward from the seed, one axis at a time
    order = sorted(itertools.product(*[range(n) for n in dims]),
                   key=lambda z: sum(abs(a - b) for a, b in zip(z, z0)))
    for z in order:
        if not np.isnan(tangents[z]).any():
            continue
        for d in range(m):
            for sgn in (-1, 1):
                prev = list(z)
                prev[d] -= sgn
                if not (0 <= prev[d] < dims[d]):
                    continue
                prev = tuple(prev)
                if np.isnan(tangents[prev]).any():
                    continue
                tangents[z] = transport_tangents(
                    net.point(prev), net.point(z), tangents[prev], d
                )
                break
            else:
                continue
            break
        else:
            raise InvalidNet(f"no propagation path reaches vertex {z}")

    cnet = CyclidicNet(net, tangents, seed_index=z0)
    if validate:
        res = frame_loop_residual(cnet)
        if res > 1e-10 * (1 + net.diameter()):
            raise InvalidNet(f"frame evolution is not consistent: loop residual {res:.3e}")
    return cnet


def frame_loop_residual(cnet: CyclidicNet) -> float:
    """Largest deviation from identity when transporting around a quad."""
    worst = 0.0
    net = cnet.net
    for base, da, db in net.iter_quads():
        z = np.asarray(base, int)
        ea = np.eye(net.m, dtype=int)[da]
        eb = np.eye(net.m, dtype=int)[db]
        loop = [tuple(z), tuple(z + ea), tuple(z + ea + eb), tuple(z + eb), tuple(z)]
        dirs = [da, db, da, db]
        t = cnet.tangents[loop[0]]
        for k in range(4):
            t = transport_tangents(net.point(loop[k]), net.point(loop[k + 1]), t, dirs[k])
        worst = max(worst, float(np.max(np.abs(t - cnet.tangents[tuple(base)]))))
    return worst


def path_transport(cnet: CyclidicNet, path):
    """Transport the seed frame along an explicit lattice path."""
    t = cnet.tangents[tuple(path[0])]
    for a, b in zip(path[:-1], path[1:]):
        d = int(np.argmax(np.abs(np.asarray(b) - np.asarray(a))))
        t = transport_tangents(cnet.net.point(a), cnet.net.point(b), t, d)
    return t


# ---------------------------------------------------------------------------
# Miquel completion


def _invert_at(center, p):
    d = np.asarray(p, float) - center
    n2 = float(d @ d)
    if n2 == 0.0:
        raise CoincidentPoints("inversion center coincides with a data point")
    return center + d / n2


def miquel_eighth_point(x, x1, x2, x3, x12, x13, x23, tol=1e-8):
    """Eighth vertex of the spherical cube through seven given vertices.

    Inverting at x12 maps the two completing circles through it to straight
    lines; their intersection maps back to the eighth point.  The result is
    validated against the third circle.
    """
    pts = [np.asarray(p, float) for p in (x, x1, x2, x3, x12, x13, x23)]
    x, x1, x2, x3, x12, x13, x23 = pts
    for quad in ((x, x1, x12, x2), (x, x1, x13, x3), (x, x2, x23, x3)):
        if lie.concircular_residual(list(quad)) > 1e-6:
            raise DegenerateInput("input quads are not concircular")
    scale = max(np.linalg.norm(p - x) for p in pts[1:]) or 1.0

    base = x12
    a1, a2 = _invert_at(base, x1), _invert_at(base, x13)
    b1, b2 = _invert_at(base, x2), _invert_at(base, x23)
    d1 = a2 - a1
    d2 = b2 - b1
    # closest points of the two image lines
    mat = np.array([[d1 @ d1, -(d1 @ d2)], [d1 @ d2, -(d2 @ d2)]])
    rhs = np.array([(b1 - a1) @ d1, (b1 - a1) @ d2])
    det = np.linalg.det(mat)
    if abs(det) <= 1e-14 * max(d1 @ d1, d2 @ d2):
        raise DegenerateMiquel("completing circles are tangent", residual=math.inf)
    ts = np.linalg.solve(mat, rhs)
    q1 = a1 + ts[0] * d1
    q2 = b1 + ts[1] * d2
    gap_img = float(np.linalg.norm(q1 - q2))
    q = 0.5 * (q1 + q2)
    x123 = _invert_at(base, q)

    third = lie.circle_through(x3, x13, x23)
    res = lie.point_circle_distance(x123, third)
    if res > tol * scale or not np.isfinite(gap_img):
        raise DegenerateMiquel(
            f"Miquel circles do not meet within tolerance (residual {res:.3e})",
            residual=res,
        )
    return x123


def complete_3d_from_coordinate_planes(plane12, plane13, plane23, order="lex") -> CircularNet:
    """Fill a 3D circular net from its three coordinate planes through the
    origin corner, by iterated Miquel completion.

    plane12[i,j] = x(i,j,0), plane13[i,k] = x(i,0,k), plane23[j,k] = x(0,j,k);
    the planes must agree along the shared axes.
    """
    p12 = np.asarray(plane12, float)
    p13 = np.asarray(plane13, float)
    p23 = np.asarray(plane23, float)
    n1, n2 = p12.shape[:2]
    n3 = p13.shape[1]
    if p13.shape[0] != n1 or p23.shape[:2] != (n2, n3):
        raise InvalidNet("coordinate planes have inconsistent extents")
    for i in range(n1):
        if np.linalg.norm(p12[i, 0] - p13[i, 0]) > 1e-9:
            raise InvalidNet("planes disagree on the shared axis 1")
    for j in range(n2):
        if np.linalg.norm(p12[0, j] - p23[j, 0]) > 1e-9:
            raise InvalidNet("planes disagree on the shared axis 2")
    for k in range(n3):
        if np.linalg.norm(p13[0, k] - p23[0, k]) > 1e-9:
            raise InvalidNet("planes disagree on the shared axis 3")

    x = np.full((n1, n2, n3, 3), np.nan)
    x[:, :, 0] = p12
    x[:, 0, :] = p13
    x[0, :, :] = p23

    if order == "revlex":
        # reversed axis priority; any causal fill order gives the same net
        idx = (
            (i, j, k)
            for k, j, i in itertools.product(range(1, n3), range(1, n2), range(1, n1))
        )
    else:
        idx = itertools.product(range(1, n1), range(1, n2), range(1, n3))
    for i, j, k in idx:
        try:
            x[i, j, k] = miquel_eighth_point(
                x[i - 1, j - 1, k - 1],
                x[i, j - 1, k - 1],
                x[i - 1, j, k - 1],
                x[i - 1, j - 1, k],
                x[i, j, k - 1],
                x[i, j - 1, k],
                x[i - 1, j, k],
            )
        except DegenerateMiquel as exc:
            exc.location = (i, j, k)
            raise
    return CircularNet(x)


# ---------------------------------------------------------------------------
# patches of a net


class PatchCollection(dict):
    """Maps (base, (da, db)) -> CyclidicPatch; construction failures are
    collected in .errors instead of raised."""

    def __init__(self):
        super().__init__()
        self.errors = {}


def _edge_key(base, axis):
    return (tuple(int(v) for v in base), int(axis))


def _quad_edge_keys(base, da, db):
    z = np.asarray(base, int)
    # bottom (direction da at side 0), top, left (db at side 0), right
    e_a = np.zeros(len(base), int)
    e_a[da] = 1
    e_b = np.zeros(len(base), int)
    e_b[db] = 1
    return {
        "v0": _edge_key(z, da),
        "v1": _edge_key(z + e_b, da),
        "u0": _edge_key(z, db),
        "u1": _edge_key(z + e_a, db),
    }


def patches_of_net(cnet: CyclidicNet, half_lines=None) -> PatchCollection:
    """One cyclidic patch per elementary quad (per direction pair for m=3).

    With a HalfLineTracker the third contact points on the bottom/left arcs
    come from the tracker instead of the default arc midpoints, which makes
    all half-parameter lines globally continuous.
    """
    out = PatchCollection()
    net = cnet.net
    for base, da, db in net.iter_quads():
        quad = VertexQuad(*net.quad_points(base, da, db))
        frame = cnet.frame(base, da, db)
        y1 = y2 = None
        if half_lines is not None:
            keys = _quad_edge_keys(base, da, db)
            y1 = half_lines.points.get(keys["v0"])
            y2 = half_lines.points.get(keys["u0"])
        try:
            out[(tuple(base), (da, db))] = patch_from_data(quad, frame, y1=y1, y2=y2)
        except Exception as exc:  # collected, not raised
            out.errors[(tuple(base), (da, db))] = exc
    return out


# ---------------------------------------------------------------------------
# C1 joints and contact elements


@dataclass
class JointCheck:
    edge: tuple
    arc_gap: float
    spheres_match: bool
    normal_angle: float

    def ok(self, arc_tol=1e-8, angle_tol=1e-6):
        return self.arc_gap <= arc_tol and self.spheres_match and self.normal_angle <= angle_tol


@dataclass
class JointReport:
    joints: list
    ok: bool
    max_arc_gap: float
    max_normal_angle: float


def _shared_edge_check(patch_a, edge_a, patch_b, edge_b, samples=10):
    ss = np.linspace(0.0, 1.0, samples)
    pts_a = [patch_a.edge_point(edge_a, s) for s in ss]
    pts_b = [patch_b.edge_point(edge_b, s) for s in ss]
    if any(is_infinite(p) for p in pts_a + pts_b):
        # arcs through infinity are compared by their finite samples only
        pts_a = [p for p in pts_a if not is_infinite(p)]
        pts_b = [p for p in pts_b if not is_infinite(p)]
        if len(pts_a) < 3 or len(pts_b) < 3:
            return math.inf, False, math.inf
    circ_a = lie.circle_through(pts_a[0], pts_a[len(pts_a) // 2], pts_a[-1])
    circ_b = lie.circle_through(pts_b[0], pts_b[len(pts_b) // 2], pts_b[-1])
    gap = 0.0
    for p in pts_a:
        gap = max(gap, lie.point_circle_distance(p, circ_b))
    for p in pts_b:
        gap = max(gap, lie.point_circle_distance(p, circ_a))

    va = patch_a.boundary_sphere_vector(edge_a)
    vb = patch_b.boundary_sphere_vector(edge_b)
    va = va / lie_norm(va)
    vb = vb / lie_norm(vb)
    vb_flip = vb.copy()
    vb_flip[lie.ER] = -vb_flip[lie.ER]
    spheres_match = (
        min(np.linalg.norm(va - vb), np.linalg.norm(va + vb)) <= 1e-7
        or min(np.linalg.norm(va - vb_flip), np.linalg.norm(va + vb_flip)) <= 1e-7
    )

    max_angle = 0.0
    for s in ss[1:-1]:
        p = patch_a.edge_point(edge_a, s)
        if is_infinite(p):
            continue
        ua, va_ = _edge_params(edge_a, s)
        na = patch_a.normal(ua, va_)
        try:
            sb = patch_b.invert_edge_parameter(edge_b, p)
        except DegenerateInput:
            max_angle = math.inf
            continue
        ub, vb_ = _edge_params(edge_b, sb)
        nb = patch_b.normal(ub, vb_)
        # consistently oriented nets agree without a sign flip; use the
        # chord form, which is stable near zero angle
        chord = float(np.linalg.norm(na - nb))
        max_angle = max(max_angle, 2.0 * math.asin(min(1.0, chord / 2.0)))
    return gap, spheres_match, max_angle


def _edge_params(edge, s):
    return {"v0": (s, 0.0), "v1": (s, 1.0), "u0": (0.0, s), "u1": (1.0, s)}[edge]


def check_c1_joints(cnet: CyclidicNet, patches=None) -> JointReport:
    """Arc coincidence, shared boundary spheres and normal agreement across
    every interior edge of a 2D cyclidic net."""
    if cnet.m != 2:
        raise InvalidNet("C1 joint check applies to 2D nets")
    if patches is None:
        patches = patches_of_net(cnet)
    n1, n2 = cnet.net.extents
    joints = []
    for (i, j) in itertools.product(range(n1 - 2), range(n2 - 1)):
        a = patches.get(((i, j), (0, 1)))
        b = patches.get(((i + 1, j), (0, 1)))
        if a is None or b is None:
            continue
        gap, spheres, angle = _shared_edge_check(a, "u1", b, "u0")
        joints.append(JointCheck(((i, j), (i + 1, j)), gap, spheres, angle))
    for (i, j) in itertools.product(range(n1 - 1), range(n2 - 2)):
        a = patches.get(((i, j), (0, 1)))
        b = patches.get(((i, j + 1), (0, 1)))
        if a is None or b is None:
            continue
        gap, spheres, angle = _shared_edge_check(a, "v1", b, "v0")
        joints.append(JointCheck(((i, j), (i, j + 1)), gap, spheres, angle))
    ok = all(j.ok() for j in joints)
    return JointReport(
        joints,
        ok,
        max((j.arc_gap for j in joints), default=0.0),
        max((j.normal_angle for j in joints), default=0.0),
    )


def extract_contact_element_net(cnet: CyclidicNet):
    """Per-vertex contact elements (x, n = t1 x t2) of a 2D cyclidic net,
    plus the per-edge shared-sphere verification."""
    if cnet.m != 2:
        raise InvalidNet("contact element extraction applies to 2D nets")
    from .cyclide import ContactElement
    from .lie import OrientedPlane

    net = cnet.net
    n1, n2 = net.extents
    elements = np.empty((n1, n2), dtype=object)
    for z in itertools.product(range(n1), range(n2)):
        x = net.point(z)
        n = cnet.normal(z)
        # span the isotropic line by the point sphere and the tangent plane
        tangent_plane = OrientedPlane(n, float(x @ n))
        elements[z] = ContactElement(x, n, (lift_point(x), lift(tangent_plane)))

    checks = []
    for z in itertools.product(range(n1), range(n2)):
        for d in range(2):
            zi = list(z)
            zi[d] += 1
            if zi[d] >= net.extents[d]:
                continue
            zi = tuple(zi)
            x, xi = net.point(z), net.point(zi)
            s_fwd = boundary_sphere(x, xi - x, cnet.normal(z))
            s_bwd = boundary_sphere(xi, x - xi, cnet.normal(zi))
            match = lie.spheres_equal(s_fwd, s_bwd, tol=1e-8, up_to_orientation=True)
            checks.append(((z, zi), s_fwd, match))
    return elements, checks


# ---------------------------------------------------------------------------
# offsets and Ribaucour transforms


def offset_net(cnet: CyclidicNet, eps: float) -> CyclidicNet:
    """Parallel cyclidic net: vertices moved along the vertex normals, frames
    kept."""
    if cnet.m != 2:
        raise InvalidNet("offsets apply to 2D nets")
    net = cnet.net
    n1, n2 = net.extents
    moved = net.vertices.copy()
    for z in itertools.product(range(n1), range(n2)):
        moved[z] = net.point(z) + eps * cnet.normal(z)
    for z, da, db in CircularNet(moved).iter_quads():
        quad = CircularNet(moved).quad_points(z, da, db)
        for a in range(4):
            for b in range(a + 1, 4):
                if np.linalg.norm(quad[a] - quad[b]) < 1e-12 * (1 + abs(eps)):
                    raise CollidingVertices(f"offset collapses quad at {z}")
    return CyclidicNet(CircularNet(moved), cnet.tangents.copy(), seed_index=cnet.seed_index)


@dataclass
class RibaucourCheck:
    index: tuple
    frame_residual: float
    shared_sphere: object


@dataclass
class RibaucourReport:
    checks: list
    ok: bool
    max_residual: float


def verify_ribaucour(a: CyclidicNet, b: CyclidicNet, tol=1e-9) -> RibaucourReport:
    """Checks the defining relation of a Ribaucour pair: corresponding frames
    are reflections in the bisector of [x, x+] composed with the normal flip."""
    if a.m != 2 or b.m != 2 or a.net.extents != b.net.extents:
        raise InvalidNet("Ribaucour verification needs two 2D nets of equal extents")
    checks = []
    worst = 0.0
    for z in itertools.product(*[range(n) for n in a.net.extents]):
        x = a.net.point(z)
        xp = b.net.point(z)
        if np.linalg.norm(xp - x) < 1e-12 * (1 + np.linalg.norm(x)):
            raise CoincidentPoints(f"transform point coincides with the net point at {z}")
        want = _ribaucour_frame(x, xp, a.tangents[z])
        got = b.tangents[z]
        res = float(np.max(np.abs(want - got)))
        sphere = boundary_sphere(x, xp - x, a.normal(z))
        checks.append(RibaucourCheck(z, res, sphere))
        worst = max(worst, res)
    scale = 1 + a.net.diameter()
    return RibaucourReport(checks, worst <= tol * scale, worst)


def _ribaucour_frame(x, xp, tangents):
    # reflect both tangents in the bisector; the induced normal flips, i.e.
    # (t1, t2, n) -> (H t1, H t2, -H n), which for stored 2-frames is the
    # plain reflection (the cross product of two reflected vectors is the
    # reflected-and-negated cross product)
    return np.array([reflect_in_bisector(x, xp, t) for t in tangents])


def construct_ribaucour(a: CyclidicNet, xplus: CircularNet) -> CyclidicNet:
    """Builds the transform net with frames given by the defining relation."""
    if a.net.extents != xplus.extents:
        raise InvalidNet("transform net has different extents")
    tangents = np.empty_like(a.tangents)
    for z in itertools.product(*[range(n) for n in a.net.extents]):
        x = a.net.point(z)
        xp = xplus.point(z)
        if np.linalg.norm(xp - x) < 1e-12 * (1 + np.linalg.norm(x)):
            raise CoincidentPoints(f"transform point coincides with the net point at {z}")
        tangents[z] = _ribaucour_frame(x, xp, a.tangents[z])
    return CyclidicNet(xplus, tangents, seed_index=a.seed_index)


# ---------------------------------------------------------------------------
# cyclidic cubes


@dataclass
class CyclidicCube:
    """Elementary hexahedron of a 3D cyclidic net with its six face patches."""

    base: tuple
    vertices: np.ndarray  # (2,2,2,3)
    frames: np.ndarray  # (2,2,2,3,3) tangent triples from the net
    faces: dict  # (normal axis, side) -> CyclidicPatch
    miquel_center: np.ndarray
    miquel_radius: float
    miquel_residual: float

    def vertex(self, offset):
        return self.vertices[tuple(offset)]

    def diameter(self) -> float:
        pts = self.vertices.reshape(-1, 3)
        return float(max(np.linalg.norm(p - q) for p in pts for q in pts))


def cyclidic_cube(cnet: CyclidicNet, base, patches=None) -> CyclidicCube:
    """Assembles the cube at a base index of a 3D cyclidic net."""
    if cnet.m != 3:
        raise InvalidNet("cubes exist in 3D nets only")
    z = np.asarray(base, int)
    verts = np.empty((2, 2, 2, 3))
    frames = np.empty((2, 2, 2, 3, 3))
    for o in itertools.product((0, 1), repeat=3):
        verts[o] = cnet.net.point(z + np.asarray(o))
        frames[o] = cnet.tangents[tuple(z + np.asarray(o))]
    faces = {}
    for axis in range(3):
        da, db = [d for d in range(3) if d != axis]
        for side in (0, 1):
            fb = z.copy()
            fb[axis] += side
            key = (tuple(fb), (da, db))
            if patches is not None and key in patches:
                faces[(axis, side)] = patches[key]
            else:
                quad = VertexQuad(*cnet.net.quad_points(fb, da, db))
                faces[(axis, side)] = patch_from_data(quad, cnet.frame(fb, da, db))
    center, radius, residual = _sphere_fit(verts.reshape(-1, 3))
    return CyclidicCube(
        tuple(int(v) for v in z), verts, frames, faces, center, radius, residual
    )


def _sphere_fit(points):
    pts = np.asarray(points, float)
    A = np.hstack([2 * pts, np.ones((len(pts), 1))])
    rhs = (pts**2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    center = sol[:3]
    radius = math.sqrt(max(float(sol[3] + center @ center), 0.0))
    dists = np.linalg.norm(pts - center, axis=1)
    return center, radius, float(np.max(np.abs(dists - radius)))


_CUBE_EDGES = [
    (o, d)
    for d in range(3)
    for o in itertools.product((0, 1), repeat=3)
    if o[d] == 0
]


def _face_edge_of_cube_edge(axis, side, offset, d):
    """Boundary-edge name of the cube edge (offset, d) on face (axis, side)."""
    da, db = [k for k in range(3) if k != axis]
    if d == da:
        return "v0" if offset[db] == 0 else "v1"
    return "u0" if offset[da] == 0 else "u1"


@dataclass
class CubeArcCheck:
    edge: tuple
    arc_gap: float
    max_angle_error: float  # deviation from orthogonality, radians


@dataclass
class CubeReport:
    arcs: list
    vertex_frames_orthonormal: bool
    ok: bool
    max_arc_gap: float
    max_angle_error: float


def check_cube_orthogonality(cube: CyclidicCube, samples=10) -> CubeReport:
    """Adjacent faces share their boundary arcs and meet orthogonally along
    them (10-sample check per arc)."""
    arcs = []
    for offset, d in _CUBE_EDGES:
        facing = [a for a in range(3) if a != d]
        (a1, s1), (a2, s2) = ((facing[0], offset[facing[0]]), (facing[1], offset[facing[1]]))
        pa = cube.faces[(a1, s1)]
        pb = cube.faces[(a2, s2)]
        ea = _face_edge_of_cube_edge(a1, s1, offset, d)
        eb = _face_edge_of_cube_edge(a2, s2, offset, d)
        ss = np.linspace(0, 1, samples)
        pts = [pa.edge_point(ea, s) for s in ss]
        circ_b = lie.circle_through(
            pb.edge_point(eb, 0.0), pb.edge_point(eb, 0.5), pb.edge_point(eb, 1.0)
        )
        gap = max(lie.point_circle_distance(p, circ_b) for p in pts)
        worst = 0.0
        for s in ss[1:-1]:
            p = pa.edge_point(ea, s)
            na = pa.normal(*_edge_params(ea, s))
            try:
                sb = pb.invert_edge_parameter(eb, p)
            except DegenerateInput:
                worst = math.inf
                continue
            nb = pb.normal(*_edge_params(eb, sb))
            worst = max(worst, abs(math.asin(min(1.0, abs(float(na @ nb))))))
        arcs.append(CubeArcCheck((offset, d), gap, worst))
    frames_ok = True
    for o in itertools.product((0, 1), repeat=3):
        t = cube.frames[o]
        if np.max(np.abs(t @ t.T - np.eye(3))) > 1e-10:
            frames_ok = False
    gaps = max((a.arc_gap for a in arcs), default=0.0)
    angs = max((a.max_angle_error for a in arcs), default=0.0)
    scale = 1 + cube.diameter()
    ok = gaps <= 1e-8 * scale and angs <= 1e-5
    return CubeReport(arcs, frames_ok, ok, gaps, angs)


def cube_is_singular(cube: CyclidicCube, samples=20) -> bool:
    """Sampling test: opposite faces must be disjoint and adjacent faces may
    meet only along their shared boundary arc."""
    grids = {}
    ss = np.linspace(0, 1, samples)
    for key, patch in cube.faces.items():
        pts = []
        for u in ss:
            for v in ss:
                p = patch.eval(u, v)
                if is_infinite(p):
                    return True
                pts.append(p)
        grids[key] = np.asarray(pts)
    diam = cube.diameter()
    sep = 0.45 * diam / samples
    for axis in range(3):
        a = grids[(axis, 0)]
        b = grids[(axis, 1)]
        d2 = np.min(
            np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
        )
        if math.sqrt(float(d2)) < sep:
            return True
    for (ka, pa), (kb, pb) in itertools.combinations(cube.faces.items(), 2):
        if ka[0] == kb[0]:
            continue
        shared = _shared_cube_arc(cube, ka, kb)
        if shared is None:
            continue
        a, b = grids[ka], grids[kb]
        d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
        close_a = np.min(d2, axis=1) < (sep * 0.5) ** 2
        for idx in np.nonzero(close_a)[0]:
            if lie.point_circle_distance(a[idx], shared) > 2.5 * diam / samples:
                return True
    return False


def _shared_cube_arc(cube, ka, kb):
    (a1, s1), (a2, s2) = ka, kb
    rem = [d for d in range(3) if d not in (a1, a2)]
    if not rem:
        return None
    d = rem[0]
    offset = [0, 0, 0]
    offset[a1] = s1
    offset[a2] = s2
    offset[d] = 0
    pa = cube.faces[ka]
    ea = _face_edge_of_cube_edge(a1, s1, tuple(offset), d)
    return lie.circle_through(
        pa.edge_point(ea, 0.0), pa.edge_point(ea, 0.5), pa.edge_point(ea, 1.0)
    )


def in_between_vertices(cube: CyclidicCube, direction: int, s: float):
    """Vertices of the in-between patch plus the closure residual data.

    Returns (x_tilde, x_ij, x_ik, x_ijk, bar_ijk, bar_ikj): the Miquel
    eighth point and the endpoints of the two curvature-line routes across
    the far faces, which coincide exactly for valid cubes.
    """
    i = int(direction)
    j, k = [d for d in range(3) if d != i]
    f_k = cube.faces[(k, 0)]   # quad in directions sorted(i, j)
    f_j = cube.faces[(j, 0)]   # quad in directions sorted(i, k)

    # pick the edge point on one face, then transfer it to the other by
    # parameter inversion (boundary parametrizations of the two faces need
    # not coincide away from the pinned points)
    axes_fk = tuple(sorted((i, j)))
    if i == axes_fk[0]:
        x_tilde = f_k.edge_point("v0", s)
        x_ij = np.asarray(f_k.eval(s, 1.0), float)
    else:
        x_tilde = f_k.edge_point("u0", s)
        x_ij = np.asarray(f_k.eval(1.0, s), float)
    x_tilde = np.asarray(x_tilde, float)
    x_ik = _cross_face(f_j, tuple(sorted((i, k))), i, x_tilde)

    ei = np.eye(3, dtype=int)
    x = cube.vertex((0, 0, 0))
    x_j = cube.vertex(tuple(ei[j]))
    x_k = cube.vertex(tuple(ei[k]))
    x_jk = cube.vertex(tuple(ei[j] + ei[k]))

    x_ijk = miquel_eighth_point(x, x_tilde, x_j, x_k, x_ij, x_ik, x_jk)

    # closure: follow the far faces from the two intermediate points
    bar_ijk = _cross_face(cube.faces[(j, 1)], tuple(sorted((i, k))), i, x_ij)
    bar_ikj = _cross_face(cube.faces[(k, 1)], tuple(sorted((i, j))), i, x_ik)
    return x_tilde, x_ij, x_ik, x_ijk, bar_ijk, bar_ikj


def in_between_closure_residual(cube: CyclidicCube, direction: int, s: float) -> float:
    """Distance between the two curvature-line routes to the eighth vertex."""
    _, _, _, x_ijk, bar_ijk, bar_ikj = in_between_vertices(cube, direction, s)
    return max(
        float(np.linalg.norm(bar_ijk - bar_ikj)),
        float(np.linalg.norm(bar_ijk - x_ijk)),
    )


def patch_in_between(cube: CyclidicCube, direction: int, s: float,
                     closure_tol=1e-6) -> CyclidicPatch:
    """The unique coordinate patch through the point at parameter s on the
    edge x -> x_i of a non-singular cyclidic cube.

    The new vertices are found by following iso-parameter curvature lines of
    the side faces; the eighth spherical-cube point closes the construction
    and both curvature-line routes must land on it.
    """
    i = int(direction)
    if s <= 1e-12:
        return cube.faces[(i, 0)]
    if s >= 1 - 1e-12:
        return cube.faces[(i, 1)]
    j, k = [d for d in range(3) if d != i]
    x_tilde, x_ij, x_ik, x_ijk, bar_ijk, bar_ikj = in_between_vertices(cube, i, s)
    diam = cube.diameter()
    res = max(
        float(np.linalg.norm(bar_ijk - bar_ikj)),
        float(np.linalg.norm(bar_ijk - x_ijk)),
    )
    if res > closure_tol * diam:
        raise ClosureViolation(
            f"in-between closure violated (residual {res:.3e})", residual=res
        )

    # frame at the new anchor from the crossing curvature-line tangents;
    # the edge parameter of x_tilde differs between the two faces
    f_k = cube.faces[(k, 0)]
    f_j = cube.faces[(j, 0)]
    axes_fj = tuple(sorted((i, k)))
    edge_fj = "v0" if i == axes_fj[0] else "u0"
    s_j = f_j.invert_edge_parameter(edge_fj, x_tilde)
    t_j = _iso_line_tangent(f_k, tuple(sorted((i, j))), i, s, x_tilde, x_ij)
    t_k = _iso_line_tangent(f_j, axes_fj, i, s_j, x_tilde, x_ik)
    n = np.cross(t_j, t_k)
    quad = VertexQuad(x_tilde, x_ij, x_ijk, x_ik)
    frame = VertexFrame(x_tilde, t_j, t_k, n / np.linalg.norm(n))
    return patch_from_data(quad, frame)


def _cross_face(face, axes, i, p):
    """Endpoint of the iso-parameter line of the face through the boundary
    point p, where i is the in-plane direction along which p's edge runs."""
    da, db = axes
    if i == da:
        si = face.invert_edge_parameter("v0", p)
        return np.asarray(face.eval(si, 1.0), float)
    si = face.invert_edge_parameter("u0", p)
    return np.asarray(face.eval(1.0, si), float)


def _iso_line_tangent(face, axes, i, s, at_point, toward):
    da, db = axes
    if i == da:
        pts = [face.eval(s, t) for t in (0.0, 0.5, 1.0)]
    else:
        pts = [face.eval(t, s) for t in (0.0, 0.5, 1.0)]
    circ = lie.circle_through(*pts)
    if isinstance(circ, lie.Line3D):
        t = circ.direction.copy()
    else:
        radial = np.asarray(at_point, float) - circ.center
        t = np.cross(circ.normal, radial)
        t = t / np.linalg.norm(t)
    if t @ (np.asarray(toward, float) - np.asarray(at_point, float)) < 0:
        t = -t
    return t


# ---------------------------------------------------------------------------
# half-parameter line propagation


@dataclass
class HalfLineTracker:
    """Distinguished third contact point per directed grid edge.

    Keys are canonical edges (base index, axis); a value of INF flags an arc
    whose tracked point ran through infinity.
    """

    points: dict = field(default_factory=dict)
    infinite: set = field(default_factory=set)
    seed_index: tuple = None

    def get(self, key):
        return self.points.get(key)


def _store_half_point(tracker, key, value, scale, where):
    if is_infinite(value):
        tracker.infinite.add(key)
        tracker.points.setdefault(key, INF)
        return
    old = tracker.points.get(key)
    if old is None or is_infinite(old):
        tracker.points[key] = np.asarray(value, float)
        return
    gap = float(np.linalg.norm(np.asarray(value) - old))
    if gap > 1e-7 * scale:
        raise PropagationConflict(
            f"half-line point disagrees at edge {key} (gap {gap:.3e})",
            residual=gap,
            location=where,
        )


def _axis_edges_through(z0, dims, axis):
    keys = []
    z = list(z0)
    for i in range(dims[axis] - 1):
        z[axis] = i
        keys.append(_edge_key(z, axis))
    return keys


def propagate_half_lines(cnet: CyclidicNet, z0=None) -> HalfLineTracker:
    """Evolution of the per-edge half-parameter points from seed axes.

    Edges on the coordinate axes through z0 carry arc midpoints; every other
    edge receives the intersection of the half-parameter line of an already
    built neighboring patch with its arc.  For 3D nets the same edge can be
    reached from different faces and the values must agree.
    """
    net = cnet.net
    dims = net.extents
    m = net.m
    if z0 is None:
        z0 = cnet.seed_index or (0,) * m
    z0 = tuple(int(v) for v in z0)
    scale = 1 + net.diameter()
    tracker = HalfLineTracker(seed_index=z0)

    # seed axes: arc midpoints, tangent taken from the net frame
    for axis in range(m):
        for key in _axis_edges_through(z0, dims, axis):
            base, d = key
            x = net.point(base)
            zi = list(base)
            zi[d] += 1
            xi = net.point(tuple(zi))
            t = cnet.tangents[tuple(base)][d]
            mid = arc_midpoint(x, xi, t).midpoint
            _store_half_point(tracker, key, mid, scale, key)

    # process quads outward; each quad is anchored at its corner nearest the
    # seed so that the two consumed edges are already known
    quads = sorted(
        net.iter_quads(),
        key=lambda bq: sum(
            min(abs(v - z), abs(v + 1 - z)) for v, z in zip(bq[0], z0)
        ),
    )
    pending = list(quads)
    max_rounds = len(pending) + 2
    for _ in range(max_rounds):
        remaining = []
        progress = False
        for base, da, db in pending:
            done = _try_quad_half_lines(cnet, tracker, base, da, db, z0, scale)
            if done:
                progress = True
            else:
                remaining.append((base, da, db))
        pending = remaining
        if not pending:
            break
        if not progress:
            raise PropagationConflict(
                f"half-line propagation stalled with {len(pending)} quads left",
                location=pending[0][0],
            )
    return tracker


def _try_quad_half_lines(cnet, tracker, base, da, db, z0, scale):
    net = cnet.net
    z = np.asarray(base, int)
    e_a = np.zeros(len(base), int)
    e_a[da] = 1
    e_b = np.zeros(len(base), int)
    e_b[db] = 1
    # anchor at the quad corner nearest the seed along both quad directions
    oa = 0 if abs(z[da] - z0[da]) <= abs(z[da] + 1 - z0[da]) else 1
    ob = 0 if abs(z[db] - z0[db]) <= abs(z[db] + 1 - z0[db]) else 1
    anchor = z + oa * e_a + ob * e_b
    corner_a = z + (1 - oa) * e_a + ob * e_b
    corner_b = z + oa * e_a + (1 - ob) * e_b
    corner_ab = z + (1 - oa) * e_a + (1 - ob) * e_b

    key_bottom = _edge_key(np.minimum(anchor, corner_a), da)
    key_left = _edge_key(np.minimum(anchor, corner_b), db)
    key_top = _edge_key(np.minimum(corner_b, corner_ab), da)
    key_right = _edge_key(np.minimum(corner_a, corner_ab), db)

    y1 = tracker.points.get(key_bottom)
    y2 = tracker.points.get(key_left)
    if y1 is None or y2 is None:
        return False
    if is_infinite(y1) or is_infinite(y2):
        # flagged arc: propagate midpoints onward so neighbors can continue
        y1 = None if is_infinite(y1) else y1
        y2 = None if is_infinite(y2) else y2

    quad = VertexQuad(
        net.point(anchor), net.point(corner_a), net.point(corner_ab), net.point(corner_b)
    )
    tang = cnet.tangents[tuple(anchor)]
    t1 = tang[da] if oa == 0 else -tang[da]
    t2 = tang[db] if ob == 0 else -tang[db]
    frame = VertexFrame(net.point(anchor), t1, t2, np.cross(tang[da], tang[db]))
    patch = patch_from_data(quad, frame, y1=y1, y2=y2)

    _store_half_point(tracker, key_top, patch.eval(0.5, 1.0), scale, tuple(base))
    _store_half_point(tracker, key_right, patch.eval(1.0, 0.5), scale, tuple(base))
    # also pin the consumed edges if they were only flagged
    _store_half_point(tracker, key_bottom, patch.eval(0.5, 0.0), scale, tuple(base))
    _store_half_point(tracker, key_left, patch.eval(0.0, 0.5), scale, tuple(base))
    return True


def half_line_continuity(cnet: CyclidicNet, tracker=None):
    """Max endpoint mismatch of half-parameter lines across interior edges."""
    if tracker is None:
        tracker = propagate_half_lines(cnet)
    patches = patches_of_net(cnet, half_lines=tracker)
    if patches.errors:
        raise InvalidNet(f"patch construction failed at {list(patches.errors)[:3]}")
    worst = 0.0
    net = cnet.net
    for (base, (da, db)), patch in patches.items():
        keys = _quad_edge_keys(base, da, db)
        for edge, (u, v) in (("v1", (0.5, 1.0)), ("u1", (1.0, 0.5)),
                             ("v0", (0.5, 0.0)), ("u0", (0.0, 0.5))):
            tracked = tracker.points.get(keys[edge])
            if tracked is None or is_infinite(tracked):
                continue
            p = patch.eval(u, v)
            if is_infinite(p):
                continue
            worst = max(worst, float(np.linalg.norm(np.asarray(p) - tracked)))
    return worst, patches


# ---------------------------------------------------------------------------
# exactly circular net generators


def rotational_net(radii, heights, n_phi, phi_step, phi0=0.0) -> CircularNet:
    """Profile polyline rotated in discrete steps; the quads are planar
    isosceles trapezoids, hence exactly circular."""
    radii = np.asarray(radii, float)
    heights = np.asarray(heights, float)
    if radii.shape != heights.shape or radii.ndim != 1:
        raise InvalidNet("profile radii/heights must be equal-length vectors")
    if np.any(radii <= 0):
        raise InvalidNet("profile radii must be positive")
    n1 = len(radii)
    verts = np.empty((n1, n_phi, 3))
    for j in range(n_phi):
        ang = phi0 + j * phi_step
        c, s = math.cos(ang), math.sin(ang)
        verts[:, j, 0] = radii * c
        verts[:, j, 1] = radii * s
        verts[:, j, 2] = heights
    return CircularNet(verts)


def sphere_grid_net(n_lat, n_lon, lat0=0.5, lat1=2.2, lon0=0.0, lon_step=None) -> CircularNet:
    """Latitude/longitude samples of the unit sphere (poles excluded)."""
    if lon_step is None:
        lon_step = 2 * math.pi / (3 * max(n_lon - 1, 1))
    lats = np.linspace(lat0, lat1, n_lat)
    return rotational_net(np.sin(lats), np.cos(lats), n_lon, lon_step, phi0=lon0)


def torus_sample_net(nx, ny, u0=0.0, u1=1.2, v0=0.0, v1=1.2, R=2.0, r=1.0) -> CircularNet:
    """Curvature-line samples of a torus; exactly circular by the rotational
    symmetry of each quad."""
    us = np.linspace(u0, u1, nx)
    vs = np.linspace(v0, v1, ny)
    verts = np.empty((nx, ny, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            verts[i, j] = (
                (R + r * math.cos(v)) * math.cos(u),
                (R + r * math.cos(v)) * math.sin(u),
                r * math.sin(v),
            )
    return CircularNet(verts)


def spherical_lattice_net(radii, lats, lons) -> CircularNet:
    """Concentric spheres x angular grid: a discrete triply orthogonal
    (spherical coordinates) system, exactly circular in all three
    direction pairs."""
    radii = np.asarray(radii, float)
    lats = np.asarray(lats, float)
    lons = np.asarray(lons, float)
    verts = np.empty((len(lats), len(lons), len(radii), 3))
    for i, ph in enumerate(lats):
        for j, th in enumerate(lons):
            u = np.array(
                [math.sin(ph) * math.cos(th), math.sin(ph) * math.sin(th), math.cos(ph)]
            )
            for k, R in enumerate(radii):
                verts[i, j, k] = R * u
    return CircularNet(verts)


def random_rotational_net(rng, n1=6, n2=6):
    """Random rotational circular net (generic but exactly circular)."""
    radii = rng.uniform(1.0, 3.0, size=n1)
    heights = np.cumsum(rng.uniform(0.3, 0.9, size=n1))
    step = rng.uniform(0.25, 0.55)
    return rotational_net(radii, heights, n2, step, phi0=rng.uniform(0, 2 * math.pi))


def random_orthonormal_tangents(rng, m=2):
    """Random orthonormal m-frame in R^3 (QR of a Gaussian matrix)."""
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q.T[:m].copy()


# ---------------------------------------------------------------------------
# convergence harness


@dataclass
class ConvergenceRow:
    eps: float
    surface_error: float  # max distance of dense samples to the smooth surface
    param_error: float  # max parameter-matched deviation from the smooth map
    frame_error: float  # max angular deviation of propagated vs smooth frames


class SmoothSystem:
    """Analytic curvature-line parametrized reference geometry."""

    def __init__(self, name, f, frame, surface_distance, domain):
        self.name = name
        self.f = f
        self.frame = frame
        self.surface_distance = surface_distance
        self.domain = domain  # ((u0, u1), (v0, v1))


def _torus_system(R=2.0, r=1.0):
    def f(u, v):
        return np.array(
            [(R + r * math.cos(v)) * math.cos(u), (R + r * math.cos(v)) * math.sin(u),
             r * math.sin(v)]
        )

    def frame(u, v):
        tu = np.array([-math.sin(u), math.cos(u), 0.0])
        tv = np.array(
            [-math.cos(u) * math.sin(v), -math.sin(u) * math.sin(v), math.cos(v)]
        )
        return np.stack([tu, tv])

    def dist(p):
        rho = math.hypot(p[0], p[1])
        return abs(math.hypot(rho - R, p[2]) - r)

    return SmoothSystem("torus", f, frame, dist, ((0.0, 1.2), (0.0, 1.2)))


def _sphere_system():
    def f(u, v):
        # u = longitude, v = colatitude
        return np.array(
            [math.sin(v) * math.cos(u), math.sin(v) * math.sin(u), math.cos(v)]
        )

    def frame(u, v):
        tu = np.array([-math.sin(u), math.cos(u), 0.0])
        tv = np.array(
            [math.cos(v) * math.cos(u), math.cos(v) * math.sin(u), -math.sin(v)]
        )
        return np.stack([tu, tv])

    def dist(p):
        return abs(float(np.linalg.norm(p)) - 1.0)

    return SmoothSystem("sphere", f, frame, dist, ((0.0, 1.1), (0.6, 1.7)))


SMOOTH_SYSTEMS = {"torus": _torus_system, "sphere": _sphere_system}


def convergence_experiment(system_id, eps_list, dense=7) -> list:
    """Discretize a smooth system at several grid steps and measure how the
    cyclidic nets deviate from it.

    The built-in systems sample exactly circular nets that lie on global
    cyclides, so the geometric surface distance stays at rounding level; the
    parameter-matched deviation measures the reparametrization gap between
    the quadratic conic parametrization and the smooth one and decreases
    with the step size.
    """
    if system_id not in SMOOTH_SYSTEMS:
        raise DegenerateInput(f"unknown smooth system '{system_id}'")
    system = SMOOTH_SYSTEMS[system_id]()
    (u0, u1), (v0, v1) = system.domain
    rows = []
    for eps in eps_list:
        nu = max(2, int(round((u1 - u0) / eps)) + 1)
        nv = max(2, int(round((v1 - v0) / eps)) + 1)
        us = np.linspace(u0, u1, nu)
        vs = np.linspace(v0, v1, nv)
        verts = np.empty((nu, nv, 3))
        for i, u in enumerate(us):
            for j, v in enumerate(vs):
                verts[i, j] = system.f(u, v)
        net = CircularNet(verts)
        cnet = propagate_frames(net, (0, 0), system.frame(us[0], vs[0]), validate=False)

        frame_err = 0.0
        for i in range(nu):
            for j in range(nv):
                want = system.frame(us[i], vs[j])
                got = cnet.tangents[i, j]
                for w, g in zip(want, got):
                    chord = float(np.linalg.norm(w - g))
                    frame_err = max(frame_err, 2.0 * math.asin(min(1.0, chord / 2.0)))

        patches = patches_of_net(cnet)
        if patches.errors:
            raise InvalidNet(f"patch construction failed: {list(patches.errors)[:2]}")
        surf_err = 0.0
        par_err = 0.0
        ts = np.linspace(0.0, 1.0, dense)
        for (base, _pair), patch in patches.items():
            i, j = base
            du = us[i + 1] - us[i]
            dv = vs[j + 1] - vs[j]
            for a in ts:
                for b in ts:
                    p = patch.eval(a, b)
                    if is_infinite(p):
                        raise InvalidNet("sample at infinity in convergence run")
                    surf_err = max(surf_err, system.surface_distance(p))
                    q = system.f(us[i] + a * du, vs[j] + b * dv)
                    par_err = max(par_err, float(np.linalg.norm(np.asarray(p) - q)))
        rows.append(ConvergenceRow(float(eps), surf_err, par_err, frame_err))
    return rows
