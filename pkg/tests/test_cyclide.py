import math

import numpy as np
import pytest

from cyclidic import lie
from cyclidic.cyclide import (
    FamilyConic,
    VertexFrame,
    VertexQuad,
    arc_midpoint,
    boundary_sphere,
    family_radius,
    is_spherical,
    patch_from_data,
    reflect_in_bisector,
    third_sphere,
    vertex_frames,
)
from cyclidic.errors import (
    CoincidentPoints,
    DegenerateSubdomain,
    NonEmbeddedQuad,
    OrientedContactDegenerate,
    ZeroDelta,
)
from cyclidic.lie import (
    INF,
    OrientedPlane,
    PointSphere,
    ProperSphere,
    is_infinite,
    lie_inner,
    lie_norm,
    lift,
    lift_point,
    project,
    spheres_equal,
)

from conftest import (
    random_rotation,
    random_tangent_frame,
    torus_implicit_residual,
    torus_point,
)


# ---------------------------------------------------------------------------
# fixtures


def torus_quad_and_frame():
    quad = VertexQuad([3, 0, 0], [0, 3, 0], [0, 2, 1], [2, 0, 1])
    frame = VertexFrame([3, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0])
    return quad, frame


def horn_quad_and_frame():
    """Patch of the horn torus R=r=1 straddling the pinch point at the
    origin: u in [0, pi/2], v in [3pi/4, 5pi/4], singular at v = pi."""

    def f(u, v):
        return np.array(
            [(1 + math.cos(v)) * math.cos(u), (1 + math.cos(v)) * math.sin(u), math.sin(v)]
        )

    v0, v1 = 3 * math.pi / 4, 5 * math.pi / 4
    quad = VertexQuad(f(0, v0), f(math.pi / 2, v0), f(math.pi / 2, v1), f(0, v1))
    t1 = np.array([0.0, 1.0, 0.0])
    t2 = -np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    n = np.cross(t1, t2)
    return quad, VertexFrame(quad.x, t1, t2, n)


from conftest import random_generic_patch  # noqa: E402 (shared generator)


# ---------------------------------------------------------------------------
# building blocks


class TestBoundarySphere:
    def test_axis_aligned(self):
        s = boundary_sphere([0, 0, 0], [2, 0, 0], [1, 0, 0])
        assert isinstance(s, ProperSphere)
        assert np.allclose(s.center, [1, 0, 0]) and s.radius == pytest.approx(1.0)

    def test_orthogonal_normal_gives_plane(self):
        s = boundary_sphere([0, 0, 0], [2, 0, 0], [0, 0, 1])
        assert isinstance(s, OrientedPlane)
        assert np.allclose(s.normal, [0, 0, 1]) and s.offset == 0.0
        assert np.allclose(lift(s), [0, 0, 1, 0, 0, 1])

    def test_offset_center(self):
        s = boundary_sphere([0, 0, 1], [0, 0, -2], [0, 0, -1])
        assert np.allclose(s.center, [0, 0, 0]) and s.radius == pytest.approx(1.0)

    def test_both_endpoints_incident(self, rng):
        for _ in range(200):
            x = rng.uniform(-2, 2, size=3)
            delta = rng.normal(size=3)
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            s = boundary_sphere(x, delta, n)
            for p in (x, x + delta):
                if isinstance(s, ProperSphere):
                    assert abs(np.linalg.norm(p - s.center) - abs(s.radius)) <= 1e-9 * (
                        1 + abs(s.radius)
                    )
                else:
                    assert abs(s.normal @ p - s.offset) <= 1e-9

    def test_zero_delta_rejected(self):
        with pytest.raises(ZeroDelta):
            boundary_sphere([0, 0, 0], [0, 0, 0], [1, 0, 0])


class TestReflectInBisector:
    def test_along_axis(self):
        assert np.allclose(reflect_in_bisector([0, 0, 0], [1, 0, 0], [1, 0, 0]), [-1, 0, 0])

    def test_orthogonal_fixed(self):
        assert np.allclose(reflect_in_bisector([0, 0, 0], [1, 0, 0], [0, 1, 0]), [0, 1, 0])

    def test_householder(self):
        assert np.allclose(reflect_in_bisector([0, 0, 0], [1, 1, 0], [1, 0, 0]), [0, -1, 0])

    def test_isometry(self, rng):
        for _ in range(100):
            x, xi = rng.uniform(-2, 2, (2, 3))
            v = rng.normal(size=3)
            w = reflect_in_bisector(x, xi, v)
            assert np.linalg.norm(w) == pytest.approx(np.linalg.norm(v), rel=1e-12)

    def test_coincident_rejected(self):
        with pytest.raises(CoincidentPoints):
            reflect_in_bisector([1, 2, 3], [1, 2, 3], [1, 0, 0])


class TestArcMidpoint:
    def test_quarter_turn(self):
        d = arc_midpoint([0, 0, 0], [2, 0, 0], [0, 1, 0])
        assert np.allclose(d.midpoint, [1, 1, 0], atol=1e-12)

    def test_straight_segment(self):
        d = arc_midpoint([0, 0, 0], [2, 0, 0], [1, 0, 0])
        assert np.allclose(d.midpoint, [1, 0, 0], atol=1e-12)

    def test_antiparallel_through_infinity(self):
        d = arc_midpoint([0, 0, 0], [2, 0, 0], [-1, 0, 0])
        assert is_infinite(d.midpoint)

    def test_midpoint_on_tangent_circle(self, rng):
        for _ in range(100):
            x, xi = rng.uniform(-2, 2, (2, 3))
            if np.linalg.norm(xi - x) < 0.1:
                continue
            t, _, _ = random_tangent_frame(rng)
            d = arc_midpoint(x, xi, t)
            if is_infinite(d.midpoint):
                continue
            circle = lie.circle_from_tangent(x, t, xi)
            assert lie.point_circle_distance(d.midpoint, circle) <= 1e-9
            # equidistant from both endpoints along the carrier
            assert np.linalg.norm(d.midpoint - x) == pytest.approx(
                np.linalg.norm(d.midpoint - xi), rel=1e-9
            )


class TestThirdSphere:
    def test_point_sphere_shortcut(self, rng):
        # <y, s_opp> = 0 leaves only the y term: sigma is the point sphere y
        s = lift(ProperSphere([0, 0, 0], 1))
        y = lift_point([0, 0, 1])
        s_opp = lift_point([0, 0, 1.0])  # y itself lies on s_opp trivially
        sigma = third_sphere(s, y, lift(ProperSphere([0, 0, 3], 2)))
        # generic sanity: polar to both inputs
        assert abs(lie_inner(sigma, s)) <= 1e-12 * lie_norm(sigma) * lie_norm(s)

    def test_polarity_random(self, rng):
        for _ in range(200):
            c = rng.uniform(-2, 2, size=3)
            r = rng.uniform(0.5, 2)
            s = ProperSphere(c, r)
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            y = c + r * d
            s_opp = ProperSphere(rng.uniform(-2, 2, size=3), rng.uniform(0.5, 2))
            if lie.oriented_contact(s, s_opp, tol=1e-6):
                continue
            sigma = third_sphere(lift(s), lift_point(y), lift(s_opp))
            ns = lie_norm(sigma)
            assert abs(lie_inner(sigma, lift(s))) <= 1e-10 * ns * lie_norm(lift(s))
            assert abs(lie_inner(sigma, lift(s_opp))) <= 1e-10 * ns * lie_norm(lift(s_opp))
            assert abs(lie_inner(sigma, sigma)) <= 1e-10 * ns * ns

    def test_torus_tube_midsphere(self):
        # family sphere through the midpoint of the left torus arc, fixed by
        # the axis-intersection oracle: the normal line at y meets the torus
        # axis at (0,0,-2), at distance 1+2*sqrt(2)
        s = lift(ProperSphere([2, 0, 0], -1.0))  # tube sphere at x, outward
        y = torus_point(0.0, math.pi / 4)
        s_opp = lift(ProperSphere([0, 2, 0], -1.0))  # tube sphere at x1
        sigma = project(third_sphere(s, lift_point(y), s_opp))
        assert isinstance(sigma, ProperSphere)
        assert np.allclose(sigma.center, [0, 0, -2], atol=1e-9)
        assert abs(sigma.radius) == pytest.approx(1 + 2 * math.sqrt(2), abs=1e-9)

    def test_oriented_contact_degenerate(self):
        s = lift(ProperSphere([0, 0, 0], 1))
        y = lift_point([0, 0, 1])
        with pytest.raises(OrientedContactDegenerate):
            third_sphere(s, y, s)


class TestFamilyConic:
    def _random_conic(self, rng):
        # three spheres of one torus family are never pairwise in contact
        vs = []
        for v in rng.uniform(0.2, 2.8, size=3):
            tu = ProperSphere([2 * math.cos(v), 2 * math.sin(v), 0], -1.0)
            vs.append(lift(tu))
        return FamilyConic(np.stack(vs))

    def test_support_interpolation(self, rng):
        for _ in range(100):
            conic = self._random_conic(rng)
            s0 = conic.eval(0.0)
            assert np.allclose(s0, conic.grams[0] * conic.supports[0], atol=1e-12)
            s_half = conic.eval(0.5)
            assert np.allclose(s_half, 0.25 * conic.grams[1] * conic.supports[1], atol=1e-12)
            s1 = conic.eval(1.0)
            assert np.allclose(s1, conic.grams[2] * conic.supports[2], atol=1e-12)

    def test_isotropy_along_conic(self, rng):
        for _ in range(100):
            conic = self._random_conic(rng)
            for t in rng.uniform(0, 1, size=5):
                v = conic.eval(t)
                assert abs(lie_inner(v, v)) <= 1e-10 * lie_norm(v) ** 2

    def test_eval_at_infinity(self, rng):
        conic = self._random_conic(rng)
        v = conic.eval(INF)
        w = conic.grams
        s = conic.supports
        assert np.allclose(v, 2 * w[0] * s[0] - w[1] * s[1] + 2 * w[2] * s[2])
        assert abs(lie_inner(v, v)) <= 1e-10 * lie_norm(v) ** 2

    def test_radius_is_er_component(self, rng):
        conic = self._random_conic(rng)
        for t in rng.uniform(0, 1, size=20):
            assert family_radius(conic, t) == pytest.approx(conic.eval(t)[lie.ER], rel=1e-12)

    def test_signature(self, rng):
        conic = self._random_conic(rng)
        assert conic.signature() == (2, 1, 0)


class TestVertexFrames:
    def test_square_reflection(self):
        quad = VertexQuad([0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0])
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        b, b1, b12, b2 = vertex_frames(quad, frame)
        assert np.allclose(b1.t1, [-1, 0, 0])
        assert np.allclose(b1.t2, [0, 1, 0])
        assert np.allclose(b1.n, [0, 0, 1])
        assert np.allclose(b12.t1, [-1, 0, 0])
        assert np.allclose(b12.t2, [0, -1, 0])
        assert np.allclose(b12.n, [0, 0, 1])

    def test_diagonal_path_independence(self, rng):
        for _ in range(50):
            patch = random_generic_patch(rng)
            q = patch.quad
            sep1 = q.separated((0, 1), (3, 2))
            sep2 = q.separated((0, 3), (1, 2))
            b, b1, b12, b2 = patch.frames
            # second route: x -> x2 -> x12
            alt = _reflect(b2, q.x2, q.x12, flip=2 if sep1 else None)
            for got, want in ((b12.t1, alt.t1), (b12.t2, alt.t2), (b12.n, alt.n)):
                assert np.allclose(got, want, atol=1e-12)

    def test_nonembedded_orientation_flip(self):
        quad = VertexQuad([0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0])
        assert not quad.is_embedded()
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        b, b1, b12, b2 = vertex_frames(quad, frame)
        # frames at x and x1 have equal orientation for separated endpoints
        assert np.sign(b.det()) == np.sign(b1.det())


def _reflect(frame, x, xi, flip):
    from cyclidic.cyclide import _reflect_frame

    return _reflect_frame(frame, x, xi, flip)


# ---------------------------------------------------------------------------
# the torus patch oracle


class TestTorusPatch:
    def test_boundary_spheres(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        assert patch.kind == "generic"
        bottom = project(patch.boundary_sphere_vector("v0"))
        assert spheres_equal(bottom, ProperSphere([0, 0, 0], 3.0), up_to_orientation=True)
        left = project(patch.boundary_sphere_vector("u0"))
        assert spheres_equal(left, ProperSphere([2, 0, 0], 1.0), up_to_orientation=True)
        top = project(patch.boundary_sphere_vector("v1"))
        assert spheres_equal(top, OrientedPlane([0, 0, 1], 1.0), up_to_orientation=True)

    def test_corner_contract(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        assert np.allclose(patch.eval(0, 0), [3, 0, 0], atol=1e-12)
        assert np.allclose(patch.eval(1, 0), [0, 3, 0], atol=1e-10)
        assert np.allclose(patch.eval(0, 1), [2, 0, 1], atol=1e-10)
        assert np.allclose(patch.eval(1, 1), [0, 2, 1], atol=1e-10)

    def test_center_value(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        p = patch.eval(0.5, 0.5)
        assert np.allclose(p, [1.91421, 1.91421, 0.70711], atol=1e-5)
        assert np.allclose(p, torus_point(math.pi / 4, math.pi / 4), atol=1e-9)

    def test_dense_samples_on_torus(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        for u in np.linspace(0, 1, 17):
            for v in np.linspace(0, 1, 17):
                p = patch.eval(u, v)
                assert torus_implicit_residual(p) <= 1e-8

    def test_parameter_match(self):
        # discrete parameters hit the smooth angles at 0, 1/2, 1
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        for i, u in enumerate((0.0, 0.5, 1.0)):
            for j, v in enumerate((0.0, 0.5, 1.0)):
                want = torus_point(i * math.pi / 4, j * math.pi / 4)
                assert np.allclose(patch.eval(u, v), want, atol=1e-9)

    def test_normals(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        el = patch.contact_element(0.0, 0.0)
        assert np.allclose(np.abs(el.normal), [1, 0, 0], atol=1e-12)
        # normal agrees with the analytic torus normal at the evaluated point
        for u in np.linspace(0, 1, 5):
            for v in np.linspace(0, 1, 5):
                n = patch.normal(u, v)
                p = patch.eval(u, v)
                uu = math.atan2(p[1], p[0])
                vv = math.atan2(p[2], math.hypot(p[0], p[1]) - 2.0)
                want = np.array(
                    [math.cos(vv) * math.cos(uu), math.cos(vv) * math.sin(uu), math.sin(vv)]
                )
                assert min(np.linalg.norm(n - want), np.linalg.norm(n + want)) <= 1e-8

    def test_no_singular_parameters(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        assert patch.singular_parameters() == []

    def test_contact_element_span_invariants(self, rng):
        # the spanning pair is isotropic and mutually polar, and eliminating
        # the er-component leaves exactly one point sphere: the surface point
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        for _ in range(20):
            u, v = rng.uniform(0, 1, size=2)
            el = patch.contact_element(u, v)
            a, b = el.span
            na, nb = lie.lie_norm(a), lie.lie_norm(b)
            assert abs(lie_inner(a, a)) <= 1e-9 * na * na
            assert abs(lie_inner(b, b)) <= 1e-9 * nb * nb
            assert abs(lie_inner(a, b)) <= 1e-9 * na * nb
            from cyclidic.lie import contact_point_vector, project_point

            point = project_point(contact_point_vector(a, b), tol=1e-6)
            assert np.allclose(point, el.point, atol=1e-8)


# ---------------------------------------------------------------------------
# generic patch properties


class TestPatchInvariants:
    def test_polarity(self, rng):
        # full 20x20 sampling on a few patches, coarser on the rest
        for trial in range(20):
            patch = random_generic_patch(rng)
            ts = np.linspace(0, 1, 20) if trial < 5 else np.linspace(0, 1, 5)
            fam2 = [patch.family2.eval(t) for t in ts]
            for t2 in ts:
                a = patch.family1.eval(t2)
                na = lie_norm(a)
                for b in fam2:
                    assert abs(lie_inner(a, b)) <= 1e-8 * na * lie_norm(b)

    def test_corner_exactness(self, rng):
        for _ in range(30):
            patch = random_generic_patch(rng)
            diam = patch.quad.diameter()
            for (u, v), corner in zip(
                [(0, 0), (1, 0), (1, 1), (0, 1)], patch.quad.points()
            ):
                assert np.linalg.norm(patch.eval(u, v) - corner) <= 1e-9 * (1 + diam)

    def test_frame_alignment(self, rng):
        h = 1e-6
        for _ in range(20):
            patch = random_generic_patch(rng)
            x = patch.eval(0, 0)
            du = (patch.eval(h, 0) - x) / h
            dv = (patch.eval(0, h) - x) / h
            du /= np.linalg.norm(du)
            dv /= np.linalg.norm(dv)
            assert np.arccos(np.clip(du @ patch.frame.t1, -1, 1)) <= 1e-5
            assert np.arccos(np.clip(dv @ patch.frame.t2, -1, 1)) <= 1e-5
            cr = np.cross(du, dv)
            cr /= np.linalg.norm(cr)
            assert min(
                np.linalg.norm(cr - patch.frame.n), np.linalg.norm(cr + patch.frame.n)
            ) <= 1e-4

    def test_parameter_line_orthogonality(self, rng):
        h = 1e-5
        for _ in range(10):
            patch = random_generic_patch(rng)
            for u in np.linspace(0.1, 0.9, 10):
                for v in np.linspace(0.1, 0.9, 10):
                    du = patch.eval(u + h, v) - patch.eval(u - h, v)
                    dv = patch.eval(u, v + h) - patch.eval(u, v - h)
                    cosang = abs(du @ dv) / (np.linalg.norm(du) * np.linalg.norm(dv))
                    assert cosang <= 1e-4

    def test_boundary_arcs_concircular(self, rng):
        for _ in range(10):
            patch = random_generic_patch(rng)
            for edge in ("v0", "v1", "u0", "u1"):
                pts = [patch.edge_point(edge, s) for s in np.linspace(0, 1, 10)]
                assert lie.concircular(pts, tol=1e-8)

    def test_edge_parameter_inversion(self, rng):
        for _ in range(10):
            patch = random_generic_patch(rng)
            for edge in ("v0", "v1", "u0", "u1"):
                for s in (0.12, 0.5, 0.87):
                    p = patch.edge_point(edge, s)
                    assert patch.invert_edge_parameter(edge, p) == pytest.approx(s, abs=1e-8)


class TestSubpatch:
    def test_identity(self, rng):
        patch = random_generic_patch(rng)
        sub = patch.subpatch(1.0, 1.0)
        for a, b in zip(sub.quad.points(), patch.quad.points()):
            assert np.allclose(a, b, atol=1e-9)
        for edge in ("v0", "v1", "u0", "u1"):
            va = sub.boundary_sphere_vector(edge)
            vb = patch.boundary_sphere_vector(edge)
            assert np.allclose(va / lie_norm(va), vb / lie_norm(vb), atol=1e-9)

    def test_half_hits_arc_midpoint(self):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        sub = patch.subpatch(0.5, 1.0)
        y1 = arc_midpoint(quad.x, quad.x1, frame.t1).midpoint
        assert np.allclose(sub.quad.x1, y1, atol=1e-9)

    def test_eval_agreement_and_concircularity(self, rng):
        quad, frame = torus_quad_and_frame()
        patch = patch_from_data(quad, frame)
        for _ in range(100):
            u0, v0 = rng.uniform(0.15, 1.0, size=2)
            sub = patch.subpatch(u0, v0)
            assert lie.concircular(list(sub.quad.points()), tol=1e-7)
            for s, t in [(0.3, 0.7), (0.8, 0.2), (0.5, 0.5)]:
                assert np.allclose(
                    sub.eval(s, t), patch.eval(s * u0, t * v0), atol=1e-10 * (1 + 3)
                )

    def test_frame_at_anchor_unchanged(self, rng):
        patch = random_generic_patch(rng)
        sub = patch.subpatch(0.6, 0.7)
        assert np.allclose(sub.frames[0].t1, patch.frames[0].t1, atol=1e-12)
        assert np.allclose(sub.frames[0].t2, patch.frames[0].t2, atol=1e-12)
        assert np.allclose(sub.frames[0].n, patch.frames[0].n, atol=1e-12)

    def test_reparametrized_supports(self, rng):
        patch = random_generic_patch(rng)
        u0, v0 = 0.4, 0.8
        sub = patch.subpatch(u0, v0)
        for fam_sub, fam, s0 in ((sub.family2, patch.family2, u0), (sub.family1, patch.family1, v0)):
            for k, t in enumerate((0.0, s0 / 2, s0)):
                a = fam_sub.supports[k]
                b = fam.eval(t)
                a = a / lie_norm(a)
                b = b / lie_norm(b)
                assert min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= 1e-9

    def test_degenerate_domain_rejected(self, rng):
        patch = random_generic_patch(rng)
        with pytest.raises(DegenerateSubdomain):
            patch.subpatch(0.0, 0.5)


# ---------------------------------------------------------------------------
# spherical patches


class TestSpherical:
    def test_planar_quad_is_spherical(self):
        quad = VertexQuad([0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0])
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        assert is_spherical(quad, frame)

    def test_torus_quad_not_spherical(self):
        quad, frame = torus_quad_and_frame()
        assert not is_spherical(quad, frame)

    def test_normal_at_circle_center(self):
        # unit circle vertices, normal pointing at the center
        th = [0.0, 0.5, 1.7, 3.0]
        pts = [np.array([math.cos(t), math.sin(t), 0.0]) for t in th]
        quad = VertexQuad(*pts)
        n = -pts[0]
        t2 = np.array([0.0, 0.0, 1.0])
        t1 = np.cross(t2, n)
        frame = VertexFrame(pts[0], t1, t2, n)
        assert is_spherical(quad, frame)

    def test_flat_square_patch(self):
        quad = VertexQuad([0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0])
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        patch = patch_from_data(quad, frame)
        assert patch.kind == "spherical"
        for s in np.linspace(0, 1, 7):
            for t in np.linspace(0, 1, 7):
                assert np.allclose(patch.eval(s, t), [s, t, 0], atol=1e-9)

    def test_unit_sphere_quad(self):
        def u(phi, theta):
            return np.array(
                [math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta), math.cos(phi)]
            )

        phi0, phi1 = 0.7, 1.3
        th0, th1 = 0.2, 0.9
        quad = VertexQuad(u(phi0, th0), u(phi0, th1), u(phi1, th1), u(phi1, th0))
        x = quad.x
        t1 = np.array([-math.sin(th0), math.cos(th0), 0.0])
        t2 = np.array(
            [math.cos(phi0) * math.cos(th0), math.cos(phi0) * math.sin(th0), -math.sin(phi0)]
        )
        frame = VertexFrame(x, t1, t2, np.cross(t1, t2))
        assert is_spherical(quad, frame)
        patch = patch_from_data(quad, frame)
        assert patch.kind == "spherical"
        for s in np.linspace(0, 1, 8):
            for t in np.linspace(0, 1, 8):
                p = patch.eval(s, t)
                assert abs(np.linalg.norm(p) - 1.0) <= 1e-9

    def test_corner_contract(self):
        quad = VertexQuad([0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0])
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        patch = patch_from_data(quad, frame)
        assert np.allclose(patch.eval(0, 0), quad.x, atol=1e-12)

    def test_rotated_planar_patch_parameter_lines_circular(self, rng):
        # tilted plane, circular quad at irregular angles: parameter lines
        # must stay circular arcs of the two orthogonal families
        rot = random_rotation(rng)
        th = [0.3, 1.4, 2.9, 4.6]
        base = [np.array([2 + 1.5 * math.cos(t), -1 + 1.5 * math.sin(t), 0.0]) for t in th]
        pts = [rot @ p for p in base]
        quad = VertexQuad(*pts)
        chord = pts[1] - pts[0]
        n = rot @ np.array([0.0, 0, 1])
        radial = base[0] - np.array([2, -1, 0.0])
        t1_base = np.array([-radial[1], radial[0], 0.0])
        t1_base /= np.linalg.norm(t1_base)
        if t1_base @ (base[1] - base[0]) < 0:
            t1_base = -t1_base
        t1 = rot @ t1_base
        t2 = np.cross(n, t1)
        # orient t2 toward x2
        if t2 @ (pts[3] - pts[0]) < 0:
            t2 = -t2
        frame = VertexFrame(pts[0], t1, t2, n)
        patch = patch_from_data(quad, frame)
        assert patch.kind == "spherical"
        for s in (0.25, 0.5, 0.75):
            pts_u = [patch.eval(s, t) for t in np.linspace(0, 1, 8)]
            pts_v = [patch.eval(t, s) for t in np.linspace(0, 1, 8)]
            assert lie.concircular(pts_u, tol=1e-7)
            assert lie.concircular(pts_v, tol=1e-7)

    def test_spherical_orthogonality(self):
        # planar circular quad with a frame not adapted to the carrier
        th = [0.2, 1.1, 2.4, 3.9]
        pts = [np.array([1.2 * math.cos(t) + 0.3, 1.2 * math.sin(t) - 0.1, 0.0]) for t in th]
        quad = VertexQuad(*pts)
        assert quad.is_embedded()
        t1 = pts[1] - pts[0]
        t1 /= np.linalg.norm(t1)
        n = np.array([0.0, 0.0, 1.0])
        t2 = np.cross(n, t1)
        if t2 @ (pts[3] - pts[0]) < 0:
            t2 = -t2
        frame = VertexFrame(quad.x, t1, t2, n)
        patch = patch_from_data(quad, frame)
        assert patch.kind == "spherical"
        h = 1e-5
        for u in np.linspace(0.2, 0.8, 5):
            for v in np.linspace(0.2, 0.8, 5):
                du = np.asarray(patch.eval(u + h, v)) - np.asarray(patch.eval(u - h, v))
                dv = np.asarray(patch.eval(u, v + h)) - np.asarray(patch.eval(u, v - h))
                cosang = abs(du @ dv) / (np.linalg.norm(du) * np.linalg.norm(dv))
                assert cosang <= 1e-4


def _circumcircle4(pts):
    from conftest import circumcircle_3pt

    return circumcircle_3pt(*pts[:3])


# ---------------------------------------------------------------------------
# singular parameters


class TestSingularParameters:
    def test_horn_pinch_point(self):
        quad, frame = horn_quad_and_frame()
        patch = patch_from_data(quad, frame)
        assert patch.kind == "generic"
        sing = patch.singular_parameters()
        assert len(sing) == 1
        fam, t_star = sing[0]
        conic = patch.family1 if fam == 1 else patch.family2
        # residual of the radius quadratic at the reported root
        coeffs = conic.coefficient_curve()[:, lie.ER]
        assert abs(np.polyval(coeffs, t_star)) <= 1e-9
        # the root is a split double root, so parameter accuracy is sqrt(eps)
        pinch = project(conic.eval(t_star), tol=1e-6)
        assert isinstance(pinch, PointSphere)
        assert np.allclose(pinch.point, [0, 0, 0], atol=1e-7)
        # the whole parameter line collapses to the pinch point
        if fam == 1:
            pts = [patch.eval(u, t_star) for u in (0.0, 0.3, 0.9)]
        else:
            pts = [patch.eval(t_star, v) for v in (0.0, 0.3, 0.9)]
        for p in pts:
            assert np.allclose(p, [0, 0, 0], atol=1e-7)

    def test_at_most_two(self, rng):
        for _ in range(30):
            patch = random_generic_patch(rng)
            assert len(patch.singular_parameters()) <= 2

    def test_nonembedded_rejected(self):
        quad = VertexQuad([0, 0, 0], [1, 1, 0], [1, 0, 0], [0, 1, 0])
        frame = VertexFrame([0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1])
        with pytest.raises(NonEmbeddedQuad):
            patch_from_data(quad, frame)
