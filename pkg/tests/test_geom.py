import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpi_forge import geom
from rpi_forge.errors import (DegenerateSetError, EmptySetError,
                              UnboundedSetError)
from rpi_forge.geom import (Ellipsoid, GaugePolytope, HPolytope, VPolytope,
                            circumscribe, contains_inflated, convex_hull,
                            facet_enum, gauge, induced_gauge_norm,
                            linear_image, minkowski_sum, remove_redundant,
                            vertex_enum, volume)

from oracles import (gauge_by_bisection, gauge_from_vertices,
                     induced_norm_from_vertices, random_polygon,
                     shoelace_area, support_from_vertices)


def unit_box(n=2, r=1.0):
    return HPolytope.box(r, n)


def box_vertices(r=1.0):
    return np.array([[r, r], [r, -r], [-r, r], [-r, -r]])


class TestGauge:
    def test_origin(self):
        g = GaugePolytope(unit_box())
        assert gauge(g, [0.0, 0.0]) == 0.0

    def test_box_example_matches_bisection_oracle(self):
        body = GaugePolytope(unit_box(r=2.0))

        def member(z, alpha):
            return bool(np.all(np.abs(z) <= alpha * 2.0 + 1e-13))

        z = np.array([1.0, -0.5])
        oracle = gauge_by_bisection(member, z)
        assert oracle == pytest.approx(0.5, abs=1e-9)
        assert gauge(body, z) == pytest.approx(0.5, abs=1e-12)

    def test_euclidean_ball(self):
        e = Ellipsoid(np.eye(2))
        assert gauge(e, [3.0, 4.0]) == pytest.approx(5.0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateSetError):
            GaugePolytope(HPolytope.box(0.0, 2))
        with pytest.raises(DegenerateSetError):
            gauge(HPolytope.box(0.0, 2), [1.0, 0.0])

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_subadditive_and_homogeneous(self, seed):
        rng = np.random.default_rng(seed)
        verts = random_polygon(rng, k=7)
        body = GaugePolytope(facet_enum(VPolytope(verts)))
        x, y = rng.normal(size=2), rng.normal(size=2)
        gx, gy, gxy = gauge(body, x), gauge(body, y), gauge(body, x + y)
        assert gxy <= gx + gy + 1e-9
        a = rng.uniform(0.0, 3.0)
        assert gauge(body, a * x) == pytest.approx(a * gx, abs=1e-9)


class TestInducedNorm:
    def test_identity(self):
        body = GaugePolytope(unit_box())
        assert induced_gauge_norm(np.eye(2), body) == pytest.approx(1.0)

    def test_zero(self):
        body = GaugePolytope(unit_box())
        assert induced_gauge_norm(np.zeros((2, 2)), body) == 0.0

    def test_shear_on_box_matches_vertex_oracle(self):
        A = np.array([[1.0, 1.0], [0.0, 1.0]])
        oracle = induced_norm_from_vertices(A, box_vertices())
        assert oracle == pytest.approx(2.0, abs=1e-9)
        body = GaugePolytope(unit_box())
        assert induced_gauge_norm(A, body) == pytest.approx(2.0, abs=1e-10)

    def test_random_bodies_match_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            verts = random_polygon(rng, k=9, symmetric=True)
            body = GaugePolytope(facet_enum(VPolytope(verts)))
            A = rng.normal(size=(2, 2))
            want = induced_norm_from_vertices(A, verts)
            got = induced_gauge_norm(A, body)
            assert got == pytest.approx(want, rel=1e-8, abs=1e-10)

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_submultiplicative(self, seed):
        rng = np.random.default_rng(seed)
        body = GaugePolytope(unit_box())
        A, B = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
        nab = induced_gauge_norm(A @ B, body)
        assert nab <= induced_gauge_norm(A, body) * induced_gauge_norm(B, body) + 1e-9


class TestEnumeration:
    def test_box_vertices(self):
        v = vertex_enum(unit_box())
        got = sorted(map(tuple, np.round(v.vertices, 9)))
        assert got == [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]

    def test_simplex_3d(self):
        normals = np.vstack([-np.eye(3), np.ones((1, 3))])
        offsets = np.array([0.0, 0.0, 0.0, 1.0])
        v = vertex_enum(HPolytope(normals, offsets))
        assert v.nverts == 4

    def test_roundtrip_random(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            verts = random_polygon(rng, k=8)
            h = facet_enum(VPolytope(verts))
            v2 = vertex_enum(h)
            # mutual inclusion within tolerance
            for p in v2.vertices:
                assert VPolytope(verts).contains(p, tol=1e-8)
            for p in verts:
                assert v2.contains(p, tol=1e-8)

    def test_vertices_certified_by_support_lp(self):
        # random bounded 6-facet polygon: each reported vertex is extremal
        rng = np.random.default_rng(11)
        ang = np.sort(rng.uniform(0, 2 * np.pi, 6))
        normals = np.column_stack([np.cos(ang), np.sin(ang)])
        offsets = rng.uniform(0.5, 2.0, 6)
        h = HPolytope(normals, offsets)
        v = vertex_enum(h)
        for i, p in enumerate(v.vertices):
            assert h.contains(p, tol=1e-8)
            # extremality: p is not a convex combination of the others
            others = VPolytope(np.delete(v.vertices, i, axis=0))
            assert not others.contains(p, tol=1e-9)

    def test_unbounded_raises(self):
        h = HPolytope(np.array([[1.0, 0.0], [0.0, 1.0]]), np.ones(2))
        with pytest.raises(UnboundedSetError):
            vertex_enum(h)

    def test_empty_raises(self):
        h = HPolytope(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([-1.0, -1.0]))
        with pytest.raises(EmptySetError):
            remove_redundant(h)

    def test_interval(self):
        h = HPolytope(np.array([[2.0], [-1.0]]), np.array([4.0, 1.0]))
        v = vertex_enum(h)
        assert sorted(v.vertices[:, 0]) == pytest.approx([-1.0, 2.0])
        h2 = facet_enum(v)
        assert gauge(GaugePolytope(h2), [2.0]) == pytest.approx(1.0)


class TestRedundancy:
    def test_duplicates_halve(self):
        box = unit_box()
        doubled = HPolytope(np.vstack([box.normals, box.normals]),
                            np.concatenate([box.offsets, box.offsets]))
        r = remove_redundant(doubled)
        assert r.nrows == 4

    def test_slack_row_removed(self):
        h = HPolytope(np.vstack([unit_box().normals, [[1.0, 0.0]]]),
                      np.concatenate([unit_box().offsets, [10.0]]))
        r = remove_redundant(h)
        assert r.nrows == 4

    def test_tangent_halfspaces_all_retained(self):
        ang = 2 * np.pi * np.arange(100) / 100
        normals = np.column_stack([np.cos(ang), np.sin(ang)])
        h = HPolytope(normals, np.ones(100))
        assert remove_redundant(h).nrows == 100


class TestMinkowski:
    def test_zero_identity(self):
        s = VPolytope(box_vertices())
        z = VPolytope(np.zeros((1, 2)))
        out = minkowski_sum(s, z)
        assert sorted(map(tuple, out.vertices)) == sorted(map(tuple, s.vertices))

    def test_box_plus_box(self):
        s = VPolytope(box_vertices())
        out = minkowski_sum(s, s)
        assert sorted(map(tuple, out.vertices)) == sorted(map(tuple, box_vertices(2.0)))

    def test_box_plus_diamond_octagon_support(self):
        box = box_vertices()
        diamond = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        out = minkowski_sum(VPolytope(box), VPolytope(diamond))
        assert out.nverts == 8
        for k in range(16):
            d = np.array([np.cos(np.pi * k / 8), np.sin(np.pi * k / 8)])
            want = support_from_vertices(box, d) + support_from_vertices(diamond, d)
            assert out.support(d) == pytest.approx(want, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            minkowski_sum(VPolytope(box_vertices()), VPolytope(np.array([[1.0]])))

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_commutative(self, seed):
        rng = np.random.default_rng(seed)
        a = VPolytope(random_polygon(rng, 5))
        b = VPolytope(random_polygon(rng, 5))
        ab = minkowski_sum(a, b)
        ba = minkowski_sum(b, a)
        assert contains_inflated(ab, ba, 0.0, ba, tol=1e-9)
        assert contains_inflated(ba, ab, 0.0, ab, tol=1e-9)


class TestLinearImage:
    def test_identity_and_zero(self):
        s = VPolytope(box_vertices())
        assert sorted(map(tuple, linear_image(np.eye(2), s).vertices)) == \
            sorted(map(tuple, s.vertices))
        z = linear_image(np.zeros((2, 2)), s)
        assert z.nverts == 1
        assert np.allclose(z.vertices, 0.0)

    def test_rotation_preserves_volume(self):
        rng = np.random.default_rng(5)
        s = VPolytope(random_polygon(rng, 7))
        th = 0.7
        R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        assert volume(linear_image(R, s)) == pytest.approx(volume(s), rel=1e-10)


class TestContainsInflated:
    def test_reflexive(self):
        s = VPolytope(box_vertices())
        assert contains_inflated(s, s, 0.0, s)

    def test_scaled_box_threshold(self):
        s = VPolytope(1.1 * box_vertices())
        t = VPolytope(box_vertices())
        omega = VPolytope(box_vertices())
        assert not contains_inflated(s, t, 0.05, omega)
        assert contains_inflated(s, t, 0.1, omega)

    def test_strict_subset(self):
        s = VPolytope(0.5 * box_vertices())
        t = VPolytope(box_vertices())
        assert contains_inflated(s, t, 0.0, t)


class TestCircumscribe:
    def test_square_around_disc(self):
        omega, kappa = circumscribe(np.eye(2), 4)
        assert kappa == pytest.approx(math.sqrt(2.0), abs=1e-9)
        got = sorted(map(tuple, np.round(omega.vertices, 9)))
        assert got == [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]

    def test_sixteen_gon_kappa(self):
        omega, kappa = circumscribe(np.eye(2), 16)
        assert kappa == pytest.approx(1.0 / math.cos(math.pi / 16), abs=1e-9)
        # oracle: every vertex norm <= kappa with equality attained
        norms = np.linalg.norm(omega.vertices, axis=1)
        assert norms.max() == pytest.approx(kappa, abs=1e-9)

    def test_affine_invariance_of_kappa(self):
        _, k_iso = circumscribe(np.eye(2), 16)
        _, k_aniso = circumscribe(np.diag([4.0, 1.0]), 16)
        assert k_aniso == pytest.approx(k_iso, abs=1e-9)

    def test_contains_ellipsoid_boundary(self):
        P = np.array([[2.0, 0.5], [0.5, 1.0]])
        omega, kappa = circumscribe(P, 12)
        h = facet_enum(omega)
        L = np.linalg.cholesky(P)
        Pinv = np.linalg.inv(P)
        for t in np.linspace(0, 2 * np.pi, 64, endpoint=False):
            z = L @ np.array([np.cos(t), np.sin(t)])
            assert h.contains(z, tol=1e-9)
        norms = np.sqrt(np.einsum("ij,jk,ik->i", omega.vertices, Pinv, omega.vertices))
        assert np.all(norms <= kappa + 1e-9)
        assert norms.max() == pytest.approx(kappa, abs=1e-12)

    def test_whitened_norm_bound(self):
        # consequence of the sandwich: |A|_omega <= kappa * |A|_{P^{-1}}
        rng = np.random.default_rng(9)
        P = np.array([[1.5, 0.3], [0.3, 0.8]])
        omega, kappa = circumscribe(P, 16)
        body = GaugePolytope(facet_enum(omega))
        Ph = np.linalg.cholesky(P)
        for _ in range(20):
            A = rng.normal(size=(2, 2))
            whitened = np.linalg.norm(np.linalg.solve(Ph, A @ Ph), 2)
            assert induced_gauge_norm(A, body) <= kappa * whitened + 1e-9

    def test_not_spd(self):
        with pytest.raises(DegenerateSetError):
            circumscribe(np.array([[1.0, 0.0], [0.0, -1.0]]), 8)


class TestVolume:
    def test_unit_box(self):
        assert volume(VPolytope(box_vertices())) == pytest.approx(4.0)

    def test_unit_disc(self):
        assert volume((np.eye(2), 1.0)) == pytest.approx(math.pi)

    def test_random_triangles_match_shoelace(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            tri = rng.normal(size=(3, 2))
            want = shoelace_area(tri)
            if want < 1e-6:
                continue
            assert volume(VPolytope(tri)) == pytest.approx(want, rel=1e-10)

    def test_flat_warns_zero(self):
        with pytest.warns(UserWarning):
            assert volume(VPolytope(np.array([[0.0, 0.0], [1.0, 1.0]]))) == 0.0

    def test_ellipsoid_scaling(self):
        P = np.diag([4.0, 1.0])
        assert volume((P, 1.0)) == pytest.approx(math.pi * 2.0)
        assert volume((P, 2.0)) == pytest.approx(math.pi * 8.0)


class TestConvexHullHelpers:
    def test_degenerate_point(self):
        out = convex_hull(np.zeros((5, 2)))
        assert out.nverts == 1

    def test_segment(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.5], [0.25, 0.25]])
        out = convex_hull(pts)
        assert out.nverts == 2
        got = sorted(map(tuple, np.round(out.vertices, 9)))
        assert got == [(0.0, 0.0), (1.0, 1.0)]

    def test_prunes_interior(self):
        pts = np.vstack([box_vertices(), [[0.0, 0.0], [0.5, 0.5]]])
        assert convex_hull(pts).nverts == 4
