from __future__ import annotations

import math

import numpy as np
import pytest

from stochgeo.bodies import (
    Ball,
    Box,
    Ellipsoid,
    HPolytope,
    Simplex,
    contains_many,
    make_standard_simplex,
    make_unit_box,
    parse_hpolytope_text,
)
from stochgeo.specialfn import unit_ball_volume

SQUARE_HPOLY = """\
1 0 1
-1 0 0
0 1 1
0 -1 0
interior 0.5 0.5
"""


def all_test_bodies():
    return [
        Ball(np.zeros(2), 1.0),
        Ball(np.array([1.0, -2.0, 0.5]), 0.7),
        Ellipsoid(np.zeros(2), np.diag([0.25, 1.0])),
        Ellipsoid(np.array([0.3, 0.1, -0.2]), np.diag([1.0, 4.0, 0.5])),
        make_unit_box(2),
        Box(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 3.0, 2.5])),
        make_standard_simplex(2),
        make_standard_simplex(3),
        parse_hpolytope_text(SQUARE_HPOLY),
    ]


class TestContains:
    def test_unit_ball_center_and_boundary(self):
        ball = Ball(np.zeros(2), 1.0)
        assert ball.contains([0.0, 0.0])
        assert ball.contains([1.0, 0.0])  # boundary counts as inside
        assert not ball.contains([1.0 + 1e-9, 0.0])

    def test_unit_box(self):
        box = make_unit_box(2)
        assert box.contains([0.5, 0.5])
        assert not box.contains([2.0, 0.5])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            Ball(np.zeros(2), 1.0).contains([0.0, 0.0, 0.0])

    def test_vectorized_agrees_with_scalar(self):
        rng = np.random.default_rng(3)
        for body in all_test_bodies():
            z = rng.standard_normal((200, body.dim)) * 1.5
            batch = contains_many(body, z)
            single = np.array([body.contains(p) for p in z])
            assert np.array_equal(batch, single)


class TestSupport:
    def test_examples(self):
        assert Ball(np.zeros(2), 1.0).support([0.0, 1.0]) == pytest.approx(1.0)
        assert make_unit_box(2).support([1.0, 1.0]) == pytest.approx(2.0)
        ell = Ellipsoid(np.zeros(2), np.diag([0.25, 1.0]))
        assert ell.support([1.0, 0.0]) == pytest.approx(2.0)

    def test_sublinear(self):
        rng = np.random.default_rng(11)
        for body in all_test_bodies():
            for _ in range(50):
                u = rng.standard_normal(body.dim)
                v = rng.standard_normal(body.dim)
                assert body.support(u + v) <= body.support(u) + body.support(v) + 1e-9

    def test_rejects_zero_direction(self):
        with pytest.raises(ValueError):
            Ball(np.zeros(2), 1.0).support([0.0, 0.0])


class TestVolume:
    def test_examples(self):
        assert Ball(np.zeros(3), 1.0).volume() == pytest.approx(4 * math.pi / 3, rel=1e-13)
        assert make_unit_box(3).volume() == pytest.approx(1.0)
        ell = Ellipsoid(np.zeros(2), np.diag([0.25, 1.0]))
        assert ell.volume() == pytest.approx(2 * math.pi, rel=1e-13)
        assert make_standard_simplex(4).volume() == pytest.approx(1.0 / 24.0, rel=1e-13)

    def test_ellipsoid_is_affine_image_of_ball(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            d = int(rng.integers(2, 5))
            q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            axes = 0.3 + 2.0 * rng.random(d)
            t_mat = q @ np.diag(axes)  # ellipsoid = T(unit ball)
            shape = np.linalg.inv(t_mat @ t_mat.T)
            ell = Ellipsoid(np.zeros(d), shape)
            expected = abs(np.linalg.det(t_mat)) * unit_ball_volume(d)
            assert ell.volume() == pytest.approx(expected, rel=1e-11)

    def test_hpolytope_square_exact(self):
        hp = parse_hpolytope_text(SQUARE_HPOLY)
        assert hp.volume() == pytest.approx(1.0, rel=1e-12)
        assert hp.volume_stderr() == 0.0

    def test_hpolytope_cube_3d_exact(self):
        rows = []
        for j in range(3):
            for sign, b in ((1.0, 2.0), (-1.0, 0.0)):
                a = [0.0, 0.0, 0.0]
                a[j] = sign
                rows.append(" ".join(str(v) for v in a) + f" {b}")
        text = "\n".join(rows) + "\ninterior 1 1 1\n"
        hp = parse_hpolytope_text(text)
        assert hp.volume() == pytest.approx(8.0, rel=1e-10)

    def test_hpolytope_mc_path_above_3d(self):
        rows = []
        for j in range(4):
            for sign, b in ((1.0, 1.0), (-1.0, 0.0)):
                a = [0.0] * 4
                a[j] = sign
                rows.append(" ".join(str(v) for v in a) + f" {b}")
        text = "\n".join(rows) + "\ninterior 0.5 0.5 0.5 0.5\n"
        hp = parse_hpolytope_text(text)
        vol = hp.volume()
        se = hp.volume_stderr()
        assert se == 0.0  # unit hypercube fills its own bounding box
        assert vol == pytest.approx(1.0, abs=1e-12)


class TestRayBoundary:
    def test_ball_example(self):
        sp = Ball(np.zeros(2), 1.0).ray_boundary(np.zeros(2), np.array([1.0, 0.0]))
        assert sp.x == pytest.approx([1.0, 0.0])
        assert sp.normal == pytest.approx([1.0, 0.0])
        assert sp.rolling_radius == pytest.approx(1.0)

    def test_box_example(self):
        sp = make_unit_box(2).ray_boundary(np.array([0.5, 0.5]), np.array([0.0, 1.0]))
        assert sp.x == pytest.approx([0.5, 1.0])
        assert sp.normal == pytest.approx([0.0, 1.0])
        assert sp.rolling_radius == pytest.approx(0.5)

    def test_ellipse_semi_axis_curvature_radius(self):
        # semi-axes (2, 1): the rolling radius at the major-axis end is b^2/a;
        # tangency has quadratic contact there, so expect ~sqrt(eps) slack
        ell = Ellipsoid(np.zeros(2), np.diag([0.25, 1.0]))
        sp = ell.ray_boundary(np.zeros(2), np.array([1.0, 0.0]))
        assert sp.x == pytest.approx([2.0, 0.0], abs=1e-12)
        assert sp.normal == pytest.approx([1.0, 0.0], abs=1e-12)
        assert sp.rolling_radius == pytest.approx(0.5, abs=1e-4)

    def test_inscribed_tangent_ball_is_contained(self):
        rng = np.random.default_rng(23)
        for body in all_test_bodies():
            origin = body.interior_point()
            for _ in range(8):
                u = rng.standard_normal(body.dim)
                u /= np.linalg.norm(u)
                sp = body.ray_boundary(origin, u)
                if sp.normal is None or sp.rolling_radius <= 0:
                    continue
                r = sp.rolling_radius * (1.0 - 1e-7)
                center = sp.x - sp.rolling_radius * sp.normal
                g = rng.standard_normal((1000, body.dim))
                g /= np.linalg.norm(g, axis=1, keepdims=True)
                radii = rng.random((1000, 1)) ** (1.0 / body.dim)
                pts = center + r * g * radii
                assert contains_many(body, pts).all(), type(body).__name__

    def test_boundary_point_on_boundary_and_beyond_outside(self):
        # 10^4 random directions per body kind
        rng = np.random.default_rng(31)
        bodies = all_test_bodies()
        kind_count = {}
        for body in bodies:
            kind_count[type(body)] = kind_count.get(type(body), 0) + 1
        for body in bodies:
            origin = body.interior_point()
            for _ in range(10_000 // kind_count[type(body)]):
                u = rng.standard_normal(body.dim)
                u /= np.linalg.norm(u)
                sp = body.ray_boundary(origin, u, rolling=False)
                assert body.contains(sp.x)
                assert not body.contains(sp.x + 1e-6 * body.circumradius() * u)

    def test_requires_interior_origin(self):
        with pytest.raises(ValueError, match="interior"):
            Ball(np.zeros(2), 1.0).ray_boundary(np.array([2.0, 0.0]), np.array([1.0, 0.0]))

    def test_box_corner_hit_has_no_normal(self):
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        sp = make_unit_box(2).ray_boundary(np.array([0.5, 0.5]), u)
        assert sp.normal is None
        assert sp.rolling_radius == 0.0


class TestValidation:
    def test_ball_needs_positive_radius(self):
        with pytest.raises(ValueError):
            Ball(np.zeros(2), 0.0)

    def test_dimension_floor(self):
        with pytest.raises(ValueError):
            Ball(np.zeros(1), 1.0)

    def test_box_ordering(self):
        with pytest.raises(ValueError):
            Box(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    def test_ellipsoid_rejects_indefinite_shape(self):
        with pytest.raises(ValueError, match="positive definite"):
            Ellipsoid(np.zeros(2), np.diag([1.0, -1.0]))

    def test_simplex_rejects_degenerate_vertices(self):
        with pytest.raises(ValueError, match="affinely dependent"):
            Simplex(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))

    def test_every_kind_contains_its_anchor(self):
        for body in all_test_bodies():
            assert body.contains(body.interior_point())


class TestHPolytopeParsing:
    def test_parse_square(self):
        hp = parse_hpolytope_text(SQUARE_HPOLY)
        assert hp.dim == 2
        assert hp.contains([0.5, 0.5])
        assert not hp.contains([1.5, 0.5])

    def test_malformed_line_reports_number(self):
        bad = "1 0 1\n-1 zero 0\ninterior 0.5 0.5\n"
        with pytest.raises(ValueError, match="line 2"):
            parse_hpolytope_text(bad)

    def test_short_line_reports_number(self):
        bad = "1 0 1\n-1\ninterior 0.5 0.5\n"
        with pytest.raises(ValueError, match="line 2"):
            parse_hpolytope_text(bad)

    def test_missing_interior(self):
        with pytest.raises(ValueError, match="interior"):
            parse_hpolytope_text("1 0 1\n-1 0 0\n0 1 1\n0 -1 0\n")

    def test_witness_must_be_interior(self):
        bad = SQUARE_HPOLY.replace("interior 0.5 0.5", "interior 2.0 0.5")
        with pytest.raises(ValueError, match="witness"):
            parse_hpolytope_text(bad)

    def test_unbounded_polytope_rejected(self):
        with pytest.raises(ValueError, match="unbounded"):
            parse_hpolytope_text("1 0 1\n0 1 1\ninterior 0 0\n")

    def test_halfspace_after_interior_rejected(self):
        bad = "1 0 1\ninterior 0 0\n-1 0 0\n"
        with pytest.raises(ValueError, match="line 3"):
            parse_hpolytope_text(bad)


class TestHPolytopeGeometry:
    def test_support_matches_box_closed_form(self):
        hp = parse_hpolytope_text(SQUARE_HPOLY)
        box = make_unit_box(2)
        rng = np.random.default_rng(2)
        for _ in range(25):
            u = rng.standard_normal(2)
            assert hp.support(u) == pytest.approx(box.support(u), abs=1e-9)

    def test_vertices_of_square(self):
        hp = parse_hpolytope_text(SQUARE_HPOLY)
        verts = hp.vertices()
        assert verts.shape == (4, 2)
        expected = {(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)}
        got = {(round(v[0], 9), round(v[1], 9)) for v in verts}
        assert got == expected

    def test_facet_interior_rolling_radius(self):
        hp = parse_hpolytope_text(SQUARE_HPOLY)
        sp = hp.ray_boundary(np.array([0.5, 0.5]), np.array([0.0, 1.0]))
        assert sp.normal == pytest.approx([0.0, 1.0])
        assert sp.rolling_radius == pytest.approx(0.5)
