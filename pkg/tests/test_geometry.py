import math

import numpy as np
import pytest

from interpconst.errors import DegenerateShapeError, InvalidParameterError
from interpconst.geometry import (Triangle, barycentric, barycentric_gradients,
                                  from_barycentric, integrate_bary_monomial,
                                  make_triangle, subtriangle_height)

from oracles import duffy_quadrature, random_triangle


class TestMakeTriangle:
    def test_right_isosceles(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        assert np.allclose(tri.vertices[2], [0.0, 1.0], atol=1e-12)
        assert tri.area == pytest.approx(0.5, abs=1e-15)
        assert tri.h_max == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert tri.h_medium == pytest.approx(1.0, rel=1e-15)

    def test_scaling_matches_coordinatewise(self):
        for h in (0.5, 2.0, 3.7):
            t1 = make_triangle(0.8, 2.0, 1.0)
            th = make_triangle(0.8, 2.0, h)
            assert np.allclose(t1.vertices * h, th.vertices, rtol=1e-14)

    def test_obtuse_area(self):
        tri = make_triangle(0.5, 2 * math.pi / 3, 1.0)
        assert tri.area == pytest.approx(0.5 * math.sin(2 * math.pi / 3) / 2, rel=1e-14)

    @pytest.mark.parametrize("alpha,theta,h", [
        (0.0, 1.0, 1.0), (-1.0, 1.0, 1.0),
        (1.0, 0.0, 1.0), (1.0, math.pi, 1.0), (1.0, -0.5, 1.0),
        (1.0, 1.0, 0.0), (1.0, 1.0, -2.0),
    ])
    def test_invalid_parameters(self, alpha, theta, h):
        with pytest.raises(InvalidParameterError):
            make_triangle(alpha, theta, h)

    def test_canonical_range_warning_not_error(self):
        # theta = pi/6 with alpha = 1 sits outside acos(alpha/2) <= theta
        tri = make_triangle(1.0, math.pi / 6, 1.0)
        assert any("canonical" in w for w in tri.warnings)
        assert make_triangle(1.0, math.pi / 2, 1.0).warnings == ()

    def test_orientation_normalized(self):
        tri = Triangle((0, 0), (0, 1), (1, 0))  # clockwise input
        assert tri.area > 0
        a = tri.vertices[1] - tri.vertices[0]
        b = tri.vertices[2] - tri.vertices[0]
        assert a[0] * b[1] - a[1] * b[0] > 0

    def test_heights_identity(self):
        tri = make_triangle(0.7, 1.2, 1.0)
        assert np.allclose(tri.heights * tri.edge_lengths, 2 * tri.area, rtol=1e-14)
        assert tri.h_max == tri.edge_lengths.max()

    def test_collinear_rejected(self):
        with pytest.raises(DegenerateShapeError):
            Triangle((0, 0), (1, 1), (2, 2))


class TestBarycentric:
    def test_vertices_and_special_points(self):
        tri = make_triangle(0.9, 1.9, 1.0)
        v = tri.vertices
        assert np.allclose(barycentric(tri, v[1]), [0, 1, 0], atol=1e-14)
        centroid = v.mean(axis=0)
        assert np.allclose(barycentric(tri, centroid), [1 / 3] * 3, atol=1e-14)
        mid12 = 0.5 * (v[0] + v[1])
        assert np.allclose(barycentric(tri, mid12), [0.5, 0.5, 0], atol=1e-14)

    def test_roundtrip(self, rng):
        for _ in range(20):
            tri = random_triangle(rng)
            pts = rng.uniform(-1, 1, size=(15, 2))
            lam = barycentric(tri, pts)
            assert np.allclose(lam.sum(axis=1), 1.0, atol=1e-12)
            back = from_barycentric(tri, lam)
            assert np.allclose(back, pts, atol=1e-12)

    def test_outside_point_goes_negative(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        lam = barycentric(tri, np.array([5.0, 5.0]))
        assert lam.min() < 0

    def test_gradients_match_finite_differences(self, rng):
        tri = random_triangle(rng)
        g = barycentric_gradients(tri)
        p = tri.vertices.mean(axis=0)
        eps = 1e-6
        for d, e in enumerate(np.eye(2)):
            fd = (barycentric(tri, p + eps * e) - barycentric(tri, p - eps * e)) / (2 * eps)
            assert np.allclose(fd, g[:, d], atol=1e-7)


class TestIntegrateBaryMonomial:
    def test_unit_right_isosceles_values(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        assert integrate_bary_monomial(tri, 0, 0, 0) == pytest.approx(0.5, rel=1e-15)
        assert integrate_bary_monomial(tri, 1, 0, 0) == pytest.approx(1 / 6, rel=1e-15)

    def test_degree_two_any_triangle(self, rng):
        tri = random_triangle(rng)
        assert integrate_bary_monomial(tri, 1, 1, 0) == pytest.approx(
            tri.area / 12, rel=1e-14)

    def test_against_quadrature(self, rng):
        for _ in range(20):
            tri = random_triangle(rng)
            a, b, c = [int(v) for v in rng.integers(0, 4, size=3)]
            while a + b + c > 10:
                a, b, c = [int(v) for v in rng.integers(0, 4, size=3)]

            def f(pts):
                lam = barycentric(tri, pts)
                return lam[:, 0] ** a * lam[:, 1] ** b * lam[:, 2] ** c

            exact = integrate_bary_monomial(tri, a, b, c)
            quad = duffy_quadrature(f, tri.vertices, n=12)
            assert quad == pytest.approx(exact, rel=1e-12)

    def test_negative_exponent_rejected(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        with pytest.raises(InvalidParameterError):
            integrate_bary_monomial(tri, -1, 0, 0)


class TestSubtriangleHeight:
    def test_axis_aligned(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        assert subtriangle_height(tri, tri.vertices[1]) == pytest.approx(1.0, rel=1e-14)

    def test_diagonal_direction(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        assert subtriangle_height(tri, np.array([0.5, 0.5])) == pytest.approx(
            1 / math.sqrt(2), rel=1e-14)

    def test_collinear_gives_zero(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        on_p1p3 = 0.4 * tri.vertices[2]
        assert subtriangle_height(tri, on_p1p3) == pytest.approx(0.0, abs=1e-14)

    def test_x0_at_p1_rejected(self):
        tri = make_triangle(1.0, math.pi / 2, 1.0)
        with pytest.raises(DegenerateShapeError):
            subtriangle_height(tri, tri.vertices[0])
