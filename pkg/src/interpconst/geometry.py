"""Triangle geometry: shape parametrization, barycentric coordinates, exact integrals.

A triangle is described either by three explicit vertices or by the shape
parameters ``(alpha, theta, h)``: vertices ``(0,0)``, ``(h,0)`` and
``(alpha*h*cos(theta), alpha*h*sin(theta))``.  All bound computations in this
package run on the unit-scale triangle (``h = 1``) and rescale afterwards,
since the target constant scales linearly with ``h``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateShapeError, InvalidParameterError

# Triangles flatter than this (area over squared diameter) are rejected.
_DEGENERACY_TOL = 1e-14


class Triangle:
    """Immutable 2D triangle with derived metrics.

    Attributes
    ----------
    vertices : ndarray, shape (3, 2)
        Vertex coordinates ``p1, p2, p3``, counterclockwise.
    area : float
        Triangle area (positive).
    edge_lengths : ndarray, shape (3,)
        Lengths ``[|p2 p3|, |p1 p3|, |p1 p2|]``; entry ``k`` is the edge
        opposite vertex ``k``.
    h_max : float
        Longest edge length.
    h_medium : float
        Medium edge length.
    heights : ndarray, shape (3,)
        Height of the triangle over each edge, ``heights[k] * edge_lengths[k]
        == 2 * area``.
    warnings : tuple of str
        Non-fatal shape warnings attached at construction.
    """

    __slots__ = ("vertices", "area", "edge_lengths", "h_max", "h_medium",
                 "heights", "warnings")

    def __init__(self, p1, p2, p3, warnings=()):
        verts = np.array([p1, p2, p3], dtype=float)
        if verts.shape != (3, 2):
            raise InvalidParameterError("triangle vertices must be three 2D points")
        signed = _signed_area(verts)
        diam2 = max(float(np.sum((verts[i] - verts[j]) ** 2))
                    for i, j in ((0, 1), (0, 2), (1, 2)))
        if diam2 <= 0.0 or abs(signed) <= _DEGENERACY_TOL * diam2:
            raise DegenerateShapeError("triangle vertices are (nearly) collinear")
        if signed < 0.0:
            verts = verts[[0, 2, 1]]
            signed = -signed
        verts.setflags(write=False)
        self.vertices = verts
        self.area = signed
        edges = np.array([
            np.linalg.norm(verts[2] - verts[1]),
            np.linalg.norm(verts[2] - verts[0]),
            np.linalg.norm(verts[1] - verts[0]),
        ])
        edges.setflags(write=False)
        self.edge_lengths = edges
        self.h_max = float(edges.max())
        self.h_medium = float(np.sort(edges)[1])
        heights = 2.0 * self.area / edges
        heights.setflags(write=False)
        self.heights = heights
        self.warnings = tuple(warnings)

    @property
    def p1(self):
        return self.vertices[0]

    @property
    def p2(self):
        return self.vertices[1]

    @property
    def p3(self):
        return self.vertices[2]

    def scaled(self, factor: float) -> "Triangle":
        """Triangle with all vertex coordinates multiplied by ``factor``."""
        if factor <= 0.0:
            raise InvalidParameterError("scale factor must be positive")
        v = self.vertices * factor
        return Triangle(v[0], v[1], v[2], warnings=self.warnings)

    def __repr__(self):
        v = self.vertices
        return (f"Triangle(({v[0, 0]:g}, {v[0, 1]:g}), ({v[1, 0]:g}, {v[1, 1]:g}), "
                f"({v[2, 0]:g}, {v[2, 1]:g}))")


def _signed_area(verts: np.ndarray) -> float:
    a = verts[1] - verts[0]
    b = verts[2] - verts[0]
    return 0.5 * float(a[0] * b[1] - a[1] * b[0])


def make_triangle(alpha: float, theta: float, h: float = 1.0) -> Triangle:
    """Build the parametrized triangle with vertices ``(0,0)``, ``(h,0)``,
    ``(alpha*h*cos(theta), alpha*h*sin(theta))``.

    Parameters
    ----------
    alpha : float
        Shortest-to-medium edge ratio, in ``(0, 1]``.  Values above 1 are
        accepted with a warning (the parametrization stays valid).
    theta : float
        Angle at the origin vertex, in ``(0, pi)``.
    h : float
        Medium edge length (scale), positive.

    The canonical parameter range additionally asks ``acos(alpha/2) <=
    theta``; violating it is allowed and only recorded in
    ``Triangle.warnings`` (the constant computations remain meaningful for
    any valid triangle).
    """
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    if not (0.0 < theta < math.pi):
        raise InvalidParameterError(f"theta must lie in (0, pi), got {theta}")
    if not (h > 0.0) or not math.isfinite(h):
        raise InvalidParameterError(f"h must be positive, got {h}")
    warnings = []
    if alpha > 1.0:
        warnings.append(f"alpha = {alpha:g} exceeds 1; edge roles are swapped")
    if theta < math.acos(min(alpha, 2.0) / 2.0):
        warnings.append(
            f"theta = {theta:g} below the canonical range acos(alpha/2) <= theta")
    p3 = (alpha * h * math.cos(theta), alpha * h * math.sin(theta))
    return Triangle((0.0, 0.0), (h, 0.0), p3, warnings=warnings)


def barycentric(tri: Triangle, x) -> np.ndarray:
    """Barycentric coordinates of point(s) ``x`` with respect to ``tri``.

    Accepts a single point of shape ``(2,)`` or a stack of shape ``(n, 2)``;
    returns shape ``(3,)`` or ``(n, 3)`` accordingly.  Points outside the
    triangle simply get one or more negative components.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    v = tri.vertices
    T = np.array([v[1] - v[0], v[2] - v[0]]).T  # 2x2
    sol = np.linalg.solve(T, (pts - v[0]).T)  # (2, n)
    lam = np.empty((pts.shape[0], 3))
    lam[:, 1] = sol[0]
    lam[:, 2] = sol[1]
    lam[:, 0] = 1.0 - sol[0] - sol[1]
    return lam[0] if single else lam


def from_barycentric(tri: Triangle, lam) -> np.ndarray:
    """Cartesian point(s) for barycentric coordinates ``lam``."""
    lam = np.asarray(lam, dtype=float)
    return lam @ tri.vertices


def barycentric_gradients(tri: Triangle) -> np.ndarray:
    """Gradients of the three barycentric coordinate functions.

    Returns
    -------
    ndarray, shape (3, 2)
        Row ``i`` is the constant gradient of the ``i``-th barycentric
        coordinate over the triangle.
    """
    v = tri.vertices
    g = np.empty((3, 2))
    twoS = 2.0 * tri.area
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        g[i, 0] = (v[j, 1] - v[k, 1]) / twoS
        g[i, 1] = (v[k, 0] - v[j, 0]) / twoS
    return g


def integrate_bary_monomial(tri: Triangle, a: int, b: int, c: int) -> float:
    """Exact integral of ``u^a v^b w^c`` over ``tri`` in barycentric coordinates.

    The closed form is ``2*S * a! b! c! / (a+b+c+2)!``.
    """
    if a < 0 or b < 0 or c < 0:
        raise InvalidParameterError("monomial exponents must be nonnegative")
    num = math.factorial(a) * math.factorial(b) * math.factorial(c)
    den = math.factorial(a + b + c + 2)
    return 2.0 * tri.area * num / den


def subtriangle_height(tri: Triangle, x0) -> float:
    """Distance from ``p3`` to the line through ``p1`` and ``x0``.

    This is the height of the sub-triangle ``p1 x0 p3`` over the base
    ``p1 x0``.  ``x0`` on the segment ``p1 p3`` gives 0; ``x0`` coinciding
    with ``p1`` has no defined base direction and raises.
    """
    x0 = np.asarray(x0, dtype=float)
    p1, p3 = tri.vertices[0], tri.vertices[2]
    d = x0 - p1
    base = float(np.linalg.norm(d))
    if base <= 1e-14 * tri.h_max:
        raise DegenerateShapeError("x0 coincides with p1; sub-triangle base is degenerate")
    r = p3 - p1
    return abs(d[0] * r[1] - d[1] * r[0]) / base
