"""Constant lower bound via a polynomial Rayleigh-quotient certificate.

A single polynomial ``f`` of moderate degree is fitted to the nodal values
of the discrete minimizer and its quotient ``sup |f| / |f|_2`` is evaluated
with a sampled numerator (an underestimate of the true sup) and an exact
denominator, so the quotient is a certified lower bound of the constant
regardless of fit quality.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import InsufficientDataError, VacuousBoundError
from .geometry import Triangle, barycentric_gradients, integrate_bary_monomial
from .mesh import Mesh, corner_vertex_indices
from .morley import FMDofMap


def bernstein_exponents(degree: int) -> np.ndarray:
    """All multi-indices ``(i, j, k)`` with ``i + j + k == degree``.

    Ordered lexicographically with ``i`` descending, then ``j`` descending.
    """
    out = []
    for i in range(degree, -1, -1):
        for j in range(degree - i, -1, -1):
            out.append((i, j, degree - i - j))
    return np.array(out, dtype=int)


def _multinomials(degree: int, exps: np.ndarray) -> np.ndarray:
    fd = math.factorial(degree)
    return np.array([fd / (math.factorial(i) * math.factorial(j) * math.factorial(k))
                     for i, j, k in exps])


def bernstein_basis_values(degree: int, lam: np.ndarray) -> np.ndarray:
    """Bernstein basis values at barycentric points, shape ``(n_pts, n_coeffs)``."""
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    exps = bernstein_exponents(degree)
    mult = _multinomials(degree, exps)
    u, v, w = lam[:, 0:1], lam[:, 1:2], lam[:, 2:3]
    vals = (u ** exps[:, 0][None, :]
            * v ** exps[:, 1][None, :]
            * w ** exps[:, 2][None, :])
    return vals * mult[None, :]


@dataclass(frozen=True)
class BernsteinPoly:
    """Polynomial over a triangle in Bernstein form with control points ``coeffs``.

    The coefficient order follows :func:`bernstein_exponents`.  Evaluation
    uses de Casteljau's algorithm, which is exact (to roundoff) for the
    polynomial determined by the control net.
    """

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        n = (self.degree + 1) * (self.degree + 2) // 2
        if self.coeffs.shape != (n,):
            raise ValueError(f"degree {self.degree} needs {n} coefficients, "
                             f"got {self.coeffs.shape}")

    def _coeff_matrix(self) -> np.ndarray:
        """Square layout ``C[i, j] = d_(i, j, degree-i-j)`` (zero padded)."""
        d = self.degree
        C = np.zeros((d + 1, d + 1))
        for (i, j, _k), c in zip(bernstein_exponents(d), self.coeffs):
            C[i, j] = c
        return C

    def __call__(self, lam) -> np.ndarray:
        """Evaluate at barycentric point(s) by de Casteljau."""
        lam = np.asarray(lam, dtype=float)
        single = lam.ndim == 1
        pts = np.atleast_2d(lam)
        u, v, w = pts[:, 0], pts[:, 1], pts[:, 2]
        C = np.repeat(self._coeff_matrix()[:, :, None], pts.shape[0], axis=2)
        for level in range(self.degree - 1, -1, -1):
            top = level + 1
            C = (u[None, None, :] * C[1:top + 1, :top]
                 + v[None, None, :] * C[:top, 1:top + 1]
                 + w[None, None, :] * C[:top, :top])
        out = C[0, 0]
        return float(out[0]) if single else out

    def directional_coeff_derivative(self, which: int) -> "BernsteinPoly":
        """Derivative w.r.t. the ``which``-th barycentric variable.

        Returns the degree ``d-1`` polynomial with coefficients
        ``d * c[a + e_which]``; combine with coordinate gradients to get
        Cartesian derivatives.
        """
        d = self.degree
        exps = bernstein_exponents(d - 1)
        shift = np.zeros(3, dtype=int)
        shift[which] = 1
        index = {tuple(e): n for n, e in enumerate(bernstein_exponents(d))}
        new = np.array([d * self.coeffs[index[tuple(e + shift)]] for e in exps])
        return BernsteinPoly(d - 1, new)


def hessian_components(poly: BernsteinPoly, tri: Triangle
                       ) -> tuple[BernsteinPoly, BernsteinPoly, BernsteinPoly]:
    """Cartesian second derivatives ``(f_xx, f_xy, f_yy)`` in Bernstein form."""
    if poly.degree < 2:
        z = BernsteinPoly(0, np.zeros(1))
        return z, z, z
    g = barycentric_gradients(tri)
    first_x = None
    first_y = None
    for p in range(3):
        dp = poly.directional_coeff_derivative(p)
        cx = dp.coeffs * g[p, 0]
        cy = dp.coeffs * g[p, 1]
        first_x = cx if first_x is None else first_x + cx
        first_y = cy if first_y is None else first_y + cy
    fx = BernsteinPoly(poly.degree - 1, first_x)
    fy = BernsteinPoly(poly.degree - 1, first_y)

    def cartesian_grad(q: BernsteinPoly) -> tuple[np.ndarray, np.ndarray]:
        ax = None
        ay = None
        for p in range(3):
            dq = q.directional_coeff_derivative(p)
            ax = dq.coeffs * g[p, 0] if ax is None else ax + dq.coeffs * g[p, 0]
            ay = dq.coeffs * g[p, 1] if ay is None else ay + dq.coeffs * g[p, 1]
        return ax, ay

    fxx_c, fxy_c = cartesian_grad(fx)
    _, fyy_c = cartesian_grad(fy)
    m = poly.degree - 2
    return (BernsteinPoly(m, fxx_c), BernsteinPoly(m, fxy_c), BernsteinPoly(m, fyy_c))


def _bernstein_l2_gram(degree: int, tri: Triangle) -> np.ndarray:
    """Exact Gram matrix ``int J_a J_b dK`` of the Bernstein basis."""
    exps = bernstein_exponents(degree)
    mult = _multinomials(degree, exps)
    n = len(exps)
    G = np.empty((n, n))
    for a in range(n):
        ia, ja, ka = exps[a]
        for b in range(a, n):
            ib, jb, kb = exps[b]
            val = (mult[a] * mult[b]
                   * integrate_bary_monomial(tri, ia + ib, ja + jb, ka + kb))
            G[a, b] = G[b, a] = val
    return G


def h2_seminorm_sq(poly: BernsteinPoly, tri: Triangle) -> float:
    """Exact squared seminorm ``int f_xx^2 + 2 f_xy^2 + f_yy^2 dK``."""
    fxx, fxy, fyy = hessian_components(poly, tri)
    if poly.degree < 2:
        return 0.0
    G = _bernstein_l2_gram(poly.degree - 2, tri)
    return float(fxx.coeffs @ G @ fxx.coeffs
                 + 2.0 * (fxy.coeffs @ G @ fxy.coeffs)
                 + fyy.coeffs @ G @ fyy.coeffs)


def barycentric_lattice(density: int) -> np.ndarray:
    """All barycentric lattice points ``(a, b, c)/density``, shape ``(n, 3)``."""
    pts = []
    for a in range(density, -1, -1):
        for b in range(density - a, -1, -1):
            pts.append((a, b, density - a - b))
    return np.array(pts, dtype=float) / density


def minimizer_nodal_values(mesh: Mesh, dofs: FMDofMap, x: np.ndarray) -> np.ndarray:
    """Values of the discrete function at every mesh vertex.

    Vertex degrees of freedom are point values, so this is a gather; the
    three parent corners are exactly zero by construction.
    """
    vals = np.zeros(mesh.n_vertices)
    mask = dofs.vertex_dof >= 0
    vals[mask] = x[dofs.vertex_dof[mask]]
    return vals


def fit_polynomial(nodal_values: np.ndarray, mesh: Mesh, degree: int) -> BernsteinPoly:
    """Least-squares polynomial fit to the nodal values over the parent triangle.

    The three corner control points are pinned to zero (hard constraint):
    the certificate requires a trial function vanishing at the corners, so
    validity cannot depend on the fit being good.
    """
    n_nodes = mesh.n_vertices
    n_coeffs = (degree + 1) * (degree + 2) // 2
    if n_nodes < n_coeffs:
        raise InsufficientDataError(
            f"{n_nodes} nodes cannot determine {n_coeffs} coefficients; "
            f"need mesh subdivisions >= degree ({degree})")
    # Exact barycentric coordinates of vertex (i, j) w.r.t. the parent.
    N = mesh.n_subdiv
    lam = np.empty((n_nodes, 3))
    r = 0
    for j in range(N + 1):
        for i in range(N + 1 - j):
            lam[r] = ((N - i - j) / N, i / N, j / N)
            r += 1
    V = bernstein_basis_values(degree, lam)

    exps = bernstein_exponents(degree)
    corner_cols = [int(np.flatnonzero((exps == e).all(axis=1))[0])
                   for e in ((degree, 0, 0), (0, degree, 0), (0, 0, degree))]
    free = np.setdiff1d(np.arange(n_coeffs), corner_cols)
    sol, _res, rank, _sv = np.linalg.lstsq(V[:, free], np.asarray(nodal_values, float),
                                           rcond=None)
    if rank < free.size:
        _warnings.warn(f"rank-deficient certificate fit (rank {rank} < {free.size})",
                       RuntimeWarning, stacklevel=2)
    coeffs = np.zeros(n_coeffs)
    coeffs[free] = sol
    return BernsteinPoly(degree, coeffs)


def rayleigh_lower_bound(poly: BernsteinPoly, tri: Triangle, grid: int = 200) -> float:
    """Certified constant lower bound ``max_sampled |f| / |f|_2``.

    The numerator samples a barycentric lattice of the given density plus
    the control-net lattice, which can only underestimate the true sup;
    the denominator is exact, so the quotient never overstates the bound.
    """
    sem2 = h2_seminorm_sq(poly, tri)
    if sem2 <= 0.0 or not np.isfinite(sem2):
        raise VacuousBoundError("fitted polynomial has zero second-derivative "
                                "seminorm; quotient undefined")
    samples = barycentric_lattice(grid)
    sup = float(np.abs(poly(samples)).max())
    if poly.degree >= 1:
        net = barycentric_lattice(poly.degree)
        sup = max(sup, float(np.abs(poly(net)).max()))
    return sup / math.sqrt(sem2)


def _h2_gram(degree: int, tri: Triangle) -> np.ndarray:
    """Exact Gram matrix of the full second-derivative form on the basis."""
    n = (degree + 1) * (degree + 2) // 2
    m = (degree - 1) * degree // 2
    Hxx = np.empty((n, m))
    Hxy = np.empty((n, m))
    Hyy = np.empty((n, m))
    for a in range(n):
        c = np.zeros(n)
        c[a] = 1.0
        fxx, fxy, fyy = hessian_components(BernsteinPoly(degree, c), tri)
        Hxx[a], Hxy[a], Hyy[a] = fxx.coeffs, fxy.coeffs, fyy.coeffs
    Gsub = _bernstein_l2_gram(degree - 2, tri)
    return Hxx @ Gsub @ Hxx.T + 2.0 * (Hxy @ Gsub @ Hxy.T) + Hyy @ Gsub @ Hyy.T


def optimal_certificate(tri: Triangle, degree: int, grid: int = 200) -> BernsteinPoly:
    """Best degree-``degree`` certificate polynomial over a sampled lattice.

    Maximizes the quotient ``|f(p)| / |f|_2`` over corner-vanishing
    polynomials and sampled points ``p``: for each ``p`` the optimum is the
    inverse-Gram image of the evaluation functional, so one factorization
    serves every sample.  The returned polynomial's certified quotient (via
    :func:`rayleigh_lower_bound`) can only improve on a data fit of the
    same degree.
    """
    if degree < 2:
        raise InsufficientDataError("certificate degree must be at least 2")
    exps = bernstein_exponents(degree)
    n = len(exps)
    corner = [int(np.flatnonzero((exps == e).all(axis=1))[0])
              for e in ((degree, 0, 0), (0, degree, 0), (0, 0, degree))]
    free = np.setdiff1d(np.arange(n), corner)
    G = _h2_gram(degree, tri)[np.ix_(free, free)]
    cho = sla.cho_factor(G)
    samples = barycentric_lattice(grid)
    V = bernstein_basis_values(degree, samples)[:, free]
    Z = sla.cho_solve(cho, V.T)
    form = np.einsum("pn,np->p", V, Z)
    coeffs = np.zeros(n)
    coeffs[free] = Z[:, int(np.argmax(form))]
    return BernsteinPoly(degree, coeffs)
