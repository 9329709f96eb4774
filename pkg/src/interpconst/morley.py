"""Fujino-Morley quadratic nonconforming element on the uniform mesh.

Local degrees of freedom per cell: the three vertex values plus the mean
normal derivative over each edge (taken with the mesh's fixed global edge
normal, so shared edges agree between neighbours without sign bookkeeping).
Local polynomials are stored in the quadratic Bernstein basis with the fixed
coefficient order ``(200, 020, 002, 110, 101, 011)``.

The three corner vertices of the parent triangle carry no degree of freedom:
the discrete space pins their values to zero, which keeps the assembled
energy matrix positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateShapeError
from .geometry import Triangle
from .mesh import Mesh, corner_vertex_indices

#: Bernstein exponent order used everywhere for quadratic coefficients.
BERN2_EXPONENTS = ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1))

# Local edge k joins local vertices (k+1)%3 and (k+2)%3 (opposite vertex k).
_EDGE_ENDS = ((1, 2), (2, 0), (0, 1))

# Gauss points/weights on [0, 1].
_GAUSS2_T = (0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0))
_G5_X, _G5_W = np.polynomial.legendre.leggauss(5)
_GAUSS5_T = 0.5 * (_G5_X + 1.0)
_GAUSS5_W = 0.5 * _G5_W


def bern2_values(lam) -> np.ndarray:
    """Quadratic Bernstein basis values at barycentric point(s) ``lam``.

    ``lam`` of shape ``(3,)`` or ``(n, 3)`` gives shape ``(6,)`` or ``(n, 6)``.
    """
    lam = np.asarray(lam, dtype=float)
    u, v, w = lam[..., 0], lam[..., 1], lam[..., 2]
    return np.stack([u * u, v * v, w * w, 2 * u * v, 2 * u * w, 2 * v * w], axis=-1)


def _bern2_grad_weights(lam) -> np.ndarray:
    """Matrix ``P`` with ``grad J_m = 2 * sum_p P[m, p] * grad lambda_p``."""
    u, v, w = lam
    return np.array([
        [u, 0.0, 0.0],
        [0.0, v, 0.0],
        [0.0, 0.0, w],
        [v, u, 0.0],
        [w, 0.0, u],
        [0.0, w, v],
    ])


def _element_bary_gradients(verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric-coordinate gradients and areas for stacked elements.

    Parameters
    ----------
    verts : ndarray, shape (n, 3, 2)

    Returns
    -------
    grads : ndarray, shape (n, 3, 2)
    areas : ndarray, shape (n,)
    """
    e1 = verts[:, 1] - verts[:, 0]
    e2 = verts[:, 2] - verts[:, 0]
    twoS = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(twoS <= 0.0):
        raise DegenerateShapeError("element with non-positive orientation/area")
    grads = np.empty(verts.shape)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = verts[:, j, 1] - verts[:, k, 1]
        grads[:, i, 1] = verts[:, k, 0] - verts[:, j, 0]
    grads /= twoS[:, None, None]
    return grads, 0.5 * twoS


def local_basis(verts, edge_normals) -> np.ndarray:
    """Bernstein coefficients of the six local basis functions of one cell.

    Parameters
    ----------
    verts : array-like, shape (3, 2)
        Cell vertices, counterclockwise.
    edge_normals : array-like, shape (3, 2)
        Unit normal for each local edge (edge ``k`` opposite vertex ``k``).

    Returns
    -------
    ndarray, shape (6, 6)
        Column ``k`` holds the Bernstein coefficients of the basis function
        dual to local functional ``k`` (functionals 0-2: vertex values,
        3-5: mean normal derivative over the edges).
    """
    C = _local_bases_stacked(np.asarray(verts, float)[None],
                             np.asarray(edge_normals, float)[None])
    return C[0]


def _local_bases_stacked(verts: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Vectorized ``local_basis`` for stacked cells: shapes (n,3,2) -> (n,6,6)."""
    n = verts.shape[0]
    grads, _ = _element_bary_gradients(verts)
    F = np.zeros((n, 6, 6))
    F[:, 0, 0] = F[:, 1, 1] = F[:, 2, 2] = 1.0
    for k, (ea, eb) in enumerate(_EDGE_ENDS):
        row = np.zeros((n, 6))
        for t in _GAUSS2_T:
            lam = np.zeros(3)
            lam[ea], lam[eb] = 1.0 - t, t
            P = _bern2_grad_weights(lam)
            gradJ = 2.0 * np.einsum("mp,npd->nmd", P, grads)
            row += 0.5 * np.einsum("nmd,nd->nm", gradJ, normals[:, k])
        F[:, 3 + k] = row
    try:
        C = np.linalg.inv(F)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - degenerate cell
        raise DegenerateShapeError(f"singular local functional matrix: {exc}") from exc
    return C


def bernstein_h2_form(verts) -> np.ndarray:
    """Energy matrix of the quadratic Bernstein basis on one cell.

    Entry ``(m, n)`` is the integral over the cell of the full
    second-derivative dot product of basis functions ``J_m`` and ``J_n``
    (mixed derivative counted twice).
    """
    return _bernstein_h2_forms_stacked(np.asarray(verts, float)[None])[0]


def _bernstein_h2_forms_stacked(verts: np.ndarray) -> np.ndarray:
    grads, areas = _element_bary_gradients(verts)
    n = verts.shape[0]
    # Rows: (xx, xy, yy) of each basis function's constant Hessian.
    H = np.empty((n, 6, 3))
    pairs = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
    for m, (p, q) in enumerate(pairs):
        gp, gq = grads[:, p], grads[:, q]
        if p == q:
            H[:, m, 0] = 2.0 * gp[:, 0] * gq[:, 0]
            H[:, m, 1] = 2.0 * gp[:, 0] * gq[:, 1]
            H[:, m, 2] = 2.0 * gp[:, 1] * gq[:, 1]
        else:
            H[:, m, 0] = 4.0 * gp[:, 0] * gq[:, 0]
            H[:, m, 1] = 2.0 * (gp[:, 0] * gq[:, 1] + gp[:, 1] * gq[:, 0])
            H[:, m, 2] = 4.0 * gp[:, 1] * gq[:, 1]
    w = np.array([1.0, 2.0, 1.0])
    K = np.einsum("nma,a,nla->nml", H, w, H)
    return K * areas[:, None, None]


def local_h2_stiffness(verts, edge_normals) -> np.ndarray:
    """Local energy matrix of the six Fujino-Morley basis functions."""
    v = np.asarray(verts, float)[None]
    nrm = np.asarray(edge_normals, float)[None]
    C = _local_bases_stacked(v, nrm)
    K = _bernstein_h2_forms_stacked(v)
    return np.einsum("nkm,nkl,nlj->nmj", C, K, C)[0]


@dataclass(frozen=True)
class FMDofMap:
    """Global numbering: non-corner vertex values first, then all edges.

    ``vertex_dof[v]`` is -1 for the three parent corners.  Edge ``e`` has
    global index ``n_vertex_dofs + e``.
    """

    vertex_dof: np.ndarray
    n_vertex_dofs: int
    n_edge_dofs: int

    @property
    def size(self) -> int:
        return self.n_vertex_dofs + self.n_edge_dofs

    def edge_dof(self, edge_index):
        return self.n_vertex_dofs + edge_index

    def element_dofs(self, mesh: Mesh) -> np.ndarray:
        """Global DOF per local functional, shape (n_elements, 6); -1 at corners."""
        vd = self.vertex_dof[mesh.elements]
        ed = self.n_vertex_dofs + mesh.element_edges
        return np.concatenate([vd, ed], axis=1)


def fm_dof_map(mesh: Mesh) -> FMDofMap:
    """Number the Fujino-Morley degrees of freedom of ``mesh``."""
    corners = corner_vertex_indices(mesh)
    vertex_dof = np.full(mesh.n_vertices, -1, dtype=int)
    keep = np.ones(mesh.n_vertices, dtype=bool)
    keep[corners] = False
    vertex_dof[keep] = np.arange(int(keep.sum()))
    vertex_dof.setflags(write=False)
    return FMDofMap(vertex_dof=vertex_dof,
                    n_vertex_dofs=int(keep.sum()),
                    n_edge_dofs=mesh.n_edges)


def all_local_bases(mesh: Mesh) -> np.ndarray:
    """``local_basis`` for every cell, shape (n_elements, 6, 6)."""
    verts = mesh.vertices[mesh.elements]
    normals = mesh.edge_normals[mesh.element_edges]
    return _local_bases_stacked(verts, normals)


def assemble_A(mesh: Mesh, dofs: FMDofMap, local_bases: np.ndarray | None = None) -> sp.csr_matrix:
    """Assemble the broken-H2 energy matrix over the mesh.

    Contributions that hit a corner vertex (no DOF) are dropped.  Duplicate
    entries are summed in a canonical order so the result is independent of
    the cell ordering, bit for bit.
    """
    if local_bases is None:
        local_bases = all_local_bases(mesh)
    verts = mesh.vertices[mesh.elements]
    K = _bernstein_h2_forms_stacked(verts)
    A_loc = np.einsum("nkm,nkl,nlj->nmj", local_bases, K, local_bases)

    gdofs = dofs.element_dofs(mesh)
    rows = np.repeat(gdofs, 6, axis=1).ravel()
    cols = np.tile(gdofs, (1, 6)).ravel()
    vals = A_loc.ravel()
    mask = (rows >= 0) & (cols >= 0)
    rows, cols, vals = rows[mask], cols[mask], vals[mask]

    order = np.lexsort((vals, cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    M = dofs.size
    A = sp.coo_matrix((vals, (rows, cols)), shape=(M, M)).tocsr()
    A.sum_duplicates()
    return A


def edge_mean_normal_derivative(mesh: Mesh, grad, n_gauss: int = 5) -> np.ndarray:
    """Mean of ``grad(f) . n`` over every mesh edge (global normals).

    ``grad`` maps an ``(n, 2)`` array of points to an ``(n, 2)`` array of
    gradients.  Five-point Gauss quadrature is exact for the polynomial
    test suite.
    """
    if n_gauss == 5:
        ts, ws = _GAUSS5_T, _GAUSS5_W
    else:
        x, w = np.polynomial.legendre.leggauss(n_gauss)
        ts, ws = 0.5 * (x + 1.0), 0.5 * w
    lo = mesh.vertices[mesh.edges[:, 0]]
    hi = mesh.vertices[mesh.edges[:, 1]]
    vals = np.zeros(mesh.n_edges)
    for t, w in zip(ts, ws):
        pts = lo + t * (hi - lo)
        g = np.asarray(grad(pts), dtype=float)
        vals += w * np.einsum("ed,ed->e", g, mesh.edge_normals)
    return vals


def fm_interpolate(mesh: Mesh, dofs: FMDofMap, f, grad) -> np.ndarray:
    """Coefficient vector of the Fujino-Morley interpolation in the pinned space.

    Vertex DOFs take the function values, edge DOFs the mean normal
    derivatives.  The three parent corners have no DOF, so the result
    represents the interpolant only for functions vanishing there; see
    :func:`fm_interpolate_elementwise` for the corner-preserving variant.
    """
    x = np.zeros(dofs.size)
    vmask = dofs.vertex_dof >= 0
    vals = np.asarray(f(mesh.vertices[vmask]), dtype=float)
    x[dofs.vertex_dof[vmask]] = vals
    x[dofs.n_vertex_dofs:] = edge_mean_normal_derivative(mesh, grad)
    return x


def fm_interpolate_elementwise(mesh: Mesh, f, grad,
                               local_bases: np.ndarray | None = None) -> np.ndarray:
    """Bernstein coefficients of the cell-by-cell Fujino-Morley interpolant.

    Unlike :func:`fm_interpolate`, the true corner values are kept, so the
    result is the exact projection onto broken quadratics for any smooth
    input: it reproduces quadratics and is energy-orthogonal to the
    interpolation error on every cell.

    Returns
    -------
    ndarray, shape (n_elements, 6)
    """
    if local_bases is None:
        local_bases = all_local_bases(mesh)
    vertex_vals = np.asarray(f(mesh.vertices), dtype=float)
    edge_vals = edge_mean_normal_derivative(mesh, grad)
    loc = np.concatenate([vertex_vals[mesh.elements],
                          edge_vals[mesh.element_edges]], axis=1)
    return np.einsum("nmk,nk->nm", local_bases, loc)


@dataclass(frozen=True)
class LinearFunction:
    """Affine function ``c0 + cx*x + cy*y``."""

    c0: float
    cx: float
    cy: float

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.c0 + self.cx * pts[..., 0] + self.cy * pts[..., 1]


def lagrange_interpolate(tri: Triangle, f) -> LinearFunction:
    """The unique affine function matching ``f`` at the triangle's vertices."""
    V = np.column_stack([np.ones(3), tri.vertices])
    vals = np.asarray(f(tri.vertices), dtype=float)
    c = np.linalg.solve(V, vals)
    return LinearFunction(float(c[0]), float(c[1]), float(c[2]))
