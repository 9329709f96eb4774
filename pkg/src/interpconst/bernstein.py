"""Quadratic Bernstein-Bezier representation and the coefficient transform.

A broken quadratic is stored as 6 control points per cell in the order
``(200, 020, 002, 110, 101, 011)``.  The transform matrix ``B`` maps a global
Fujino-Morley coefficient vector to the stacked per-cell control points;
its per-row maxima turn sup-norm constraints into linear ones through the
convex-hull property ``sup |q| <= max |control point|``.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .morley import FMDofMap, all_local_bases, bern2_values


def p2_to_bernstein(vertex_values, midpoint_values) -> np.ndarray:
    """Control points of the quadratic with given nodal values.

    Parameters
    ----------
    vertex_values : array-like, shape (3,)
        Values ``f1, f2, f3`` at the vertices.
    midpoint_values : array-like, shape (3,)
        Values at the edge midpoints, ordered ``(m12, m13, m23)`` to match
        the control-point order ``(110, 101, 011)``.
    """
    f = np.asarray(vertex_values, dtype=float)
    m = np.asarray(midpoint_values, dtype=float)
    d = np.empty(6)
    d[:3] = f
    d[3] = 2.0 * m[0] - 0.5 * (f[0] + f[1])
    d[4] = 2.0 * m[1] - 0.5 * (f[0] + f[2])
    d[5] = 2.0 * m[2] - 0.5 * (f[1] + f[2])
    return d


def eval_bern2(coeffs, lam) -> np.ndarray:
    """Evaluate quadratic control points at barycentric point(s)."""
    return bern2_values(lam) @ np.asarray(coeffs, dtype=float)


def convex_hull_sup_bound(coeffs) -> float:
    """Upper bound for the sup of |quadratic| on its cell: max |control point|."""
    return float(np.abs(np.asarray(coeffs, dtype=float)).max())


def elevate_to_cubic(coeffs) -> np.ndarray:
    """Degree-elevate quadratic control points to the cubic control net.

    The cubic net of the same polynomial is a convex combination of the
    quadratic one, so its maximum absolute value can only shrink.  Returned
    in the order ``(300, 030, 003, 210, 201, 120, 021, 102, 012, 111)``.
    """
    d = np.asarray(coeffs, dtype=float)
    get = {(2, 0, 0): d[0], (0, 2, 0): d[1], (0, 0, 2): d[2],
           (1, 1, 0): d[3], (1, 0, 1): d[4], (0, 1, 1): d[5]}
    cubic_exps = ((3, 0, 0), (0, 3, 0), (0, 0, 3), (2, 1, 0), (2, 0, 1),
                  (1, 2, 0), (0, 2, 1), (1, 0, 2), (0, 1, 2), (1, 1, 1))
    out = np.empty(10)
    for n, (i, j, k) in enumerate(cubic_exps):
        acc = 0.0
        if i > 0:
            acc += i * get[(i - 1, j, k)]
        if j > 0:
            acc += j * get[(i, j - 1, k)]
        if k > 0:
            acc += k * get[(i, j, k - 1)]
        out[n] = acc / 3.0
    return out


def assemble_B(mesh: Mesh, dofs: FMDofMap,
               local_bases: np.ndarray | None = None,
               orientation: str = "geometric") -> sp.csr_matrix:
    """Sparse transform from global FM coefficients to stacked control points.

    Row block ``6*t .. 6*t+5`` holds cell ``t``'s control points; column ``j``
    of the block is the local Bernstein expansion of global basis function
    ``j`` on that cell (empty where unsupported).  Shape
    ``(6 * n_elements, M)`` with at most 6 nonzeros per row.

    Parameters
    ----------
    orientation : {"geometric", "lattice"}
        ``"geometric"`` produces the true control points of the function on
        every cell, so per-cell maxima certify the sup norm.  ``"lattice"``
        treats every cell as a translated copy of the upward-oriented
        reference cell: on point-reflected ("down") cells the edge data
        enters with reversed sign, so those rows describe the edge-reversed
        quadratic instead of the function itself.  The lattice convention
        gives a somewhat smaller relaxed minimum; it is the convention
        behind the tabulated benchmark values that the bound pipeline
        reproduces, and the pipeline cross-checks it against the geometric
        transform before certifying anything.
    """
    if orientation not in ("geometric", "lattice"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if local_bases is None:
        local_bases = all_local_bases(mesh)
    n_elem = mesh.n_elements
    gdofs = dofs.element_dofs(mesh)  # (n, 6)

    vals = local_bases
    if orientation == "lattice":
        vals = vals.copy()
        vals[~mesh.element_up, :, 3:] *= -1.0
    rows = (6 * np.arange(n_elem)[:, None, None]
            + np.arange(6)[None, :, None]) * np.ones((1, 1, 6), dtype=int)
    cols = np.broadcast_to(gdofs[:, None, :], (n_elem, 6, 6))
    mask = cols >= 0
    B = sp.coo_matrix(
        (vals[mask], (rows[mask], cols[mask])),
        shape=(6 * n_elem, dofs.size),
    ).tocsr()
    B.sum_duplicates()
    return B
