"""Uniform self-similar triangulation of a triangle.

The parent triangle is cut into ``N**2`` congruence classes: "up" cells are
copies of the parent scaled by ``1/N``, "down" cells are their point
reflections.  Vertices, edges and cells all carry a fixed deterministic
numbering so downstream matrix assembly is reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .geometry import Triangle


@dataclass(frozen=True)
class Mesh:
    """Uniform triangulation of ``parent`` with ``N`` subdivisions per side.

    Attributes
    ----------
    parent : Triangle
    n_subdiv : int
        Subdivision count ``N``.
    vertices : ndarray, shape (n_vertices, 2)
        Vertex ``(i, j)`` (``i + j <= N``) sits at ``p1 + (i/N)(p2-p1) +
        (j/N)(p3-p1)`` and has index ``offset(j) + i`` (``j`` outer).
    edges : ndarray, shape (n_edges, 2), int
        Vertex index pairs, low index first.
    edge_normals : ndarray, shape (n_edges, 2)
        Fixed global unit normal per edge: direction low-to-high vertex,
        rotated by -90 degrees.
    elements : ndarray, shape (n_elements, 3), int
        Vertex indices per cell, counterclockwise.
    element_edges : ndarray, shape (n_elements, 3), int
        Edge indices per cell; local edge ``k`` is opposite local vertex ``k``.
    element_up : ndarray, shape (n_elements,), bool
        True for "up" cells (translates of the parent scaled by ``1/N``),
        False for the point-reflected "down" cells.
    """

    parent: Triangle
    n_subdiv: int
    vertices: np.ndarray
    edges: np.ndarray
    edge_normals: np.ndarray
    elements: np.ndarray
    element_edges: np.ndarray
    element_up: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def element_vertices(self, t: int) -> np.ndarray:
        """Coordinates of cell ``t``'s three vertices, shape (3, 2)."""
        return self.vertices[self.elements[t]]

    def boundary_edge_mask(self) -> np.ndarray:
        """Boolean mask of edges adjacent to exactly one cell."""
        counts = np.zeros(self.n_edges, dtype=int)
        np.add.at(counts, self.element_edges.ravel(), 1)
        return counts == 1


def uniform_mesh(tri: Triangle, n_subdiv: int) -> Mesh:
    """Build the uniform ``N``-subdivision mesh of ``tri``."""
    N = int(n_subdiv)
    if N < 1:
        raise InvalidParameterError(f"subdivision count must be >= 1, got {n_subdiv}")
    p1 = tri.vertices[0]
    a = (tri.vertices[1] - p1) / N
    b = (tri.vertices[2] - p1) / N

    # Vertex numbering: rows of constant j, i inner.
    offsets = np.zeros(N + 2, dtype=int)
    for j in range(N + 1):
        offsets[j + 1] = offsets[j] + (N + 1 - j)
    n_vert = offsets[N + 1]
    vertices = np.empty((n_vert, 2))
    for j in range(N + 1):
        i = np.arange(N + 1 - j)
        vertices[offsets[j]:offsets[j + 1]] = p1 + np.outer(i, a) + j * b

    def vid(i, j):
        return offsets[j] + i

    # Edge families: A along p1->p2, B along p1->p3, C along p2->p3.
    edge_pairs = []
    a_index = {}
    b_index = {}
    c_index = {}
    for j in range(N + 1):
        for i in range(N - j):
            a_index[(i, j)] = len(edge_pairs)
            edge_pairs.append((vid(i, j), vid(i + 1, j)))
    for j in range(N):
        for i in range(N - j):
            b_index[(i, j)] = len(edge_pairs)
            edge_pairs.append((vid(i, j), vid(i, j + 1)))
    for j in range(N):
        for i in range(N - j):
            c_index[(i, j)] = len(edge_pairs)
            edge_pairs.append((vid(i + 1, j), vid(i, j + 1)))
    edges = np.array(edge_pairs, dtype=int)

    tangents = vertices[edges[:, 1]] - vertices[edges[:, 0]]
    tangents /= np.linalg.norm(tangents, axis=1)[:, None]
    # rotate by -90 degrees: (x, y) -> (y, -x)
    edge_normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

    elements = []
    element_edges = []
    element_up = []
    for j in range(N):
        for i in range(N - j):
            elements.append((vid(i, j), vid(i + 1, j), vid(i, j + 1)))
            element_edges.append((c_index[(i, j)], b_index[(i, j)], a_index[(i, j)]))
            element_up.append(True)
            if i + j <= N - 2:
                elements.append((vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
                element_edges.append(
                    (a_index[(i, j + 1)], c_index[(i, j)], b_index[(i + 1, j)]))
                element_up.append(False)

    mesh = Mesh(
        parent=tri,
        n_subdiv=N,
        vertices=vertices,
        edges=edges,
        edge_normals=edge_normals,
        elements=np.array(elements, dtype=int),
        element_edges=np.array(element_edges, dtype=int),
        element_up=np.array(element_up, dtype=bool),
    )
    for arr in (mesh.vertices, mesh.edges, mesh.edge_normals, mesh.elements,
                mesh.element_edges, mesh.element_up):
        arr.setflags(write=False)
    return mesh


def corner_vertex_indices(mesh: Mesh) -> np.ndarray:
    """Indices of the mesh vertices sitting at the parent triangle's corners."""
    N = mesh.n_subdiv
    last = mesh.n_vertices - 1
    return np.array([0, N, last], dtype=int)


def dump_csv(mesh: Mesh, prefix: str) -> tuple[str, str]:
    """Write ``<prefix>_vertices.csv`` and ``<prefix>_elements.csv``.

    Debugging aid behind a CLI flag; returns the two file names.
    """
    vpath = f"{prefix}_vertices.csv"
    epath = f"{prefix}_elements.csv"
    with open(vpath, "w", encoding="utf-8") as fh:
        fh.write("index,x,y\n")
        for i, (x, y) in enumerate(mesh.vertices):
            fh.write(f"{i},{x!r},{y!r}\n")
    with open(epath, "w", encoding="utf-8") as fh:
        fh.write("index,v1,v2,v3,e1,e2,e3,up\n")
        for t in range(mesh.n_elements):
            v = mesh.elements[t]
            e = mesh.element_edges[t]
            up = int(mesh.element_up[t])
            fh.write(f"{t},{v[0]},{v[1]},{v[2]},{e[0]},{e[1]},{e[2]},{up}\n")
    return vpath, epath
