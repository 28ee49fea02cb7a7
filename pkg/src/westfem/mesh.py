"""Structured triangulations of the unit square.

An n x n grid of cells, each split along the (+1,+1) diagonal, gives
(n+1)^2 vertices and 2 n^2 congruent right triangles with longest edge
sqrt(2)/n.  Triangles are stored with counterclockwise vertex order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray        # (n_vertices, 2) float
    triangles: np.ndarray       # (n_triangles, 3) int, CCW
    boundary_vertex: np.ndarray  # (n_vertices,) bool
    n: int                      # cells per side

    # edge table, built lazily by FESpace and friends
    _edges: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]


def unit_square_mesh(n: int) -> Mesh:
    """Structured mesh of (0,1)^2 with n cells per side."""
    if n < 1:
        raise ValueError(f"need at least one cell per side, got n={n}")
    side = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(side, side, indexing="xy")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(ix, iy):
        return iy * (n + 1) + ix

    tris = np.empty((2 * n * n, 3), dtype=np.int64)
    t = 0
    for iy in range(n):
        for ix in range(n):
            v00 = vid(ix, iy)
            v10 = vid(ix + 1, iy)
            v01 = vid(ix, iy + 1)
            v11 = vid(ix + 1, iy + 1)
            tris[t] = (v00, v10, v11)      # below the diagonal
            tris[t + 1] = (v00, v11, v01)  # above
            t += 2

    ix = np.arange((n + 1) ** 2) % (n + 1)
    iy = np.arange((n + 1) ** 2) // (n + 1)
    boundary = (ix == 0) | (ix == n) | (iy == 0) | (iy == n)
    return Mesh(vertices=vertices, triangles=tris, boundary_vertex=boundary, n=n)


def refine(mesh: Mesh) -> Mesh:
    """Halve the cell size (regular refinement of the structured mesh)."""
    return unit_square_mesh(2 * mesh.n)


def mesh_size(mesh: Mesh) -> float:
    """Largest triangle diameter, h_max = sqrt(2)/n for this family."""
    v = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
    d01 = np.linalg.norm(v[:, 0] - v[:, 1], axis=1)
    d12 = np.linalg.norm(v[:, 1] - v[:, 2], axis=1)
    d20 = np.linalg.norm(v[:, 2] - v[:, 0], axis=1)
    return float(np.max(np.column_stack([d01, d12, d20])))


def edge_table(mesh: Mesh):
    """Map sorted vertex pair -> edge index, built once per mesh."""
    cache = mesh._edges
    if "table" not in cache:
        table = {}
        for tri in mesh.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                if key not in table:
                    table[key] = len(table)
        cache["table"] = table
    return cache["table"]
