"""Conforming Lagrange spaces V_h^p on triangulated unit squares.

Global dof order: vertex dofs first (vertex id), then p-1 dofs per edge
(ordered from the lower-numbered vertex), then per-triangle interior dofs.
On the structured n x n mesh this gives exactly (p*n+1)^2 dofs.
Homogeneous Dirichlet conditions are imposed by restriction to free dofs.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import Mesh, edge_table
from .refelem import reference_element, triangle_quadrature


class FESpace:
    """H^1_0-conforming space of continuous piecewise degree-p polynomials."""

    def __init__(self, mesh: Mesh, p: int):
        self.mesh = mesh
        self.p = p
        self.ref = reference_element(p)
        self._build_dofmap()
        self._cache: dict = {}

    # -- construction -------------------------------------------------

    def _build_dofmap(self):
        mesh, p, ref = self.mesh, self.p, self.ref
        nv = mesh.n_vertices
        edges = edge_table(mesh)
        ne = len(edges)
        n_int = ref.n_interior
        self.n_dof = nv + ne * (p - 1) + mesh.n_triangles * n_int

        nl = ref.n_nodes
        cell_dofs = np.empty((mesh.n_triangles, nl), dtype=np.int64)
        edge_base = nv
        int_base = nv + ne * (p - 1)
        for t, (a, b, c) in enumerate(mesh.triangles):
            cell_dofs[t, 0:3] = (a, b, c)
            loc = 3
            for (u, v) in ((a, b), (b, c), (c, a)):
                e = edges[(min(u, v), max(u, v))]
                slots = np.arange(p - 1)
                if u > v:
                    slots = slots[::-1]
                cell_dofs[t, loc:loc + p - 1] = edge_base + e * (p - 1) + slots
                loc += p - 1
            cell_dofs[t, loc:] = int_base + t * n_int + np.arange(n_int)
        self.cell_dofs = cell_dofs

        # physical node coordinates (shared dofs written consistently)
        coords = np.empty((self.n_dof, 2))
        va = mesh.vertices[mesh.triangles[:, 0]]
        vb = mesh.vertices[mesh.triangles[:, 1]]
        vc = mesh.vertices[mesh.triangles[:, 2]]
        xi = ref.nodes[:, 0]
        eta = ref.nodes[:, 1]
        phys = (va[:, None, :]
                + xi[None, :, None] * (vb - va)[:, None, :]
                + eta[None, :, None] * (vc - va)[:, None, :])
        coords[cell_dofs.ravel()] = phys.reshape(-1, 2)
        self.dof_coords = coords

        # Dirichlet dofs by topology: boundary vertices, plus edge dofs on
        # edges whose endpoints share a side of the square (a diagonal may
        # join two boundary vertices through the interior)
        n = mesh.n
        is_dirichlet = np.zeros(self.n_dof, dtype=bool)
        is_dirichlet[:nv] = mesh.boundary_vertex
        ix = np.arange(nv) % (n + 1)
        iy = np.arange(nv) // (n + 1)
        for (u, v), e in edges.items():
            on_side = ((ix[u] == ix[v] and ix[u] in (0, n))
                       or (iy[u] == iy[v] and iy[u] in (0, n)))
            if on_side:
                is_dirichlet[edge_base + e * (p - 1):edge_base + (e + 1) * (p - 1)] = True
        self.is_free = ~is_dirichlet
        self.free_dofs = np.flatnonzero(self.is_free)
        self.n_free = self.free_dofs.size

    # -- per-rule element data ----------------------------------------

    def element_data(self, degree: int) -> "ElementData":
        key = ("edata", degree)
        if key not in self._cache:
            self._cache[key] = ElementData(self, degree)
        return self._cache[key]

    # -- cached global operators --------------------------------------

    @property
    def mass(self) -> sp.csr_matrix:
        if "mass" not in self._cache:
            self._cache["mass"] = assemble_mass(self)
        return self._cache["mass"]

    @property
    def stiffness(self) -> sp.csr_matrix:
        if "stiffness" not in self._cache:
            self._cache["stiffness"] = assemble_stiffness(self)
        return self._cache["stiffness"]

    def _ff(self, name):
        key = (name, "ff")
        if key not in self._cache:
            mat = getattr(self, name)
            self._cache[key] = mat[self.free_dofs][:, self.free_dofs].tocsc()
        return self._cache[key]

    @property
    def mass_ff(self):
        return self._ff("mass")

    @property
    def stiffness_ff(self):
        return self._ff("stiffness")

    def _solver(self, name):
        key = (name, "lu")
        if key not in self._cache:
            self._cache[key] = splu(self._ff(name))
        return self._cache[key]

    def solve_stiffness(self, rhs_free):
        return self._solver("stiffness").solve(rhs_free)

    def solve_mass(self, rhs_free):
        return self._solver("mass").solve(rhs_free)


class ElementData:
    """Reference basis tables and geometry factors for one quadrature rule."""

    def __init__(self, space: FESpace, degree: int):
        mesh, ref = space.mesh, space.ref
        pts, w = triangle_quadrature(degree)
        self.qpts, self.w = pts, w
        self.vals = ref.eval_basis(pts)                  # (nq, nl)
        self.grads_ref = ref.eval_basis_grad(pts)        # (nq, nl, 2)

        tri = mesh.triangles
        va, vb, vc = (mesh.vertices[tri[:, k]] for k in range(3))
        jac = np.stack([vb - va, vc - va], axis=2)       # (nt, 2, 2), columns
        self.detj = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        inv = np.empty_like(jac)
        inv[:, 0, 0] = jac[:, 1, 1]
        inv[:, 0, 1] = -jac[:, 0, 1]
        inv[:, 1, 0] = -jac[:, 1, 0]
        inv[:, 1, 1] = jac[:, 0, 0]
        inv /= self.detj[:, None, None]
        self.jinv = inv                                  # J^{-1}
        self.phys = (va[:, None, :]
                     + pts[None, :, 0, None] * (vb - va)[:, None, :]
                     + pts[None, :, 1, None] * (vc - va)[:, None, :])
        self.gdofs = space.cell_dofs
        self.n_dof = space.n_dof

    def function_values(self, coeffs: np.ndarray) -> np.ndarray:
        """FE function at all quadrature points; (nt, nq)."""
        local = coeffs[self.gdofs]                       # (nt, nl)
        return local @ self.vals.T

    def function_gradients(self, coeffs: np.ndarray) -> np.ndarray:
        """Physical gradients at quadrature points; (nt, nq, 2)."""
        local = coeffs[self.gdofs]
        gref = np.einsum("tl,qld->tqd", local, self.grads_ref)
        return np.einsum("tqd,tde->tqe", gref, self.jinv)

    def function_values_multi(self, coeffs: np.ndarray) -> np.ndarray:
        """Batched function_values for coefficient rows; (m, n_dof) -> (m, nt, nq)."""
        local = coeffs[:, self.gdofs]                    # (m, nt, nl)
        return np.einsum("mtl,ql->mtq", local, self.vals)

    def assemble_pointwise_load(self, f_qp: np.ndarray) -> np.ndarray:
        """(f, phi_i) for f given by its values at quadrature points."""
        loc = np.einsum("tq,q,qi->ti", f_qp, self.w, self.vals) * self.detj[:, None]
        out = np.zeros(self.n_dof)
        np.add.at(out, self.gdofs.ravel(), loc.ravel())
        return out

    def assemble_pointwise_load_multi(self, f_qp: np.ndarray) -> np.ndarray:
        """Batched load assembly; f_qp (m, nt, nq) -> (m, n_dof)."""
        loc = np.einsum("mtq,q,qi->mti", f_qp, self.w, self.vals) * self.detj[None, :, None]
        out = np.zeros((f_qp.shape[0], self.n_dof))
        for row, lrow in zip(out, loc):
            np.add.at(row, self.gdofs.ravel(), lrow.ravel())
        return out

    def assemble_gradient_load(self, g_qp: np.ndarray) -> np.ndarray:
        """(g, grad phi_i) for a vector field g at quadrature points; g_qp (nt, nq, 2)."""
        gphys = np.einsum("qld,tde->tqle", self.grads_ref, self.jinv)
        loc = np.einsum("tqe,q,tqle->tl", g_qp, self.w, gphys) * self.detj[:, None]
        out = np.zeros(self.n_dof)
        np.add.at(out, self.gdofs.ravel(), loc.ravel())
        return out


def _scatter(space: FESpace, local: np.ndarray) -> sp.csr_matrix:
    """Accumulate per-element matrices (nt, nl, nl) into a global CSR."""
    gd = space.cell_dofs
    nl = gd.shape[1]
    rows = np.repeat(gd, nl, axis=1).ravel()
    cols = np.tile(gd, (1, nl)).ravel()
    mat = sp.coo_matrix((local.ravel(), (rows, cols)),
                        shape=(space.n_dof, space.n_dof))
    return mat.tocsr()


def assemble_mass(space: FESpace, quad_degree: int | None = None) -> sp.csr_matrix:
    """Global mass matrix (phi_j, phi_i)."""
    deg = 2 * space.p + 2 if quad_degree is None else quad_degree
    ed = space.element_data(deg)
    m_ref = np.einsum("q,qi,qj->ij", ed.w, ed.vals, ed.vals)
    local = ed.detj[:, None, None] * m_ref[None, :, :]
    return _scatter(space, local)


def assemble_stiffness(space: FESpace, quad_degree: int | None = None) -> sp.csr_matrix:
    """Global stiffness matrix (grad phi_j, grad phi_i)."""
    deg = 2 * space.p + 2 if quad_degree is None else quad_degree
    ed = space.element_data(deg)
    # C_e = detJ * J^{-1} J^{-T}
    c = np.einsum("tde,tfe->tdf", ed.jinv, ed.jinv) * ed.detj[:, None, None]
    local = np.einsum("q,qid,tdf,qjf->tij", ed.w, ed.grads_ref, c, ed.grads_ref)
    return _scatter(space, local)


def assemble_load(space: FESpace, f, quad_degree: int | None = None) -> np.ndarray:
    """(f, phi_i) for a callable f(x, y)."""
    deg = 2 * space.p + 2 if quad_degree is None else quad_degree
    ed = space.element_data(deg)
    fvals = f(ed.phys[:, :, 0], ed.phys[:, :, 1])
    return ed.assemble_pointwise_load(np.broadcast_to(fvals, ed.phys.shape[:2]))


def interpolate(space: FESpace, g) -> np.ndarray:
    """Nodal interpolant I_h g (coefficients = values at dof nodes)."""
    return np.asarray(g(space.dof_coords[:, 0], space.dof_coords[:, 1]), dtype=float)


def ritz_project(space: FESpace, grad_g, quad_degree: int | None = None) -> np.ndarray:
    """Ritz projection R_h g of a function with g|_{boundary} = 0.

    Defined by (grad(R_h g - g), grad v_h) = 0 for all v_h; needs only the
    gradient of g, passed as grad_g(x, y) -> (gx, gy).
    """
    deg = 2 * space.p + 2 if quad_degree is None else quad_degree
    ed = space.element_data(deg)
    gx, gy = grad_g(ed.phys[:, :, 0], ed.phys[:, :, 1])
    field = np.stack([np.broadcast_to(gx, ed.phys.shape[:2]),
                      np.broadcast_to(gy, ed.phys.shape[:2])], axis=2)
    rhs = ed.assemble_gradient_load(field)
    out = np.zeros(space.n_dof)
    out[space.free_dofs] = space.solve_stiffness(rhs[space.free_dofs])
    return out


def ritz_project_fd(space: FESpace, g, step: float = 1e-6) -> np.ndarray:
    """Ritz projection with a central-difference gradient of g (diagnostic path
    for data supplied without a closed-form gradient)."""
    def grad(x, y):
        return ((g(x + step, y) - g(x - step, y)) / (2 * step),
                (g(x, y + step) - g(x, y - step)) / (2 * step))
    return ritz_project(space, grad)


def discrete_laplacian(space: FESpace, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of Delta_h v, defined by (Delta_h v, z) = -(grad v, grad z)."""
    rhs = -(space.stiffness @ coeffs)[space.free_dofs]
    out = np.zeros(space.n_dof)
    out[space.free_dofs] = space.solve_mass(rhs)
    return out


def evaluate(space: FESpace, coeffs: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Point evaluation of a FE function on the structured mesh."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = space.mesh.n
    cx = np.clip(np.floor(x * n).astype(int), 0, n - 1)
    cy = np.clip(np.floor(y * n).astype(int), 0, n - 1)
    fx = x * n - cx
    fy = y * n - cy
    lower = fy <= fx
    tri = 2 * (cy * n + cx) + np.where(lower, 0, 1)
    xi = np.where(lower, fx - fy, fx)
    eta = np.where(lower, fy, fy - fx)
    vals = space.ref.eval_basis(np.column_stack([xi, eta]))  # (npts, nl)
    local = coeffs[space.cell_dofs[tri]]                     # (npts, nl)
    return np.sum(vals * local, axis=1)
