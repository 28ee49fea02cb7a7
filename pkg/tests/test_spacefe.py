"""Assembly, interpolation, Ritz projection, and point evaluation."""

import numpy as np
import pytest

from westfem.mesh import unit_square_mesh
from westfem.spacefe import (FESpace, discrete_laplacian, evaluate, interpolate,
                             ritz_project, ritz_project_fd)


def make_space(n, p):
    return FESpace(unit_square_mesh(n), p)


@pytest.mark.parametrize("n,p", [(2, 1), (3, 2), (2, 4), (5, 3)])
def test_dof_counts(n, p):
    space = make_space(n, p)
    assert space.n_dof == (p * n + 1) ** 2
    assert space.n_free == (p * n - 1) ** 2
    assert space.free_dofs.size == space.n_free


@pytest.mark.parametrize("n,p", [(2, 1), (3, 2), (2, 5)])
def test_mass_matrix_total(n, p):
    space = make_space(n, p)
    ones = np.ones(space.n_dof)
    assert abs(ones @ (space.mass @ ones) - 1.0) < 1e-13  # |Omega| = 1
    assert np.max(np.abs(space.stiffness @ ones)) < 1e-11  # constants in kernel


def test_mass_quadratic_form_exact():
    # g = x y has degree 1 per variable; exact in V_h for p >= 2
    space = make_space(3, 2)
    g = interpolate(space, lambda x, y: x * y)
    assert abs(g @ (space.mass @ g) - 1.0 / 9.0) < 1e-14


def test_stiffness_quadratic_form_exact():
    # g = x(1-x)y(1-y):  int |grad g|^2 = 2 * (1/3) * (1/30) = 1/45
    space = make_space(2, 4)
    g = interpolate(space, lambda x, y: x * (1 - x) * y * (1 - y))
    assert abs(g @ (space.stiffness @ g) - 1.0 / 45.0) < 1e-14


@pytest.mark.parametrize("p", [1, 2, 3])
def test_interpolate_is_nodal(p):
    space = make_space(3, p)

    def g(x, y):
        return np.sin(x + 0.3) * np.cos(2 * y)

    coeffs = interpolate(space, g)
    xc, yc = space.dof_coords[:, 0], space.dof_coords[:, 1]
    assert np.max(np.abs(coeffs - g(xc, yc))) < 1e-14


def test_evaluate_reproduces_fe_function():
    space = make_space(4, 2)
    g = interpolate(space, lambda x, y: (x - 0.2) * y + x * x)
    rng = np.random.default_rng(5)
    x, y = rng.random(60), rng.random(60)
    exact = (x - 0.2) * y + x * x
    assert np.max(np.abs(evaluate(space, g, x, y) - exact)) < 1e-13


def test_ritz_projection_reproduces_fe_function():
    # bubble x(1-x)y(1-y) lies in V_h for p = 4 and vanishes on the boundary
    space = make_space(2, 4)
    exact = interpolate(space, lambda x, y: x * (1 - x) * y * (1 - y))

    def grad(x, y):
        return ((1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y))

    proj = ritz_project(space, grad)
    assert np.max(np.abs(proj - exact)) < 1e-12


def test_ritz_projection_galerkin_orthogonality():
    space = make_space(4, 2)
    gp = ritz_project(space, lambda x, y: (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
                                           np.pi * np.sin(np.pi * x) * np.cos(np.pi * y)))
    # residual of the defining linear system on free dofs
    ed = space.element_data(2 * space.p + 2)
    x, y = ed.phys[:, :, 0], ed.phys[:, :, 1]
    load = ed.assemble_gradient_load(np.stack(
        [np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
         np.pi * np.sin(np.pi * x) * np.cos(np.pi * y)], axis=-1))
    res = (space.stiffness @ gp)[space.free_dofs] - load[space.free_dofs]
    scale = np.max(np.abs(load)) or 1.0
    assert np.max(np.abs(res)) < 1e-12 * scale


def test_ritz_fd_matches_exact_gradient_variant():
    space = make_space(3, 2)

    def g(x, y):
        return np.sin(np.pi * x) * np.sin(np.pi * y)

    def grad(x, y):
        return (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
                np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))

    assert np.max(np.abs(ritz_project(space, grad) - ritz_project_fd(space, g))) < 1e-7


def test_discrete_laplacian_of_eigenfunction():
    # -Delta sin(pi x) sin(pi y) = 2 pi^2 sin(pi x) sin(pi y); h-refinement converges
    errs = []
    for n in (4, 8, 16):
        space = make_space(n, 2)
        g = interpolate(space, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
        lap = discrete_laplacian(space, g)
        d = lap + 2 * np.pi ** 2 * g
        errs.append(np.sqrt(d @ (space.mass @ d)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[0] < 0.45 and errs[2] / errs[1] < 0.45


def test_boundary_rows_fixed():
    space = make_space(3, 3)
    free = np.zeros(space.n_dof, dtype=bool)
    free[space.free_dofs] = True
    on_bnd = np.any((space.dof_coords <= 1e-12) | (space.dof_coords >= 1 - 1e-12),
                    axis=1)
    assert np.array_equal(~free, on_bnd)
