"""Slab marching: exactness, iteration counts, failure modes, determinism."""

import numpy as np
import pytest

from westfem.errors import DegenerateCoefficient
from westfem.cases import get_case, run_problem, ProblemConfig
from westfem.mesh import unit_square_mesh
from westfem.solver import solve_westervelt
from westfem.spacefe import FESpace, interpolate
from westfem.timefe import TimePartition


def bubble(x, y):
    return x * (1 - x) * y * (1 - y)


def lap_bubble(x, y):
    return -2.0 * (y * (1 - y) + x * (1 - x))


def test_polynomial_solution_is_exact():
    # u = t^2 w(x,y) with w the degree-4 bubble lies in the trial space for
    # p >= 4, q >= 2, and with k = 0 the scheme must reproduce it exactly.
    c, delta = 1.3, 0.01
    space = FESpace(unit_square_mesh(2), 4)
    part = TimePartition.uniform(1.0, 0.25)

    def f(x, y, t):
        return 2.0 * bubble(x, y) - (c * c * t * t + 2 * delta * t) * lap_bubble(x, y)

    sol, rep = solve_westervelt(
        space, part, 3, c=c, k=0.0, delta=delta, f=f,
        u0=lambda x, y: np.zeros_like(np.asarray(x, dtype=float)),
        u1=lambda x, y: np.zeros_like(np.asarray(x, dtype=float)),
        check_residual=True)

    w = interpolate(space, bubble)
    for t in (0.25, 0.6, 1.0):
        err = sol.value(t, side="left") - t * t * w
        assert np.max(np.abs(err)) < 1e-11, t
        err_dt = sol.dt(t, side="left") - 2 * t * w
        assert np.max(np.abs(err_dt)) < 1e-10, t
    assert max(info.residual for info in rep.slabs) < 1e-9


def test_linear_problem_takes_one_iteration():
    case = get_case("smooth", k=0.0)
    cfg = ProblemConfig(case=case, n=4, p=2, q=2, tau=0.25)
    _, _, _, rep = run_problem(cfg)
    assert rep.iterations == [1] * 4


def test_nonlinear_problem_iterates():
    cfg = ProblemConfig(case=get_case("smooth"), n=4, p=2, q=2, tau=0.25)
    _, _, _, rep = run_problem(cfg)
    assert rep.iters_max >= 2
    assert all(it <= 15 for it in rep.iterations)


def test_zero_data_gives_zero_solution():
    cfg = ProblemConfig(case=get_case("smooth", A=0.0), n=3, p=2, q=2, tau=0.5)
    _, _, sol, _ = run_problem(cfg)
    assert np.max(np.abs(sol.modes)) == 0.0
    assert np.max(np.abs(sol.bp_values)) == 0.0


def test_degenerate_coefficient_raises():
    # enormous negative k drives 1 + k u through the admissibility guard
    cfg = ProblemConfig(case=get_case("smooth", k=-2e4), n=3, p=1, q=2, tau=0.25)
    with pytest.raises(DegenerateCoefficient) as exc_info:
        run_problem(cfg)
    assert exc_info.value.coeff_min <= 0.1


def test_factorization_reused_on_uniform_partition():
    cfg = ProblemConfig(case=get_case("smooth"), n=3, p=2, q=2, tau=0.125)
    _, _, _, rep = run_problem(cfg)
    assert rep.n_factorizations == 1
    assert rep.factorization_reuses == 8 - 1


def test_solution_continuous_across_slabs():
    cfg = ProblemConfig(case=get_case("smooth"), n=3, p=2, q=3, tau=0.25)
    _, part, sol, _ = run_problem(cfg)
    for t_n in part.breakpoints[1:-1]:
        left = sol.value(t_n, side="left")
        right = sol.value(t_n, side="right")
        assert np.array_equal(left, right)  # shared representation, exact


def test_deterministic_rerun():
    cfg = ProblemConfig(case=get_case("smooth-fast"), n=4, p=3, q=2, tau=0.25)
    _, _, a, rep_a = run_problem(cfg)
    _, _, b, rep_b = run_problem(cfg)
    assert np.array_equal(a.modes, b.modes)
    assert rep_a.iterations == rep_b.iterations


def test_galerkin_residual_small_on_nonlinear_run():
    cfg = ProblemConfig(case=get_case("smooth"), n=4, p=2, q=3, tau=0.25)
    _, _, _, rep = run_problem(cfg, check_residual=True)
    assert max(info.residual for info in rep.slabs) < 1e-9


def test_longtime_large_steps_stay_bounded():
    # tau far above any CFL-type limit; unconditional stability in practice
    case = get_case("smooth", T=10.0)
    cfg = ProblemConfig(case=case, n=4, p=1, q=2, tau=2.0)
    _, _, sol, rep = run_problem(cfg)
    assert np.all(np.isfinite(sol.modes))
    assert all(info.coeff_min > 0.1 for info in rep.slabs)
