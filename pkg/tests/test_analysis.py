"""Error functionals, EOC computation, jump and energy quantities."""

import numpy as np
import pytest

from westfem.analysis import (energy_norm, eoc, err_linf_l2, jump_functional,
                              data_functional)
from westfem.cases import ProblemConfig, get_case, run_problem


@pytest.fixture(scope="module")
def smooth_run():
    cfg = ProblemConfig(case=get_case("smooth"), n=4, p=2, q=3, tau=0.25)
    return run_problem(cfg)


def test_eoc_recovers_exact_power():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    errs = 3.7 * h ** 2.5
    rates = eoc(errs, h)
    assert np.allclose(rates, 2.5, atol=1e-12)
    assert len(rates) == 3


def test_eoc_handles_increasing_parameter_lists():
    # same data, parameter list reversed: rates must agree
    h = [0.4, 0.2, 0.1]
    errs = [1.6e-2, 4e-3, 1e-3]
    a = eoc(errs, h)
    b = eoc(errs[::-1], h[::-1])
    assert np.allclose(a, b[::-1], atol=1e-12)


def test_err_linf_l2_of_solution_against_itself(smooth_run):
    _, _, sol, _ = smooth_run
    assert err_linf_l2(sol, sol, "dt") == 0.0
    assert err_linf_l2(sol, sol, "grad") == 0.0


def test_err_linf_l2_modes(smooth_run):
    _, _, sol, _ = smooth_run
    case = get_case("smooth")
    e_dt = err_linf_l2(sol, case, "dt")
    e_gr = err_linf_l2(sol, case, "grad")
    assert 0 < e_dt < 1e-3
    assert 0 < e_gr < 1e-2
    with pytest.raises(ValueError):
        err_linf_l2(sol, case, "value")


def _endpoint_traces(space, part, sol):
    mm = space.mass
    v_end = sol.dt_slab(part.n_slabs - 1, 1.0)
    v_start = sol.dt_slab(0, 0.0)
    return np.sqrt(0.5 * (v_end @ (mm @ v_end) + v_start @ (mm @ v_start)))


def test_jump_functional_dominates_endpoint_traces(smooth_run):
    # dt u may jump at interior breakpoints (only u itself is continuous),
    # so the functional is at least the two endpoint traces
    space, part, sol, _ = smooth_run
    assert jump_functional(sol) >= _endpoint_traces(space, part, sol)


def test_jump_functional_reduces_to_traces_for_exact_polynomial():
    # a solution reproduced exactly has continuous dt; interior terms vanish
    from westfem.solver import solve_westervelt
    from westfem.spacefe import FESpace
    from westfem.mesh import unit_square_mesh
    from westfem.timefe import TimePartition

    def bubble(x, y):
        return x * (1 - x) * y * (1 - y)

    space = FESpace(unit_square_mesh(2), 4)
    part = TimePartition.uniform(1.0, 0.25)
    sol, _ = solve_westervelt(
        space, part, 3, c=1.0, k=0.0, delta=0.0,
        f=lambda x, y, t: 2.0 * bubble(x, y)
        + t * t * 2.0 * (y * (1 - y) + x * (1 - x)),
        u0=lambda x, y: np.zeros_like(np.asarray(x, dtype=float)),
        u1=lambda x, y: np.zeros_like(np.asarray(x, dtype=float)))
    expect = _endpoint_traces(space, part, sol)
    assert jump_functional(sol) == pytest.approx(expect, rel=1e-9)


def test_energy_norm_positive_and_monotone_in_delta(smooth_run):
    _, _, sol, _ = smooth_run
    e0 = energy_norm(sol, c=1.0, delta=0.0)
    e1 = energy_norm(sol, c=1.0, delta=0.1)
    assert 0 < e0 < e1


def test_data_functional_positive(smooth_run):
    space, part, _, _ = smooth_run
    assert data_functional(space, part, get_case("smooth")) > 0
