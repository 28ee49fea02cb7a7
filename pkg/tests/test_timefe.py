"""Time partitions, shifted Legendre bases, temporal projections, weights."""

import numpy as np
import pytest

from westfem.timefe import (SlabWeight, TimePartition, TimePoly, gauss_interval,
                            l2_project_time, ptau_project,
                            shifted_legendre_table, weight_phi, zeta)


def test_uniform_partition():
    part = TimePartition.uniform(1.0, 0.25)
    assert part.n_slabs == 4
    assert np.allclose(part.breakpoints, [0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)
    assert np.all(part.taus == 0.25)
    assert part.T == 1.0 and part.tau_max == 0.25


def test_uniform_partition_rejects_non_divisor():
    with pytest.raises(ValueError):
        TimePartition.uniform(1.0, 0.3)
    with pytest.raises(ValueError):
        TimePartition.uniform(1.0, -0.1)


def test_locate():
    part = TimePartition.from_breakpoints([0.0, 0.4, 1.0])
    n, s = part.locate(0.7)
    assert n == 1 and abs(s - 0.5) < 1e-14
    n, s = part.locate(0.0)
    assert n == 0 and s == 0.0
    n, s = part.locate(1.0)
    assert n == 1 and abs(s - 1.0) < 1e-14


@pytest.mark.parametrize("q", [1, 3, 5])
def test_shifted_legendre_orthogonality(q):
    x, w = gauss_interval(q + 2)
    tab = shifted_legendre_table(q, x)[0]
    gram = (tab * w) @ tab.T
    expect = np.diag(1.0 / (2 * np.arange(q + 1) + 1))
    assert np.max(np.abs(gram - expect)) < 1e-14


def test_shifted_legendre_endpoint_values():
    tab = shifted_legendre_table(4, np.array([0.0, 1.0]))[0]
    assert np.allclose(tab[:, 1], 1.0, atol=1e-14)            # L_j(1) = 1
    signs = (-1.0) ** np.arange(5)
    assert np.allclose(tab[:, 0], signs, atol=1e-14)          # L_j(0) = (-1)^j


def test_shifted_legendre_derivatives_match_difference_quotient():
    s = np.array([0.12, 0.47, 0.83])
    h = 1e-6
    tab = shifted_legendre_table(4, s, nderiv=2)
    v_p = shifted_legendre_table(4, s + h)[0]
    v_m = shifted_legendre_table(4, s - h)[0]
    assert np.max(np.abs((v_p - v_m) / (2 * h) - tab[1])) < 1e-6
    assert np.max(np.abs((v_p - 2 * tab[0] + v_m) / h ** 2 - tab[2])) < 2e-4


def test_timepoly_sides():
    part = TimePartition.from_breakpoints([0.0, 0.5, 1.0])
    # legendre coefficients per slab; discontinuous at t = 0.5
    poly = TimePoly(part, np.array([[1.0, 0.0], [2.0, 0.0]]))
    assert poly(0.5, side="left") == pytest.approx(1.0, abs=1e-15)
    assert poly(0.5, side="right") == pytest.approx(2.0, abs=1e-15)
    assert poly(1.0) == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("r", [0, 1, 3])
def test_l2_projection_reproduces_degree_r(r):
    part = TimePartition.from_breakpoints([0.0, 0.3, 0.55, 1.0])

    def v(t):
        return sum((0.7 - 0.2 * j) * t ** j for j in range(r + 1))

    proj = l2_project_time(r, v, part)
    for t in np.linspace(0.01, 0.99, 37):
        assert abs(proj(t) - v(t)) < 1e-13


def test_l2_projection_orthogonality():
    part = TimePartition.from_breakpoints([0.0, 0.45, 1.0])
    proj = l2_project_time(2, np.cos, part)
    x, w = gauss_interval(8)
    for n in range(part.n_slabs):
        t0, tau = part.breakpoints[n], part.taus[n]
        t = t0 + tau * x
        for deg in range(3):
            m = float(np.sum(w * (np.cos(t) - [proj(tt) for tt in t]) * x ** deg))
            assert abs(m) < 1e-14


# hand-computed image: projecting t^3 on a single q=2 slab over (0,1).
# Conditions P(0)=0, P'(1)=3, and int (P - t^3)' * 1 dt = 0 give P = 2t^2 - t.
def test_ptau_single_slab_cubic_oracle():
    part = TimePartition.from_breakpoints([0.0, 1.0])
    proj = ptau_project(2, lambda t: t ** 3, lambda t: 3 * t ** 2, part)
    for t in np.linspace(0, 1, 21):
        assert abs(proj(t) - (2 * t * t - t)) < 1e-13


@pytest.mark.parametrize("q", [2, 3, 4])
def test_ptau_interface_conditions(q):
    part = TimePartition.from_breakpoints([0.0, 0.35, 0.6, 1.0])

    def v(t):
        return np.sin(2.1 * t + 0.3)

    def dv(t):
        return 2.1 * np.cos(2.1 * t + 0.3)

    proj = ptau_project(q, v, dv, part)
    assert abs(proj(0.0) - v(0.0)) < 1e-13
    for t_n in part.breakpoints[1:]:
        assert abs(proj.derivative(t_n, side="left") - dv(t_n)) < 1e-11
    for t_n in part.breakpoints[1:-1]:
        assert abs(proj(t_n, side="left") - proj(t_n, side="right")) < 1e-12


def test_ptau_reproduces_degree_q():
    part = TimePartition.from_breakpoints([0.0, 0.4, 1.0])
    proj = ptau_project(3, lambda t: t ** 3 - 2 * t, lambda t: 3 * t ** 2 - 2, part)
    for t in np.linspace(0, 1, 29):
        assert abs(proj(t) - (t ** 3 - 2 * t)) < 1e-12


def test_zeta_values():
    assert zeta(1) == pytest.approx(1 / 12)
    assert zeta(2) == pytest.approx(1 / 20)
    assert zeta(5) == pytest.approx(1 / 44)


@pytest.mark.parametrize("q", [2, 4])
def test_weight_function(q):
    part = TimePartition.uniform(1.0, 0.25)
    theta = 2.0 * zeta(q)
    w = weight_phi(2, theta, q, part)  # slab indices are 1-based
    assert isinstance(w, SlabWeight)
    assert w.value_start == pytest.approx(theta, abs=1e-15)
    assert w.value_start - w.value_end == pytest.approx(zeta(q), abs=1e-15)
    ts = np.linspace(0.25, 0.5, 9)  # slab 2 covers [0.25, 0.5]
    vals = np.array([w(t) for t in ts])
    assert np.all(vals > 0) and np.all(vals <= theta + 1e-15)


def test_weight_requires_theta_above_zeta():
    part = TimePartition.uniform(1.0, 0.5)
    with pytest.raises(ValueError):
        weight_phi(1, zeta(3), 3, part)
