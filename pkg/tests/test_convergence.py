"""Convergence controls at the theoretical rate pairings.

The time derivative of the error converges as h^{p+1} in space and tau^q in
time; the spatial gradient as h^p and tau^{q+1}.  (The temporal pairing is
forced: dt of a degree-q trial function has degree q-1, so err_dt cannot
beat O(tau^q).)  These runs pin the implementation to those orders with
temporal resp. spatial resolution high enough not to mask them.
"""

import pytest

from westfem.studies import StudySpec, run_study


@pytest.mark.parametrize("p", [1, 2])
def test_h_rates_with_adequate_temporal_order(p):
    # q = p + 3 keeps the temporal error below the spatial one on all levels
    spec = StudySpec(kind="h", case="smooth", sweep=[8, 16, 32],
                     fixed={"p": p, "q": p + 3, "tau": 0.2})
    result = run_study(spec)
    assert not result.failures
    last = result.rows[-1]
    assert abs(last["eoc_dt"] - (p + 1)) <= 0.3, last
    assert abs(last["eoc_grad"] - p) <= 0.3, last


@pytest.mark.parametrize("q", [2, 3])
def test_tau_rates(q):
    taus = [0.5 * 2.0 ** -i for i in range(1, 5)]
    spec = StudySpec(kind="tau", case="smooth-fast", sweep=taus,
                     fixed={"n": 5, "p": 5, "q": q})
    result = run_study(spec)
    assert not result.failures
    last = result.rows[-1]
    assert abs(last["eoc_dt"] - q) <= 0.3, last
    assert abs(last["eoc_grad"] - (q + 1)) <= 0.3, last
