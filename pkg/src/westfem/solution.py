"""Space-time solution table for the DG-CG scheme.

Per slab the trial function is u(s) = u_start + sum_j U_j B_j(s) with
B_j(s) = Lt_j(s) - (-1)^j (so B_j(0) = 0), j = 1..q.  Slab start values are
shared arrays: the end trace of slab n *is* the start value of slab n+1, so
global continuity holds exactly by representation, not by round-off luck.
"""

from __future__ import annotations

import numpy as np

from .timefe import TimePartition, shifted_legendre_table


class DiscreteSolution:
    """Continuous-in-time, degree-q-per-slab finite element solution."""

    def __init__(self, space, partition: TimePartition, q: int,
                 modes: np.ndarray, start_value: np.ndarray):
        if q < 1:
            raise ValueError(f"temporal degree must be >= 1, got {q}")
        self.space = space
        self.partition = partition
        self.q = q
        nsl = partition.n_slabs
        self.modes = np.asarray(modes)            # (N, q, n_dof)
        if self.modes.shape != (nsl, q, space.n_dof):
            raise ValueError("modes shape mismatch")
        bj1 = _b_end(q)                           # B_j(1) = 1 - (-1)^j
        bp = np.empty((nsl + 1, space.n_dof))
        bp[0] = start_value
        for n in range(nsl):
            bp[n + 1] = bp[n] + bj1 @ self.modes[n]
        self.bp_values = bp

    # -- slab-local access --------------------------------------------

    def modal(self, n: int) -> np.ndarray:
        """Full shifted-Legendre coefficients (q+1, n_dof) on slab n."""
        signs = (-1.0) ** np.arange(1, self.q + 1)
        u0 = self.bp_values[n] - signs @ self.modes[n]
        return np.concatenate([u0[None, :], self.modes[n]], axis=0)

    def value_slab(self, n: int, s: float) -> np.ndarray:
        if s == 0.0:
            return self.bp_values[n]
        if s == 1.0:
            return self.bp_values[n + 1]
        tab = shifted_legendre_table(self.q, np.array([s]))[0, :, 0]
        b = tab[1:] - (-1.0) ** np.arange(1, self.q + 1)
        return self.bp_values[n] + b @ self.modes[n]

    def dt_slab(self, n: int, s: float) -> np.ndarray:
        tab = shifted_legendre_table(self.q, np.array([s]), nderiv=1)[1, 1:, 0]
        return (tab @ self.modes[n]) / self.partition.taus[n]

    def dtt_slab(self, n: int, s: float) -> np.ndarray:
        tab = shifted_legendre_table(self.q, np.array([s]), nderiv=2)[2, 1:, 0]
        return (tab @ self.modes[n]) / self.partition.taus[n] ** 2

    # -- global access ------------------------------------------------

    def _locate(self, t: float, side: str):
        bp = self.partition.breakpoints
        if side == "left" and t > bp[0]:
            n = int(np.searchsorted(bp, t, side="left")) - 1
            n = min(max(n, 0), self.partition.n_slabs - 1)
            s = (t - bp[n]) / self.partition.taus[n]
            return n, min(max(s, 0.0), 1.0)
        return self.partition.locate(t)

    def value(self, t: float, side: str = "right") -> np.ndarray:
        n, s = self._locate(t, side)
        return self.value_slab(n, s)

    def dt(self, t: float, side: str = "right") -> np.ndarray:
        n, s = self._locate(t, side)
        return self.dt_slab(n, s)


def _b_end(q: int) -> np.ndarray:
    return 1.0 - (-1.0) ** np.arange(1, q + 1)
