"""Temporal discretization: slab partitions, shifted Legendre bases, the
per-slab L2 projection, the derivative-matching projection P_tau, and the
linear slab weight phi_n used by the stability analysis.

All slab-local polynomials are expanded in shifted Legendre modes
Lt_j(s) = P_j(2s-1) on the unit slab coordinate s in [0,1], so L2
projection is coefficient truncation and modal coefficients decouple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


# -- partitions -------------------------------------------------------


@dataclass(frozen=True)
class TimePartition:
    breakpoints: np.ndarray  # (N+1,), strictly increasing, t_0 = 0
    taus: np.ndarray         # (N,) slab lengths

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing, length >= 2")

    @classmethod
    def uniform(cls, T: float, tau: float) -> "TimePartition":
        """Uniform partition; tau must divide T to within 1e-12."""
        if tau <= 0 or T <= 0:
            raise ValueError(f"need T, tau > 0, got T={T}, tau={tau}")
        nsl = int(round(T / tau))
        if nsl < 1 or abs(nsl * tau - T) > 1e-12 * max(1.0, abs(T)):
            raise ValueError(f"tau={tau} does not divide T={T}")
        # store one shared tau so uniform slabs compare equal bit-for-bit
        return cls(np.linspace(0.0, T, nsl + 1), np.full(nsl, tau))

    @classmethod
    def from_breakpoints(cls, bp) -> "TimePartition":
        bp = np.asarray(bp, dtype=float)
        return cls(bp, np.diff(bp))

    @property
    def n_slabs(self) -> int:
        return self.taus.size

    @property
    def T(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def tau_max(self) -> float:
        return float(self.taus.max())

    def locate(self, t: float) -> tuple[int, float]:
        """Slab index and local coordinate s in [0,1] containing t."""
        n = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        n = min(max(n, 0), self.n_slabs - 1)
        s = (t - self.breakpoints[n]) / self.taus[n]
        return n, float(min(max(s, 0.0), 1.0))


# -- shifted Legendre -------------------------------------------------


def shifted_legendre_table(q: int, s: np.ndarray, nderiv: int = 0) -> np.ndarray:
    """Values (and s-derivatives) of Lt_0..Lt_q at points s.

    Returns array of shape (nderiv+1, q+1, len(s)); row d holds the d-th
    derivative with respect to s.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    x = 2.0 * s - 1.0
    out = np.zeros((nderiv + 1, q + 1, s.size))
    out[0, 0] = 1.0
    if q >= 1:
        out[0, 1] = x
        if nderiv >= 1:
            out[1, 1] = 1.0
    for n in range(1, q):
        out[0, n + 1] = ((2 * n + 1) * x * out[0, n] - n * out[0, n - 1]) / (n + 1)
        if nderiv >= 1:
            out[1, n + 1] = out[1, n - 1] + (2 * n + 1) * out[0, n]
        if nderiv >= 2:
            out[2, n + 1] = out[2, n - 1] + (2 * n + 1) * out[1, n]
    # chain rule d/ds = 2 d/dx
    for d in range(1, nderiv + 1):
        out[d] *= 2.0 ** d
    return out


def legendre_shifted(q: int, s):
    """Value and first s-derivative of Lt_q at s."""
    t = shifted_legendre_table(q, s, nderiv=1)
    return t[0, q], t[1, q]


def gauss_interval(npts: int):
    """npts-point Gauss-Legendre rule on [0,1]."""
    if npts < 1:
        raise ValueError(f"need npts >= 1, got {npts}")
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


# -- slab-local polynomials ------------------------------------------


@dataclass
class TimePoly:
    """Piecewise polynomial on a partition, shifted-Legendre modal per slab."""

    partition: TimePartition
    coeffs: np.ndarray  # (N, degree+1)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def _eval(self, t: float, deriv: int, side: str) -> float:
        bp = self.partition.breakpoints
        if side == "left" and t > bp[0]:
            n = int(np.searchsorted(bp, t, side="left")) - 1
            n = min(max(n, 0), self.partition.n_slabs - 1)
            s = (t - bp[n]) / self.partition.taus[n]
        else:
            n, s = self.partition.locate(t)
        tab = shifted_legendre_table(self.degree, np.array([s]), nderiv=deriv)
        val = float(self.coeffs[n] @ tab[deriv, :, 0])
        return val / self.partition.taus[n] ** deriv

    def __call__(self, t: float, side: str = "right") -> float:
        return self._eval(t, 0, side)

    def derivative(self, t: float, side: str = "right") -> float:
        return self._eval(t, 1, side)


def l2_project_time(r: int, v, partition: TimePartition, npts: int | None = None) -> TimePoly:
    """Slab-wise L2 projection Pi_r^t v onto polynomials of degree <= r.

    Modal coefficients are (2j+1) <v, Lt_j> on each unit slab.
    """
    if r < 0:
        raise ValueError(f"projection degree must be >= 0, got {r}")
    npts = 2 * (r + 1) if npts is None else npts
    g, w = gauss_interval(npts)
    tab = shifted_legendre_table(r, g)[0]            # (r+1, npts)
    scale = 2.0 * np.arange(r + 1) + 1.0
    coeffs = np.empty((partition.n_slabs, r + 1))
    for n in range(partition.n_slabs):
        t = partition.breakpoints[n] + partition.taus[n] * g
        coeffs[n] = scale * ((tab * w) @ v(t))
    return TimePoly(partition, coeffs)


def ptau_project(q: int, v, dv, partition: TimePartition,
                 npts: int | None = None) -> TimePoly:
    """Degree-q projection P_tau matching v(0), slab-end derivatives, and the
    interior moments of v' against degrees <= q-2; continuous by chaining the
    slab start value.  `v`/`dv` evaluate the function and its derivative.
    """
    if q < 2:
        raise ValueError(f"P_tau needs degree q >= 2, got {q}")
    npts = max(2 * q, 16) if npts is None else npts
    g, w = gauss_interval(npts)
    tab = shifted_legendre_table(q - 2, g)[0] if q >= 2 else None
    coeffs = np.empty((partition.n_slabs, q + 1))
    start = float(v(partition.breakpoints[0]))
    for n in range(partition.n_slabs):
        tau = partition.taus[n]
        t = partition.breakpoints[n] + tau * g
        dvg = np.asarray(dv(t), dtype=float)
        b = np.empty(q)
        for m in range(q - 1):
            b[m] = (2 * m + 1) * tau * ((tab[m] * w) @ dvg)
        b[q - 1] = tau * float(dv(partition.breakpoints[n + 1])) - b[: q - 1].sum()
        a = _integrate_modes(b)
        a[0] = start - (a[1:] @ _ALT_SIGNS[1:a.size])
        coeffs[n] = a
        start = float(a.sum())  # value at slab end; Lt_j(1) = 1
    return TimePoly(partition, coeffs)


_ALT_SIGNS = (-1.0) ** np.arange(64)


def _integrate_modes(b: np.ndarray) -> np.ndarray:
    """Modal coefficients of the primitive of sum_m b_m Lt_m (constant free)."""
    q = b.shape[0]
    a = np.zeros((q + 1,) + b.shape[1:])
    a[1] += b[0] / 2.0
    for m in range(1, q):
        c = b[m] / (2.0 * (2 * m + 1))
        a[m + 1] += c
        a[m - 1] -= c
    return a


# -- stability weight -------------------------------------------------


def zeta(q: int) -> float:
    """Jump-control constant zeta_q = 1/(4(2q+1))."""
    if q < 1:
        raise ValueError(f"need q >= 1, got {q}")
    return 1.0 / (4.0 * (2 * q + 1))


@dataclass(frozen=True)
class SlabWeight:
    """phi_n(t) = theta - lambda_n (t - t_{n-1}) on slab n."""

    theta: float
    lam: float       # lambda_n = zeta_q / tau_n
    t_start: float
    t_end: float

    def __call__(self, t):
        return self.theta - self.lam * (np.asarray(t) - self.t_start)

    @property
    def value_start(self) -> float:
        return self.theta

    @property
    def value_end(self) -> float:
        return self.theta - self.lam * (self.t_end - self.t_start)


def weight_phi(n: int, theta: float, q: int, partition: TimePartition) -> SlabWeight:
    """Slab weight function; requires theta > zeta_q so phi_n stays positive."""
    z = zeta(q)
    if not theta > z:
        raise ValueError(f"theta must exceed zeta_q = {z}, got {theta}")
    if not 1 <= n <= partition.n_slabs:
        raise ValueError(f"slab index {n} outside 1..{partition.n_slabs}")
    tau = partition.taus[n - 1]
    return SlabWeight(theta=theta, lam=z / tau,
                      t_start=float(partition.breakpoints[n - 1]),
                      t_end=float(partition.breakpoints[n]))
