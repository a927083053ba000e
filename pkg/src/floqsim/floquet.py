"""Rotating-frame couplings, their period averages and the averaged Hamiltonian.

A sublattice p is driven about the unit axis n_p(theta_p, phi_p) with
accumulated rotation angle g_p(t) = chi_p sin(omega t), so that in the frame
U(t) = prod_p exp(-i g_p(t)/2 n_p.sigma) the XY chain becomes

    J sum_j sum_{a,b} xi_ab(t) s^a_{2j} (s^b_{2j-1} + s^b_{2j+1})

with the first index on the even site. The zeroth-order effective Hamiltonian
replaces xi(t) by its period average.
"""
from dataclasses import dataclass, field

import numpy as np
from numpy import cos, sin

from .propagation import PropagationConfig, propagator
from .special import bessel_j0, bisect_root
from .tensor import ChainSpec, OperatorError, check_hermitian, embed, pauli, principal_log_unitary

AXES = "xyz"


@dataclass(frozen=True)
class SublatticeDrive:
    """Drive axis angles and rotation-angle amplitude of one sublattice."""

    theta: float = np.pi / 2
    phi: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        if not self.chi >= 0:
            raise ValueError(f"chi must be non-negative, got {self.chi}")

    @property
    def axis(self) -> np.ndarray:
        return np.array([sin(self.theta) * cos(self.phi), sin(self.theta) * sin(self.phi), cos(self.theta)])


@dataclass(frozen=True)
class DriveConfig:
    omega: float
    even: SublatticeDrive = field(default_factory=SublatticeDrive)
    odd: SublatticeDrive = field(default_factory=SublatticeDrive)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @classmethod
    def ising(cls, omega: float, chi: float):
        """x-drive on the even sublattice only."""
        return cls(omega, even=SublatticeDrive(chi=chi))

    @classmethod
    def uniform_x(cls, omega: float, chi: float):
        return cls(omega, even=SublatticeDrive(chi=chi), odd=SublatticeDrive(chi=chi))

    def angles(self):
        return self.even.theta, self.even.phi, self.odd.theta, self.odd.phi

    def rotation_angles(self, t):
        s = sin(self.omega * np.asarray(t, dtype=float))
        return self.even.chi * s, self.odd.chi * s


@dataclass(frozen=True)
class XiMatrix:
    """3x3 coupling coefficients, rows = even-site axis, columns = odd-site axis."""

    values: np.ndarray
    kind: str = "averaged"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (3, 3):
            raise ValueError(f"XiMatrix needs a 3x3 array, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("XiMatrix entries must be finite")
        if self.kind not in ("instantaneous", "averaged"):
            raise ValueError(f"unknown XiMatrix kind {self.kind!r}")
        object.__setattr__(self, "values", v)

    def entry(self, a: str, b: str) -> float:
        return float(self.values[AXES.index(a), AXES.index(b)])


def _xi_closed_form(te, pe, to, po, ge, go):
    # Closed forms written for the opposite rotation sense; callers pass -g.
    s2 = lambda v: sin(v / 2) ** 2  # noqa: E731
    d = pe - po
    xx = (sin(te)**2*cos(pe)*(cos(go)*cos(to)**2*cos(po)*cos(d) - sin(pe)*sin(go)*cos(to) - cos(go)*sin(po)*sin(d) + sin(to)**2*cos(po)*cos(d))
          + cos(ge)*(cos(go)*(cos(to)**2*cos(po)*(cos(te)**2*cos(pe)*cos(d) + sin(pe)*sin(d)) + sin(po)*(sin(pe)*cos(d) - cos(te)**2*cos(pe)*sin(d)))
                     + sin(te)**2*sin(pe)*cos(pe)*sin(go)*cos(to) + cos(te)**2*cos(pe)*sin(to)**2*cos(po)*cos(d) + sin(pe)*sin(to)**2*cos(po)*sin(d))
          + sin(ge)*cos(te)*(sin(go)*cos(to) - s2(go)*sin(to)**2*sin(2*po)))
    yy = (sin(te)**2*sin(pe)*(sin(po)*cos(d)*(cos(go)*cos(to)**2 + sin(to)**2) + cos(pe)*sin(go)*cos(to) + cos(go)*cos(po)*sin(d))
          + cos(ge)*(cos(go)*(cos(pe)**2*(cos(to)**2*sin(po)**2 + cos(po)**2) + cos(te)**2*sin(pe)*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d)) + sin(pe)*cos(pe)*sin(to)**2*sin(po)*cos(po))
                     - sin(te)**2*sin(pe)*cos(pe)*sin(go)*cos(to) + sin(to)**2*sin(po)*(cos(te)**2*sin(pe)*cos(d) - cos(pe)*sin(d)))
          + sin(ge)*cos(te)*(sin(go)*cos(to) + s2(go)*sin(to)**2*sin(2*po)))
    zz = sin(te)*sin(to)*(cos(d)*(sin(ge)*sin(go) + 2*(1 - cos(ge))*cos(te)*s2(go)*cos(to))
                          + sin(d)*((1 - cos(ge))*cos(te)*sin(go) - 2*sin(ge)*s2(go)*cos(to)))
    xy = (sin(to)**2*sin(po)*(cos(ge)*(cos(te)**2*cos(pe)*cos(d) + sin(pe)*sin(d)) + sin(te)**2*cos(pe)**2*cos(po))
          + sin(po)**2*(sin(te)**2*cos(pe)**2*sin(go)*cos(to) + 0.5*sin(to)**2*(sin(te)**2*sin(2*pe) - 2*sin(ge)*cos(te)))
          + sin(go)*cos(to)*(cos(pe)**2*(cos(ge)*cos(te)**2 + sin(te)**2*cos(po)**2) + cos(ge)*sin(pe)**2)
          + 0.25*cos(go)*(4*cos(ge)*cos(te)**2*cos(pe)*cos(po)*(sin(pe)*cos(po) - cos(pe)*sin(to)**2*sin(po))
                          + 4*s2(ge)*sin(te)**2*sin(2*pe)*cos(to)**2*sin(po)**2 + 4*sin(pe)*cos(pe)*cos(po)**2*(sin(te)**2 - cos(ge))
                          - 4*sin(to)**2*sin(po)*cos(po)*(cos(ge)*sin(pe)**2 + sin(te)**2*cos(pe)**2)
                          - sin(ge)*cos(te)*(2*sin(to)**2*cos(2*po) + cos(2*to) + 3)))
    yx = 0.125*(8*sin(ge)*cos(te)*sin(to)**2*cos(po)**2 + 8*cos(ge)*sin(to)**2*sin(po)*cos(po)*(cos(te)**2*sin(pe)**2 + cos(pe)**2)
                + 2*cos(go)*(4*cos(to)**2*cos(po)*(sin(te)**2*sin(pe)*cos(d) - cos(ge)*cos(pe)*sin(d))
                             + 4*cos(ge)*cos(te)**2*sin(pe)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d))
                             + sin(ge)*cos(te)*(-2*sin(to)**2*cos(2*po) + cos(2*to) + 3)
                             - 4*sin(po)*(cos(ge)*cos(pe)*cos(d) + sin(te)**2*sin(pe)*sin(d)))
                + 8*sin(te)**2*sin(pe)*sin(to)**2*cos(po)*(cos(d) - cos(ge)*cos(pe)*cos(po))
                - 8*sin(te)**2*sin(pe)**2*sin(go)*cos(to) - 2*cos(ge)*sin(go)*cos(to)*(2*sin(te)**2*cos(2*pe) + cos(2*te) + 3))
    yz = sin(to)*(cos(ge)*cos(te)**2*sin(pe)*(2*s2(go)*cos(to)*cos(d) + sin(go)*sin(d))
                  + sin(ge)*cos(te)*(2*s2(go)*cos(to)*cos(po) - sin(go)*sin(po))
                  + cos(d)*(2*sin(te)**2*sin(pe)*s2(go)*cos(to) + cos(ge)*cos(pe)*sin(go))
                  + sin(d)*(sin(te)**2*sin(pe)*sin(go) - 2*cos(ge)*cos(pe)*s2(go)*cos(to)))
    zy = sin(te)*(cos(go)*(sin(ge)*cos(pe)*(cos(to)**2*sin(po)**2 + cos(po)**2) - (cos(ge) - 1)*cos(te)*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d))
                           + sin(ge)*sin(pe)*sin(to)**2*sin(po)*cos(po))
                  - sin(to)**2*sin(po)*((cos(ge) - 1)*cos(te)*cos(d) + sin(ge)*sin(d))
                  - sin(go)*cos(to)*((cos(ge) - 1)*cos(te)*cos(pe) + sin(ge)*sin(pe)))
    xz = sin(to)*(cos(ge)*(cos(d)*(2*cos(te)**2*cos(pe)*s2(go)*cos(to) - sin(pe)*sin(go)) + sin(d)*(2*sin(pe)*s2(go)*cos(to) + cos(te)**2*cos(pe)*sin(go)))
                  + sin(te)**2*cos(pe)*(2*s2(go)*cos(to)*cos(d) + sin(go)*sin(d))
                  - sin(ge)*cos(te)*(2*s2(go)*cos(to)*sin(po) + sin(go)*cos(po)))
    zx = sin(te)*(sin(to)**2*cos(po)*(2*s2(ge)*cos(te)*cos(d) - sin(ge)*sin(d))
                  - cos(go)*(sin(ge)*(cos(to)**2*cos(po)*sin(d) + sin(po)*cos(d)) + (cos(ge) - 1)*cos(te)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)))
                  - sin(go)*cos(to)*(sin(ge)*cos(pe) - (cos(ge) - 1)*cos(te)*sin(pe)))
    shape = np.broadcast(ge, go).shape
    rows = [[xx, xy, xz], [yx, yy, yz], [zx, zy, zz]]
    return np.array([[np.broadcast_to(v, shape) for v in row] for row in rows], dtype=float)


def _xi_bar_closed_form(te, pe, to, po, Je, Jo, Jp, Jm):
    # Je = J0(chi_e), Jo = J0(chi_o), Jp = J0(chi_e + chi_o), Jm = J0(chi_e - chi_o)
    d = pe - po
    xx = ((sin(te)**2*cos(pe)*Jo*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d))
           + sin(to)**2*cos(po)*(Je*(cos(te)**2*cos(pe)*cos(d) + sin(pe)*sin(d)) + sin(te)**2*cos(pe)*cos(d)))
          + Jp/2*(cos(te)**2*cos(pe)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)) + sin(pe)*(cos(to)**2*cos(po)*sin(d) + sin(po)*cos(d)) - cos(te)*cos(to))
          + Jm/2*(cos(te)**2*cos(pe)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)) + sin(pe)*(cos(to)**2*cos(po)*sin(d) + sin(po)*cos(d)) + cos(te)*cos(to)))
    yy = ((sin(te)**2*sin(pe)*Jo*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d))
           + sin(to)**2*sin(po)*(sin(pe)*cos(d)*(cos(te)**2*Je + sin(te)**2) - Je*cos(pe)*sin(d)))
          + Jp/2*(cos(pe)*(cos(pe)*(cos(to)**2*sin(po)**2 + cos(po)**2) + sin(pe)*sin(to)**2*sin(po)*cos(po))
                  + cos(te)**2*sin(pe)*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d)) - cos(te)*cos(to))
          + Jm/2*(cos(pe)*(cos(pe)*(cos(to)**2*sin(po)**2 + cos(po)**2) + sin(pe)*sin(to)**2*sin(po)*cos(po))
                  + cos(te)**2*sin(pe)*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d)) + cos(te)*cos(to)))
    zz = 0.5*sin(te)*sin(to)*cos(d)*(2*cos(te)*cos(to)*(1 - Je - Jo) + (cos(te)*cos(to) - 1)*Jp + (cos(te)*cos(to) + 1)*Jm)
    xy = (1/16)*(sin(to)**2*sin(2*po)*(2*sin(te)**2*(2 - 4*cos(pe)**2*Jo + cos(2*pe)*(Jm + Jp - 2*Je + 2)) + (cos(2*te) + 3)*(2*Je - Jm - Jp))
                 + sin(te)**2*sin(2*pe)*((2*Jo - Jm - Jp)*(2*sin(to)**2*cos(2*po) + cos(2*to) + 3) - 8*(Je - 1)*sin(to)**2*sin(po)**2))
    yx = 0.5*(sin(te)**2*((1 - Je)*sin(2*pe)*sin(to)**2*cos(po)**2 + 2*sin(pe)*Jo*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)))
              + sin(to)**2*sin(2*po)*(sin(pe)**2*(cos(te)**2*Je + sin(te)**2) + Je*cos(pe)**2)
              + Jm*(cos(te)**2*sin(pe)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)) - cos(pe)*(cos(to)**2*cos(po)*sin(d) + sin(po)*cos(d)))
              + Jp*(cos(te)**2*sin(pe)*(cos(to)**2*cos(po)*cos(d) - sin(po)*sin(d)) - cos(pe)*(cos(to)**2*cos(po)*sin(d) + sin(po)*cos(d))))
    yz = 0.5*(sin(2*to)*(sin(pe)*cos(d)*(cos(te)**2*Je - sin(te)**2*(Jo - 1)) - Je*cos(pe)*sin(d))
              - sin(to)*Jm*(cos(te)**2*sin(pe)*cos(to)*cos(d) + cos(te)*sin(po) - cos(pe)*cos(to)*sin(d))
              + sin(to)*Jp*(cos(te)*sin(po) + cos(pe)*cos(to)*sin(d) - cos(te)**2*sin(pe)*cos(to)*cos(d)))
    zy = 0.5*sin(te)*(-cos(te)*(Jm + Jp - 2*Jo)*(cos(to)**2*sin(po)*cos(d) + cos(po)*sin(d))
                      - 2*cos(te)*(Je - 1)*sin(to)**2*sin(po)*cos(d) + sin(pe)*cos(to)*(Jp - Jm))
    xz = 0.5*(sin(2*to)*(cos(pe)*cos(d)*(cos(te)**2*Je - sin(te)**2*(Jo - 1)) + Je*sin(pe)*sin(d))
              - sin(to)*Jp*(cos(te)**2*cos(pe)*cos(to)*cos(d) - cos(te)*cos(po) + sin(pe)*cos(to)*sin(d))
              - sin(to)*Jm*(cos(te)*(cos(te)*cos(pe)*cos(to)*cos(d) + cos(po)) + sin(pe)*cos(to)*sin(d)))
    zx = 0.5*(sin(2*te)*(cos(po)*cos(d)*(cos(to)**2*Jo - (Je - 1)*sin(to)**2) - Jo*sin(po)*sin(d))
              + sin(te)*Jp*(cos(pe)*cos(to) + cos(te)*sin(po)*sin(d) - cos(te)*cos(to)**2*cos(po)*cos(d))
              - sin(te)*Jm*(cos(to)*(cos(te)*cos(to)*cos(po)*cos(d) + cos(pe)) - cos(te)*sin(po)*sin(d)))
    return np.array([[xx, xy, xz], [yx, yy, yz], [zx, zy, zz]], dtype=float)


def xi_series(cfg: DriveConfig, times) -> np.ndarray:
    """Instantaneous couplings at each time, shape (n_times, 3, 3)."""
    ge, go = cfg.rotation_angles(np.atleast_1d(times))
    vals = _xi_closed_form(*cfg.angles(), -ge, -go)
    return np.moveaxis(vals, -1, 0)


def xi_instantaneous(cfg: DriveConfig, t: float) -> XiMatrix:
    return XiMatrix(xi_series(cfg, [t])[0], kind="instantaneous")


def xi_averaged(cfg: DriveConfig) -> XiMatrix:
    ce, co = cfg.even.chi, cfg.odd.chi
    js = [bessel_j0(v) for v in (ce, co, ce + co, ce - co)]
    return XiMatrix(_xi_bar_closed_form(*cfg.angles(), *js), kind="averaged")


def period_average(func, tol: float = 1e-10, min_panels: int = 16, max_panels: int = 2**18):
    """Average of ``func(tau)`` over tau in [0, 2 pi].

    Composite Simpson on successively doubled panel counts with Richardson
    extrapolation; ``func`` must accept an array of tau and return an array
    whose last axis runs over tau.
    """

    def simpson(n):
        tau = np.linspace(0.0, 2 * np.pi, n + 1)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return (np.asarray(func(tau)) @ w) / (3.0 * n)

    n = min_panels
    prev_s = simpson(n)
    prev_r = None
    while n < max_panels:
        n *= 2
        s = simpson(n)
        r = s + (s - prev_s) / 15.0
        if prev_r is not None and np.max(np.abs(r - prev_r)) < tol:
            return r
        prev_s, prev_r = s, r
    raise RuntimeError(f"period average did not converge to {tol} within {max_panels} panels")


def xi_averaged_numeric(cfg: DriveConfig, tol: float = 1e-10) -> XiMatrix:
    """Quadrature oracle for :func:`xi_averaged`."""

    def integrand(tau):
        ge, go = cfg.even.chi * sin(tau), cfg.odd.chi * sin(tau)
        return _xi_closed_form(*cfg.angles(), -ge, -go)

    return XiMatrix(period_average(integrand, tol=tol), kind="averaged")


def build_floquet_hamiltonian(chain: ChainSpec, J: float, xi: XiMatrix) -> np.ndarray:
    if chain.local_dim != 2:
        raise OperatorError("averaged Hamiltonian is built on qubit chains")
    vals = np.asarray(xi.values if isinstance(xi, XiMatrix) else xi, dtype=float)
    if vals.shape != (3, 3) or not np.all(np.isfinite(vals)):
        raise ValueError("xi must be a finite 3x3 matrix")
    h = np.zeros((chain.dim, chain.dim), dtype=complex)
    for i, j in chain.bonds():
        even, odd = (j, i) if j % 2 == 0 else (i, j)
        for a in range(3):
            for b in range(3):
                if vals[a, b] != 0.0:
                    h += vals[a, b] * (embed(pauli(AXES[a]), even, chain) @ embed(pauli(AXES[b]), odd, chain))
    return check_hermitian(J * h, "averaged Hamiltonian")


def calibrate_ising_chi(tol: float = 1e-10) -> float:
    """First zero of J0: the even-sublattice amplitude that removes yy."""
    return bisect_root(bessel_j0, 2.0, 2.8, tol=tol)


def calibrate_xyz_chi(tol: float = 1e-10) -> float:
    """Uniform x-drive amplitude giving couplings (1, 2/3, 1/3)."""

    def yy_excess(chi):
        return xi_averaged(DriveConfig.uniform_x(1.0, chi)).values[1, 1] - 2.0 / 3.0

    chi = bisect_root(yy_excess, 0.5, 1.2, tol=tol)
    xi = xi_averaged(DriveConfig.uniform_x(1.0, chi)).values
    off = xi - np.diag(np.diag(xi))
    if np.max(np.abs(off)) > 1e-10 or abs(xi[2, 2] - 1.0 / 3.0) > 1e-9:
        raise RuntimeError(f"calibration did not reach the target couplings: {xi}")
    return chi


def floquet_from_propagator(h, period: float | None = None, substeps: int = 8192, tol: float = 1e-6) -> np.ndarray:
    """Effective Hamiltonian i log U(T) / T from the exact one-period propagator.

    Convergence is checked by repeating with twice the substeps.
    """
    period = h.period if period is None else period
    if period is None:
        raise ValueError("a drive period is needed")
    u = propagator(h, 0.0, period, PropagationConfig(substeps_per_period=substeps), period=period)
    u2 = propagator(h, 0.0, period, PropagationConfig(substeps_per_period=2 * substeps), period=period)
    h1 = principal_log_unitary(u) / period
    h2 = principal_log_unitary(u2) / period
    dev = float(np.max(np.abs(h1 - h2)))
    if dev > tol * max(1.0, float(np.max(np.abs(h2)))):
        raise RuntimeError(f"one-period propagator not converged: change {dev:.3e} on doubling substeps")
    return h2
