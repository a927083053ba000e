"""Midpoint-exponential time evolution, stroboscopic sampling and anneals."""
import math
from dataclasses import dataclass, field

import numpy as np

from .models import TimeDependentHamiltonian, qubit_state_to_transmon, total_spin
from .tensor import ChainSpec, OperatorError, check_hermitian, check_normalized, fidelity

NORM_TOL = 1e-8
STROBE_TOL = 1e-9
_CHUNK_ELEMENTS = 2**21
# vector steps use a Taylor series of exp(-i H dt) when ||H dt||_1 is below this
TAYLOR_MAX_NORM = 1.0


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagationConfig:
    """Step control. ``substeps_per_period`` applies to driven Hamiltonians,
    ``steps_total`` to Hamiltonians without a drive period."""

    substeps_per_period: int = 256
    steps_total: int | None = None
    scheme: str = "midpoint-exponential"

    def __post_init__(self):
        if self.substeps_per_period < 16:
            raise ValueError(f"substeps_per_period must be >= 16, got {self.substeps_per_period}")
        if self.steps_total is not None and self.steps_total < 1:
            raise ValueError(f"steps_total must be >= 1, got {self.steps_total}")
        if self.scheme != "midpoint-exponential":
            raise ValueError(f"unsupported scheme {self.scheme!r}")

    def refined(self, factor: int = 2) -> "PropagationConfig":
        steps = None if self.steps_total is None else self.steps_total * factor
        return PropagationConfig(self.substeps_per_period * factor, steps)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, dim)
    stroboscopic_indices: np.ndarray
    period: float | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class RunSummary:
    times: np.ndarray
    fidelities: np.ndarray
    magnetization: np.ndarray | None
    final_fidelity: float
    final_time: float
    metadata: dict = field(default_factory=dict)
    stroboscopic_indices: np.ndarray | None = None


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: np.ndarray
    degeneracy: int
    gap: float

    @property
    def degenerate(self) -> bool:
        return self.degeneracy > 1


@dataclass(frozen=True)
class ConvergenceCertificate:
    substeps: int
    deviation: float
    tol: float
    steps_total: int | None = None

    @property
    def passed(self) -> bool:
        return bool(self.deviation < self.tol)

    def as_dict(self):
        out = {"substeps": self.substeps, "refined_substeps": 2 * self.substeps,
               "deviation": self.deviation, "tol": self.tol, "passed": self.passed}
        if self.steps_total is not None:
            out.update(steps_total=self.steps_total, refined_steps_total=2 * self.steps_total)
        return out


def time_grid(t0: float, t1: float, cfg: PropagationConfig, period: float | None = None) -> np.ndarray:
    """Step boundaries from t0 to t1. With a period, every multiple of it in
    between is a boundary and no step is longer than period / M."""
    if t0 == t1:
        return np.array([t0], dtype=float)
    lo, hi = min(t0, t1), max(t0, t1)
    if period is None:
        n = cfg.steps_total or 1
        grid = np.linspace(lo, hi, n + 1)
    else:
        h = period / cfg.substeps_per_period
        k0, k1 = math.floor(lo / period + STROBE_TOL), math.ceil(hi / period - STROBE_TOL)
        nodes = [lo] + [k * period for k in range(k0 + 1, k1) if lo < k * period < hi] + [hi]
        pieces = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            n = max(1, math.ceil((b - a) / h - 1e-9))
            pieces.append(np.linspace(a, b, n + 1)[:-1])
        grid = np.concatenate(pieces + [np.array([hi])])
    return grid if t1 > t0 else grid[::-1].copy()


def stroboscopic_mask(times: np.ndarray, period: float | None) -> np.ndarray:
    if period is None:
        return np.zeros(len(times), dtype=bool)
    x = np.asarray(times) / period
    return np.abs(x - np.round(x)) < STROBE_TOL * np.maximum(1.0, np.abs(x))


def _taylor_terms(bound: float) -> int:
    """Smallest K with bound**(K+1) / (K+1)! <= 1e-16, the truncation error
    of a K-term Taylor series of exp(-i H dt) when ||H dt|| <= bound."""
    k, rem = 0, bound
    while rem > 1e-16:
        k += 1
        rem *= bound / (k + 1)
    return k


def _taylor_step(hm: np.ndarray, x: np.ndarray, dt: float, terms: int) -> np.ndarray:
    out = x.copy()
    term = x
    for k in range(1, terms + 1):
        term = hm @ term * (-1j * dt / k)
        out += term
    return out


def _evolve(h: TimeDependentHamiltonian, x: np.ndarray, grid: np.ndarray, keep: np.ndarray):
    """Apply midpoint steps along ``grid`` to ``x``; return copies at ``keep``.

    A state vector is stepped with a Taylor series when every step in a chunk
    has ||H dt||_1 <= TAYLOR_MAX_NORM; otherwise, and for operator
    propagation, each step is exponentiated through eigh.
    """
    dim = h.dim
    kept = [x.copy()] if keep[0] else []
    mids = 0.5 * (grid[1:] + grid[:-1])
    dts = np.diff(grid)
    chunk = max(1, min(4096, _CHUNK_ELEMENTS // (dim * dim)))
    static_only = not h.drive_terms
    real = h.is_real
    for start in range(0, len(dts), chunk):
        stop = min(start + chunk, len(dts))
        step_dts = dts[start:stop]
        if x.ndim == 1:
            bound = np.max(h.one_norm_bound(mids[start:stop]) * np.abs(step_dts))
            if bound <= TAYLOR_MAX_NORM:
                terms = _taylor_terms(bound)
                # complex stack: complex @ complex beats matmul casting a real hm per term
                hs = h.evaluate_many(mids[start:stop])
                for k in range(stop - start):
                    x = _taylor_step(hs[k], x, step_dts[k], terms)
                    if keep[start + k + 1]:
                        kept.append(x.copy())
                continue
        if static_only:
            base = h.static.real if real else h.static
            hs = np.broadcast_to(base, (stop - start, dim, dim))
        else:
            hs = h.evaluate_many(mids[start:stop], real=real)
        w, v = np.linalg.eigh(hs)
        wdt = w * step_dts[:, None]
        vt = np.conj(np.swapaxes(v, -1, -2))
        if real:
            # two real products instead of one complex product
            us = (v * np.cos(wdt)[:, None, :]) @ vt - 1j * ((v * np.sin(wdt)[:, None, :]) @ vt)
        else:
            us = (v * np.exp(-1j * wdt)[:, None, :]) @ vt
        for k in range(stop - start):
            x = us[k] @ x
            if keep[start + k + 1]:
                kept.append(x.copy())
    if not np.all(np.isfinite(x)):
        raise PropagationError("non-finite amplitudes during propagation")
    return x, kept


def propagate(h: TimeDependentHamiltonian, psi0, t0: float, t1: float,
              cfg: PropagationConfig | None = None, period: float | None = None,
              sample_every: int | None = None) -> Trajectory:
    """Evolve ``psi0`` from t0 to t1 (t1 < t0 runs backwards).

    Samples are stored at t0, t1, every stroboscopic time and, if given,
    every ``sample_every`` steps.
    """
    cfg = cfg or PropagationConfig()
    period = h.period if period is None else period
    psi0 = check_normalized(np.asarray(psi0, dtype=complex).ravel(), NORM_TOL, "initial state")
    if psi0.size != h.dim:
        raise OperatorError(f"state dimension {psi0.size} does not match Hamiltonian {h.dim}")
    grid = time_grid(t0, t1, cfg, period)
    strobe = stroboscopic_mask(grid, period)
    keep = strobe.copy()
    keep[0] = keep[-1] = True
    if sample_every:
        keep[::sample_every] = True
    _, kept = _evolve(h, psi0, grid, keep)
    states = np.array(kept)
    norms = np.linalg.norm(states, axis=1)
    if np.max(np.abs(norms - 1.0)) > NORM_TOL:
        raise PropagationError(f"norm drift {np.max(np.abs(norms - 1.0)):.3e} exceeds {NORM_TOL}")
    times = grid[keep]
    return Trajectory(times, states, np.flatnonzero(strobe[keep]), period)


def propagator(h: TimeDependentHamiltonian, t0: float, t1: float,
               cfg: PropagationConfig | None = None, period: float | None = None) -> np.ndarray:
    """Full evolution operator U(t1, t0)."""
    cfg = cfg or PropagationConfig()
    period = h.period if period is None else period
    grid = time_grid(t0, t1, cfg, period)
    keep = np.zeros(len(grid), dtype=bool)
    u, _ = _evolve(h, np.eye(h.dim, dtype=complex), grid, keep)
    return u


def evolve_static(h: np.ndarray, psi0, times) -> np.ndarray:
    """States exp(-i h t) psi0 for each t, shape (n_times, dim)."""
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    c = v.conj().T @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * c) @ v.T


def stroboscopic_fidelities(traj: Trajectory, target_h: np.ndarray, psi0) -> np.ndarray:
    """Overlap at each stroboscopic sample with evolution under ``target_h``."""
    idx = traj.stroboscopic_indices
    if len(idx) == 0:
        raise ValueError("trajectory has no stroboscopic samples")
    t = traj.times[idx] - traj.times[0]
    ideal = evolve_static(target_h, psi0, t)
    return np.array([fidelity(traj.states[i], ideal[k]) for k, i in enumerate(idx)])


def magnetization(psi, chain: ChainSpec, axis: str) -> float:
    """<psi| sum_j sigma^axis_j |psi> / N on a qubit chain."""
    if chain.local_dim != 2:
        raise OperatorError("magnetization is defined on qubit chains")
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(np.vdot(psi, total_spin(chain, axis) @ psi))) / chain.n_sites


def magnetizations(states, chain: ChainSpec) -> np.ndarray:
    """(M_x, M_y, M_z) for each state, shape (n_states, 3)."""
    states = np.atleast_2d(states)
    out = np.empty((len(states), 3))
    for k, axis in enumerate("xyz"):
        op = total_spin(chain, axis)
        out[:, k] = np.real(np.einsum("ni,ij,nj->n", states.conj(), op, states)) / chain.n_sites
    return out


def ground_state(h: np.ndarray, degeneracy_tol: float = 1e-10) -> GroundState:
    """Lowest eigenpair with the first non-negligible amplitude made real positive.

    A degenerate ground space is reported through ``degeneracy``; the state
    returned is then one arbitrary vector of that space.
    """
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    psi = v[:, 0].copy()
    lead = np.flatnonzero(np.abs(psi) > 1e-12)[0]
    psi *= np.abs(psi[lead]) / psi[lead]
    degeneracy = int(np.sum(w - w[0] < degeneracy_tol))
    gap = float(w[degeneracy] - w[0]) if degeneracy < len(w) else 0.0
    return GroundState(float(w[0]), psi, degeneracy, gap)


def ground_space(h: np.ndarray, degeneracy_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the lowest eigenspace."""
    w, v = np.linalg.eigh(check_hermitian(h))
    return v[:, w - w[0] < degeneracy_tol]


def ghz_target(n_sites: int) -> np.ndarray:
    """(|+>^N + |->^N)/sqrt(2) with |+-> = (|down> +- |up>)/sqrt(2)."""
    if n_sites < 2:
        raise ValueError("GHZ target needs at least 2 sites")
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    plus, minus = (down + up) / np.sqrt(2), (down - up) / np.sqrt(2)
    a, b = np.ones(1), np.ones(1)
    for _ in range(n_sites):
        a, b = np.kron(a, plus), np.kron(b, minus)
    return ((a + b) / np.sqrt(2)).astype(complex)


def all_down(chain: ChainSpec) -> np.ndarray:
    """Every site in spin down: qubit index 1, or the qutrit ground level."""
    local = np.zeros(chain.local_dim, dtype=complex)
    local[1 if chain.local_dim == 2 else 0] = 1.0
    psi = np.ones(1, dtype=complex)
    for _ in range(chain.n_sites):
        psi = np.kron(psi, local)
    return psi


def subspace_fidelity(states, target) -> np.ndarray:
    """|<target|psi>|^2, or the weight in the span of target's columns."""
    states = np.atleast_2d(states)
    target = np.asarray(target, dtype=complex)
    if target.ndim == 1:
        target = target[:, None]
    amps = states.conj() @ target
    return np.clip(np.sum(np.abs(amps) ** 2, axis=1), 0.0, 1.0)


def run_anneal(h: TimeDependentHamiltonian, psi0, t_final: float, cfg: PropagationConfig | None = None,
               target=None, sample_every: int | None = None) -> RunSummary:
    """Propagate 0 -> t_final and track the overlap with ``target``.

    ``target`` defaults to the GHZ state (embedded in the qutrit space for
    transmon chains); a matrix target means its column span. For driven
    Hamiltonians the final fidelity is read at the last stroboscopic time not
    after t_final, where the lab and rotating frames coincide.
    """
    chain = h.chain
    if target is None:
        target = ghz_target(chain.n_sites)
        if chain.local_dim == 3:
            target = qubit_state_to_transmon(target, chain.n_sites)
        target_kind = "ghz"
    else:
        target_kind = "subspace" if np.ndim(target) == 2 and np.shape(target)[1] > 1 else "state"
    traj = propagate(h, psi0, 0.0, t_final, cfg, sample_every=sample_every)
    fids = subspace_fidelity(traj.states, target)
    if h.period is not None and len(traj.stroboscopic_indices):
        i_final = int(traj.stroboscopic_indices[-1])
        report = "last_stroboscopic"
    else:
        i_final = len(traj.times) - 1
        report = "final"
    mags = magnetizations(traj.states, chain) if chain.local_dim == 2 else None
    meta = {"target": target_kind, "report_time": report, "t_final": t_final,
            "n_samples": len(traj.times)}
    return RunSummary(traj.times, fids, mags, float(fids[i_final]), float(traj.times[i_final]), meta,
                      traj.stroboscopic_indices)


def certify(run, cfg: PropagationConfig, tol: float = 1e-6, max_refinements: int = 0) -> tuple:
    """Compare ``run(cfg)`` with ``run(cfg.refined())``; ``run`` returns an
    array of the reported numbers.

    If the change exceeds ``tol`` the resolution is doubled again, up to
    ``max_refinements`` extra times. Returns (coarse result, refined result,
    certificate) for the last pair compared.
    """
    coarse = np.asarray(run(cfg), dtype=float)
    for attempt in range(max_refinements + 1):
        fine_cfg = cfg.refined()
        fine = np.asarray(run(fine_cfg), dtype=float)
        dev = float(np.max(np.abs(coarse - fine))) if coarse.size else 0.0
        cert = ConvergenceCertificate(cfg.substeps_per_period, dev, tol, cfg.steps_total)
        if cert.passed or attempt == max_refinements:
            return coarse, fine, cert
        cfg, coarse = fine_cfg, fine
