"""Trotterized (digital) simulation built from XY gates and single-qubit rotations,
plus the multiplicative gate-error budget."""
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .models import AnnealSchedule, total_spin
from .propagation import RunSummary, all_down, ghz_target, subspace_fidelity
from .tensor import ChainSpec, embed, expm_hermitian, pauli

LAYER_TAGS = ("XY", "XZ", "YZ", "Z", "RX", "RX_DAG")
XYZ_LAYERS = ("XY", "XZ", "YZ", "Z")
XYZ_SPLIT_ALPHAS = (2.0 / 3.0, 1.0 / 3.0, 0.0)


@dataclass(frozen=True)
class TrotterPlan:
    n_steps: int
    t_total: float
    layer_order: tuple = XYZ_LAYERS
    alphas: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")
        bad = [t for t in self.layer_order if t not in LAYER_TAGS]
        if bad:
            raise ValueError(f"unknown layer tags {bad}")
        if len(self.alphas) != 3 or not all(math.isfinite(a) for a in self.alphas):
            raise ValueError(f"alphas must be three finite numbers, got {self.alphas}")

    @property
    def dt(self) -> float:
        return self.t_total / self.n_steps


@dataclass(frozen=True)
class ErrorModel:
    eps: float
    c_gate: float = 35.0

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")

    @staticmethod
    def gates_per_step(n_sites: int) -> int:
        return 5 * n_sites - 4

    def step_error(self, n_sites: int) -> float:
        return self.gates_per_step(n_sites) * self.eps

    def t_gate(self, anharmonicity: float) -> float:
        return self.c_gate / anharmonicity


@dataclass(frozen=True)
class NTrotterChoice:
    n_opt: int | None
    infidelity: float | None
    feasible: bool
    max_steps: int | None = None


def trotter_step_time(n_sites: int, t_gate: float) -> float:
    """Wall-clock time of one Ising step: two serial passes of XY gates over
    the N-1 bonds plus three single-qubit layers."""
    return (2 * (n_sites - 1) + 3) * t_gate


def max_trotter_steps(t_final: float, n_sites: int, t_gate: float) -> int:
    return math.floor(t_final / trotter_step_time(n_sites, t_gate) + 1e-12)


def _bond_sum(chain: ChainSpec, a: str, b: str, bonds) -> np.ndarray:
    pa, pb = pauli(a), pauli(b)
    h = np.zeros((chain.dim, chain.dim), dtype=complex)
    for i, j in bonds:
        h += embed(pa, i, chain) @ embed(pa, j, chain) + embed(pb, i, chain) @ embed(pb, j, chain)
    return h


def _rotation(chain: ChainSpec, sites, axis: str, angle: float) -> np.ndarray:
    """exp(-i angle/2 sum_{j in sites} sigma^axis_j)."""
    u = np.eye(chain.dim, dtype=complex)
    for j in sites:
        u = u @ expm_hermitian(embed(pauli(axis), j, chain), angle / 2)
    return u


@lru_cache(maxsize=32)
def _chain_operators(chain: ChainSpec) -> dict:
    """Fixed operators reused by every step on ``chain``."""
    bonds = chain.bonds()
    sites = range(1, chain.n_sites + 1)
    ops = {
        "xy_all": _bond_sum(chain, "x", "y", bonds),
        "xy_odd": _bond_sum(chain, "x", "y", bonds[0::2]),
        "xy_even": _bond_sum(chain, "x", "y", bonds[1::2]),
        "z": total_spin(chain, "z"),
        "flip": _rotation(chain, chain.even_sites(), "x", np.pi),
        "rx": _rotation(chain, sites, "x", np.pi / 2),
        "ry": _rotation(chain, sites, "y", np.pi / 2),
    }
    for v in ops.values():
        v.setflags(write=False)
    return ops


def trotter_step_ising(chain: ChainSpec, J: float, hz_effective: float, dt: float,
                       layout: str = "layered") -> np.ndarray:
    """One digital step towards exp(-i dt (J sum xx + hz sum z)).

    Each XY pass carries J/2; conjugating the second pass by pi x-rotations on
    even sites flips the sign of yy, so xx adds up and yy cancels. In the
    ``layered`` layout the two passes act on odd bonds (1,2),(3,4),... and then
    on even bonds (2,3),...; ``joint`` applies them to all bonds at once.
    """
    ops = _chain_operators(chain)
    flip = ops["flip"]
    if layout == "layered":
        groups = [ops["xy_odd"], ops["xy_even"]]
    elif layout == "joint":
        groups = [ops["xy_all"]]
    else:
        raise ValueError(f"unknown layout {layout!r}")
    u = np.eye(chain.dim, dtype=complex)
    for h_xy in groups:
        u_xy = expm_hermitian(h_xy, 0.5 * J * dt)
        # gate sequence U_XY, R_x, U_XY, R_x^dag
        u = flip.conj().T @ u_xy @ flip @ u_xy @ u
    return expm_hermitian(ops["z"], hz_effective * dt) @ u


def xyz_layers(chain: ChainSpec, J: float, alphas, hz_effective: float, dt: float) -> dict:
    """Unitaries for each layer tag. XZ and YZ are XY gates dressed by pi/2
    rotations about x and y respectively."""
    a_xy, a_xz, a_yz = alphas
    ops = _chain_operators(chain)
    h_xy, rx, ry = ops["xy_all"], ops["rx"], ops["ry"]
    layers = {
        "XY": expm_hermitian(h_xy, a_xy * J * dt),
        # rx^dag (xx + yy) rx = xx + zz,  ry^dag (xx + yy) ry = zz + yy
        "XZ": rx.conj().T @ expm_hermitian(h_xy, a_xz * J * dt) @ rx,
        "YZ": ry.conj().T @ expm_hermitian(h_xy, a_yz * J * dt) @ ry,
        "Z": expm_hermitian(ops["z"], hz_effective * dt),
        "RX": ops["flip"],
        "RX_DAG": ops["flip"].conj().T,
    }
    return layers


def trotter_step_xyz(chain: ChainSpec, J: float, alphas, hz_effective: float, dt: float,
                     layer_order=XYZ_LAYERS) -> np.ndarray:
    """Apply the layers in ``layer_order`` (first tag acts first)."""
    bad = [t for t in layer_order if t not in LAYER_TAGS]
    if bad:
        raise ValueError(f"unknown layer tags {bad}")
    layers = xyz_layers(chain, J, alphas, hz_effective, dt)
    u = np.eye(chain.dim, dtype=complex)
    for tag in layer_order:
        u = layers[tag] @ u
    return u


def schedule_samples(schedule: AnnealSchedule, n_steps: int, sampling: str = "midpoint") -> np.ndarray:
    """Times at which step k reads the schedule."""
    dt = schedule.t_final / n_steps
    k = np.arange(n_steps)
    if sampling == "midpoint":
        return (k + 0.5) * dt
    if sampling == "start":
        return k * dt
    if sampling == "end":
        return (k + 1) * dt
    raise ValueError(f"unknown sampling {sampling!r}")


def digital_anneal(chain: ChainSpec, plan: TrotterPlan, schedule: AnnealSchedule, hz: float, J: float,
                   model: str = "ising", target=None, sampling: str = "midpoint",
                   layout: str = "layered") -> RunSummary:
    """Digitized anneal from all spins down.

    Step k uses the field s(t_k) hz and the coupling c(t_k) J with t_k from
    ``sampling``. The target defaults to the GHZ state for ``ising``; the
    ``xyz`` model needs an explicit target.
    """
    if model not in ("ising", "xyz"):
        raise ValueError(f"unknown model {model!r}")
    if target is None:
        if model == "xyz":
            raise ValueError("xyz anneals need an explicit target state")
        target = ghz_target(chain.n_sites)
    dt = schedule.t_final / plan.n_steps
    ts = schedule_samples(schedule, plan.n_steps, sampling)
    fields = hz * schedule.field(ts)
    couplings = J * schedule.coupling(ts)
    psi = all_down(chain)
    states = [psi]
    for f, c in zip(fields, couplings):
        if model == "ising":
            u = trotter_step_ising(chain, c, f, dt, layout)
        else:
            u = trotter_step_xyz(chain, c, plan.alphas, f, dt, plan.layer_order)
        psi = u @ psi
        states.append(psi)
    states = np.array(states)
    fids = subspace_fidelity(states, target)
    times = np.arange(plan.n_steps + 1) * dt
    meta = {"sampling": sampling, "model": model, "n_steps": plan.n_steps}
    if model == "ising":
        meta["layout"] = layout
    else:
        meta["layer_order"] = list(plan.layer_order)
    return RunSummary(times, fids, None, float(fids[-1]), float(times[-1]), meta)


def optimize_step_order(chain: ChainSpec, J: float, alphas, schedule: AnnealSchedule, n_steps: int,
                        hz: float, target, sampling: str = "midpoint", tie_tol: float = 1e-12):
    """Try all 24 orders of the XY, XZ, YZ and Z layers.

    Returns (best order, its final fidelity, list of (order, fidelity) for
    every order in lexicographic order). Ties within ``tie_tol`` go to the
    lexicographically first order.
    """
    results = []
    for order in sorted(itertools.permutations(XYZ_LAYERS)):
        plan = TrotterPlan(n_steps, schedule.t_final, order, tuple(alphas))
        run = digital_anneal(chain, plan, schedule, hz, J, model="xyz", target=target, sampling=sampling)
        results.append((order, run.final_fidelity))
    best_f = max(f for _, f in results)
    best = next(o for o, f in results if f >= best_f - tie_tol)
    return best, best_f, results


def total_fidelity(em: ErrorModel, n_sites: int, n_steps: int, eps_dig: float) -> float:
    """(1 - (5N-4) eps)^N_Tr (1 - eps_dig)."""
    return (1.0 - em.step_error(n_sites)) ** n_steps * (1.0 - eps_dig)


def optimize_n_trotter(em: ErrorModel, n_sites: int, eps_dig_table: dict, max_steps: int | None = None) -> NTrotterChoice:
    """Step count minimizing 1 - F_tot over the table, honouring ``max_steps``."""
    if not eps_dig_table:
        raise ValueError("eps_dig_table is empty")
    feasible = {n: e for n, e in eps_dig_table.items() if max_steps is None or n <= max_steps}
    if not feasible:
        return NTrotterChoice(None, None, False, max_steps)
    best = min(sorted(feasible), key=lambda n: 1.0 - total_fidelity(em, n_sites, n, feasible[n]))
    return NTrotterChoice(best, 1.0 - total_fidelity(em, n_sites, best, feasible[best]), True, max_steps)


def digital_dynamics(chain: ChainSpec, J: float, hz: float, t_total: float, n_steps: int, psi0,
                     layout: str = "layered") -> np.ndarray:
    """States after each of ``n_steps`` Ising steps with fixed couplings,
    shape (n_steps + 1, dim)."""
    u = trotter_step_ising(chain, J, hz, t_total / n_steps, layout)
    psi = np.asarray(psi0, dtype=complex)
    states = [psi]
    for _ in range(n_steps):
        psi = u @ psi
        states.append(psi)
    return np.array(states)
