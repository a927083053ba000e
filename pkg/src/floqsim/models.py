"""Hamiltonian builders: XY chain, driven chains, targets and transmon chains."""
from dataclasses import dataclass, field

import numpy as np

from .special import bessel_j0
from .tensor import ChainSpec, OperatorError, check_hermitian, embed, ladder, pauli, site_sum


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """H(t) = static + sum_k c_k(t) O_k with real coefficients and Hermitian O_k.

    Coefficient functions must accept numpy arrays of times. ``period`` is the
    drive period if the explicit time dependence is periodic apart from a slow
    schedule; propagation aligns its step grid to multiples of it.
    """

    chain: ChainSpec
    static: np.ndarray
    drive_terms: tuple = ()
    period: float | None = None
    is_real: bool = field(init=False, default=False)

    def __post_init__(self):
        dim = self.chain.dim
        static = check_hermitian(self.static, "static part")
        if static.shape != (dim, dim):
            raise OperatorError(f"static part has shape {static.shape}, chain needs {(dim, dim)}")
        object.__setattr__(self, "static", static)
        terms = []
        for k, (coef, op) in enumerate(self.drive_terms):
            if not callable(coef):
                raise OperatorError(f"drive term {k}: coefficient is not callable")
            op = check_hermitian(op, f"drive operator {k}")
            if op.shape != (dim, dim):
                raise OperatorError(f"drive operator {k} has shape {op.shape}")
            terms.append((coef, op))
        object.__setattr__(self, "drive_terms", tuple(terms))
        ops = [static] + [op for _, op in terms]
        object.__setattr__(self, "is_real", all(not np.any(op.imag) for op in ops))
        # flattened [static, O_1, ...] so a stack of H(t) is one matrix product
        flat = np.stack(ops).reshape(len(ops), -1)
        object.__setattr__(self, "_flat", flat)
        object.__setattr__(self, "_flat_real", np.ascontiguousarray(flat.real) if self.is_real else None)
        object.__setattr__(self, "_one_norms", np.array([np.abs(op).sum(axis=0).max() for op in ops]))
        if self.period is not None and not self.period > 0:
            raise OperatorError(f"period must be positive, got {self.period}")

    @property
    def dim(self) -> int:
        return self.chain.dim

    def coefficients(self, times) -> np.ndarray:
        """Drive coefficients, shape (n_terms, n_times)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty((len(self.drive_terms), times.size))
        for k, (coef, _) in enumerate(self.drive_terms):
            out[k] = np.broadcast_to(np.asarray(coef(times), dtype=float), times.shape)
        return out

    def evaluate(self, t: float) -> np.ndarray:
        h = self.static.copy()
        for (_, op), c in zip(self.drive_terms, self.coefficients([t])[:, 0]):
            h += c * op
        return h

    def _weights(self, times) -> np.ndarray:
        coefs = self.coefficients(times)
        return np.vstack([np.ones(coefs.shape[1]), coefs])

    def evaluate_many(self, times, real: bool = False) -> np.ndarray:
        """Stack of H(t) for each time, shape (n_times, dim, dim).

        With ``real`` the imaginary parts are dropped, which is exact when
        ``is_real`` holds.
        """
        w = self._weights(times)
        flat = self._flat_real if real and self.is_real else (self._flat.real if real else self._flat)
        return (w.T @ flat).reshape(w.shape[1], self.dim, self.dim)

    def one_norm_bound(self, times) -> np.ndarray:
        """Upper bound on the 1-norm of H(t) at each time."""
        return np.abs(self._weights(times)).T @ self._one_norms


@dataclass(frozen=True)
class AnnealSchedule:
    """Linear field ramp s(t) = 1 - t/t_f, clamped to [0, 1].

    With ``ramp_coupling`` the inter-site coupling is switched on as 1 - s(t)
    while the field is switched off; otherwise the coupling stays on.
    """

    t_final: float
    ramp_coupling: bool = True

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")

    def field(self, t):
        return np.clip(1.0 - np.asarray(t, dtype=float) / self.t_final, 0.0, 1.0)

    def coupling(self, t):
        if self.ramp_coupling:
            return 1.0 - self.field(t)
        return np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class IsingDriveParams:
    """Sublattice drive that turns the XY chain into a transverse Ising chain.

    ``lambda_text`` is the amplitude in the convention where the Bessel
    argument of the even-site rotation is 2*lambda_text.
    """

    J: float
    hz: float
    lambda_text: float
    omega: float

    def __post_init__(self):
        if not self.lambda_text > 0:
            raise ValueError(f"lambda_text must be positive, got {self.lambda_text}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @classmethod
    def from_rotation_angle(cls, J, hz, chi, omega):
        return cls(J=J, hz=hz, lambda_text=chi / 2.0, omega=omega)

    @property
    def chi(self) -> float:
        return 2.0 * self.lambda_text

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def even_field_scale(self) -> float:
        # keeps the averaged even-site z field equal to hz: the z component
        # in the rotating frame averages to (1 + J0(2 chi)) / 2
        return 2.0 / (1.0 + bessel_j0(2.0 * self.chi))

    def x_drive(self, t):
        return self.lambda_text * self.omega * np.cos(self.omega * np.asarray(t, dtype=float))

    def even_z_envelope(self, t):
        return self.even_field_scale * np.cos(self.chi * np.sin(self.omega * np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class XYZDriveParams:
    """Uniform x-drive of rotation-angle amplitude ``chi`` on every site."""

    J: float
    chi: float
    omega: float
    hz: float = 0.0

    def __post_init__(self):
        if not self.chi > 0:
            raise ValueError(f"chi must be positive, got {self.chi}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @classmethod
    def from_bessel_argument(cls, J, arg, omega, hz=0.0):
        """Build from the argument x of J0(x) governing the zz weight, x = 2 chi."""
        return cls(J=J, chi=arg / 2.0, omega=omega, hz=hz)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def x_drive(self, t):
        return 0.5 * self.chi * self.omega * np.cos(self.omega * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class TransmonParams:
    """Transmon chain parameters. Per-site maps are keyed by 1-based site."""

    J: float
    anharmonicity: float
    detuning: dict = field(default_factory=dict)
    drive: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.anharmonicity > 0:
            raise ValueError(f"anharmonicity must be positive, got {self.anharmonicity}")


def _pair_sum(chain: ChainSpec, a: np.ndarray, b: np.ndarray, bonds=None) -> np.ndarray:
    total = np.zeros((chain.dim, chain.dim), dtype=complex)
    for i, j in bonds if bonds is not None else chain.bonds():
        total += embed(a, i, chain) @ embed(b, j, chain)
    return total


def _require_qubits(chain: ChainSpec, min_sites: int = 1):
    if chain.local_dim != 2:
        raise OperatorError("this builder needs a qubit chain (local_dim 2)")
    if chain.n_sites < min_sites:
        raise OperatorError(f"this builder needs at least {min_sites} sites")


def build_xy_chain(chain: ChainSpec, J: float) -> np.ndarray:
    _require_qubits(chain, 2)
    sx, sy = pauli("x"), pauli("y")
    return J * (_pair_sum(chain, sx, sx) + _pair_sum(chain, sy, sy))


def total_spin(chain: ChainSpec, axis: str) -> np.ndarray:
    return site_sum(pauli(axis), range(1, chain.n_sites + 1), chain)


def build_target_ising(chain: ChainSpec, J_sim: float, hz: float) -> np.ndarray:
    _require_qubits(chain, 2)
    sx = pauli("x")
    return J_sim * _pair_sum(chain, sx, sx) + hz * total_spin(chain, "z")


def build_target_xyz(chain: ChainSpec, Jx: float, Jy: float, Jz: float, hz: float = 0.0) -> np.ndarray:
    _require_qubits(chain, 2)
    h = hz * total_spin(chain, "z")
    for J, axis in ((Jx, "x"), (Jy, "y"), (Jz, "z")):
        if J:
            s = pauli(axis)
            h = h + J * _pair_sum(chain, s, s)
    return h


def _coupling_terms(schedule, op):
    """Static part and drive terms for a (possibly scheduled) coupling."""
    if schedule is None or not schedule.ramp_coupling:
        return op, []
    return np.zeros_like(op), [(schedule.coupling, op)]


def _field_coef(schedule, scale, envelope=None):
    if schedule is None and envelope is None:
        return lambda t: np.full(np.shape(t), scale, dtype=float)

    def coef(t):
        c = np.full(np.shape(t), scale, dtype=float)
        if envelope is not None:
            c = c * envelope(t)
        if schedule is not None:
            c = c * schedule.field(t)
        return c

    return coef


def build_ising_driven(chain: ChainSpec, p: IsingDriveParams, schedule: AnnealSchedule | None = None):
    """XY chain with the even-sublattice x-drive and the z fields that make the
    averaged Hamiltonian J sum xx + hz sum z. A schedule ramps both z fields
    (and the coupling, if the schedule says so)."""
    _require_qubits(chain, 2)
    static, terms = _coupling_terms(schedule, build_xy_chain(chain, p.J))
    even, odd = chain.even_sites(), chain.odd_sites()
    terms.append((p.x_drive, site_sum(pauli("x"), even, chain)))
    terms.append((_field_coef(schedule, p.hz, p.even_z_envelope), site_sum(pauli("z"), even, chain)))
    terms.append((_field_coef(schedule, p.hz), site_sum(pauli("z"), odd, chain)))
    return TimeDependentHamiltonian(chain, static, tuple(terms), period=p.period)


def build_xyz_driven(chain: ChainSpec, p: XYZDriveParams, schedule: AnnealSchedule | None = None):
    """XY chain, uniform x-drive of amplitude chi and a (scheduled) z field.

    The field is applied as written in the lab frame, so the drive dresses it
    to an averaged field hz * J0(chi).
    """
    _require_qubits(chain, 2)
    static, terms = _coupling_terms(schedule, build_xy_chain(chain, p.J))
    sites = range(1, chain.n_sites + 1)
    terms.append((p.x_drive, site_sum(pauli("x"), sites, chain)))
    if p.hz:
        terms.append((_field_coef(schedule, p.hz), site_sum(pauli("z"), sites, chain)))
    return TimeDependentHamiltonian(chain, static, tuple(terms), period=p.period)


def build_target_ising_anneal(chain: ChainSpec, J_sim: float, hz: float, schedule: AnnealSchedule):
    """Ideal continuous anneal of the transverse Ising model."""
    sx = pauli("x")
    static, terms = _coupling_terms(schedule, J_sim * _pair_sum(chain, sx, sx))
    terms.append((_field_coef(schedule, hz), total_spin(chain, "z")))
    return TimeDependentHamiltonian(chain, static, tuple(terms))


def build_target_xyz_anneal(chain: ChainSpec, Jx, Jy, Jz, hz, schedule: AnnealSchedule):
    static, terms = _coupling_terms(schedule, build_target_xyz(chain, Jx, Jy, Jz, 0.0))
    terms.append((_field_coef(schedule, hz), total_spin(chain, "z")))
    return TimeDependentHamiltonian(chain, static, tuple(terms))


# transmon chains ---------------------------------------------------------

def _transmon_ops(chain: ChainSpec):
    if chain.local_dim != 3:
        raise OperatorError("transmon chains need local_dim 3")
    a, adag = ladder(3)
    return a, adag


def transmon_hopping(chain: ChainSpec, J: float) -> np.ndarray:
    a, adag = _transmon_ops(chain)
    hop = _pair_sum(chain, adag, a)
    return 2.0 * J * (hop + hop.conj().T)


def transmon_anharmonic(chain: ChainSpec, A: float) -> np.ndarray:
    a, adag = _transmon_ops(chain)
    local = 0.5 * A * (adag @ adag @ a @ a)
    return site_sum(local, range(1, chain.n_sites + 1), chain)


def _quadratures(chain: ChainSpec, sites):
    """(a + a^dag) and i(a - a^dag) summed over ``sites``."""
    a, adag = _transmon_ops(chain)
    return site_sum(a + adag, sites, chain), site_sum(1j * (a - adag), sites, chain)


def _number(chain: ChainSpec, sites):
    a, adag = _transmon_ops(chain)
    return site_sum(adag @ a, sites, chain)


def build_transmon_chain(chain: ChainSpec, p: TransmonParams) -> TimeDependentHamiltonian:
    """2J sum (a^dag a + h.c.) + sum [Delta_j n_j + Omega_j a_j + Omega_j^* a^dag_j]
    + (A/2) sum a^dag a^dag a a, with complex Omega split into two Hermitian
    quadratures."""
    static = transmon_hopping(chain, p.J) + transmon_anharmonic(chain, p.anharmonicity)
    terms = []
    for site, delta in sorted(p.detuning.items()):
        terms.append((delta, _number(chain, [site])))
    for site, omega in sorted(p.drive.items()):
        re_op, im_op = _quadratures(chain, [site])
        # Omega a + Omega^* a^dag = Re(Omega)(a + a^dag) + Im(Omega) i(a - a^dag)
        terms.append((lambda t, f=omega: np.real(f(t)), re_op))
        terms.append((lambda t, f=omega: np.imag(f(t)), im_op))
    return TimeDependentHamiltonian(chain, static, tuple(terms))


def build_transmon_ising_anneal(chain: ChainSpec, p: IsingDriveParams, schedule: AnnealSchedule | None, A: float):
    """Transmon image of the driven Ising anneal (Omega = h^x, Delta = 2 h^z)."""
    if not A > 0:
        raise ValueError(f"anharmonicity must be positive, got {A}")
    hop = transmon_hopping(chain, p.J)
    static, terms = _coupling_terms(schedule, hop)
    static = static + transmon_anharmonic(chain, A)
    even, odd = chain.even_sites(), chain.odd_sites()
    terms.append((p.x_drive, _quadratures(chain, even)[0]))
    terms.append((_field_coef(schedule, 2.0 * p.hz, p.even_z_envelope), _number(chain, even)))
    terms.append((_field_coef(schedule, 2.0 * p.hz), _number(chain, odd)))
    return TimeDependentHamiltonian(chain, static, tuple(terms), period=p.period)


def qubit_to_transmon_isometry(n_sites: int) -> np.ndarray:
    """Columns map qubit basis states into the chain of qutrits.

    Spin up (qubit index 0) goes to |1>, spin down (index 1) to |0>.
    """
    v = np.zeros((3, 2))
    v[1, 0] = 1.0
    v[0, 1] = 1.0
    out = np.ones((1, 1))
    for _ in range(n_sites):
        out = np.kron(out, v)
    return out.astype(complex)


def qubit_state_to_transmon(psi: np.ndarray, n_sites: int) -> np.ndarray:
    return qubit_to_transmon_isometry(n_sites) @ np.asarray(psi, dtype=complex)
