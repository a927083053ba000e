"""Dense operator algebra on open chains of qubits or qutrits.

Operators are plain complex ``numpy`` arrays. Site 1 is the leftmost tensor
factor throughout, and for qubits index 0 is spin up (sigma^z = +1).
"""
from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-8
BRANCH_MARGIN = 0.1

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class OperatorError(ValueError):
    """Raised when an operator violates a structural precondition."""


@dataclass(frozen=True)
class ChainSpec:
    """Open chain of ``n_sites`` sites with ``local_dim`` levels each."""

    n_sites: int
    local_dim: int = 2

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise OperatorError(f"n_sites must be a positive integer, got {self.n_sites}")
        if self.local_dim not in (2, 3):
            raise OperatorError(f"local_dim must be 2 or 3, got {self.local_dim}")

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    @property
    def boundary(self) -> str:
        return "open"

    def even_sites(self):
        return list(range(2, self.n_sites + 1, 2))

    def odd_sites(self):
        return list(range(1, self.n_sites + 1, 2))

    def bonds(self):
        return [(j, j + 1) for j in range(1, self.n_sites)]


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m: np.ndarray, name: str = "operator") -> np.ndarray:
    """Return ``m`` as a complex array after verifying it is Hermitian.

    The tolerance is relative to the largest entry so that strongly driven
    Hamiltonians (entries of order 1e3) are not rejected for rounding noise.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise OperatorError(f"{name} must be a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    err = hermiticity_error(m)
    if not np.isfinite(err) or err > HERMITIAN_TOL * scale:
        raise OperatorError(f"{name} is not Hermitian (max |M - M^dag| = {err:.3e})")
    return m


def pauli(axis: str) -> np.ndarray:
    try:
        return PAULI[axis].copy()
    except KeyError:
        raise OperatorError(f"unknown Pauli axis {axis!r}") from None


def ladder(local_dim: int):
    """Truncated bosonic lowering and raising operators, a|n> = sqrt(n)|n-1>."""
    if local_dim not in (2, 3):
        raise OperatorError(f"ladder operators only for local_dim 2 or 3, got {local_dim}")
    lower = np.diag(np.sqrt(np.arange(1, local_dim)), k=1).astype(complex)
    return lower, lower.conj().T.copy()


def kron(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, site: int, chain: ChainSpec) -> np.ndarray:
    """Place a single-site operator on ``site`` (1-based) of ``chain``."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (chain.local_dim, chain.local_dim):
        raise OperatorError(f"local operator shape {op.shape} does not match local_dim {chain.local_dim}")
    if not 1 <= site <= chain.n_sites:
        raise OperatorError(f"site {site} out of range 1..{chain.n_sites}")
    left = np.eye(chain.local_dim ** (site - 1), dtype=complex)
    right = np.eye(chain.local_dim ** (chain.n_sites - site), dtype=complex)
    return kron(left, op, right)


def site_sum(op: np.ndarray, sites, chain: ChainSpec) -> np.ndarray:
    total = np.zeros((chain.dim, chain.dim), dtype=complex)
    for j in sites:
        total += embed(op, j, chain)
    return total


def expm_hermitian(h: np.ndarray, scale: float) -> np.ndarray:
    """exp(-i * scale * h) for Hermitian ``h`` via its eigendecomposition."""
    h = check_hermitian(h, "expm_hermitian input")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def principal_log_unitary(u: np.ndarray) -> np.ndarray:
    """Hermitian H with exp(-iH) = u and eigenphases in (-pi, pi].

    Refuses inputs whose eigenphases come within ``BRANCH_MARGIN`` of the
    branch cut, where the logarithm would be ambiguous.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise OperatorError("principal_log_unitary needs a square matrix")
    err = unitarity_error(u)
    if err > UNITARY_TOL:
        raise OperatorError(f"input is not unitary (max |U^dag U - 1| = {err:.3e})")
    # the complex Schur form of a normal matrix is diagonal with unitary z
    from scipy.linalg import schur

    t, z = schur(u, output="complex")
    lam = np.diag(t)
    phases = -np.angle(lam)
    if np.any(np.abs(phases) > np.pi - BRANCH_MARGIN):
        raise OperatorError(
            f"eigenphase {np.max(np.abs(phases)):.4f} too close to the branch cut at pi"
        )
    h = (z * phases) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def normalize_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return psi / np.linalg.norm(psi)


def check_normalized(psi: np.ndarray, tol: float = 1e-10, name: str = "state") -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if not np.isfinite(norm) or abs(norm - 1.0) > tol:
        raise OperatorError(f"{name} has norm {norm!r}, expected 1 within {tol}")
    return psi


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<b|a>|^2 for normalized state vectors."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise OperatorError(f"dimension mismatch {a.shape} vs {b.shape}")
    return float(min(1.0, abs(np.vdot(b, a)) ** 2))


def product_state(local_states, local_dim: int | None = None) -> np.ndarray:
    """Tensor product of single-site vectors, site 1 leftmost."""
    vecs = [np.asarray(s, dtype=complex).ravel() for s in local_states]
    if local_dim is not None and any(v.size != local_dim for v in vecs):
        raise OperatorError("local state dimension mismatch")
    return kron(*vecs)


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi
