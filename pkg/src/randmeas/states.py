"""Dense n-qubit density matrices and the named states used throughout.

Conventions: qubit 1 is the most significant (leftmost) tensor factor and
all party indices are 1-based.  States are kept as full 2^n x 2^n complex
matrices; nothing here is sparse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: Dense matrices grow as 4^n; constructions beyond this size are refused.
MAX_QUBITS = 8

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
UNITARITY_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated n-qubit density matrix.

    Validation happens at construction: the matrix must be Hermitian and
    unit-trace within 1e-10 and positive semidefinite up to an eigenvalue
    floor of -1e-10.  Instances are immutable (the stored array is marked
    read-only), so they are safe to share across workers.
    """

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.n_qubits
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {n!r}")
        if n > MAX_QUBITS:
            raise ValueError(
                f"n_qubits={n} exceeds the configured dense-matrix limit "
                f"MAX_QUBITS={MAX_QUBITS}"
            )
        mat = np.array(self.matrix, dtype=complex)
        dim = 2**n
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match 2^{n} x 2^{n}"
            )
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > HERMITICITY_ATOL:
            raise ValueError(f"matrix is not Hermitian (deviation {herm_dev:.3e})")
        trace_dev = abs(mat.trace() - 1.0)
        if trace_dev > TRACE_ATOL:
            raise ValueError(f"matrix trace deviates from 1 by {trace_dev:.3e}")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < EIGENVALUE_FLOOR:
            raise ValueError(
                f"matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n_qubits", int(n))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @classmethod
    def from_vector(cls, amplitudes) -> "DensityMatrix":
        """Build the pure state |psi><psi| from a (normalized) amplitude vector."""
        psi = np.asarray(amplitudes, dtype=complex).ravel()
        dim = psi.size
        n = int(round(np.log2(dim)))
        if 2**n != dim:
            raise ValueError(f"amplitude vector length {dim} is not a power of 2")
        norm = np.linalg.norm(psi)
        if norm < 1e-12:
            raise ValueError("amplitude vector is numerically zero")
        psi = psi / norm
        return cls(n, np.outer(psi, psi.conj()))


# ---------------------------------------------------------------------------
# Named states
# ---------------------------------------------------------------------------

def product_zero(n: int) -> DensityMatrix:
    """|0...0><0...0| on n qubits."""
    _check_qubit_count("n", n, minimum=1)
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = 1.0
    return DensityMatrix.from_vector(vec)


def bell_psi_minus() -> DensityMatrix:
    """The singlet (|01> - |10>)/sqrt(2)."""
    return DensityMatrix.from_vector([0.0, 1.0, -1.0, 0.0])


def ghz(n: int) -> DensityMatrix:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    _check_qubit_count("n", n, minimum=2)
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = vec[-1] = 1.0
    return DensityMatrix.from_vector(vec)


def w_state(n: int) -> DensityMatrix:
    """Equal superposition of the n one-excitation basis states."""
    _check_qubit_count("n", n, minimum=2)
    vec = np.zeros(2**n, dtype=complex)
    for j in range(n):
        vec[1 << (n - 1 - j)] = 1.0
    return DensityMatrix.from_vector(vec)


def cluster_linear() -> DensityMatrix:
    """Four-qubit linear cluster state: CZ chain applied to |++++>.

    Amplitude of basis state b picks up (-1) for every adjacent 11 pair.
    """
    vec = np.empty(16, dtype=complex)
    for b in range(16):
        bits = [(b >> (3 - j)) & 1 for j in range(4)]
        sign = 1
        for j in range(3):
            if bits[j] and bits[j + 1]:
                sign = -sign
        vec[b] = sign * 0.25
    return DensityMatrix.from_vector(vec)


def werner(p: float) -> DensityMatrix:
    """Mixture p |psi-><psi-| + (1-p) I/4 of the singlet with white noise."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parameter p must lie in [0, 1], got {p}")
    singlet = bell_psi_minus().matrix
    return DensityMatrix(2, p * singlet + (1.0 - p) * np.eye(4) / 4.0)


def _phi_plus_vec() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def trisep4() -> DensityMatrix:
    """Triseparable four-qubit state (|00>+|11>)/sqrt(2) x |0> x |0>."""
    e0 = np.array([1.0, 0.0], dtype=complex)
    vec = np.kron(np.kron(_phi_plus_vec(), e0), e0)
    return DensityMatrix.from_vector(vec)


def bisep4(phi: float = 0.2) -> DensityMatrix:
    """Biseparable four-qubit state (|00>+|11>)/sqrt(2) x (sin(phi)|00> + cos(phi)|11>)."""
    phi = float(phi)
    second = np.array([np.sin(phi), 0.0, 0.0, np.cos(phi)], dtype=complex)
    return DensityMatrix.from_vector(np.kron(_phi_plus_vec(), second))


#: Parameter names of every named state kind.
STATE_KINDS = {
    "product_zero": ("n",),
    "bell": (),
    "ghz": ("n",),
    "w": ("n",),
    "cluster_linear": ("n",),
    "werner": ("p",),
    "trisep4": (),
    "bisep4": ("phi",),
    "custom": ("matrix",),
}


@dataclass(frozen=True, eq=False)
class StateSpec:
    """Symbolic description of a state: a kind name plus numeric parameters.

    ``custom`` carries an explicit matrix instead of parameters.
    """

    kind: str
    params: tuple = ()
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValueError(
                f"unknown state kind {self.kind!r}; valid kinds: "
                + ", ".join(sorted(k for k in STATE_KINDS))
            )
        object.__setattr__(self, "params", tuple(self.params))


def make_state(spec: StateSpec) -> DensityMatrix:
    """Construct the density matrix described by ``spec``."""
    kind, params = spec.kind, spec.params
    if kind == "custom":
        if spec.matrix is None:
            raise ValueError("custom StateSpec requires a matrix")
        mat = np.asarray(spec.matrix)
        n = int(round(np.log2(mat.shape[0])))
        return DensityMatrix(n, mat)
    if kind == "bell":
        _expect_params(kind, params, 0)
        return bell_psi_minus()
    if kind == "trisep4":
        _expect_params(kind, params, 0)
        return trisep4()
    if kind == "product_zero":
        _expect_params(kind, params, 1)
        return product_zero(_as_int("n", params[0]))
    if kind == "ghz":
        _expect_params(kind, params, 1)
        return ghz(_as_int("n", params[0]))
    if kind == "w":
        _expect_params(kind, params, 1)
        return w_state(_as_int("n", params[0]))
    if kind == "cluster_linear":
        _expect_params(kind, params, 1)
        n = _as_int("n", params[0])
        if n != 4:
            raise ValueError(f"parameter n must equal 4 for cluster_linear, got {n}")
        return cluster_linear()
    if kind == "werner":
        _expect_params(kind, params, 1)
        return werner(float(params[0]))
    if kind == "bisep4":
        _expect_params(kind, params, 1)
        return bisep4(float(params[0]))
    raise ValueError(f"unknown state kind {kind!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Tensor product a (x) b; a's qubits come first."""
    return DensityMatrix(a.n_qubits + b.n_qubits, np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduce ``rho`` to the parties in ``keep`` (1-based indices).

    The marginal's qubits are ordered by ascending party index.  Keeping
    every party returns ``rho`` unchanged.
    """
    n = rho.n_qubits
    keep_t = tuple(sorted({int(k) for k in keep}))
    if not keep_t:
        raise ValueError("keep must name at least one party")
    if keep_t[0] < 1 or keep_t[-1] > n:
        raise ValueError(f"keep indices {keep_t} outside 1..{n}")
    if len(keep_t) == n:
        return rho
    tensor_form = rho.matrix.reshape((2,) * (2 * n))
    remaining = n
    for party in sorted(set(range(1, n + 1)) - set(keep_t), reverse=True):
        axis = party - 1
        tensor_form = np.trace(tensor_form, axis1=axis, axis2=axis + remaining)
        remaining -= 1
    dim = 2 ** len(keep_t)
    return DensityMatrix(len(keep_t), tensor_form.reshape(dim, dim))


def purity_direct(rho: DensityMatrix) -> float:
    """tr(rho^2), computed directly from the matrix."""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def apply_local_unitaries(rho: DensityMatrix, unitaries) -> DensityMatrix:
    """Conjugate ``rho`` by U_1 (x) ... (x) U_n, one 2x2 unitary per qubit."""
    us = [np.asarray(u, dtype=complex) for u in unitaries]
    if len(us) != rho.n_qubits:
        raise ValueError(
            f"expected {rho.n_qubits} unitaries (one per qubit), got {len(us)}"
        )
    for j, u in enumerate(us, start=1):
        if u.shape != (2, 2):
            raise ValueError(f"unitary {j} has shape {u.shape}, expected (2, 2)")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(2)))
        if dev > UNITARITY_ATOL:
            raise ValueError(f"unitary {j} deviates from unitarity by {dev:.3e}")
    full = reduce(np.kron, us)
    return DensityMatrix(rho.n_qubits, full @ rho.matrix @ full.conj().T)


def _check_qubit_count(name: str, n, minimum: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise ValueError(f"parameter {name} must be an integer >= {minimum}, got {n!r}")
    if n > MAX_QUBITS:
        raise ValueError(
            f"parameter {name}={n} exceeds the configured limit MAX_QUBITS={MAX_QUBITS}"
        )


def _expect_params(kind: str, params: tuple, count: int) -> None:
    if len(params) != count:
        raise ValueError(
            f"state kind {kind!r} takes {count} parameter(s), got {len(params)}"
        )


def _as_int(name: str, value) -> int:
    as_float = float(value)
    if as_float != int(as_float):
        raise ValueError(f"parameter {name} must be an integer, got {value!r}")
    return int(as_float)
