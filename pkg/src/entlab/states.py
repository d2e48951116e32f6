"""Exact states and entropic primitives for small qubit registers.

Everything here is dense complex linear algebra. Registers are capped at
``MAX_QUBITS`` qubits, bitstring indices are big-endian (qubit 0 is the
most significant bit), and entropies are reported in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import PositivityError, SizeLimitError

MAX_QUBITS = 12

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-10
PSD_ATOL = 1e-9
EIGENVALUE_CLIP = 1e-12
# eigvalsh-based positivity validation gets expensive past this dimension
_PSD_CHECK_MAX_DIM = 512


def check_register_size(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"register size must be a non-negative integer, got {n!r}")
    if n > MAX_QUBITS:
        raise SizeLimitError(f"register of {n} qubits exceeds the cap of {MAX_QUBITS}")
    return int(n)


def validate_subset(qubits: Iterable[int], n: int, allow_empty: bool = False) -> tuple[int, ...]:
    """Return ``qubits`` as a strictly increasing tuple of register positions."""
    subset = tuple(int(q) for q in qubits)
    if not subset and not allow_empty:
        raise ValueError("qubit subset must be non-empty")
    for q in subset:
        if q < 0 or q >= n:
            raise ValueError(f"qubit {q} outside register of size {n}")
    if len(set(subset)) != len(subset):
        raise ValueError(f"duplicate qubits in subset {subset}")
    return tuple(sorted(subset))


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit state vector on an ordered qubit register."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = check_register_size(self.n)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**n:
            raise ValueError(f"expected {2**n} amplitudes for {n} qubits, got {amps.shape[0]}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"amplitudes are not normalized (norm {norm})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n

    def density_matrix(self) -> "DensityMatrix":
        mat = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix(self.n, mat)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on a register."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        n = check_register_size(self.n)
        mat = np.asarray(self.matrix, dtype=complex)
        d = 2**n
        if mat.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix for {n} qubits, got {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=HERMITIAN_ATOL):
            raise ValueError("matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace must be 1, got {tr}")
        if d <= _PSD_CHECK_MAX_DIM:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < -PSD_ATOL:
                raise PositivityError(f"eigenvalue {lo} below -{PSD_ATOL}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 2**self.n

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def is_pure(self, atol: float = 1e-8) -> bool:
        return self.purity() >= 1.0 - atol


def as_density_matrix(state: "PureState | DensityMatrix") -> DensityMatrix:
    if isinstance(state, PureState):
        return state.density_matrix()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def _hermitize(mat: np.ndarray) -> np.ndarray:
    return (mat + mat.conj().T) / 2.0


def tensor(first: DensityMatrix, second: DensityMatrix) -> DensityMatrix:
    """Tensor product; the first factor occupies the more significant qubits."""
    n = check_register_size(first.n + second.n)
    return DensityMatrix(n, np.kron(first.matrix, second.matrix))


def marginal_matrix(mat: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a raw 2^n x 2^n matrix onto the qubits in ``keep``.

    ``keep`` must already be validated and sorted. The result's qubit order
    is the kept qubits in increasing register order.
    """
    keep = tuple(keep)
    if len(keep) == n:
        return mat
    drop = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    dd = 2 ** len(drop)
    t = mat.reshape((2,) * (2 * n))
    perm = (
        [q for q in keep]
        + [q for q in drop]
        + [n + q for q in keep]
        + [n + q for q in drop]
    )
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    return np.einsum("abcb->ac", t)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on ``keep``; an empty subset leaves the 1x1 trace."""
    keep_t = validate_subset(keep, rho.n, allow_empty=True)
    if len(keep_t) == rho.n:
        return rho
    out = marginal_matrix(rho.matrix, rho.n, keep_t)
    return DensityMatrix(len(keep_t), _hermitize(out))


def pure_marginal(amplitudes: np.ndarray, n: int, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state of a pure vector without forming the full density matrix."""
    keep_t = validate_subset(keep, n, allow_empty=True)
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.shape[0] != 2**n:
        raise ValueError("amplitude vector does not match register size")
    drop = [q for q in range(n) if q not in keep_t]
    t = amps.reshape((2,) * n).transpose(list(keep_t) + drop)
    t = t.reshape(2 ** len(keep_t), 2 ** len(drop))
    return DensityMatrix(len(keep_t), _hermitize(t @ t.conj().T))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -sum(lam * log2(lam)) over eigenvalues above the clip floor."""
    lam = np.linalg.eigvalsh(rho.matrix)
    lo = float(lam[0])
    if lo < -1e-6:
        raise PositivityError(f"eigenvalue {lo} below -1e-6")
    lam = lam[lam > EIGENVALUE_CLIP]
    if lam.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def entropy_of_subset(state: "PureState | DensityMatrix", keep: Iterable[int]) -> float:
    if isinstance(state, PureState):
        return von_neumann_entropy(pure_marginal(state.amplitudes, state.n, tuple(keep)))
    return von_neumann_entropy(partial_trace(state, keep))


def purify(rho: DensityMatrix) -> PureState:
    """Pure state on system + reference whose system marginal is ``rho``.

    The reference register holds max(1, ceil(log2 rank)) qubits and is
    appended after the system qubits (less significant bits). A pure input
    yields the input tensored with the all-zero reference state.
    """
    lam, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vecs = vecs[:, order]
    rank = int(np.sum(lam > EIGENVALUE_CLIP))
    rank = max(rank, 1)
    m = max(1, int(np.ceil(np.log2(rank))))
    check_register_size(rho.n + m)
    coeff = np.zeros((rho.dim, 2**m), dtype=complex)
    for k in range(rank):
        coeff[:, k] = np.sqrt(max(lam[k], 0.0)) * vecs[:, k]
    amps = coeff.reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureState(rho.n + m, amps)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(mat)
    lam = np.clip(lam, 0.0, None)
    return (vecs * np.sqrt(lam)) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1]."""
    if rho.n != sigma.n:
        raise ValueError("states live on different registers")
    root = _psd_sqrt(rho.matrix)
    inner = _hermitize(root @ sigma.matrix @ root)
    lam = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    val = float(np.sum(np.sqrt(lam)) ** 2)
    return min(max(val, 0.0), 1.0)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of rho - sigma, in [0, 1]."""
    if rho.n != sigma.n:
        raise ValueError("states live on different registers")
    lam = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    val = 0.5 * float(np.sum(np.abs(lam)))
    return min(max(val, 0.0), 1.0)


def state_distance(rho: DensityMatrix, sigma: DensityMatrix) -> tuple[float, float]:
    """(fidelity, trace distance) pair for two states on one register."""
    return fidelity(rho, sigma), trace_distance(rho, sigma)


def embed_operator(op: np.ndarray, positions: Sequence[int], n: int) -> np.ndarray:
    """Extend an operator on the qubits ``positions`` by identity elsewhere.

    ``positions`` must be strictly increasing; the operator's tensor factors
    are taken in that order. Works for any square operator (Kraus factors,
    Hermitian multipliers, unitaries).
    """
    positions = tuple(int(q) for q in positions)
    k = len(positions)
    if sorted(set(positions)) != list(positions):
        raise ValueError(f"positions must be strictly increasing, got {positions}")
    if positions and (positions[0] < 0 or positions[-1] >= n):
        raise ValueError(f"positions {positions} outside register of size {n}")
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if k == n:
        return op
    rest = [q for q in range(n) if q not in positions]
    full = np.kron(op, np.eye(2 ** (n - k), dtype=complex))
    # current tensor-factor order: positions then rest; undo the permutation
    perm = list(positions) + rest
    inv = np.argsort(perm)
    t = full.reshape((2,) * (2 * n))
    axes = list(inv) + [n + int(i) for i in inv]
    return t.transpose(axes).reshape(2**n, 2**n)
