"""Quantum channels as Kraus lists, with builders for correlated noise.

A channel is stored as a tuple of Kraus operators K_k with
sum_k K_k^dagger K_k = I (checked to 1e-9). Channels may be declared on a
sub-register via ``qubits``; application to a larger register pads the
remaining qubits with identity. The Pauli expansion maps a channel to the
error-probability vector of its Pauli twirl.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeLimitError
from .states import DensityMatrix, check_register_size, embed_operator, _hermitize
from .zoo import _validate_edges, _qubit_bits, haar_unitary

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI_LETTERS = "IXYZ"
_PAULI_BY_LETTER = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

CPTP_ATOL = 1e-9
# Pauli expansion enumerates 4**n strings; keep that tractable
MAX_EXPANSION_QUBITS = 6


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive trace-preserving map in Kraus form.

    Parameters
    ----------
    kraus : sequence of ndarray
        Square operators of a common power-of-two dimension.
    qubits : tuple of int, optional
        Register positions the channel acts on when applied to a larger
        register. None means positions 0..n-1.
    """

    kraus: tuple
    qubits: tuple | None = None

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        n = int(np.log2(d)) if d > 0 else -1
        if d < 1 or 2**n != d:
            raise ValueError(f"Kraus dimension {d} is not a power of two")
        check_register_size(n)
        for op in ops:
            if op.shape != (d, d):
                raise ValueError("Kraus operators must share one square shape")
        total = sum(op.conj().T @ op for op in ops)
        if not np.allclose(total, np.eye(d), atol=CPTP_ATOL):
            gap = float(np.max(np.abs(total - np.eye(d))))
            raise ValueError(f"Kraus operators are not trace preserving (gap {gap:.2e})")
        ops = tuple(op.copy() for op in ops)
        for op in ops:
            op.flags.writeable = False
        object.__setattr__(self, "kraus", ops)
        if self.qubits is not None:
            pos = tuple(int(q) for q in self.qubits)
            if len(pos) != n:
                raise ValueError(f"{n}-qubit channel declared on {len(pos)} positions")
            if sorted(set(pos)) != list(pos):
                raise ValueError(f"positions must be strictly increasing, got {pos}")
            if pos and pos[0] < 0:
                raise ValueError("negative qubit position")
            object.__setattr__(self, "qubits", pos)

    @property
    def n(self) -> int:
        return int(np.log2(self.kraus[0].shape[0]))

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def positions(self) -> tuple:
        return self.qubits if self.qubits is not None else tuple(range(self.n))


def identity_channel(n: int) -> QuantumChannel:
    check_register_size(n)
    return QuantumChannel((np.eye(2**n, dtype=complex),))


def embed(channel: QuantumChannel, n: int) -> QuantumChannel:
    """Pad a sub-register channel with identity up to an n-qubit register."""
    pos = channel.positions()
    if pos and pos[-1] >= n:
        raise ValueError(f"channel on qubits {pos} does not fit in {n} qubits")
    if channel.n == n and pos == tuple(range(n)):
        return QuantumChannel(channel.kraus) if channel.qubits is not None else channel
    check_register_size(n)
    ops = tuple(embed_operator(k, pos, n) for k in channel.kraus)
    return QuantumChannel(ops)


def apply(channel: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    """Channel output sum_k K rho K^dagger, padding sub-register channels."""
    ch = channel
    pos = ch.positions()
    if ch.n != rho.n or pos != tuple(range(rho.n)):
        ch = embed(channel, rho.n)
    stack = np.stack(ch.kraus)
    out = np.einsum("kij,jl,kml->im", stack, rho.matrix, stack.conj())
    return DensityMatrix(rho.n, _hermitize(out))


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """Channel running ``first`` then ``second`` (Kraus products K2 K1)."""
    n = max(
        second.positions()[-1] + 1 if second.positions() else 0,
        first.positions()[-1] + 1 if first.positions() else 0,
        second.n,
        first.n,
    )
    a = embed(second, n)
    b = embed(first, n)
    ops = tuple(k2 @ k1 for k2 in a.kraus for k1 in b.kraus)
    return QuantumChannel(ops)


def combine(parts: Iterable[tuple], n: int | None = None) -> QuantumChannel:
    """Tensor sub-register channels over disjoint qubit sets, identity elsewhere.

    ``parts`` is a list of (channel, qubits) pairs; ``n`` defaults to one
    past the largest qubit named.
    """
    placed = []
    used: set[int] = set()
    top = -1
    for channel, qubits in parts:
        pos = tuple(int(q) for q in qubits)
        if sorted(set(pos)) != list(pos):
            raise ValueError(f"positions must be strictly increasing, got {pos}")
        if len(pos) != channel.n:
            raise ValueError(f"{channel.n}-qubit channel placed on {len(pos)} qubits")
        if used & set(pos):
            raise ValueError(f"overlapping qubit sets at {pos}")
        used |= set(pos)
        top = max(top, max(pos, default=-1))
        placed.append((channel, pos))
    if n is None:
        n = top + 1
    check_register_size(n)
    if top >= n:
        raise ValueError(f"parts reference qubit {top} outside register of size {n}")
    if not placed:
        return identity_channel(n)
    embedded = [
        [embed_operator(k, pos, n) for k in channel.kraus] for channel, pos in placed
    ]
    ops = []
    for combo in iproduct(*embedded):
        full = combo[0]
        for factor in combo[1:]:
            full = full @ factor
        ops.append(full)
    return QuantumChannel(tuple(ops))


def _filter_kraus(weighted: Sequence[tuple[float, np.ndarray]]) -> tuple:
    ops = tuple(np.sqrt(w) * op for w, op in weighted if w > 0.0)
    return ops


def build_depolarizing(p: float, qubit: int = 0) -> QuantumChannel:
    """Single-qubit depolarizing noise with total Pauli-error probability p.

    The Pauli twirl weights are (1-p, p/3, p/3, p/3); at p = 3/4 any input
    qubit is sent to the maximally mixed state.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    weighted = [(1.0 - p, PAULI_I), (p / 3.0, PAULI_X), (p / 3.0, PAULI_Y), (p / 3.0, PAULI_Z)]
    return QuantumChannel(_filter_kraus(weighted), qubits=(int(qubit),))


def build_dephasing(eps: float, qubit: int = 0) -> QuantumChannel:
    """Single-qubit dephasing: off-diagonal terms shrink by 1 - eps.

    Equivalent to a phase flip with probability eps/2, so |+><+| maps to
    spectrum (1 - eps/2, eps/2).
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"strength {eps} outside [0, 1]")
    weighted = [(1.0 - eps / 2.0, PAULI_I), (eps / 2.0, PAULI_Z)]
    return QuantumChannel(_filter_kraus(weighted), qubits=(int(qubit),))


def pauli_string_matrix(letters: str) -> np.ndarray:
    mat = np.array([[1.0]], dtype=complex)
    for ch in letters:
        if ch not in _PAULI_BY_LETTER:
            raise ValueError(f"unknown Pauli letter {ch!r}")
        mat = np.kron(mat, _PAULI_BY_LETTER[ch])
    return mat


def build_correlated_flip(eps: float, pauli: str) -> QuantumChannel:
    """Global two-point mixture: identity with 1 - eps, the full Pauli string with eps."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"probability {eps} outside [0, 1]")
    n = len(pauli)
    check_register_size(n)
    if n < 1:
        raise ValueError("Pauli string must be non-empty")
    weighted = [(1.0 - eps, np.eye(2**n, dtype=complex)), (eps, pauli_string_matrix(pauli))]
    return QuantumChannel(_filter_kraus(weighted))


def build_pairwise_correlated(n: int, p1: float, p2: float, basis: str = "X") -> QuantumChannel:
    """Correlated flips with prescribed one- and two-point hit probabilities.

    A burst occurs with probability pi = p1^2 / p2; within a burst every
    qubit independently flips with probability h = p2 / p1. The per-qubit
    hit probability is then p1 and the joint hit probability of any pair is
    p2. Feasible iff p1^2 <= p2 <= p1.
    """
    n = check_register_size(n)
    if n < 1:
        raise ValueError("register must be non-empty")
    p1 = float(p1)
    p2 = float(p2)
    if basis not in ("X", "Y", "Z"):
        raise ValueError(f"flip basis must be X, Y or Z, got {basis!r}")
    if not 0.0 <= p1 <= 1.0 or not 0.0 <= p2 <= 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    if p2 > p1 + 1e-15 or p1 * p1 > p2 + 1e-15:
        raise ValueError(f"moments (p1={p1}, p2={p2}) violate p1^2 <= p2 <= p1")
    eye = np.eye(2**n, dtype=complex)
    if p1 == 0.0 or p2 == 0.0:
        return QuantumChannel((eye,))
    h = p2 / p1
    pi = p1 * p1 / p2
    flip = _PAULI_BY_LETTER[basis]
    weighted = [(1.0 - pi, eye)]
    for pattern in iproduct((0, 1), repeat=n):
        w = pi
        op = np.array([[1.0]], dtype=complex)
        for bit in pattern:
            w *= h if bit else (1.0 - h)
            op = np.kron(op, flip if bit else PAULI_I)
        weighted.append((w, op))
    return QuantumChannel(_filter_kraus(weighted))


def fit_mixture_feasible(p1: float, p2: float) -> bool:
    return 0.0 <= p2 <= p1 <= 1.0 and p1 * p1 <= p2 + 1e-15


def build_random_unitary_noise(n: int, eps: float, seed: int) -> QuantumChannel:
    """Unitary exp(-i eps H) for a seeded Gaussian Hermitian H of unit spectral radius."""
    n = check_register_size(n)
    if n < 1:
        raise ValueError("register must be non-empty")
    eps = float(eps)
    rng = np.random.default_rng(seed)
    d = 2**n
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2.0
    lam, vecs = np.linalg.eigh(h)
    radius = float(np.max(np.abs(lam)))
    lam = lam / radius
    u = (vecs * np.exp(-1j * eps * lam)) @ vecs.conj().T
    return QuantumChannel((u,))


def build_cluster_noise(
    n: int, edges: Sequence[Sequence[int]], eps: float, seed: int
) -> QuantumChannel:
    """With probability eps, apply the CZ circuit of ``edges`` dressed by
    seeded random single-qubit layers on both sides; otherwise do nothing.

    An empty edge list degenerates to a mixture of single-qubit unitaries,
    which is a product channel.
    """
    n = check_register_size(n)
    if n < 1:
        raise ValueError("register must be non-empty")
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"probability {eps} outside [0, 1]")
    edge_list = _validate_edges(n, edges)
    rng = np.random.default_rng(seed)
    pre = np.array([[1.0]], dtype=complex)
    post = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        pre = np.kron(pre, haar_unitary(2, rng))
    for _ in range(n):
        post = np.kron(post, haar_unitary(2, rng))
    cz_diag = np.ones(2**n, dtype=complex)
    for i, j in edge_list:
        both = (_qubit_bits(n, i) & _qubit_bits(n, j)).astype(bool)
        cz_diag[both] *= -1.0
    u = post @ (cz_diag[:, None] * pre)
    weighted = [(1.0 - eps, np.eye(2**n, dtype=complex)), (eps, u)]
    return QuantumChannel(_filter_kraus(weighted))


@dataclass(frozen=True, eq=False)
class PauliDistribution:
    """Pauli-twirl error probabilities q indexed by base-4 strings.

    Index digits run I=0, X=1, Y=2, Z=3 with qubit 0 as the most
    significant digit, matching the register bit order.
    """

    n: int
    q: np.ndarray

    def __post_init__(self):
        n = check_register_size(self.n)
        q = np.asarray(self.q, dtype=float).reshape(-1)
        if q.shape[0] != 4**n:
            raise ValueError(f"expected {4**n} entries, got {q.shape[0]}")
        if np.any(q < -1e-9):
            raise ValueError("negative probability in Pauli distribution")
        if abs(float(q.sum()) - 1.0) > 1e-9:
            raise ValueError(f"Pauli probabilities sum to {q.sum()}, not 1")
        q = np.clip(q, 0.0, None)
        q.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "q", q)

    def probability(self, letters: str) -> float:
        if len(letters) != self.n:
            raise ValueError(f"expected {self.n} letters, got {len(letters)}")
        idx = 0
        for ch in letters:
            idx = 4 * idx + PAULI_LETTERS.index(ch)
        return float(self.q[idx])


def pauli_weight_table(n: int) -> np.ndarray:
    """Support size (count of non-identity letters) for every base-4 index."""
    weights = np.zeros(4**n, dtype=int)
    idx = np.arange(4**n)
    for q in range(n):
        digit = (idx // 4 ** (n - 1 - q)) % 4
        weights += (digit != 0).astype(int)
    return weights


# Row a holds P_a transposed and flattened, so that the per-qubit tensor
# contraction below computes Tr(P K) factors.
_PAULI_XFORM = np.stack([p.T.reshape(4) for p in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)])


def _pauli_coefficients(op: np.ndarray, n: int) -> np.ndarray:
    t = op.reshape((2,) * (2 * n))
    order = [ax for i in range(n) for ax in (i, n + i)]
    t = t.transpose(order).reshape((4,) * n) if n > 0 else t
    for ax in range(n):
        t = np.moveaxis(np.tensordot(_PAULI_XFORM, t, axes=([1], [ax])), 0, ax)
    return t.reshape(-1) / 2**n


def pauli_expansion(channel: QuantumChannel) -> PauliDistribution:
    """Pauli-twirl error probabilities q(P) = sum_k |Tr(P K_k)|^2 / 4^n."""
    n = channel.n
    if n > MAX_EXPANSION_QUBITS:
        raise SizeLimitError(
            f"Pauli expansion supports up to {MAX_EXPANSION_QUBITS} qubits, got {n}"
        )
    q = np.zeros(4**n)
    for op in channel.kraus:
        coeff = _pauli_coefficients(op, n)
        q += np.abs(coeff) ** 2
    return PauliDistribution(n, q)
