"""Canonical register states used as measure inputs."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .states import PureState, check_register_size


def plus_all(n: int) -> PureState:
    """Uniform |+>^n register state."""
    n = check_register_size(n)
    if n < 1:
        raise ValueError("plus_all needs at least one qubit")
    d = 2**n
    return PureState(n, np.full(d, 1.0 / np.sqrt(d), dtype=complex))


def ghz(n: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    n = check_register_size(n)
    if n < 2:
        raise ValueError("ghz needs at least two qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return PureState(n, amps)


def bell() -> PureState:
    return ghz(2)


def _validate_edges(n: int, edges: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    out = []
    for edge in edges:
        i, j = (int(q) for q in edge)
        if i == j:
            raise ValueError(f"self-loop on qubit {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i},{j}) outside register of size {n}")
        out.append((min(i, j), max(i, j)))
    if len(set(out)) != len(out):
        raise ValueError("duplicate edges")
    return out


def _qubit_bits(n: int, qubit: int) -> np.ndarray:
    # big-endian: qubit 0 is the most significant bit
    return (np.arange(2**n) >> (n - 1 - qubit)) & 1


def cluster_state(n: int, edges: Sequence[Sequence[int]]) -> PureState:
    """Graph state: CZ applied along each edge of |+>^n."""
    n = check_register_size(n)
    amps = np.array(plus_all(n).amplitudes)
    for i, j in _validate_edges(n, edges):
        both = (_qubit_bits(n, i) & _qubit_bits(n, j)).astype(bool)
        amps[both] *= -1.0
    return PureState(n, amps)


def line_edges(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def dicke_state(total: int, excitations: int) -> PureState:
    """Uniform superposition of all bitstrings with the given Hamming weight."""
    n = check_register_size(total)
    k = int(excitations)
    if not 0 <= k <= n:
        raise ValueError(f"excitation count {k} outside [0, {n}]")
    idx = np.arange(2**n)
    weights = np.zeros(2**n, dtype=int)
    for q in range(n):
        weights += _qubit_bits(n, q)
    hits = idx[weights == k]
    amps = np.zeros(2**n, dtype=complex)
    amps[hits] = 1.0 / np.sqrt(len(hits))
    return PureState(n, amps)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phase = np.diag(r).copy()
    phase /= np.abs(phase)
    return q * phase


def random_circuit_state(n: int, depth: int, seed: int) -> PureState:
    """Seeded brickwork of Haar two-qubit gates on a line, starting from |0...0>."""
    n = check_register_size(n)
    if n < 1:
        raise ValueError("random_circuit_state needs at least one qubit")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rng = np.random.default_rng(seed)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    for layer in range(depth):
        start = layer % 2
        for q in range(start, n - 1, 2):
            gate = haar_unitary(4, rng)
            block = amps.reshape(2**q, 4, -1)
            amps = np.einsum("ab,ibj->iaj", gate, block).reshape(-1)
    amps /= np.linalg.norm(amps)
    return PureState(n, amps)


def bitflip_code_encode(a: complex, b: complex) -> PureState:
    """a|000> + b|111>; amplitudes must already be normalized."""
    a = complex(a)
    b = complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
        raise ValueError("logical amplitudes are not normalized")
    amps = np.zeros(8, dtype=complex)
    amps[0] = a
    amps[7] = b
    return PureState(3, amps)


def all_subsets(n: int, sizes: Sequence[int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in sizes:
        out.extend(combinations(range(n), size))
    return out
