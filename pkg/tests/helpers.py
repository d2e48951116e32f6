"""Shared oracles and random generators for the test suite.

The oracles are written from first principles (direct index sums, explicit
dilation vectors, scipy special functions) so they cannot share a bug with
the library paths they check.
"""
from __future__ import annotations

import numpy as np
from scipy.special import xlogy

LOG2 = np.log(2.0)


def haar(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase fix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_pure(rng, n: int) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def random_density(rng, n: int, rank: int | None = None) -> np.ndarray:
    """Ginibre-induced random density matrix, optionally rank limited."""
    d = 2**n
    r = d if rank is None else rank
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    return m / np.trace(m).real


def bit(index: int, q: int, n: int) -> int:
    # qubit 0 is the most significant bit
    return (index >> (n - 1 - q)) & 1


def partial_trace_oracle(mat: np.ndarray, n: int, keep) -> np.ndarray:
    """Direct double sum over basis indices, no reshape tricks."""
    keep = tuple(sorted(keep))
    comp = [q for q in range(n) if q not in keep]
    da = 2 ** len(keep)
    out = np.zeros((da, da), dtype=complex)

    def sub(index, qubits):
        val = 0
        for q in qubits:
            val = (val << 1) | bit(index, q, n)
        return val

    for i in range(2**n):
        for j in range(2**n):
            if all(bit(i, q, n) == bit(j, q, n) for q in comp):
                out[sub(i, keep), sub(j, keep)] += mat[i, j]
    return out


def entropy_oracle(mat: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(mat)
    lam = lam[lam > 1e-12]
    return float(-np.sum(xlogy(lam, lam)) / LOG2)


def h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-(xlogy(p, p) + xlogy(1 - p, 1 - p)) / LOG2)


def env_mutual_info_oracle(kraus_ops, psi: np.ndarray, n: int, keep) -> float:
    """I(subset : environment) from the explicit dilation vector.

    Builds |Phi> = sum_k (K_k |psi>) x |k>_E and diagonalizes the three
    reduced states directly. Pure inputs only.
    """
    cols = np.stack([np.asarray(k) @ psi for k in kraus_ops], axis=1)
    ne = cols.shape[1]
    keep = tuple(sorted(keep))
    comp = tuple(q for q in range(n) if q not in keep)
    da = 2 ** len(keep)
    t = cols.reshape((2,) * n + (ne,))
    m = np.transpose(t, keep + comp + (n,)).reshape(da, -1, ne)
    rho_a = np.einsum("ace,bce->ab", m, m.conj())
    rho_e = np.einsum("ace,acf->ef", m, m.conj())
    rho_ae = np.einsum("ace,bcf->aebf", m, m.conj()).reshape(da * ne, da * ne)
    return entropy_oracle(rho_a) + entropy_oracle(rho_e) - entropy_oracle(rho_ae)
