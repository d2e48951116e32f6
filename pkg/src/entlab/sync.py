"""Synchronized-error statistics and the readout comparison demo.

The classical model is a two-point mixture: with probability pi a burst
occurs and every bit is hit independently with probability h, otherwise
nothing happens. Its first two moments recover (p1, p2) = (pi*h, pi*h^2).
Binomial tails are summed exactly in log space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from math import lgamma, log, log1p
from typing import Iterable

import numpy as np

from .channels import QuantumChannel, apply, combine, pauli_expansion, pauli_weight_table
from .states import DensityMatrix, _hermitize
from .zoo import bitflip_code_encode

MAX_TAIL_TRIALS = 10**6


@dataclass(frozen=True)
class ClassicalMixtureModel:
    """Burst probability pi and in-burst hit probability h."""

    pi: float
    h: float

    def __post_init__(self):
        if not 0.0 <= self.pi <= 1.0 or not 0.0 <= self.h <= 1.0:
            raise ValueError(f"mixture parameters ({self.pi}, {self.h}) outside [0, 1]")

    def moment(self, order: int) -> float:
        """Joint hit probability of ``order`` distinct bits: pi * h^order."""
        if order < 1:
            raise ValueError("moment order must be positive")
        return self.pi * self.h**order


def fit_mixture(p1: float, p2: float) -> ClassicalMixtureModel:
    """Mixture model with single-bit probability p1 and pair probability p2.

    Feasible iff p1^2 <= p2 <= p1; equality p2 = p1^2 is the independent
    case, p2 = p1 the fully synchronized one.
    """
    p1 = float(p1)
    p2 = float(p2)
    if not 0.0 <= p1 <= 1.0 or not 0.0 <= p2 <= 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    if p2 > p1 + 1e-15 or p1 * p1 > p2 * (1.0 + 1e-12) + 1e-300:
        raise ValueError(f"moments (p1={p1}, p2={p2}) violate p1^2 <= p2 <= p1")
    if p1 == 0.0:
        return ClassicalMixtureModel(0.0, 0.0)
    h = min(p2 / p1, 1.0)
    pi = min(p1 / h, 1.0) if h > 0.0 else 1.0
    return ClassicalMixtureModel(pi, h)


def _log_binom_pmf(n: int, k: np.ndarray, p: float) -> np.ndarray:
    logc = lgamma(n + 1) - np.array([lgamma(x + 1) + lgamma(n - x + 1) for x in k])
    return logc + k * log(p) + (n - k) * log1p(-p)


def binomial_tail(n: int, k: int, p: float) -> float:
    """P(Bin(n, p) > k), exact, summed from the log-space pmf."""
    n = int(n)
    k = int(k)
    if n < 0 or n > MAX_TAIL_TRIALS:
        raise ValueError(f"trial count {n} outside [0, {MAX_TAIL_TRIALS}]")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if k >= n:
        return 0.0
    if k < 0:
        return 1.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    ks = np.arange(k + 1, n + 1, dtype=float)
    logs = _log_binom_pmf(n, ks, p)
    top = float(np.max(logs))
    return float(min(1.0, np.exp(top) * np.sum(np.exp(logs - top))))


def tail_probability(model: ClassicalMixtureModel, n: int, threshold: int) -> float:
    """P(more than ``threshold`` of n bits are hit) under the mixture model."""
    return model.pi * binomial_tail(n, threshold, model.h)


@dataclass(frozen=True)
class TripleMomentReport:
    implied_p3: float
    independent_p3: float
    ratio: float
    target_p3: float | None
    target_ratio: float | None


def triple_moment(model: ClassicalMixtureModel, p3_target: float | None = None) -> TripleMomentReport:
    """Three-bit joint hit probability implied by the model vs independence."""
    p1 = model.moment(1)
    implied = model.moment(3)
    independent = p1**3
    ratio = implied / independent if independent > 0.0 else float("inf") if implied > 0 else 1.0
    target_ratio = None
    if p3_target is not None:
        target_ratio = p3_target / independent if independent > 0.0 else None
    return TripleMomentReport(
        implied_p3=implied,
        independent_p3=independent,
        ratio=ratio,
        target_p3=p3_target,
        target_ratio=target_ratio,
    )


@dataclass(frozen=True)
class WeightDistribution:
    """Probability of each error support size under the Pauli twirl."""

    n: int
    probabilities: np.ndarray

    def mean_weight(self) -> float:
        w = np.arange(self.n + 1)
        return float(np.sum(w * self.probabilities))

    def conditional_mean_weight(self) -> float:
        """Mean support size conditioned on a non-identity error."""
        w = np.arange(self.n + 1)
        mass = float(np.sum(self.probabilities[1:]))
        if mass <= 0.0:
            return 0.0
        return float(np.sum(w[1:] * self.probabilities[1:]) / mass)


def weight_distribution(channel: QuantumChannel) -> WeightDistribution:
    """Support-size histogram of the channel's Pauli-twirl probabilities."""
    dist = pauli_expansion(channel)
    table = pauli_weight_table(dist.n)
    probs = np.zeros(dist.n + 1)
    np.add.at(probs, table, dist.q)
    probs.flags.writeable = False
    return WeightDistribution(dist.n, probs)


def repetition_majority_error(eps: float, copies: int) -> float:
    """Majority-vote failure for a bit sent as ``copies`` noisy copies.

    Each copy is erased with probability 1 - eps (read as a fair coin), so
    a copy flips with probability (1 - eps)/2; the vote fails when at least
    (copies+1)/2 flip. ``copies`` must be odd.
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"survival probability {eps} outside [0, 1]")
    m = int(copies)
    if m < 1 or m % 2 == 0:
        raise ValueError(f"copy count must be odd and positive, got {m}")
    flip = (1.0 - eps) / 2.0
    return binomial_tail(m, (m + 1) // 2 - 1, flip)


def _replacement_channel(eps: float, qubit: int) -> QuantumChannel:
    """Qubit kept with probability eps, replaced by I/2 otherwise."""
    eye = np.eye(2, dtype=complex)
    ops = []
    if eps > 0.0:
        ops.append(np.sqrt(eps) * eye)
    if eps < 1.0:
        scale = np.sqrt((1.0 - eps) / 2.0)
        for i, j in iproduct(range(2), range(2)):
            op = np.zeros((2, 2), dtype=complex)
            op[i, j] = 1.0
            ops.append(scale * op)
    return QuantumChannel(tuple(ops), qubits=(qubit,))


# map syndrome sector to the qubit whose X correction returns it to the
# code space: flips on qubit 0 leave |100>/|011>, qubit 1 |010>/|101>,
# qubit 2 |001>/|110>
_SECTOR_FIX = {
    (0, 0, 0): None,
    (1, 1, 1): None,
    (1, 0, 0): 0,
    (0, 1, 1): 0,
    (0, 1, 0): 1,
    (1, 0, 1): 1,
    (0, 0, 1): 2,
    (1, 1, 0): 2,
}


def _correction_unitary() -> np.ndarray:
    u = np.zeros((8, 8), dtype=complex)
    for idx in range(8):
        bits = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
        fix = _SECTOR_FIX[bits]
        if fix is None:
            u[idx, idx] = 1.0
        else:
            flipped = idx ^ (1 << (2 - fix))
            u[flipped, idx] = 1.0
    return u


@dataclass(frozen=True)
class RandomizationDemoResult:
    fidelity_after_decode: float
    classical_majority_success: float
    epsilon: float


def quantum_randomization_demo(eps: float, logical: tuple[complex, complex]) -> RandomizationDemoResult:
    """Three-copy repetition under qubit-randomizing noise.

    Encodes a|000> + b|111>, replaces each qubit with the maximally mixed
    state with probability 1 - eps, then reports (i) the fidelity of the
    syndrome-corrected logical state with the ideal one and (ii) the
    success probability of plain majority readout of the logical bit
    distribution. At eps = 1 both are exactly 1.
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"survival probability {eps} outside [0, 1]")
    a, b = (complex(x) for x in logical)
    encoded = bitflip_code_encode(a, b)
    noise = combine([(_replacement_channel(eps, q), (q,)) for q in range(3)], n=3)
    noisy = apply(noise, encoded.density_matrix())

    u = _correction_unitary()
    corrected = _hermitize(u @ noisy.matrix @ u.conj().T)
    logical_block = np.array(
        [[corrected[0, 0], corrected[0, 7]], [corrected[7, 0], corrected[7, 7]]]
    )
    ideal = np.array([a, b], dtype=complex)
    fidelity = float(np.real(ideal.conj() @ logical_block @ ideal))

    # classical comparison: treat the logical Z distribution as a bit source
    # and score majority readout of each encoded basis bit
    success_zero = _majority_success_for_bit(eps, bit=0)
    success_one = _majority_success_for_bit(eps, bit=1)
    success = abs(a) ** 2 * success_zero + abs(b) ** 2 * success_one
    return RandomizationDemoResult(
        fidelity_after_decode=min(max(fidelity, 0.0), 1.0),
        classical_majority_success=float(success),
        epsilon=eps,
    )


def _majority_success_for_bit(eps: float, bit: int) -> float:
    amps = (1.0, 0.0) if bit == 0 else (0.0, 1.0)
    encoded = bitflip_code_encode(*amps)
    noise = combine([(_replacement_channel(eps, q), (q,)) for q in range(3)], n=3)
    noisy = apply(noise, encoded.density_matrix())
    diag = np.real(np.diag(noisy.matrix))
    weights = np.array([bin(i).count("1") for i in range(8)])
    if bit == 0:
        return float(diag[weights <= 1].sum())
    return float(diag[weights >= 2].sum())
