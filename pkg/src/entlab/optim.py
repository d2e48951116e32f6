"""Optimization kernels behind the set measures.

Two solvers live here:

* ``max_entropy_with_marginals`` maximizes von Neumann entropy over density
  matrices with fixed marginals on given sub-registers. The maximizer has
  exponential-family form exp(sum_B lift(Lam_B)) / Z, so the solver runs
  quasi-Newton ascent on the Hermitian multipliers Lam_B of the concave
  dual; the dual gradient is exactly the marginal residual.
* ``max_avg_pure_decomposition`` searches over pure-state decompositions of
  a small mixed state for the largest weighted average of a per-member
  objective. Decompositions are parameterized by isometries acting on the
  spectral ensemble and improved by sweeps of two-member U(2) rotations
  with seeded random restarts. Values are certified lower bounds: the best
  decomposition is returned and checked to reconstruct the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, InfeasibleMarginalsError
from .states import (
    DensityMatrix,
    EIGENVALUE_CLIP,
    _hermitize,
    embed_operator,
    marginal_matrix,
    partial_trace,
    trace_distance,
    validate_subset,
)

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10000
DEFAULT_RESTARTS = 32
DEFAULT_SWEEPS = 60

_TARGET_REG = 1e-9
_CONSISTENCY_ATOL = 1e-8
_RECONSTRUCTION_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class MarginalConstraintSet:
    """Marginal targets on sub-registers of an m-qubit ambient register.

    Targets are indexed by strictly increasing qubit tuples. Overlapping
    targets must agree on their common sub-register to 1e-8; disagreement
    raises InfeasibleMarginalsError.
    """

    num_qubits: int
    targets: dict

    def __post_init__(self):
        m = int(self.num_qubits)
        if m < 1:
            raise ValueError("ambient register must have at least one qubit")
        clean: dict[tuple[int, ...], DensityMatrix] = {}
        for subset, target in self.targets.items():
            key = validate_subset(subset, m)
            if not isinstance(target, DensityMatrix):
                target = DensityMatrix(len(key), np.asarray(target, dtype=complex))
            if target.n != len(key):
                raise ValueError(
                    f"target on {key} has {target.n} qubits, expected {len(key)}"
                )
            clean[key] = target
        if not clean:
            raise ValueError("constraint set is empty")
        keys = sorted(clean)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                common = tuple(sorted(set(a) & set(b)))
                if not common:
                    continue
                pos_a = tuple(a.index(q) for q in common)
                pos_b = tuple(b.index(q) for q in common)
                ma = partial_trace(clean[a], pos_a)
                mb = partial_trace(clean[b], pos_b)
                gap = trace_distance(ma, mb)
                if gap > _CONSISTENCY_ATOL:
                    raise InfeasibleMarginalsError(
                        f"targets on {a} and {b} disagree on {common} (gap {gap:.2e})"
                    )
        object.__setattr__(self, "num_qubits", m)
        object.__setattr__(self, "targets", clean)

    @classmethod
    def from_state(cls, rho: DensityMatrix, subsets: Sequence[Sequence[int]]):
        targets = {tuple(s): partial_trace(rho, s) for s in subsets}
        return cls(rho.n, targets)


@dataclass
class MaxEntropyResult:
    state: DensityMatrix
    entropy: float
    iterations: int
    residual: float
    regularized: bool
    converged: bool

    def diagnostics(self) -> dict:
        return {
            "iterations": self.iterations,
            "residual": self.residual,
            "regularized": self.regularized,
            "converged": self.converged,
        }


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > EIGENVALUE_CLIP]
    if p.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(p * np.log2(p))))


def max_entropy_with_marginals(
    constraints: MarginalConstraintSet,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MaxEntropyResult:
    """Entropy maximizer under marginal constraints, via the smooth dual.

    Returns the maximizing state, its entropy in bits, and solver
    diagnostics. Raises ConvergenceError (carrying the final residual) if
    the worst marginal mismatch still exceeds ``tol`` after ``max_iter``
    quasi-Newton iterations.
    """
    m = constraints.num_qubits
    d = 2**m
    keys = sorted(constraints.targets)
    originals = {k: constraints.targets[k].matrix for k in keys}

    regularized = False
    targets = {}
    for k in keys:
        if float(np.linalg.eigvalsh(originals[k])[0]) < 1e-12:
            regularized = True
    for k in keys:
        t = originals[k]
        if regularized:
            dk = t.shape[0]
            t = (1.0 - _TARGET_REG) * t + _TARGET_REG * np.eye(dk) / dk
        targets[k] = t

    sizes = [2 ** len(k) for k in keys]
    spans = [2 * s * s for s in sizes]
    offsets = np.cumsum([0] + spans)

    def unpack(x: np.ndarray) -> list[np.ndarray]:
        mats = []
        for i, k in enumerate(keys):
            s = sizes[i]
            chunk = x[offsets[i] : offsets[i + 1]]
            re = chunk[: s * s].reshape(s, s)
            im = chunk[s * s :].reshape(s, s)
            mat = re + 1j * im
            mats.append((mat + mat.conj().T) / 2.0)
        return mats

    def dual(x: np.ndarray):
        lams = unpack(x)
        h = np.zeros((d, d), dtype=complex)
        for lam, k in zip(lams, keys):
            h += embed_operator(lam, k, m)
        w, vecs = np.linalg.eigh(h)
        wmax = float(w[-1])
        z = np.exp(w - wmax)
        logz = wmax + float(np.log(z.sum()))
        p = z / z.sum()
        sigma = (vecs * p) @ vecs.conj().T
        val = logz
        grad = np.zeros_like(x)
        for i, (lam, k) in enumerate(zip(lams, keys)):
            val -= float(np.real(np.trace(lam @ targets[k])))
            g = marginal_matrix(sigma, m, k) - targets[k]
            s = sizes[i]
            grad[offsets[i] : offsets[i] + s * s] = np.real(g).reshape(-1)
            grad[offsets[i] + s * s : offsets[i + 1]] = np.imag(g).reshape(-1)
        return val, grad, sigma, p

    def fun(x: np.ndarray):
        val, grad, _, _ = dual(x)
        return val, grad

    x0 = np.zeros(offsets[-1])
    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "maxfun": 10 * max_iter, "gtol": 1e-10, "ftol": 1e-15},
    )
    _, _, sigma, p = dual(res.x)
    sigma = _hermitize(sigma)
    state = DensityMatrix(m, sigma / np.real(np.trace(sigma)))

    residual = 0.0
    for k in keys:
        got = marginal_matrix(state.matrix, m, k)
        gap = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(got - originals[k]))))
        residual = max(residual, gap)
    result = MaxEntropyResult(
        state=state,
        entropy=_entropy_bits(np.asarray(p)),
        iterations=int(res.nit),
        residual=residual,
        regularized=regularized,
        converged=residual <= tol,
    )
    if not result.converged:
        raise ConvergenceError(
            f"marginal residual {residual:.3e} above tol {tol:.1e} "
            f"after {result.iterations} iterations",
            residual=residual,
        )
    return result


@dataclass
class Decomposition:
    """Weighted pure-state ensemble representing a density matrix."""

    weights: np.ndarray
    states: np.ndarray  # row k is the k-th member's amplitude vector

    def reconstruction(self) -> np.ndarray:
        scaled = self.states * np.sqrt(self.weights)[:, None]
        return scaled.T @ scaled.conj()


@dataclass
class DecompositionResult:
    value: float
    decomposition: Decomposition
    diagnostics: dict = field(default_factory=dict)


def _xlog2x(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    mask = x > EIGENVALUE_CLIP
    out[mask] = x[mask] * np.log2(x[mask])
    return out


def _pair_member_values(vectors: np.ndarray) -> np.ndarray:
    """Objective mass of unnormalized 2-qubit members: 2 * norm^2 * S(tr_b).

    The first-qubit marginal is 2x2, so its spectrum is closed form; this
    runs inside grid searches and avoids per-matrix LAPACK calls.
    """
    r = vectors.reshape(-1, 2, 2)
    top = np.einsum("bj,bj->b", r[:, 0, :], r[:, 0, :].conj()).real
    bot = np.einsum("bj,bj->b", r[:, 1, :], r[:, 1, :].conj()).real
    off = np.einsum("bj,bj->b", r[:, 0, :], r[:, 1, :].conj())
    trace = top + bot
    disc = np.sqrt(np.clip((top - bot) ** 2 + 4.0 * np.abs(off) ** 2, 0.0, None))
    lam_hi = np.clip((trace + disc) / 2.0, 0.0, None)
    lam_lo = np.clip((trace - disc) / 2.0, 0.0, None)
    return 2.0 * (_xlog2x(trace) - _xlog2x(lam_hi) - _xlog2x(lam_lo))


def _generic_member_values(objective: Callable[[np.ndarray], float]):
    def values(vectors: np.ndarray) -> np.ndarray:
        out = np.zeros(vectors.shape[0])
        for i, vec in enumerate(vectors):
            p = float(np.real(np.vdot(vec, vec)))
            if p < 1e-14:
                continue
            out[i] = p * float(objective(vec / np.sqrt(p)))
        return out

    return values


def _pair_candidates(a, b, theta, phi):
    ca = np.cos(theta)[:, None]
    sa = np.sin(theta)
    wneg = (sa * np.exp(-1j * phi))[:, None]
    wpos = (sa * np.exp(1j * phi))[:, None]
    return ca * a[None, :] - wneg * b[None, :], wpos * a[None, :] + ca * b[None, :]


def _align_pair_phase(a, b):
    """Rotate b so its phase against a is canonical.

    A pure phase on b only shifts the mixing-angle grid, so pinning it makes
    the pair search insensitive to how upstream eigenvectors were phased.
    The weighted overlap is the tiebreak when the rows are orthogonal.
    """
    scale = float(np.linalg.norm(a) * np.linalg.norm(b))
    if scale < 1e-14:
        return b
    g = np.vdot(a, b)
    if abs(g) < 1e-10 * scale:
        g = np.vdot(a, np.arange(1, b.size + 1) * b)
    if abs(g) < 1e-10 * scale:
        return b
    return b * (g.conjugate() / abs(g))


def _optimize_pair(a, b, values_fn, grid, zoom_rounds, zoom_grid):
    """Best U(2) mix of two member rows; returns (gain achieved, new rows)."""
    b = _align_pair_phase(a, b)
    base = float(values_fn(np.stack([a, b])).sum())
    t0, f0 = 0.0, 0.0
    span_t, span_f = np.pi, 2 * np.pi
    nt, nf = grid
    best_val, best_t, best_f = base, 0.0, 0.0
    for round_idx in range(zoom_rounds + 1):
        if round_idx == 0:
            ts = np.linspace(0.0, span_t, nt, endpoint=False)
            fs = np.linspace(0.0, span_f, nf, endpoint=False)
        else:
            nt, nf = zoom_grid
            ts = best_t + np.linspace(-span_t, span_t, nt)
            fs = best_f + np.linspace(-span_f, span_f, nf)
        tt, ff = np.meshgrid(ts, fs, indexing="ij")
        tt = tt.reshape(-1)
        ff = ff.reshape(-1)
        ca, cb = _pair_candidates(a, b, tt, ff)
        vals = values_fn(np.concatenate([ca, cb]))
        totals = vals[: tt.size] + vals[tt.size :]
        idx = int(np.argmax(totals))
        if totals[idx] > best_val:
            best_val = float(totals[idx])
            best_t = float(tt[idx])
            best_f = float(ff[idx])
        span_t /= max(nt // 2, 2)
        span_f /= max(nf // 2, 2)
    if best_val <= base + 1e-10:
        return 0.0, a, b
    na, nb = _pair_candidates(a, b, np.array([best_t]), np.array([best_f]))
    return best_val - base, na[0], nb[0]


def max_avg_pure_decomposition(
    rho: DensityMatrix,
    objective: Callable[[np.ndarray], float] | None = None,
    restarts: int = DEFAULT_RESTARTS,
    sweeps: int = DEFAULT_SWEEPS,
    seed: int = 0,
    cap: int | None = None,
) -> DecompositionResult:
    """Best found weighted-average objective over pure decompositions of rho.

    ``objective`` maps a normalized member vector to a scalar; None selects
    the built-in two-qubit objective (twice the first-qubit marginal
    entropy), which is evaluated in batch. The ensemble cardinality is
    capped at ``cap`` (default twice the rank). The running best value is
    monotone over sweeps and restarts; the final decomposition must
    reconstruct rho to 1e-8 or a RuntimeError is raised.
    """
    d = rho.dim
    if objective is None and d != 4:
        raise ValueError("default pair objective requires a two-qubit state")
    lam, vecs = np.linalg.eigh(rho.matrix)
    keep = lam > EIGENVALUE_CLIP
    lam = np.clip(lam[keep], 0.0, None)
    vecs = vecs[:, keep]
    rank = int(lam.size)
    if rank == 0:
        raise ValueError("input state has no support")
    t = 2 * rank if cap is None else int(cap)
    t = max(t, rank)
    ensemble = vecs * np.sqrt(lam)  # (d, rank) columns

    values_fn = _pair_member_values if objective is None else _generic_member_values(objective)
    if objective is None:
        grid, zoom_coarse, zoom_fine, zoom_grid = (12, 8), 2, 6, (9, 9)
    else:
        grid, zoom_coarse, zoom_fine, zoom_grid = (8, 5), 1, 3, (5, 5)

    seq = np.random.SeedSequence(seed)
    children = seq.spawn(max(restarts, 1))
    best_value = -np.inf
    best_rows = None
    sweeps_used = 0
    since_improved = 0
    for restart in range(max(restarts, 1)):
        rng = np.random.default_rng(children[restart])
        if restart == 0:
            iso = np.zeros((t, rank), dtype=complex)
            iso[:rank, :rank] = np.eye(rank)
        else:
            z = rng.standard_normal((t, rank)) + 1j * rng.standard_normal((t, rank))
            iso, _ = np.linalg.qr(z)
        rows = iso @ ensemble.T  # (t, d) unnormalized members
        member_vals = values_fn(rows)
        total = float(member_vals.sum())
        # Coarse zoom while climbing, full depth only for the final polish.
        polishing = False
        for sweep in range(sweeps):
            sweeps_used += 1
            rounds = zoom_fine if polishing else zoom_coarse
            improved = 0.0
            for k in range(t):
                for l in range(k + 1, t):
                    if (
                        np.real(np.vdot(rows[k], rows[k]))
                        + np.real(np.vdot(rows[l], rows[l]))
                    ) < 1e-14:
                        continue
                    gain, na, nb = _optimize_pair(
                        rows[k], rows[l], values_fn, grid, rounds, zoom_grid
                    )
                    if gain > 0.0:
                        rows[k] = na
                        rows[l] = nb
                        pair_vals = values_fn(np.stack([na, nb]))
                        member_vals[k] = pair_vals[0]
                        member_vals[l] = pair_vals[1]
                        total = float(member_vals.sum())
                        improved += gain
            if polishing:
                if improved < 1e-8:
                    break
            elif improved < 1e-6:
                polishing = True
        if total > best_value + 1e-9:
            since_improved = 0
        else:
            since_improved += 1
        if total > best_value:
            best_value = total
            best_rows = rows.copy()
        restarts_run = restart + 1
        if since_improved >= 8 and restart >= 7:
            break  # further restarts have stopped helping

    weights = np.real(np.einsum("kd,kd->k", best_rows, best_rows.conj()))
    keep_rows = weights > 1e-12
    weights = weights[keep_rows]
    states = best_rows[keep_rows] / np.sqrt(weights)[:, None]
    decomposition = Decomposition(weights=weights, states=states)
    residual = 0.5 * float(
        np.sum(np.abs(np.linalg.eigvalsh(decomposition.reconstruction() - rho.matrix)))
    )
    if residual > _RECONSTRUCTION_ATOL:
        raise RuntimeError(
            f"decomposition fails to reconstruct the input (residual {residual:.2e})"
        )
    return DecompositionResult(
        value=float(best_value),
        decomposition=decomposition,
        diagnostics={
            "restarts": restarts_run,
            "sweeps_used": sweeps_used,
            "cardinality": int(weights.size),
            "reconstruction_residual": residual,
        },
    )
