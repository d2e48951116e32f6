"""Verdicts for the leak/correlation relations and the growth scan.

Each relation compares an excess-leak quantity against a correlation term
scaled by a reference leak and a level c:

    1: excess_leak(a,b)      >= c * mean-leak * mutual_information(a,b)
    2: excess_leak(a,b)      >= c * mean-leak * assisted_mutual_information(a,b)
    3: excess_leak_set(A)    >= c * min-leak  * max_entropy_defect(A)
    4: excess_leak_set(A)    >= c * min-leak  * decomposed defect of A

Relation 2 and 4 right-hand sides are best-found lower bounds, so their
"satisfied" verdicts are flagged conditional; "violated" is definitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import QuantumChannel
from .errors import SizeLimitError
from .measures import (
    MAX_SET_SIZE,
    assisted_mutual_information,
    excess_leak,
    excess_leak_set,
    information_leak,
    max_entropy_defect,
    mutual_information,
    total_defect,
)
from .optim import max_avg_pure_decomposition
from .states import DensityMatrix, PureState, as_density_matrix, partial_trace, validate_subset

VACUOUS_ATOL = 1e-9
# per-term totals inherit the defect optimizer's accuracy, not machine epsilon
SCAN_NOISE_FLOOR = 1e-6


@dataclass
class RelationVerdict:
    """Outcome of one relation check at one level."""

    relation: int
    qubits: tuple
    level: float
    excess: float
    term: float
    term_kind: str
    leaks: dict
    reference_leak: float
    k_hat: float | None
    k_hat_per_leak: float | None
    verdict: str
    conditional: bool = False
    notes: str = ""
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "qubits": list(self.qubits),
            "level": self.level,
            "excess_leak": self.excess,
            "term": self.term,
            "term_kind": self.term_kind,
            "leaks": {str(k): v for k, v in self.leaks.items()},
            "reference_leak": self.reference_leak,
            "k_hat": self.k_hat,
            "k_hat_per_leak": self.k_hat_per_leak,
            "verdict": self.verdict,
            "conditional": self.conditional,
            "notes": self.notes,
            "diagnostics": self.diagnostics,
        }


def _ratio(num: float, den: float) -> float | None:
    if den < VACUOUS_ATOL:
        if num < VACUOUS_ATOL:
            return None
        return float("inf")
    return num / den


def _build_verdict(
    relation: int,
    qubits: tuple,
    level: float,
    excess: float,
    term: float,
    term_kind: str,
    leaks: dict,
    reference_leak: float,
    conditional_on_satisfied: bool,
    notes: str = "",
    diagnostics: dict | None = None,
) -> RelationVerdict:
    k_hat = _ratio(excess, term)
    k_hat_per_leak = _ratio(excess, term * reference_leak)
    vacuous = excess < VACUOUS_ATOL and (term < VACUOUS_ATOL or reference_leak < VACUOUS_ATOL)
    if vacuous:
        verdict = "vacuous"
        conditional = False
    else:
        satisfied = excess >= level * reference_leak * term - 1e-12
        verdict = "satisfied" if satisfied else "violated"
        conditional = conditional_on_satisfied and satisfied
    return RelationVerdict(
        relation=relation,
        qubits=qubits,
        level=level,
        excess=float(excess),
        term=float(term),
        term_kind=term_kind,
        leaks=leaks,
        reference_leak=float(reference_leak),
        k_hat=k_hat,
        k_hat_per_leak=k_hat_per_leak,
        verdict=verdict,
        conditional=conditional,
        notes=notes,
        diagnostics=diagnostics or {},
    )


def eval_relation1(
    state: PureState | DensityMatrix,
    channel: QuantumChannel,
    a: int,
    b: int,
    level: float = 1.0,
) -> RelationVerdict:
    """Pair relation with the plain mutual information on the right."""
    rho = as_density_matrix(state)
    pair = validate_subset((a, b), rho.n)
    leaks = {q: information_leak(channel, (q,)) for q in pair}
    mean_leak = float(np.mean(list(leaks.values())))
    excess = excess_leak(channel, *pair)
    term = mutual_information(rho, *pair)
    return _build_verdict(
        1, pair, level, excess, term, "mutual_information", leaks, mean_leak, False
    )


def eval_relation2(
    state: PureState | DensityMatrix,
    channel: QuantumChannel,
    a: int,
    b: int,
    level: float = 1.0,
    restarts: int = 8,
    sweeps: int = 40,
    seed: int = 0,
) -> RelationVerdict:
    """Pair relation against the decomposition-maximized correlation.

    The right-hand term is a certified lower bound, so a satisfied verdict
    is conditional; a violated one is definitive.
    """
    rho = as_density_matrix(state)
    pair = validate_subset((a, b), rho.n)
    leaks = {q: information_leak(channel, (q,)) for q in pair}
    mean_leak = float(np.mean(list(leaks.values())))
    excess = excess_leak(channel, *pair)
    assisted = assisted_mutual_information(
        rho, *pair, restarts=restarts, sweeps=sweeps, seed=seed
    )
    return _build_verdict(
        2,
        pair,
        level,
        excess,
        assisted.value,
        "assisted_mutual_information",
        leaks,
        mean_leak,
        True,
        notes="term is a best-found lower bound",
        diagnostics=assisted.diagnostics,
    )


def _decomposed_defect(
    rho: DensityMatrix,
    subset: tuple,
    restarts: int,
    sweeps: int,
    seed: int,
) -> tuple[float, dict]:
    """Best found weighted-average defect over pure decompositions of rho|_A."""
    marginal = partial_trace(rho, subset)
    m = len(subset)
    if m == 2:
        # for pure pair members the defect equals twice the marginal entropy,
        # which is the batched built-in objective
        result = max_avg_pure_decomposition(
            marginal, objective=None, restarts=restarts, sweeps=sweeps, seed=seed
        )
        return result.value, result.diagnostics

    def member_defect(vec: np.ndarray) -> float:
        member = DensityMatrix(m, np.outer(vec, vec.conj()))
        return max_entropy_defect(member, tuple(range(m)), tol=1e-5, max_iter=2000).value

    result = max_avg_pure_decomposition(
        marginal,
        objective=member_defect,
        restarts=max(1, restarts // 4),
        sweeps=max(1, sweeps // 10),
        seed=seed,
    )
    return result.value, result.diagnostics


def eval_relation34(
    state: PureState | DensityMatrix,
    channel: QuantumChannel,
    subset: Iterable[int],
    level: float = 1.0,
    mode: str = "marginal",
    restarts: int = 8,
    sweeps: int = 40,
    seed: int = 0,
) -> RelationVerdict:
    """Set relation; ``mode`` picks the marginal (3) or decomposed (4) term.

    The reference leak is the minimum single-qubit leak over the subset.
    """
    rho = as_density_matrix(state)
    keep = validate_subset(subset, rho.n)
    if len(keep) < 2:
        raise ValueError("subset must contain at least two qubits")
    if len(keep) > MAX_SET_SIZE:
        raise SizeLimitError(f"subset of size {len(keep)} exceeds the cap of {MAX_SET_SIZE}")
    if mode not in ("marginal", "decomposed"):
        raise ValueError(f"mode must be 'marginal' or 'decomposed', got {mode!r}")
    leaks = {q: information_leak(channel, (q,)) for q in keep}
    min_leak = float(min(leaks.values()))
    excess_result = excess_leak_set(channel, keep)
    diagnostics = {"excess": excess_result.diagnostics}
    if mode == "marginal":
        relation = 3
        defect = max_entropy_defect(rho, keep)
        term = defect.value
        term_kind = "max_entropy_defect"
        conditional = False
        notes = ""
        diagnostics["term"] = defect.diagnostics
    else:
        relation = 4
        term, term_diag = _decomposed_defect(rho, keep, restarts, sweeps, seed)
        term_kind = "decomposed_defect"
        conditional = True
        notes = "term is a best-found lower bound"
        diagnostics["term"] = term_diag
    return _build_verdict(
        relation,
        keep,
        level,
        excess_result.value,
        term,
        term_kind,
        leaks,
        min_leak,
        conditional,
        notes=notes,
        diagnostics=diagnostics,
    )


@dataclass
class CensorshipReport:
    """Per-size totals and the fitted growth exponent of a state family."""

    sizes: list
    values: list
    exponent: float | None
    growth: str
    truncation: int
    include_full: str
    per_size_details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes,
            "values": self.values,
            "exponent": self.exponent,
            "growth": self.growth,
            "truncation": self.truncation,
            "include_full": self.include_full,
        }


def fit_growth_exponent(sizes: Sequence[int], values: Sequence[float]) -> float | None:
    """Least-squares slope of log value against log size, positive values only."""
    xs = []
    ys = []
    for n, v in zip(sizes, values):
        if v > SCAN_NOISE_FLOOR:
            xs.append(np.log(float(n)))
            ys.append(np.log(float(v)))
    if len(xs) < 2:
        return None
    slope, _ = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(slope)


def _classify_growth(exponent: float | None, values: Sequence[float]) -> str:
    if all(v <= SCAN_NOISE_FLOOR for v in values):
        return "trivially-censored"
    if exponent is None:
        return "undetermined"
    if exponent < 0.5:
        return "sublinear"
    if exponent < 1.5:
        return "approximately-linear"
    if exponent < 2.5:
        return "approximately-quadratic"
    return "superquadratic"


def censorship_scan(
    family: Callable[[int], PureState | DensityMatrix],
    sizes: Iterable[int],
    truncation: int = 3,
    include_full: str = "never",
    tol: float = 1e-6,
) -> CensorshipReport:
    """Total-defect growth of a family over register sizes.

    ``include_full`` is "never" (uniform proper-subset truncation, the
    default so totals stay comparable across sizes), "auto" (full-set term
    added when the register fits the optimizer cap), or "always".
    """
    if include_full not in ("never", "auto", "always"):
        raise ValueError(f"include_full must be never/auto/always, got {include_full!r}")
    size_list = sorted(int(n) for n in sizes)
    values = []
    details = {}
    for n in size_list:
        state = family(n)
        if include_full == "never":
            flag: bool | None = False
        elif include_full == "always":
            flag = True
        else:
            flag = None
        res = total_defect(state, max_subset_size=truncation, include_full=flag, tol=tol)
        values.append(res.value)
        details[n] = {
            "value": res.value,
            "value_without_full": res.value_without_full,
            "included_full": res.included_full,
        }
    exponent = fit_growth_exponent(size_list, values)
    return CensorshipReport(
        sizes=size_list,
        values=[float(v) for v in values],
        exponent=exponent,
        growth=_classify_growth(exponent, values),
        truncation=int(truncation),
        include_full=include_full,
        per_size_details=details,
    )
