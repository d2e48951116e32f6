import numpy as np
import pytest

from entlab.channels import (
    build_correlated_flip,
    build_depolarizing,
    build_dephasing,
    combine,
    compose,
    identity_channel,
)
from entlab.conjectures import (
    censorship_scan,
    eval_relation1,
    eval_relation2,
    eval_relation34,
    fit_growth_exponent,
)
from entlab.zoo import bell, cluster_state, ghz, line_edges, plus_all
from helpers import h2


def test_relation1_correlated_flip_threshold():
    """The pair inequality holds at level one half and breaks just above."""
    ch = build_correlated_flip(0.2, "ZZ")
    ok = eval_relation1(bell(), ch, 0, 1, level=0.5)
    assert ok.verdict == "satisfied"
    assert abs(ok.excess - h2(0.2)) < 1e-9
    assert abs(ok.k_hat_per_leak - 0.5) < 1e-12
    bad = eval_relation1(bell(), ch, 0, 1, level=0.6)
    assert bad.verdict == "violated"


def test_relation1_vacuous_without_leak():
    v = eval_relation1(plus_all(2), identity_channel(2), 0, 1)
    assert v.verdict == "vacuous"


def test_relation_verdict_serialization():
    v = eval_relation1(bell(), build_correlated_flip(0.2, "ZZ"), 0, 1, level=0.5)
    d = v.to_dict()
    for key in (
        "relation",
        "qubits",
        "level",
        "excess_leak",
        "term",
        "term_kind",
        "leaks",
        "reference_leak",
        "k_hat",
        "k_hat_per_leak",
        "verdict",
        "conditional",
        "notes",
        "diagnostics",
    ):
        assert key in d
    assert d["relation"] == 1
    assert all(isinstance(k, str) for k in d["leaks"])


def test_relation2_is_conditional():
    ch = build_correlated_flip(0.2, "ZZ")
    v = eval_relation2(bell(), ch, 0, 1, level=0.5, restarts=2, sweeps=8, seed=0)
    assert v.conditional
    assert v.term_kind == "assisted_mutual_information"
    # bell is pure, so the decomposed term equals the mutual information
    assert abs(v.term - 2.0) < 1e-6
    assert v.verdict == "satisfied"


def test_relation3_uses_minimum_leak():
    parts = [
        (build_depolarizing(0.1), (0,)),
        (build_depolarizing(0.3), (1,)),
        (build_dephasing(0.4), (2,)),
    ]
    ch = combine(parts, n=3)
    v = eval_relation34(ghz(3), ch, (0, 1, 2), mode="marginal")
    assert v.relation == 3
    assert abs(v.reference_leak - min(v.leaks.values())) < 1e-12
    assert v.verdict in ("violated", "vacuous")


def test_relation4_decomposed_mode():
    # two overlapping pair flips: pairwise invisible, jointly a full bit
    ch = compose(build_correlated_flip(0.5, "IZZ"), build_correlated_flip(0.5, "ZZI"))
    v = eval_relation34(
        ghz(3), ch, (0, 1, 2), mode="decomposed", level=0.5, restarts=2, sweeps=8
    )
    assert v.relation == 4
    assert v.term_kind == "decomposed_defect"
    assert abs(v.term - 1.0) < 1e-3
    assert abs(v.excess - 1.0) < 1e-6
    assert v.verdict == "satisfied"
    assert v.conditional
    with pytest.raises(ValueError):
        eval_relation34(ghz(3), ch, (0, 1, 2), mode="other")


def test_fit_growth_exponent_recovers_power_laws():
    sizes = [2, 3, 4, 5, 6]
    assert abs(fit_growth_exponent(sizes, [n**2 for n in sizes]) - 2.0) < 1e-12
    assert abs(fit_growth_exponent(sizes, [3.0 * n for n in sizes]) - 1.0) < 1e-12
    # zero entries are excluded, not log-diverged
    assert abs(fit_growth_exponent([2, 3, 4], [0.0, 3.0, 4.0]) - 1.0) < 1e-9
    assert fit_growth_exponent([2, 3], [0.0, 1.0]) is None


def test_censorship_scan_ghz_pairs():
    report = censorship_scan(ghz, range(3, 6), truncation=2, include_full="never")
    want = [3.0, 6.0, 10.0]
    assert np.abs(np.array(report.values) - want).max() < 1e-6
    assert 2.0 < report.exponent < 2.6
    assert report.growth == "approximately-quadratic"
    d = report.to_dict()
    assert d["sizes"] == [3, 4, 5]
    assert d["truncation"] == 2


def test_censorship_scan_product_family():
    report = censorship_scan(plus_all, range(2, 5), truncation=3, include_full="auto")
    assert max(abs(v) for v in report.values) < 1e-6
    assert report.growth == "trivially-censored"


def test_censorship_scan_cluster_line_small():
    fam = lambda n: cluster_state(n, line_edges(n))
    report = censorship_scan(fam, range(2, 5), truncation=3, include_full="auto")
    # full term for the pair, three pairs plus the full term at three,
    # boundary pairs and all four triples at four
    assert np.abs(np.array(report.values) - [2.0, 4.0, 6.0]).max() < 5e-3
    never = censorship_scan(fam, range(2, 5), truncation=3, include_full="never")
    assert np.abs(np.array(never.values) - [0.0, 3.0, 6.0]).max() < 5e-3


def test_censorship_scan_rejects_bad_policy():
    with pytest.raises(ValueError):
        censorship_scan(ghz, [3], include_full="sometimes")
