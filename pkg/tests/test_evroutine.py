import math

import numpy as np
import pytest

from wdistill import (
    FAILURE,
    ConfigGraph,
    FailTwoParty,
    Measure,
    PreconditionError,
    RemoveIsolated,
    StandardW,
    Terminal,
    WState,
    ev_distribution,
    ev_measurement,
    ev_tree,
    ev_tree_to_dot,
    full_set_lambda,
    graph_catalog,
    select_ev_action,
    standard_w,
    statevector_oracle,
)
from wdistill.evroutine import ev_order_sensitivity
from wdistill.lpo import fit_polynomial
from wdistill.mc import random_w_state


def y_alpha_state(alpha, heavy="D"):
    labels = ("A", "B", "C", "D")
    comps = [alpha / (1 + 3 * alpha)] * 4
    comps[labels.index(heavy)] = 1 / (1 + 3 * alpha)
    return WState(comps, labels)


def test_select_terminal_on_uniform_states():
    for name in ("V", "VI", "III-c"):
        g = graph_catalog(name)
        assert isinstance(select_ev_action(standard_w(g.labels), g), Terminal)


def test_select_measure_on_heavy_pendant():
    # heaviest party is the pendant D; only A is both lagging and adjacent
    g = graph_catalog("VI")
    assert select_ev_action(y_alpha_state(0.4), g) == Measure("A")


def test_select_isolated_and_two_party_failure():
    g = ConfigGraph("ABC", [("B", "C")])
    assert select_ev_action(standard_w("ABC"), g) == RemoveIsolated("A")
    g2 = ConfigGraph("AB", [])
    assert isinstance(select_ev_action(standard_w("AB"), g2), FailTwoParty)


def test_select_requires_x0_zero():
    g = graph_catalog("wedge")
    with pytest.raises(PreconditionError):
        select_ev_action(WState([0.3, 0.3, 0.2]), g)


def test_ev_measurement_equal_branch_scales_other_components():
    alpha = 0.35
    s = y_alpha_state(alpha)
    m = ev_measurement(s, "A")
    outcomes = statevector_oracle(s, m)
    (p1, s1), (p2, s2) = outcomes
    # equal branch is proportional to (alpha, alpha^2, alpha^2, alpha)
    want = np.array([alpha, alpha ** 2, alpha ** 2, alpha])
    want /= want.sum()
    assert s1.components == pytest.approx(tuple(want), abs=1e-12)
    assert s1.component("A") == pytest.approx(s1.component("D"), abs=1e-12)
    assert s2.component("A") == 0.0


def test_ev_measurement_rejects_maximal_party():
    with pytest.raises(PreconditionError):
        ev_measurement(standard_w("ABC"), "B")


def test_ev_measurement_degenerate_near_tie():
    s = WState([0.5, 0.5 - 5e-13, 1e-12])
    with pytest.raises(PreconditionError):
        ev_measurement(s, "B")  # within the tie tolerance of the maximum
    # just outside the tolerance the equal branch is near-deterministic
    gap = 1e-10
    s2 = WState([0.5, 0.5 * (1 - gap), 0.5 * gap])
    m = ev_measurement(s2, "B")
    (p_equal, post), (p_vanish, _) = statevector_oracle(s2, m)
    assert p_equal > 1.0 - 1e-9
    assert post.component("B") == pytest.approx(post.component("A"), rel=1e-9)


def test_ev_distribution_standard_w_is_deterministic():
    for name in ("triangle", "V", "III-c"):
        g = graph_catalog(name)
        s = standard_w(g.labels)
        d = ev_distribution(s, g)
        assert d.probability(StandardW(g.labels)) == pytest.approx(1.0)


def test_ev_distribution_worked_example():
    s = WState([0.5, 0.3, 0.2])
    d = ev_distribution(s, graph_catalog("triangle"))
    assert d.probability(StandardW("ABC")) == pytest.approx(0.36, abs=1e-12)
    assert d.probability(StandardW("AB")) == pytest.approx(0.36, abs=1e-12)
    assert d.probability(StandardW("AC")) == pytest.approx(0.16, abs=1e-12)
    assert d.probability(FAILURE) == pytest.approx(0.12, abs=1e-12)
    assert full_set_lambda(s) == pytest.approx(0.36, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.2, 0.37, 0.55, 0.8])
def test_ev_distribution_heavy_pendant_branch_weights(alpha):
    # exact branch weights for the peel-off state on the paw graph
    g = graph_catalog("VI")
    d = ev_distribution(y_alpha_state(alpha), g)
    norm = 1 + 3 * alpha
    assert d.probability(StandardW("BC")) == pytest.approx(2 * alpha * (1 - alpha) / norm, abs=1e-12)
    assert d.probability(StandardW("AD")) == pytest.approx(2 * alpha * (1 - alpha) ** 2 / norm, abs=1e-12)
    assert d.probability(StandardW("ABD")) == pytest.approx(3 * alpha ** 2 * (1 - alpha) / norm, abs=1e-12)
    assert d.probability(StandardW("ACD")) == pytest.approx(3 * alpha ** 2 * (1 - alpha) / norm, abs=1e-12)
    assert d.probability(StandardW("ABCD")) == pytest.approx(4 * alpha ** 3 / norm, abs=1e-12)


def test_full_set_lambda_closed_form_random():
    rng = np.random.default_rng(23)
    g_by_n = {n: graph_catalog("complete", n) for n in (3, 4, 5)}
    for _ in range(1000):
        n = int(rng.integers(3, 6))
        comps = rng.dirichlet(np.ones(n))
        if np.sort(comps)[-1] - np.sort(comps)[-2] < 1e-6:
            continue  # needs a unique maximum
        s = WState(comps, g_by_n[n].labels)
        d = ev_distribution(s, g_by_n[n])
        assert d.probability(StandardW(s.labels)) == pytest.approx(
            full_set_lambda(s), abs=1e-10
        )


def test_ev_distribution_total_probability():
    rng = np.random.default_rng(3)
    graphs = [graph_catalog(n) for n in ("wedge", "triangle", "I", "II", "IV", "VI")]
    graphs.append(graph_catalog("pairs", 6))
    for _ in range(200):
        g = graphs[int(rng.integers(len(graphs)))]
        s = random_w_state(rng, g.n, x0_zero=True)
        s = WState(s.components, g.labels)
        assert ev_distribution(s, g).total() == pytest.approx(1.0, abs=1e-9)


def test_branch_polynomial_structure():
    # against the peel-off family, every terminal weight times the
    # outcome-1 probability is a polynomial in alpha: interpolating on
    # 4N nodes must reproduce fresh samples exactly
    g = graph_catalog("VI")
    labels = tuple(g.labels)

    def weights(alpha):
        d = ev_distribution(y_alpha_state(alpha), g)
        p_alpha = (1 + 3 * alpha) / 4
        return {t: p * p_alpha for t, p in d.items()}

    nodes = 0.5 * (1 + np.cos((2 * np.arange(16) + 1) * np.pi / 32))
    samples = [weights(float(a)) for a in nodes]
    terminals = {t for s in samples for t in s}
    for term in terminals:
        coef = fit_polynomial(nodes, [s.get(term, 0.0) for s in samples])
        for alpha in (0.11, 0.47, 0.83):
            got = weights(alpha).get(term, 0.0)
            assert np.polynomial.polynomial.polyval(alpha, coef) == pytest.approx(
                got, abs=1e-10
            )


def test_ev_tree_depth_and_dot_export():
    s = WState([0.4, 0.3, 0.2, 0.1])
    g = graph_catalog("VI")
    root = ev_tree(s, g)

    def depth(node):
        return 1 + max((depth(c) for _, c in node.children), default=0)

    assert depth(root) <= 2 * 4
    dot = ev_tree_to_dot(root)
    assert dot.startswith("digraph")
    assert "W2" in dot or "W3" in dot or "W4" in dot


def test_order_sensitivity_is_recorded():
    # the selection rules leave one tie-break open; record how much the
    # terminal weights move when it flips (observed: not at all)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(300):
        for name in ("VI", "IV", "III-b"):
            g = graph_catalog(name)
            s = WState(rng.dirichlet(np.ones(4)), g.labels)
            worst = max(worst, ev_order_sensitivity(s, g))
    print(f"\nmax terminal-probability shift under reversed tie-break: {worst:.3e}")
    assert math.isfinite(worst)
    assert worst <= 1e-9  # empirical: the enumeration is order-independent
