import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wdistill import (
    ConfigGraph,
    InvalidInputError,
    InvalidMeasurementError,
    InvalidPartyError,
    LocalMeasurement,
    UnknownPresetError,
    WState,
    apply_measurement,
    graph_catalog,
    kt_averages,
    remove_nodes,
    standard_w,
)
from wdistill.mc import random_measurement, random_w_state


def test_state_invariants():
    s = WState([0.5, 0.3, 0.2])
    assert s.x0 == 0.0
    assert s.labels == ("A", "B", "C")
    s2 = WState([0.3, 0.3, 0.2])
    assert abs(s2.x0 - 0.2) < 1e-12
    with pytest.raises(InvalidInputError):
        WState([0.9, 0.3])
    with pytest.raises(InvalidInputError):
        WState([1.0])
    with pytest.raises(InvalidInputError):
        WState([0.5, -0.1])


def test_tiny_components_are_disentangled():
    s = WState([0.5, 1e-16, 0.5 - 1e-16])
    assert s.components[1] == 0.0


def test_identity_split_leaves_state_unchanged():
    s = standard_w("ABC")
    m = LocalMeasurement.identity_split("B")
    outcomes = apply_measurement(s, m)
    assert len(outcomes) == 2
    for p, post in outcomes:
        assert abs(p - 0.5) < 1e-12
        assert post.components == pytest.approx(s.components, abs=1e-12)


@pytest.mark.parametrize("size,alpha", [(3, 0.3), (4, 0.7), (5, 0.25)])
def test_peel_measurement_outcome_two(size, alpha):
    # diag(sqrt(a),1)/diag(sqrt(1-a),0) on a standard W state removes the
    # measuring party with probability (1-a)(n-1)/n
    labels = tuple("ABCDEFG"[:size])
    s = standard_w(labels)
    m = LocalMeasurement.diagonal("A", [(alpha, 1.0), (1.0 - alpha, 0.0)])
    (p1, s1), (p2, s2) = apply_measurement(s, m)
    assert abs(p2 - (1.0 - alpha) * (size - 1) / size) < 1e-12
    assert s2.component("A") == 0.0
    rest = [s2.component(l) for l in labels[1:]]
    assert rest == pytest.approx([1.0 / (size - 1)] * (size - 1), abs=1e-12)


def test_measurement_update_worked_example():
    s = WState([0.5, 0.3, 0.2])
    m = LocalMeasurement.diagonal("C", [(0.2 / 0.5, 1.0), (1.0 - 0.2 / 0.5, 0.0)])
    (p1, s1), (p2, s2) = apply_measurement(s, m)
    assert abs(p1 - 0.52) < 1e-12
    assert s1.components == pytest.approx((5 / 13, 3 / 13, 5 / 13), abs=1e-12)
    assert abs(p2 - 0.48) < 1e-12
    assert s2.components == pytest.approx((0.625, 0.375, 0.0), abs=1e-12)


def test_incomplete_measurement_rejected():
    s = standard_w("AB")
    bad = LocalMeasurement("A", [(0.5, 0.0, 0.5), (0.4, 0.0, 0.5)])
    with pytest.raises(InvalidMeasurementError):
        apply_measurement(s, bad)


def test_unknown_party_rejected():
    s = standard_w("AB")
    m = LocalMeasurement.identity_split("Z")
    with pytest.raises(InvalidPartyError):
        apply_measurement(s, m)


def test_outcome_probabilities_sum_to_one_randomized():
    rng = np.random.default_rng(11)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        s = random_w_state(rng, n)
        m = random_measurement(rng, s.labels[int(rng.integers(n))])
        outcomes = apply_measurement(s, m)
        assert abs(sum(p for p, _ in outcomes) - 1.0) < 1e-12
        for p, post in outcomes:
            if post is not None:
                assert sum(post.components) <= 1.0 + 1e-12
                assert min(post.components) >= 0.0


def test_kt_identity_split_all_zero():
    s = WState([0.4, 0.3, 0.2])
    deltas = kt_averages(s, apply_measurement(s, LocalMeasurement.identity_split("B")))
    assert deltas == pytest.approx((0.0,) * 4, abs=1e-12)


def test_kt_directions_random_diagonal_measurements():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        n = int(rng.integers(2, 6))
        s = random_w_state(rng, n)
        a1 = float(rng.uniform(0.01, 0.99))
        c1 = float(rng.uniform(0.0, 1.0))
        m = LocalMeasurement.diagonal(
            s.labels[int(rng.integers(n))], [(a1, c1), (1.0 - a1, 1.0 - c1)]
        )
        deltas = kt_averages(s, apply_measurement(s, m))
        assert deltas[0] >= -1e-12
        assert max(deltas[1:]) <= 1e-12


def test_kt_direction_under_x0_removal():
    from wdistill import phase1_measurement

    rng = np.random.default_rng(17)
    for _ in range(2000):
        n = int(rng.integers(2, 6))
        s = random_w_state(rng, n)
        if s.x0 < 1e-6:
            continue
        deltas = kt_averages(s, apply_measurement(s, phase1_measurement(s)))
        assert deltas[0] >= -1e-12
        assert max(deltas[1:]) <= 1e-12


def test_kt_mismatched_parties_rejected():
    s = standard_w("AB")
    other = standard_w("AC")
    with pytest.raises(InvalidInputError):
        kt_averages(s, [(1.0, other)])


def test_remove_nodes_examples():
    tri = graph_catalog("triangle")
    assert remove_nodes(tri, {"C"}).edges == frozenset({("A", "B")})
    paw = graph_catalog("VI")
    reduced = remove_nodes(paw, {"D"})
    assert reduced.edges == graph_catalog("triangle").edges
    assert remove_nodes(tri, set()) == tri
    with pytest.raises(InvalidPartyError):
        remove_nodes(tri, {"Z"})


@st.composite
def graph_and_disjoint_subsets(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    labels = tuple("ABCDEFG"[:n])
    pairs = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.sets(st.sampled_from(pairs)) if pairs else st.just(set()))
    s1 = draw(st.sets(st.sampled_from(labels)))
    s2 = draw(st.sets(st.sampled_from(labels)))
    return ConfigGraph(labels, edges), s1, s2 - s1


@given(graph_and_disjoint_subsets())
@settings(max_examples=200, deadline=None)
def test_remove_nodes_commutes_on_disjoint_sets(case):
    g, s1, s2 = case
    assert remove_nodes(remove_nodes(g, s1), s2) == remove_nodes(remove_nodes(g, s2), s1)
    assert remove_nodes(remove_nodes(g, s1), s1 & s2) == remove_nodes(g, s1)


def test_standard_w_examples():
    assert standard_w("AB").components == (0.5, 0.5)
    assert standard_w("ABCD").components == (0.25,) * 4
    assert standard_w("ABC").components == pytest.approx((1 / 3,) * 3)


def test_graph_catalog_examples():
    wedge = graph_catalog("wedge", 3)
    assert wedge.edges == frozenset({("A", "B"), ("A", "C")})
    pairs = graph_catalog("pairs", 6)
    assert pairs.edges == frozenset({("1", "2"), ("3", "4"), ("5", "6")})
    assert len(graph_catalog("complete", 4).edges) == 6
    with pytest.raises(UnknownPresetError):
        graph_catalog("heptagon")
    with pytest.raises(InvalidInputError):
        graph_catalog("pairs", 5)


def test_graph_validation():
    with pytest.raises(InvalidInputError):
        ConfigGraph("AB", [("A", "A")])
    with pytest.raises(InvalidPartyError):
        ConfigGraph("AB", [("A", "C")])


def test_json_round_trips():
    s = WState([0.5, 0.25, 0.25], ("x", "y", "z"))
    assert WState.from_json(json.loads(json.dumps(s.to_json()))) == s
    g = graph_catalog("VI")
    assert ConfigGraph.from_json(json.loads(json.dumps(g.to_json()))) == g
    assert ConfigGraph.from_json({"preset": "pairs", "n": 4}) == graph_catalog("pairs", 4)
