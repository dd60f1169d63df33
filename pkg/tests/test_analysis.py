import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from iodgraph import (
    ActionabilityLevel,
    InformativenessLevel,
    IODGraph,
    InvalidGraphError,
    Node,
    NodeRole,
    actionability,
    classify,
    informativeness,
    make_graph,
    no_dangling_nodes,
)
from iodgraph.analysis import prune_dangling
from iodgraph.constructions import dangling_example, no_dangling_example, partial_example, perceptron

Info = InformativenessLevel
Act = ActionabilityLevel


def test_perceptron_is_fully_informative():
    assert informativeness(perceptron([3, 9, 2])) is Info.FULLY
    assert actionability(perceptron([3, 9, 2])) is Act.FULLY


def test_one_silent_input_gives_partial():
    g = make_graph(["i1", "i2"], ["o"], [("i1", "o")])
    assert informativeness(g) is Info.PARTIALLY
    # the single output is reached, so it is very actionable
    assert actionability(g) is Act.VERY


def test_edgeless_graph_is_non():
    g = make_graph(["i"], ["o"], [])
    assert informativeness(g) is Info.NON
    assert actionability(g) is Act.NON


def test_parallel_wires_are_very():
    g = make_graph(["i1", "i2"], ["o1", "o2"], [("i1", "o1"), ("i2", "o2")])
    assert informativeness(g) is Info.VERY
    assert actionability(g) is Act.VERY


def test_partial_example_and_its_repair():
    g = partial_example()
    assert informativeness(g) is Info.PARTIALLY
    assert oracles.path_exists(g, "I1", "O2")
    assert not oracles.path_exists(g, "I2", "O1")
    assert not oracles.path_exists(g, "I2", "O2")
    assert informativeness(g.with_edges(add=[("I2", "W")])) >= Info.VERY


def test_invalid_graph_rejected():
    bad = IODGraph([Node("i", NodeRole.INPUT), Node("o", NodeRole.OUTPUT)], [("o", "i")])
    with pytest.raises(InvalidGraphError):
        informativeness(bad)
    with pytest.raises(InvalidGraphError):
        no_dangling_nodes(bad)


def test_dangling_examples():
    assert no_dangling_nodes(dangling_example()).dangling == {"A", "D"}
    assert not no_dangling_nodes(dangling_example()).satisfied
    assert no_dangling_nodes(make_graph(["i"], ["o"], [("i", "o")])).satisfied
    g = make_graph(["i"], ["o"], [("i", "a"), ("a", "o")], intermediates=["b"])
    report = no_dangling_nodes(g)
    assert report.dangling == {"b"}
    assert not report.satisfied


def test_no_dangling_example_has_silent_input():
    g = no_dangling_example()
    assert no_dangling_nodes(g).satisfied
    assert informativeness(g) is Info.PARTIALLY


def test_classify_json_shape():
    out = classify(dangling_example())
    assert set(out) == {"informativeness", "actionability", "no_dangling_nodes", "dangling"}
    assert out["dangling"] == ["A", "D"]
    assert out["no_dangling_nodes"] is False
    assert isinstance(out["informativeness"], str)


def test_level_labels_parse_back():
    for level in Info:
        assert Info.parse(level.label) is level


def test_prune_dangling_keeps_classification():
    g = dangling_example()
    pruned = prune_dangling(g)
    assert no_dangling_nodes(pruned).satisfied
    assert informativeness(pruned) == informativeness(g)


def test_ten_thousand_graphs_against_pairwise_oracle():
    rng = random.Random(20241019)
    for _ in range(10_000):
        g = oracles.random_graph(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 5),
                                 rng.uniform(0.05, 0.5))
        info, act = informativeness(g), actionability(g)
        assert info.label == oracles.informativeness(g)
        assert act.label == oracles.actionability(g)
        # non and fully coincide; "at least partially" coincides; very may differ
        assert (info is Info.NON) == (act is Act.NON)
        assert (info >= Info.PARTIALLY) == (act >= Act.PARTIALLY)
        assert (info is Info.FULLY) == (act is Act.FULLY)
        report = no_dangling_nodes(g)
        assert report.dangling == oracles.dangling(g)
        if report.satisfied and g.intermediates:
            assert info >= Info.PARTIALLY


@st.composite
def small_graphs(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    ni, no = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    nm = draw(st.integers(0, 12 - ni - no))
    return oracles.random_graph(random.Random(seed), ni, no, nm, draw(st.floats(0.05, 0.5)))


@settings(max_examples=300, deadline=None)
@given(small_graphs())
def test_fully_iff_every_pair_connected(g):
    every = all(oracles.path_exists(g, i, o) for i in g.inputs for o in g.outputs)
    assert (informativeness(g) is Info.FULLY) == every


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_actionability_is_informativeness_of_transpose(g):
    assert actionability(g).value == informativeness(g.transpose()).value
