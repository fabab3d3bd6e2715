"""Coefficient formulas and radius-parametrized graph families."""

import numpy as np
import pytest

from yamabe import (
    GraphFamily,
    ProblemFamily,
    evaluate_field,
    graph_distance,
    graph_to_dict,
    path_graph,
)


def test_evaluate_constant_and_sequence():
    dist = np.array([0.0, 1.0, 2.0])
    np.testing.assert_array_equal(evaluate_field(3, dist), [3.0, 3.0, 3.0])
    np.testing.assert_array_equal(evaluate_field(2.5, dist), [2.5, 2.5, 2.5])
    np.testing.assert_array_equal(evaluate_field([1.0, 2.0, 3.0], dist), [1, 2, 3])
    with pytest.raises(ValueError):
        evaluate_field([1.0, 2.0], dist)
    with pytest.raises(ValueError):
        evaluate_field(True, dist)
    with pytest.raises(ValueError):
        evaluate_field({"a": 1}, dist)


def test_evaluate_formula():
    dist = np.array([0.0, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(evaluate_field("1 + dist^4", dist), [1, 2, 17, 82])
    np.testing.assert_allclose(evaluate_field("2", dist), [2, 2, 2, 2])
    np.testing.assert_allclose(
        evaluate_field("exp(-dist)", dist), np.exp(-dist)
    )
    np.testing.assert_allclose(
        evaluate_field("maximum(dist, 1)", dist), [1, 1, 2, 3]
    )


def test_evaluate_formula_rejects_unsafe_input():
    dist = np.zeros(2)
    with pytest.raises(ValueError):
        evaluate_field("__import__('os')", dist)
    with pytest.raises(ValueError):
        evaluate_field("dist.__class__", dist)
    with pytest.raises(ValueError):
        evaluate_field("dist; dist", dist)
    with pytest.raises(ValueError):
        evaluate_field("open('x')", dist)
    with pytest.raises(ValueError):
        evaluate_field("nosuchname + 1", dist)


def test_family_names_validated():
    with pytest.raises(ValueError):
        GraphFamily("hypercube")
    GraphFamily("path", {"n": 3})


def test_path_family_radius_fills_size():
    fam = GraphFamily("path")
    g, anchor = fam.materialize(6)
    assert g.n == 7
    assert anchor == 0
    fixed = GraphFamily("path", {"n": 4})
    g2, _ = fixed.materialize(100)
    assert g2.n == 4
    with pytest.raises(ValueError):
        fam.materialize()


def test_lattice_and_tree_families():
    g, anchor = GraphFamily("lattice_zd_ball", {"d": 2}).materialize(1)
    assert g.n == 5
    assert int(graph_distance(g, anchor).max()) == 1
    g, _ = GraphFamily("tree_ball", {"branching": 2}).materialize(2)
    assert g.n == 7
    with pytest.raises(ValueError):
        GraphFamily("lattice_zd_ball", {"d": 1}).materialize()
    with pytest.raises(ValueError):
        GraphFamily("tree_ball").materialize()


def test_cycle_family_needs_n():
    g, _ = GraphFamily("cycle", {"n": 6}).materialize()
    assert g.n == 6
    assert g.n_edges == 6
    with pytest.raises(ValueError):
        GraphFamily("cycle").materialize(4)


def test_explicit_family_roundtrip():
    base, _ = path_graph(4)
    fam = GraphFamily("explicit", {"data": graph_to_dict(base), "x0": 2})
    g, anchor = fam.materialize(999)
    assert g.n == 4
    assert anchor == 2
    np.testing.assert_array_equal(g.mu, base.mu)


def test_problem_family_evaluates_on_graph():
    fam = ProblemFamily(p=4.0, alpha=3.0, delta=0.4, h="1 + dist^2", g=2.0)
    g, anchor = GraphFamily("path").materialize(3)
    spec = fam.on(g, anchor)
    np.testing.assert_allclose(spec.h, [1.0, 2.0, 5.0, 10.0])
    np.testing.assert_allclose(spec.g, [2.0] * 4)
    assert spec.p == 4.0 and spec.theta == 1.0


def test_weight_and_mu_passthrough():
    g, _ = GraphFamily("path", {"n": 3, "weight": 2.0, "mu": 0.5}).materialize()
    assert float(g.weights[0]) == 2.0
    np.testing.assert_array_equal(g.mu, [0.5, 0.5, 0.5])
