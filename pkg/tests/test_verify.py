"""Hypothesis checks, residual and positivity certificates, inequality suite."""

import numpy as np
import pytest

from yamabe import (
    GraphFamily,
    HypothesisError,
    ProblemFamily,
    ProblemSpec,
    SolveOptions,
    WeightedGraph,
    exhaustion_study,
    hypotheses_check,
    inequality_suite,
    path_graph,
    positivity_certificate,
    residual_report,
    solve,
)


def spec_on(graph, p=4.0, alpha=3.0, delta=0.4, theta=1.0, h=1.0, g_coef=1.0):
    return ProblemSpec(
        p=p,
        alpha=alpha,
        delta=delta,
        theta=theta,
        h=np.broadcast_to(np.float64(h), (graph.n,)).copy(),
        g=np.broadcast_to(np.float64(g_coef), (graph.n,)).copy(),
    )


def test_hypotheses_pass_with_full_report():
    g, _ = path_graph(5)
    report = hypotheses_check(g, spec_on(g))
    assert report["passed"] is True
    names = [c["name"] for c in report["checks"]]
    assert names == [
        "p_range",
        "min_h",
        "min_hmu",
        "g_nonneg",
        "delta_range",
        "alpha_range",
        "theta_positive",
        "h_delta_integral",
        "connected",
    ]
    assert all(c["passed"] for c in report["checks"])


def test_hypotheses_alpha_too_small():
    g, _ = path_graph(3)
    with pytest.raises(HypothesisError) as err:
        hypotheses_check(g, spec_on(g, alpha=2.0))
    assert err.value.name == "alpha_range"
    assert "alpha must exceed 2" in str(err.value)


def test_hypotheses_alpha_exceeds_p():
    g, _ = path_graph(3)
    with pytest.raises(HypothesisError) as err:
        hypotheses_check(g, spec_on(g, p=3.0, alpha=3.5))
    assert err.value.name == "alpha_range"
    assert "must not exceed p" in str(err.value)


def test_hypotheses_delta_range():
    g, _ = path_graph(3)
    # delta = 1/(p-2) sits exactly on the excluded boundary
    with pytest.raises(HypothesisError) as err:
        hypotheses_check(g, spec_on(g, p=4.0, delta=0.5))
    assert err.value.name == "delta_range"
    with pytest.raises(HypothesisError):
        hypotheses_check(g, spec_on(g, delta=0.0))
    # for p = 2 only positivity of delta is required: a large delta gets
    # past delta_range and the failure lands on alpha instead, since no
    # alpha satisfies 2 < alpha <= 2
    with pytest.raises(HypothesisError) as err:
        hypotheses_check(g, spec_on(g, p=2.0, alpha=2.5, delta=5.0))
    assert err.value.name == "alpha_range"


def test_hypotheses_other_failures():
    g, _ = path_graph(3)
    cases = [
        (dict(p=1.5), "p_range"),
        (dict(h=0.0), "min_h"),
        (dict(theta=0.0), "theta_positive"),
        (dict(g_coef=-1.0), "g_nonneg"),
    ]
    for kwargs, name in cases:
        with pytest.raises(HypothesisError) as err:
            hypotheses_check(g, spec_on(g, **kwargs))
        assert err.value.name == name


def test_residual_exact_zero_cases():
    g = WeightedGraph.from_edges(1, [])
    rep = residual_report(g, spec_on(g), np.ones(1))
    # -0 + 1*1 - 1*1 = 0 exactly
    assert rep.residual_sup == 0.0
    g2, _ = path_graph(4)
    rep = residual_report(g2, spec_on(g2), np.zeros(4))
    assert rep.residual_sup == 0.0
    assert rep.min_u == 0.0


def test_residual_grows_when_perturbed():
    g, _ = path_graph(10)
    spec = spec_on(g)
    res = solve(g, spec)
    assert res.converged
    at_solution = residual_report(g, spec, res.u).residual_sup
    perturbed = residual_report(g, spec, res.u + 0.01).residual_sup
    assert at_solution <= 1e-7
    assert perturbed > 100.0 * at_solution


def test_residual_uses_eigen_factor():
    # p = alpha with h = 2: the equation balances only with the reported
    # eigenvalue factor, not with factor 1
    g, _ = path_graph(8)
    spec = spec_on(g, p=3.0, alpha=3.0, h=2.0)
    res = solve(g, spec)
    assert res.converged
    with_factor = residual_report(g, spec, res.u, eigen_factor=res.eigen_factor)
    without = residual_report(g, spec, res.u, eigen_factor=1.0)
    assert with_factor.residual_sup <= 1e-7
    assert without.residual_sup > 1e-2


def test_positivity_strictly_positive():
    g, _ = path_graph(4)
    cert = positivity_certificate(g, np.full(4, 2.0))
    assert cert.passed
    assert cert.min_u == 2.0
    assert cert.flagged_vertex is None


def test_positivity_flags_zero_with_positive_neighbor():
    g = WeightedGraph.from_edges(2, [(0, 1, 1.0)])
    cert = positivity_certificate(g, np.array([0.0, 1.0]), p=3.0)
    assert not cert.passed
    assert cert.min_u == 0.0
    assert cert.flagged_vertex == 0
    # lap_p at the flagged vertex is strictly positive, the obstruction
    assert cert.delta_p_at_flag == pytest.approx(1.0)


def test_positivity_negative_minimum():
    g = WeightedGraph.from_edges(2, [(0, 1, 1.0)])
    cert = positivity_certificate(g, np.array([-1.0, 1.0]))
    assert not cert.passed
    assert cert.min_u == -1.0
    assert cert.flagged_vertex is None


def test_inequality_suite_passes():
    g, _ = path_graph(6)
    report = inequality_suite(g, spec_on(g), trials=200, seed=7)
    assert report["passed"] is True
    assert report["seed"] == 7
    assert report["trials"] == 200
    assert set(report["inequalities"]) == {
        "elementary",
        "gj_pointwise",
        "holder_embedding",
        "bd_sup_bound",
    }
    for state in report["inequalities"].values():
        assert state["violations"] == 0
        assert state["max_ratio"] <= 1.0 + 1e-9


def test_inequality_suite_deterministic():
    g, _ = path_graph(6)
    a = inequality_suite(g, spec_on(g), trials=100, seed=42)
    b = inequality_suite(g, spec_on(g), trials=100, seed=42)
    assert a == b


def test_inequality_suite_p2_vacuous_entries():
    g, _ = path_graph(4)
    spec = spec_on(g, p=2.0, alpha=2.0 + 1e-6, delta=0.7)
    report = inequality_suite(g, spec, trials=50, seed=1)
    assert report["passed"]
    for name in ("gj_pointwise", "holder_embedding"):
        assert report["inequalities"][name]["note"] == "vacuous for p = 2"
    assert "note" not in report["inequalities"]["elementary"]


def test_inequality_suite_rejects_bad_trials():
    g, _ = path_graph(4)
    with pytest.raises(ValueError):
        inequality_suite(g, spec_on(g), trials=0, seed=0)


def lattice_family():
    family = GraphFamily("lattice_zd_ball", {"d": 1})
    problem = ProblemFamily(p=4.0, alpha=3.0, delta=0.4, h="1 + dist^4", g=1.0)
    return family, problem


def test_exhaustion_gamma_nonincreasing():
    family, problem = lattice_family()
    study = exhaustion_study(
        family, problem, (4, 8, 16), SolveOptions(grad_tol=1e-9)
    )
    rows = study["rows"]
    assert [row["R"] for row in rows] == [4, 8, 16]
    gammas = [row["gamma"] for row in rows]
    assert all(b <= a + 1e-9 for a, b in zip(gammas, gammas[1:]))
    assert all(row["converged"] for row in rows)
    bounds = [row["tail_bound"] for row in rows]
    assert all(b < a for a, b in zip(bounds, bounds[1:]))
    assert study["universe_radius"] == 32
    assert len(study["gaps"]) == 2


def test_exhaustion_certifies_monotonicity_failure():
    # dropping the crossing edges means zero-extension is not isometric,
    # so at very small radii the energy level can genuinely rise with R;
    # the study must refuse to certify such a run
    from yamabe import ConsistencyError

    family, problem = lattice_family()
    with pytest.raises(ConsistencyError):
        exhaustion_study(family, problem, (2, 4))


def test_exhaustion_saturates_on_fixed_graph():
    # a fixed-size family ignores the radius, so once the ball covers the
    # whole graph the energy is exactly constant
    family = GraphFamily("path", {"n": 5})
    problem = ProblemFamily(p=4.0, alpha=3.0, delta=0.4)
    study = exhaustion_study(family, problem, (4, 6), universe_radius=8)
    gammas = [row["gamma"] for row in study["rows"]]
    assert gammas[1] == pytest.approx(gammas[0], abs=1e-15)


def test_exhaustion_single_radius():
    family, problem = lattice_family()
    study = exhaustion_study(family, problem, [3])
    assert len(study["rows"]) == 1
    assert study["gaps"] == []


def test_exhaustion_rejects_bad_radii():
    family, problem = lattice_family()
    with pytest.raises(ValueError):
        exhaustion_study(family, problem, [])
    with pytest.raises(ValueError):
        exhaustion_study(family, problem, (4, 4))
    with pytest.raises(ValueError):
        exhaustion_study(family, problem, (8, 2))
    with pytest.raises(ValueError):
        exhaustion_study(family, problem, (2, 4), universe_radius=3)
