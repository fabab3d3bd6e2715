"""Hypothesis checking, residual reporting, and numerical verification.

Everything here is a check: nothing mutates, and every report carries the
values it inspected so runs can be replayed and compared bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConsistencyError, HypothesisError
from .functionals import ProblemSpec, _check_spec, energy_J
from .graph import (
    TruncationSpec,
    WeightedGraph,
    _is_connected,
    as_vertex_function,
    integrate,
    truncate_ball,
)
from .operators import p_laplacian
from .solver import (
    SolveOptions,
    _renormalize,
    _tail_values,
    k_tail_bound,
    solve,
)

__all__ = [
    "ResidualReport",
    "PositivityCertificate",
    "hypotheses_check",
    "residual_report",
    "positivity_certificate",
    "inequality_suite",
    "exhaustion_study",
]


def hypotheses_check(g: WeightedGraph, spec: ProblemSpec) -> dict:
    """Check every standing hypothesis and report the values inspected.

    Fails fast: the first violated hypothesis raises HypothesisError
    carrying that hypothesis' name.  On success returns a report dict
    listing each named check with its value, all passed.
    """
    _check_spec(g, spec)
    checks: list[dict] = []

    def record(name: str, passed: bool, value, message: str) -> None:
        checks.append({"name": name, "passed": bool(passed), "value": value})
        if not passed:
            raise HypothesisError(name, message)

    p, alpha, delta, theta = spec.p, spec.alpha, spec.delta, spec.theta
    record("p_range", np.isfinite(p) and p >= 2.0, float(p), "p must satisfy p >= 2")

    min_h = float(np.min(spec.h))
    record("min_h", min_h > 0.0, min_h, "h must be positive everywhere")

    min_hmu = float(np.min(spec.h * g.mu))
    record("min_hmu", min_hmu > 0.0, min_hmu, "h*mu must be positive everywhere")

    g_max = float(np.max(spec.g)) if g.n else 0.0
    g_ok = bool(np.min(spec.g) >= 0.0) and np.isfinite(g_max)
    record("g_nonneg", g_ok, g_max, "g must be nonnegative and bounded")

    if p > 2.0:
        delta_ok = 0.0 < delta < 1.0 / (p - 2.0)
        delta_msg = "delta must lie strictly between 0 and 1/(p - 2)"
    else:
        delta_ok = delta > 0.0
        delta_msg = "delta must be positive"
    record("delta_range", delta_ok, float(delta), delta_msg)

    if not alpha > 2.0:
        record("alpha_range", False, float(alpha), "alpha must exceed 2")
    record("alpha_range", alpha <= p, float(alpha), "alpha must not exceed p")

    record("theta_positive", theta > 0.0, float(theta), "theta must be positive")

    tail_integral = float(integrate(g, spec.h ** (-delta))) ** delta
    record(
        "h_delta_integral",
        np.isfinite(tail_integral),
        tail_integral,
        "(int h^-delta dmu)^delta must be finite",
    )

    # construction already guarantees connectedness; re-derive it anyway
    record(
        "connected",
        _is_connected(g.indptr, g.indices, g.n),
        True,
        "graph must be connected",
    )
    return {"passed": True, "checks": checks}


@dataclass
class ResidualReport:
    """Per-vertex defect of the target equation at a candidate solution."""

    residual: np.ndarray
    residual_sup: float
    residual_l2: float
    max_vertex: int
    min_u: float
    eigen_factor: float = 1.0


def residual_report(
    g: WeightedGraph, spec: ProblemSpec, u: np.ndarray, eigen_factor: float = 1.0
) -> ResidualReport:
    """Defect r = -lap_p u + h u^{p-1} - eigen_factor g u^{alpha-1}.

    eigen_factor is 1 for the fully rescaled equation and the reported
    factor for the p = alpha eigenvalue form.
    """
    _check_spec(g, spec)
    u = as_vertex_function(g, u)
    plus = np.maximum(u, 0.0)
    r = (
        -p_laplacian(g, spec.p, u)
        + spec.h * np.sign(u) * np.abs(u) ** (spec.p - 1.0)
        - eigen_factor * spec.g * plus ** (spec.alpha - 1.0)
    )
    absr = np.abs(r)
    max_vertex = int(np.argmax(absr)) if g.n else 0
    return ResidualReport(
        residual=r,
        residual_sup=float(absr.max()) if g.n else 0.0,
        residual_l2=float(np.sqrt(np.sum(g.mu * r * r))),
        max_vertex=max_vertex,
        min_u=float(u.min()) if g.n else 0.0,
        eigen_factor=float(eigen_factor),
    )


@dataclass
class PositivityCertificate:
    """Strict-positivity verdict, with the excluded configuration flagged.

    When u has a zero vertex with a positive neighbor, that vertex is
    flagged together with the value of the p-Laplacian there: it is
    strictly positive, which is exactly what the stationarity equation
    forbids, so a minimizer can never look like this on a connected graph.
    """

    passed: bool
    min_u: float
    min_vertex: int
    flagged_vertex: int | None = None
    delta_p_at_flag: float | None = None


def positivity_certificate(
    g: WeightedGraph, u: np.ndarray, p: float = 2.0
) -> PositivityCertificate:
    u = as_vertex_function(g, u)
    min_vertex = int(np.argmin(u))
    min_u = float(u[min_vertex])
    if min_u > 0.0:
        return PositivityCertificate(True, min_u, min_vertex)
    flagged = None
    delta_val = None
    if min_u == 0.0:
        lap = p_laplacian(g, p, u)
        for x in np.flatnonzero(u == 0.0):
            nbrs = g.indices[g.indptr[x] : g.indptr[x + 1]]
            if nbrs.size and np.any(u[nbrs] > 0.0):
                flagged = int(x)
                delta_val = float(lap[x])
                break
    return PositivityCertificate(False, min_u, min_vertex, flagged, delta_val)


def _ratio_update(state: dict, lhs, rhs) -> None:
    """Track max lhs/rhs and count violations of lhs <= rhs (1e-9 slack)."""
    lhs = np.atleast_1d(np.asarray(lhs, dtype=np.float64))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
    bad = lhs > rhs * (1.0 + 1e-9) + 1e-300
    state["violations"] += int(np.count_nonzero(bad))
    pos = rhs > 0.0
    if np.any(pos):
        state["max_ratio"] = max(
            state["max_ratio"], float(np.max(lhs[pos] / rhs[pos]))
        )


def inequality_suite(
    g: WeightedGraph, spec: ProblemSpec, trials: int, seed: int
) -> dict:
    """Randomized verification of the inequalities the argument rests on.

    These inequalities hold identically, so any violation beyond 1e-9
    relative slack is an implementation bug, not a numerical finding.
    The seed is recorded in the report for replay.
    """
    _check_spec(g, spec)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    p, alpha, delta = spec.p, spec.alpha, spec.delta
    n = g.n
    results: dict[str, dict] = {}

    def fresh(note: str | None = None) -> dict:
        state = {"violations": 0, "max_ratio": 0.0}
        if note:
            state["note"] = note
        return state

    # |x^a - y^a| <= a |x - y| (x^{a-1} + y^{a-1}) for x, y >= 0, a >= 1
    state = fresh()
    x = rng.uniform(0.0, 10.0, trials)
    y = rng.uniform(0.0, 10.0, trials)
    a = rng.uniform(1.0, 6.0, trials)
    _ratio_update(state, np.abs(x**a - y**a), a * np.abs(x - y) * (x ** (a - 1.0) + y ** (a - 1.0)))
    results["elementary"] = state

    # h^{-1/(p-2)} <= (min h)^{-(1/(p-2) - d)} h^{-d} pointwise, 0 < d < 1/(p-2)
    if p > 2.0:
        state = fresh()
        _ratio_update(
            state,
            spec.h ** (-1.0 / (p - 2.0)),
            float(np.min(spec.h)) ** (-(1.0 / (p - 2.0) - delta)) * spec.h ** (-delta),
        )
        for _ in range(trials):
            h_r = np.exp(rng.standard_normal(n))
            d_r = rng.uniform(0.0, 1.0 / (p - 2.0))
            _ratio_update(
                state,
                h_r ** (-1.0 / (p - 2.0)),
                float(np.min(h_r)) ** (-(1.0 / (p - 2.0) - d_r)) * h_r ** (-d_r),
            )
    else:
        state = fresh("vacuous for p = 2")
    results["gj_pointwise"] = state

    # int |w|^{p/(p-1)} dmu <= (int h^{-1/(p-2)} dmu)^{(p-2)/(p-1)} (int h|w|^p dmu)^{1/(p-1)}
    if p > 2.0:
        state = fresh()
        h_int = float(integrate(g, spec.h ** (-1.0 / (p - 2.0))))
        for _ in range(trials):
            w = rng.standard_normal(n)
            lhs = float(integrate(g, np.abs(w) ** (p / (p - 1.0))))
            rhs = h_int ** ((p - 2.0) / (p - 1.0)) * float(
                integrate(g, spec.h * np.abs(w) ** p)
            ) ** (1.0 / (p - 1.0))
            _ratio_update(state, lhs, rhs)
    else:
        state = fresh("vacuous for p = 2")
    results["holder_embedding"] = state

    # min(h mu) sup|u|^p <= J(u) for every u
    state = fresh()
    min_hmu = float(np.min(spec.h * g.mu))
    for _ in range(trials):
        u = rng.uniform(0.1, 3.0) * rng.standard_normal(n)
        _ratio_update(
            state, min_hmu * float(np.max(np.abs(u))) ** p, energy_J(g, spec, u)
        )
    results["bd_sup_bound"] = state

    for state in results.values():
        state["passed"] = state["violations"] == 0
    return {
        "seed": seed,
        "trials": trials,
        "passed": all(state["passed"] for state in results.values()),
        "inequalities": results,
    }


def exhaustion_study(
    family,
    spec,
    radii,
    opts: SolveOptions | None = None,
    universe_radius: int | None = None,
) -> dict:
    """Solve on nested ball truncations and certify the energy is nonincreasing.

    family materializes graphs by radius (family.materialize(R) -> (graph,
    anchor)) and spec evaluates problem data on them (spec.on(graph,
    anchor) -> ProblemSpec).  All truncations are cut from one universe
    ball so feasible sets are genuinely nested under extension by zero.
    """
    radii = [int(r) for r in radii]
    if not radii:
        raise ValueError("radii must be nonempty")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    if radii[0] < 0:
        raise ValueError("radii must be nonnegative")
    if universe_radius is None:
        universe_radius = 2 * max(radii)
    if universe_radius < max(radii):
        raise ValueError("universe_radius must cover the largest radius")

    g_u, x0 = family.materialize(universe_radius)
    spec_u = spec.on(g_u, x0)
    tails = _tail_values(g_u, spec_u, x0)

    # energy of the uniform competitor on the smallest ball bounds every
    # gamma_R with R >= radii[0] from above
    first = truncate_ball(g_u, TruncationSpec(x0, radii[0]))
    spec_first = spec_u.restrict(first.new_to_old)
    comp, _ = _renormalize(first.graph, spec_first, np.ones(first.graph.n))
    if comp is None:
        raise ConsistencyError("uniform competitor carries no constraint mass")
    gamma_est = energy_J(first.graph, spec_first, comp)

    rows = []
    prev_gamma = np.inf
    base_opts = SolveOptions() if opts is None else opts
    for radius in radii:
        tr = truncate_ball(g_u, TruncationSpec(x0, radius))
        spec_r = spec_u.restrict(tr.new_to_old)
        opts_r = replace(base_opts, x0=int(tr.old_to_new[x0]))
        try:
            res = solve(tr.graph, spec_r, opts_r)
        except Exception as exc:
            raise RuntimeError(f"solve failed at radius {radius}: {exc}") from exc
        if res.gamma > prev_gamma + 1e-9:
            raise ConsistencyError(
                f"gamma increased along nested truncations at radius {radius}: "
                f"{res.gamma:.17g} > {prev_gamma:.17g}"
            )
        tail_r = float(tails[min(radius, len(tails) - 1)])
        rows.append(
            {
                "R": radius,
                "gamma": res.gamma,
                "lambda": res.lam,
                "tail_bound": k_tail_bound(g_u, spec_u, tail_r, gamma_est),
                "converged": res.converged,
            }
        )
        prev_gamma = res.gamma
    gaps = [
        abs(rows[k + 1]["gamma"] - rows[k]["gamma"]) for k in range(len(rows) - 1)
    ]
    return {
        "rows": rows,
        "gaps": gaps,
        "gamma_est": gamma_est,
        "universe_radius": universe_radius,
    }
