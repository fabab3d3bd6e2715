"""Graph families and formula-defined problem data.

On an infinite family the coefficient fields h and g cannot be arrays;
they are formulas in the graph distance from the anchor ("1+dist^4"),
evaluated after each ball is materialized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .functionals import ProblemSpec
from .graph import (
    WeightedGraph,
    cycle_graph,
    graph_distance,
    graph_from_dict,
    lattice_ball,
    path_graph,
    tree_ball,
)

__all__ = ["GraphFamily", "ProblemFamily", "evaluate_field"]

_ALLOWED = re.compile(r"^[0-9a-zA-Z_+\-*/(). ,^]*$")
_NAMESPACE = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "minimum": np.minimum,
    "maximum": np.maximum,
    "pi": np.pi,
    "e": np.e,
}


def evaluate_field(expr, dist: np.ndarray) -> np.ndarray:
    """Evaluate a coefficient field given per-vertex distances.

    Accepts a number (constant field), a sequence (explicit values), or a
    formula string in the variable dist, where ^ means power.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if isinstance(expr, bool):
        raise ValueError("coefficient field cannot be a boolean")
    if isinstance(expr, (int, float)):
        return np.full(n, float(expr))
    if isinstance(expr, (list, tuple, np.ndarray)):
        arr = np.asarray(expr, dtype=np.float64)
        if arr.shape != (n,):
            raise ValueError(f"explicit field has length {arr.size}, expected {n}")
        return arr
    if not isinstance(expr, str):
        raise ValueError(f"cannot interpret coefficient field {expr!r}")
    if "__" in expr or not _ALLOWED.match(expr):
        raise ValueError(f"malformed field formula: {expr!r}")
    namespace = dict(_NAMESPACE)
    namespace["dist"] = dist
    try:
        value = eval(expr.replace("^", "**"), {"__builtins__": {}}, namespace)
    except Exception as exc:
        raise ValueError(f"field formula {expr!r} failed to evaluate: {exc}") from exc
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"field formula {expr!r} has wrong shape {arr.shape}")
    return arr.copy()


@dataclass(frozen=True)
class GraphFamily:
    """A named graph family materializable at any ball radius.

    Families with a fixed size parameter (or an explicit edge list) ignore
    the radius and saturate; open-ended families use the radius as their
    extent.
    """

    name: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in ("path", "cycle", "lattice_zd_ball", "tree_ball", "explicit"):
            raise ValueError(f"unknown graph family: {self.name!r}")

    def materialize(self, radius: int | None = None) -> tuple[WeightedGraph, int]:
        """Build the family member covering the given radius; returns
        (graph, anchor vertex)."""
        params = dict(self.params)
        if self.name == "explicit":
            g = graph_from_dict(params["data"])
            return g, int(params.get("x0", 0))
        if self.name == "path":
            n = params.get("n", None if radius is None else radius + 1)
            if n is None:
                raise ValueError("path family needs n or a radius")
            return path_graph(int(n), **_keep(params, "weight", "mu"))
        if self.name == "cycle":
            if "n" not in params:
                raise ValueError("cycle family needs n")
            return cycle_graph(int(params["n"]), **_keep(params, "weight", "mu"))
        if self.name == "lattice_zd_ball":
            r = params.get("radius", radius)
            if r is None:
                raise ValueError("lattice_zd_ball family needs radius")
            return lattice_ball(
                int(params.get("d", 1)), int(r), **_keep(params, "weight", "mu")
            )
        depth = params.get("depth", radius)
        if depth is None:
            raise ValueError("tree_ball family needs depth or a radius")
        return tree_ball(
            int(params.get("branching", 2)), int(depth), **_keep(params, "weight", "mu")
        )


def _keep(params: dict, *names: str) -> dict:
    return {k: params[k] for k in names if k in params}


@dataclass(frozen=True)
class ProblemFamily:
    """Problem data whose coefficient fields are functions of distance."""

    p: float
    alpha: float
    delta: float
    theta: float = 1.0
    h: object = 1.0
    g: object = 1.0

    def on(self, graph: WeightedGraph, x0: int) -> ProblemSpec:
        """Evaluate the data on a concrete graph, anchored at x0."""
        dist = graph_distance(graph, x0).astype(np.float64)
        return ProblemSpec(
            p=self.p,
            alpha=self.alpha,
            delta=self.delta,
            theta=self.theta,
            h=evaluate_field(self.h, dist),
            g=evaluate_field(self.g, dist),
        )
