"""Weighted-graph data model.

A graph is a dense-indexed vertex set 0..n-1 with symmetric positive edge
weights stored in CSR form and a strictly positive vertex measure ``mu``.
Construction validates symmetry, positivity, and connectedness; instances
are immutable afterwards (the backing arrays are marked read-only), so they
can be shared freely across concurrent solves.

Vertex functions are plain float64 numpy arrays of length ``graph.n``;
``integrate`` and ``lq_norm`` implement the mu-weighted integral and L^q
norms over the vertex set.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class WeightedGraph:
    """Connected, locally finite weighted graph with vertex measure.

    Fields are CSR adjacency arrays: ``indptr`` (n+1), ``indices`` (nnz),
    ``weights`` (nnz), plus the measure ``mu`` (n). Every edge {x, y} with
    x != y is stored in both rows with bit-identical weight; self-loops are
    stored once and contribute nothing to any difference operator.

    Use :meth:`from_edges` or the generators below; the raw constructor does
    not validate.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    mu: np.ndarray

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @property
    def n_edges(self) -> int:
        """Number of unordered edges, self-loops counted once."""
        row = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return int(np.count_nonzero(self.indices >= row))

    def neighbors(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and weights of vertex ``x`` (read-only views)."""
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def volume(self) -> float:
        """Total measure of the vertex set."""
        return float(np.sum(self.mu))

    @classmethod
    def from_edges(cls, n: int, edges, mu=1.0) -> "WeightedGraph":
        """Build a graph from unordered edge triples.

        Parameters
        ----------
        n : int
            Vertex count; vertices are 0..n-1.
        edges : iterable of (x, y, w)
            Each unordered pair listed at most once, w > 0. A pair (x, x)
            is a self-loop.
        mu : float or array
            Vertex measure, scalar (broadcast) or per-vertex, all > 0.
        """
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        mu_arr = np.asarray(mu, dtype=np.float64)
        if mu_arr.ndim == 0:
            mu_arr = np.full(n, float(mu_arr))
        if mu_arr.shape != (n,):
            raise ValueError(f"mu has length {mu_arr.shape}, expected ({n},)")
        if not np.all(np.isfinite(mu_arr)) or np.any(mu_arr <= 0.0):
            raise ValueError("mu must be finite and strictly positive")

        rows, cols, vals = [], [], []
        seen = set()
        for x, y, w in edges:
            x, y, w = int(x), int(y), float(w)
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"edge ({x},{y}) out of range for n={n}")
            if not (np.isfinite(w) and w > 0.0):
                raise ValueError(f"edge ({x},{y}) has nonpositive weight {w}")
            key = (min(x, y), max(x, y))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            rows.append(x)
            cols.append(y)
            vals.append(w)
            if x != y:
                rows.append(y)
                cols.append(x)
                vals.append(w)

        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)

        g = cls(indptr=indptr, indices=cols, weights=vals, mu=mu_arr)
        g._freeze()
        g._validate()
        return g

    def _freeze(self):
        for a in (self.indptr, self.indices, self.weights, self.mu):
            a.setflags(write=False)

    def _validate(self):
        if not _is_connected(self.indptr, self.indices, self.n):
            raise ValueError("graph must be connected")

    def with_measure(self, mu) -> "WeightedGraph":
        """Same adjacency with a different vertex measure."""
        mu_arr = np.asarray(mu, dtype=np.float64)
        if mu_arr.ndim == 0:
            mu_arr = np.full(self.n, float(mu_arr))
        if mu_arr.shape != (self.n,):
            raise ValueError("mu length mismatch")
        if not np.all(np.isfinite(mu_arr)) or np.any(mu_arr <= 0.0):
            raise ValueError("mu must be finite and strictly positive")
        g = WeightedGraph(self.indptr, self.indices, self.weights, mu_arr)
        g._freeze()
        return g


@dataclass(frozen=True)
class TruncationSpec:
    """Ball-truncation parameters: center ``x0``, hop radius, tail tolerance."""

    x0: int
    radius: int
    epsilon: float = 1.0

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class Truncation:
    """Result of a ball truncation.

    ``old_to_new`` maps original vertex ids to subgraph ids (-1 outside the
    ball); ``new_to_old`` lists the kept original ids in ascending order, so
    a vertex function restricts as ``f[new_to_old]``.
    """

    graph: WeightedGraph
    old_to_new: np.ndarray
    new_to_old: np.ndarray


def _is_connected(indptr, indices, n) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        x = queue.popleft()
        for y in indices[indptr[x]:indptr[x + 1]]:
            if not seen[y]:
                seen[y] = True
                count += 1
                queue.append(y)
    return count == n


def as_vertex_function(g: WeightedGraph, f) -> np.ndarray:
    """Coerce ``f`` to a float64 vertex function on ``g`` and validate it."""
    arr = np.asarray(f, dtype=np.float64)
    if arr.shape != (g.n,):
        raise ValueError(f"vertex function has shape {arr.shape}, expected ({g.n},)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vertex function contains non-finite entries")
    return arr


def integrate(g: WeightedGraph, f) -> float:
    """Integral of ``f`` against the vertex measure: sum_x mu(x) f(x)."""
    arr = as_vertex_function(g, f)
    return float(np.sum(g.mu * arr))


def lq_norm(g: WeightedGraph, f, q: float) -> float:
    """mu-weighted L^q norm, q >= 1: (sum_x mu(x)|f(x)|^q)^(1/q)."""
    if q < 1.0:
        raise ValueError("q must be >= 1")
    arr = as_vertex_function(g, f)
    return float(np.sum(g.mu * np.abs(arr) ** q) ** (1.0 / q))


def graph_distance(g: WeightedGraph, x0: int) -> np.ndarray:
    """Hop-count distance from ``x0`` to every vertex (int64 array)."""
    if not 0 <= x0 < g.n:
        raise ValueError(f"vertex {x0} out of range")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[x0] = 0
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        for y in g.indices[g.indptr[x]:g.indptr[x + 1]]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    # construction guarantees connectedness
    return dist


def eccentricity(g: WeightedGraph, x0: int) -> int:
    """Largest hop distance from ``x0``."""
    return int(graph_distance(g, x0).max())


def truncate_ball(g: WeightedGraph, spec: TruncationSpec) -> Truncation:
    """Induced subgraph on the ball {dist(x, x0) <= radius}.

    Edges with an endpoint outside the ball are dropped entirely (zero
    extension outside the ball), so competitors supported in the ball see
    no boundary terms. The ball around any vertex is connected.
    """
    dist = graph_distance(g, spec.x0)
    keep = dist <= spec.radius
    new_to_old = np.flatnonzero(keep).astype(np.int64)
    old_to_new = np.full(g.n, -1, dtype=np.int64)
    old_to_new[new_to_old] = np.arange(new_to_old.shape[0], dtype=np.int64)

    row = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    emask = keep[row] & keep[g.indices]
    new_rows = old_to_new[row[emask]]
    new_cols = old_to_new[g.indices[emask]]
    new_vals = g.weights[emask]
    n_new = new_to_old.shape[0]
    indptr = np.zeros(n_new + 1, dtype=np.int64)
    np.add.at(indptr, new_rows + 1, 1)
    indptr = np.cumsum(indptr)

    sub = WeightedGraph(
        indptr=indptr,
        indices=new_cols.copy(),
        weights=new_vals.copy(),
        mu=g.mu[new_to_old].copy(),
    )
    sub._freeze()
    sub._validate()
    return Truncation(graph=sub, old_to_new=old_to_new, new_to_old=new_to_old)


# ---------------------------------------------------------------------------
# Deterministic generators
# ---------------------------------------------------------------------------

def path_graph(n: int, weight: float = 1.0, mu=1.0) -> tuple[WeightedGraph, int]:
    """Path on n vertices; anchor vertex is 0 (left end)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    edges = [(i, i + 1, weight) for i in range(n - 1)]
    return WeightedGraph.from_edges(n, edges, mu=mu), 0


def cycle_graph(n: int, weight: float = 1.0, mu=1.0) -> tuple[WeightedGraph, int]:
    """Cycle on n >= 3 vertices; anchor vertex is 0."""
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    edges = [(i, (i + 1) % n, weight) for i in range(n)]
    return WeightedGraph.from_edges(n, edges, mu=mu), 0


def lattice_ball(d: int, radius: int, weight: float = 1.0, mu=1.0) -> tuple[WeightedGraph, int]:
    """Hop ball of the integer lattice Z^d around the origin.

    Vertices are the lattice points with l1 norm <= radius (hop distance on
    Z^d equals the l1 distance); edges join nearest neighbors inside the
    ball. Anchor vertex is the origin.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if radius < 0:
        raise ValueError("radius must be >= 0")

    def points(dim, budget):
        if dim == 1:
            for z in range(-budget, budget + 1):
                yield (z,)
        else:
            for z in range(-budget, budget + 1):
                for rest in points(dim - 1, budget - abs(z)):
                    yield (z,) + rest

    coords = sorted(points(d, radius))
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c, i in index.items():
        for axis in range(d):
            nb = list(c)
            nb[axis] += 1
            j = index.get(tuple(nb))
            if j is not None:
                edges.append((i, j, weight))
    g = WeightedGraph.from_edges(len(coords), edges, mu=mu)
    return g, index[(0,) * d]


def tree_ball(branching: int, depth: int, weight: float = 1.0, mu=1.0) -> tuple[WeightedGraph, int]:
    """Rooted tree with fixed branching, truncated at ``depth``; anchor is the root."""
    if branching < 2:
        raise ValueError("branching must be >= 2")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    edges = []
    level = [0]
    next_id = 1
    for _ in range(depth):
        nxt = []
        for parent in level:
            for _ in range(branching):
                edges.append((parent, next_id, weight))
                nxt.append(next_id)
                next_id += 1
        level = nxt
    return WeightedGraph.from_edges(next_id, edges, mu=mu), 0


_FAMILIES = {
    "path": lambda **kw: path_graph(**kw),
    "cycle": lambda **kw: cycle_graph(**kw),
    "lattice_zd_ball": lambda **kw: lattice_ball(**kw),
    "tree_ball": lambda **kw: tree_ball(**kw),
}


def generate(family: str, **params) -> tuple[WeightedGraph, int]:
    """Dispatch to a named generator; returns (graph, anchor vertex)."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; expected one of {sorted(_FAMILIES)}"
        ) from None
    return builder(**params)


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------

def graph_to_dict(g: WeightedGraph) -> dict:
    """Plain-dict form: edges listed once per unordered pair."""
    row = np.repeat(np.arange(g.n), np.diff(g.indptr))
    once = g.indices >= row
    edges = [
        [int(x), int(y), float(w)]
        for x, y, w in zip(row[once], g.indices[once], g.weights[once])
    ]
    return {"n": g.n, "edges": edges, "mu": [float(m) for m in g.mu]}


def graph_from_dict(data: dict) -> WeightedGraph:
    """Inverse of :func:`graph_to_dict`; symmetrizes and validates."""
    try:
        n = int(data["n"])
        edges = data["edges"]
        mu = data.get("mu", 1.0)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph dict: {exc}") from exc
    return WeightedGraph.from_edges(n, [(e[0], e[1], e[2]) for e in edges], mu=mu)


def save_graph(g: WeightedGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g)) + "\n")


def load_graph(path) -> WeightedGraph:
    return graph_from_dict(json.loads(Path(path).read_text()))
