"""Weakly spherically symmetric rooted graphs and their projections onto paths."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .curvature import LocalCDForm, optimal_curvature, optimal_curvature_psd
from .errors import (
    CurvelabError,
    Disconnected,
    InconsistentSpec,
    NotWeaklySymmetric,
    VertexOutOfSupport,
)
from .graph_core import (
    LinearGraph,
    MeasureKind,
    Support,
    WeightModel,
    as_dimension,
)

__all__ = [
    "SYMMETRY_TOL",
    "RootedGraph",
    "SymmetryReport",
    "check_weak_symmetry",
    "projection_flags",
    "project",
    "TransferRow",
    "projection_curvature_transfer",
    "cartesian_product",
    "symmetric_tree",
    "linear_to_rooted",
    "load_rooted",
]

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class RootedGraph:
    """Finite connected weighted graph with a distinguished root.

    ``adjacency[x][y]`` is the symmetric weight ``w(x, y) > 0``; ``labels``
    optionally records what each integer id stands for (e.g. product pairs).
    """

    root: int
    adjacency: Dict[int, Dict[int, float]]
    measure: Dict[int, float]
    labels: Optional[Dict[int, object]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.root not in self.measure:
            raise InconsistentSpec("root has no measure")
        for x, nbrs in self.adjacency.items():
            if x not in self.measure:
                raise InconsistentSpec(f"vertex {x} has no measure")
            for y, w in nbrs.items():
                if not w > 0:
                    raise InconsistentSpec(f"edge ({x}, {y}) has non-positive weight")
                if self.adjacency.get(y, {}).get(x) != w:
                    raise InconsistentSpec(f"edge ({x}, {y}) is not symmetric")
        if any(not m > 0 for m in self.measure.values()):
            raise InconsistentSpec("measures must be positive")
        if len(self.distances) != len(self.measure):
            raise Disconnected("rooted graph is not connected")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, root, edges, measure, labels=None):
        adj: Dict[int, Dict[int, float]] = {int(v): {} for v in measure}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise InconsistentSpec("self loops are not allowed")
            if u not in adj or v not in adj:
                raise InconsistentSpec(f"edge ({u}, {v}) uses a vertex without measure")
            adj[u][v] = adj[u].get(v, 0.0) + w
            adj[v][u] = adj[v].get(u, 0.0) + w
        return cls(int(root), adj, {int(k): float(m) for k, m in measure.items()}, labels)

    # -- graph protocol ----------------------------------------------------

    @property
    def vertices(self):
        return sorted(self.measure)

    def __len__(self):
        return len(self.measure)

    def check_vertex(self, x):
        if x not in self.measure:
            raise VertexOutOfSupport(f"vertex {x} is not in the graph")

    def neighbors(self, x):
        self.check_vertex(x)
        return sorted(self.adjacency.get(x, {}).items())

    def measure_at(self, x):
        self.check_vertex(x)
        return self.measure[x]

    m = measure_at

    def edges(self):
        return sorted((x, y, w) for x, nb in self.adjacency.items() for y, w in nb.items() if x < y)

    # -- spheres -----------------------------------------------------------

    def bfs(self, x):
        self.check_vertex(x)
        dist = {x: 0}
        queue = deque([x])
        while queue:
            y = queue.popleft()
            for z in self.adjacency.get(y, {}):
                if z not in dist:
                    dist[z] = dist[y] + 1
                    queue.append(z)
        return dist

    @property
    def distances(self):
        cached = self.__dict__.get("_dist")
        if cached is None:
            cached = self.bfs(self.root)
            object.__setattr__(self, "_dist", cached)
        return cached

    def spheres(self, x=None) -> List[List[int]]:
        dist = self.distances if x is None or x == self.root else self.bfs(x)
        out: List[List[int]] = [[] for _ in range(max(dist.values()) + 1)]
        for v, d in dist.items():
            out[d].append(v)
        return [sorted(s) for s in out]

    def sphere_measures(self, x=None) -> np.ndarray:
        return np.array([math.fsum(self.measure[v] for v in s) for s in self.spheres(x)])

    @property
    def depth(self):
        return max(self.distances.values())

    # -- serialisation -----------------------------------------------------

    def to_dict(self):
        return {
            "root": self.root,
            "edges": [[x, y, w] for x, y, w in self.edges()],
            "measure": {str(k): self.measure[k] for k in sorted(self.measure)},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        try:
            return cls.from_edges(d["root"], d["edges"], {int(k): v for k, v in d["measure"].items()})
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CurvelabError):
                raise
            raise CurvelabError(f"malformed rooted graph spec: {exc}") from None


def load_rooted(path) -> RootedGraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurvelabError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise CurvelabError("rooted graph spec must be a JSON object")
    return RootedGraph.from_dict(data)


# --------------------------------------------------------------------------
# Weak spherical symmetry and projection
# --------------------------------------------------------------------------


def _radial_degrees(RG, y):
    dist = RG.distances
    dy = dist[y]
    out = inn = 0.0
    for z, w in RG.adjacency.get(y, {}).items():
        if dist[z] > dy:
            out += w
        elif dist[z] < dy:
            inn += w
    m = RG.measure[y]
    return out / m, inn / m


@dataclass(frozen=True)
class SymmetryReport:
    ok: bool
    rows: tuple  # (n, d_plus, d_minus, m) per sphere
    witness: Optional[tuple] = None  # (quantity, y1, y2)


def check_weak_symmetry(RG: RootedGraph, tol: float = SYMMETRY_TOL) -> SymmetryReport:
    """Check that ``d_+``, ``d_-`` and ``m`` are constant on every sphere around the root."""
    rows = []
    for n, sphere in enumerate(RG.spheres()):
        first = sphere[0]
        dp0, dm0 = _radial_degrees(RG, first)
        m0 = RG.measure[first]
        for y in sphere[1:]:
            dp, dm = _radial_degrees(RG, y)
            for name, a, b in (("d_plus", dp0, dp), ("d_minus", dm0, dm), ("m", m0, RG.measure[y])):
                if abs(a - b) > tol * max(1.0, abs(a), abs(b)):
                    return SymmetryReport(False, tuple(rows), (name, first, y))
        rows.append((n, dp0, dm0, m0))
    return SymmetryReport(True, tuple(rows))


def projection_flags(RG: RootedGraph, tol: float = SYMMETRY_TOL) -> dict:
    """``physical_symmetric`` (``m(S_n) = 1``) and ``normalized_symmetric`` (``d_+ + d_- = 1``)."""
    rep = check_weak_symmetry(RG, tol)
    if not rep.ok:
        raise NotWeaklySymmetric(f"symmetry fails on {rep.witness}")
    sm = RG.sphere_measures()
    physical = bool(np.all(np.abs(sm - 1.0) <= tol))
    normalized = all(
        abs(sum(RG.adjacency.get(y, {}).values()) / RG.measure[y] - 1.0) <= tol
        and abs(sum(_radial_degrees(RG, y)) - 1.0) <= tol
        for y in RG.measure
    )
    return {"physical_symmetric": physical, "normalized_symmetric": normalized}


def project(RG: RootedGraph) -> LinearGraph:
    """Linear graph ``G_P`` on ``{0..depth}`` with ``m_P(n) = m(S_n)``, ``w_P(n) = w(S_n, S_{n+1})``.

    The measure is reported as physical or normalized when the graph is
    physically or normalized symmetric, and as explicit otherwise.
    """
    flags = projection_flags(RG)
    spheres = RG.spheres()
    dist = RG.distances
    m_p = [math.fsum(RG.measure[v] for v in s) for s in spheres]
    w_p = []
    for s in spheres[:-1]:
        w_p.append(math.fsum(w for y in s for z, w in RG.adjacency.get(y, {}).items() if dist[z] > dist[y]))
    depth = len(spheres) - 1
    if depth == 0:
        raise CurvelabError("projection of a single vertex has no edges")
    weights = WeightModel(tuple(w_p), None, 0)
    if flags["physical_symmetric"]:
        measure = MeasureKind.physical()
    elif flags["normalized_symmetric"]:
        measure = MeasureKind.normalized()
    else:
        measure = MeasureKind.explicit(WeightModel(tuple(m_p), None, 0))
    return LinearGraph(Support.interval(0, depth), weights, measure)


@dataclass(frozen=True)
class TransferRow:
    r: int
    k_projection: float
    k_sphere_min: float
    ok: bool


def projection_curvature_transfer(RG: RootedGraph, D, depth: Optional[int] = None, tol: float = 1e-9):
    """Per radius: ``K*(G_P, r, D) >= min_{x in S_r} K*_psd(G, x, D) - tol``."""
    D = as_dimension(D)
    G_p = project(RG)
    spheres = RG.spheres()
    depth = len(spheres) - 1 if depth is None else min(depth, len(spheres) - 1)
    rows = []
    for r in range(depth + 1):
        if D.value >= 2:
            kp = optimal_curvature(G_p, r, D)
        else:
            kp = optimal_curvature_psd(G_p, r, D)
        ks = min(LocalCDForm(RG, x, D).optimal() for x in spheres[r])
        rows.append(TransferRow(r, kp, ks, bool(kp >= ks - tol)))
    return rows


# --------------------------------------------------------------------------
# Generators and products
# --------------------------------------------------------------------------


def cartesian_product(A: RootedGraph, B: RootedGraph) -> RootedGraph:
    """``A × B`` with ``m = m_A m_B`` and edges from either factor; root ``(root_A, root_B)``.

    Vertices are relabelled to integers in lexicographic order of the pairs;
    ``labels`` maps each id back to its pair.
    """
    pairs = [(a, b) for a in A.vertices for b in B.vertices]
    ids = {p: i for i, p in enumerate(pairs)}
    measure = {ids[(a, b)]: A.measure[a] * B.measure[b] for a, b in pairs}
    adj: Dict[int, Dict[int, float]] = {i: {} for i in measure}
    for a, b in pairs:
        i = ids[(a, b)]
        for a2, w in A.adjacency.get(a, {}).items():
            adj[i][ids[(a2, b)]] = w
        for b2, w in B.adjacency.get(b, {}).items():
            adj[i][ids[(a, b2)]] = w
    return RootedGraph(ids[(A.root, B.root)], adj, measure, {i: p for p, i in ids.items()})


def symmetric_tree(branching: Sequence[int], sphere_weights: Sequence[float], sphere_measures: Sequence[float]) -> RootedGraph:
    """Tree where depth-``n`` vertices have ``branching[n]`` children.

    Edges from depth ``n`` to ``n+1`` carry ``sphere_weights[n]``; vertices at
    depth ``n`` carry ``sphere_measures[n]``.
    """
    if len(sphere_weights) != len(branching) or len(sphere_measures) != len(branching) + 1:
        raise InconsistentSpec("need len(weights) == len(branching) == len(measures) - 1")
    if any(int(b) != b or b < 1 for b in branching):
        raise InconsistentSpec("branching numbers must be positive integers")
    measure = {0: float(sphere_measures[0])}
    edges = []
    level = [0]
    nxt_id = 1
    for n, b in enumerate(branching):
        new_level = []
        for parent in level:
            for _ in range(int(b)):
                edges.append((parent, nxt_id, float(sphere_weights[n])))
                measure[nxt_id] = float(sphere_measures[n + 1])
                new_level.append(nxt_id)
                nxt_id += 1
        level = new_level
    return RootedGraph.from_edges(0, edges, measure)


def linear_to_rooted(G: LinearGraph, lo: int, hi: int, root: int) -> RootedGraph:
    """Window ``[lo, hi]`` of a linear graph as a rooted graph (vertex ids kept)."""
    lo, hi = G.support.clip(lo, hi)
    if not lo <= root <= hi:
        raise VertexOutOfSupport("root outside the window")
    measure = {n: G.m(n) for n in range(lo, hi + 1)}
    edges = [(n, n + 1, G.w(n)) for n in range(lo, hi)]
    return RootedGraph.from_edges(root, edges, measure)
