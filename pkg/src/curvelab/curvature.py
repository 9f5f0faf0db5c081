"""Bakry-Émery and Ollivier curvature of linear graphs.

Two independent routes decide ``CD(K, D)`` at a vertex:

* the closed 2x2 matrix test built from :func:`w_terms` (:func:`cd_holds`,
  :func:`optimal_curvature`), valid for linear graphs with ``D >= 2``;
* the brute-force quadratic form ``Γ₂ - KΓ - (Δ·)²/D`` assembled on the
  2-ball (:func:`cd_oracle_psd`), valid on any locally finite graph and any
  ``D > 0``.

For normalized graphs a third route goes through the growth-rate functions
:func:`F_fn` / :func:`G_fn`.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional

import numpy as np
from scipy.linalg import null_space

from .errors import (
    CurvelabError,
    DimensionBelowTwo,
    EdgeOutOfSupport,
    NonPositiveArgument,
    NotNormalized,
)
from .graph_core import DimensionParam, LinearGraph, as_dimension, degrees

__all__ = [
    "PSD_THRESHOLD",
    "BISECTION_TOL",
    "WTerms",
    "w_terms",
    "cd_holds",
    "optimal_curvature",
    "LocalCDForm",
    "cd_oracle_psd",
    "optimal_curvature_psd",
    "ollivier",
    "ollivier_cd_bound",
    "phi",
    "ratio_chain_check",
    "F_fn",
    "G_fn",
    "cd_holds_normalized",
    "optimal_curvature_normalized",
    "find_cd_violation",
    "max_continuation",
    "ProfileRow",
    "CurvatureProfile",
    "curvature_profile",
]

# Minimum-eigenvalue threshold of the local CD form, relative to its entry scale.
PSD_THRESHOLD = 1e-10
# Bisection stopping width on K.
BISECTION_TOL = 1e-10
# Tighter threshold used while bisecting for the optimum, so the located root
# is not biased by the decision slack.
OPTIMUM_THRESHOLD = 1e-14
# Slack for the closed-form inequalities (relative to the local degree scale).
CD_TOL = 1e-12


@dataclass(frozen=True)
class WTerms:
    """Entries of the 2x2 CD matrix at a vertex.

    ``W_minus = a - K`` and ``W_plus = b - K``; ``cross`` is
    ``(1 - 2/D)² d_-(n) d_+(n)``, dropped (set to 0) at a boundary vertex.
    """

    W_minus: float
    W_plus: float
    a: float
    b: float
    cross: float
    has_left: bool
    has_right: bool
    root: float = 0.0  # sqrt(cross)

    @property
    def scale(self):
        return max(1.0, abs(self.a), abs(self.b), self.root)


def w_terms(G: LinearGraph, n: int, K: float, D) -> WTerms:
    D = as_dimension(D)
    dm, dp, _, _ = degrees(G, n)
    has_left = G.has_edge(n - 1)
    has_right = G.has_edge(n)
    # a = (-d_-(n-1) + 3 d_+(n-1) + c4 d_- - d_+) / 2, grouped into differences
    # so that translation-invariant weights give exactly a = c d_-
    a = b = 0.0
    if has_left:
        dm1, dp1, _, _ = degrees(G, n - 1)
        a = (dp1 - dp) + 0.5 * (dp1 - dm1) + 0.5 * (dp - dm) + D.c * dm
    if has_right:
        dm2, dp2, _, _ = degrees(G, n + 1)
        b = (dm2 - dm) + 0.5 * (dm2 - dp2) + 0.5 * (dm - dp) + D.c * dp
    root = D.c * math.sqrt(dm * dp) if (has_left and has_right) else 0.0
    W_minus = a - K if has_left else 0.0
    W_plus = b - K if has_right else 0.0
    return WTerms(W_minus, W_plus, a, b, root * root, has_left, has_right, root)


def cd_holds(G: LinearGraph, n: int, K: float, D, tol: float = CD_TOL) -> bool:
    """Decide ``CD(K, D, n)`` on a linear graph.

    For ``D < 2`` the decision is delegated to :func:`cd_oracle_psd`.
    """
    D = as_dimension(D)
    if D.value < 2:
        return cd_oracle_psd(G, n, K, D)
    t = w_terms(G, n, K, D)
    s = t.scale
    if t.has_left and t.W_minus < -tol * s:
        return False
    if t.has_right and t.W_plus < -tol * s:
        return False
    if t.has_left and t.has_right:
        return t.W_minus * t.W_plus - t.cross >= -tol * s * s
    return True


def optimal_curvature(G: LinearGraph, n: int, D) -> float:
    """Largest ``K`` with ``CD(K, D, n)``; ``+inf`` for an isolated vertex."""
    D = as_dimension(D)
    if D.value < 2:
        raise DimensionBelowTwo("closed-form curvature needs D >= 2; use optimal_curvature_psd")
    t = w_terms(G, n, 0.0, D)
    if t.has_left and t.has_right:
        half_sum = 0.5 * (t.a + t.b)
        return half_sum - math.hypot(0.5 * (t.a - t.b), t.root)
    if t.has_right:
        return t.b
    if t.has_left:
        return t.a
    return math.inf


# --------------------------------------------------------------------------
# Brute-force oracle on the 2-ball
# --------------------------------------------------------------------------


def _ball(graph, x, radius):
    dist = {x: 0}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        if dist[y] == radius:
            continue
        for z, _ in graph.neighbors(y):
            if z not in dist:
                dist[z] = dist[y] + 1
                queue.append(z)
    return dist


@lru_cache(maxsize=64)
def _mean_free_basis(n):
    return null_space(np.ones((1, n)))


class LocalCDForm:
    """Quadratic form ``f ↦ Γ₂(f)(x) - KΓ(f)(x) - (Δf(x))²/D`` on the 2-ball of ``x``.

    The form is stored as ``A - K·Γ`` restricted to functions with zero mean
    on the ball (constants lie in the kernel of every term).
    """

    def __init__(self, graph, x, D):
        D = as_dimension(D)
        dist = _ball(graph, x, 2)
        verts = sorted(dist, key=lambda v: (dist[v], repr(v)))
        idx = {v: i for i, v in enumerate(verts)}
        size = len(verts)
        inner = [v for v in verts if dist[v] <= 1]

        lap = np.zeros((size, size))
        gam = {}
        for y in inner:
            i = idx[y]
            my = graph.measure_at(y)
            g = np.zeros((size, size))
            for z, w in graph.neighbors(y):
                j = idx[z]
                c = w / my
                lap[i, j] += c
                lap[i, i] -= c
                g[i, i] += 0.5 * c
                g[j, j] += 0.5 * c
                g[i, j] -= 0.5 * c
                g[j, i] -= 0.5 * c
            gam[y] = g

        gx = gam[x]
        mx = graph.measure_at(x)
        half_lap_gamma = np.zeros((size, size))
        for y, w in graph.neighbors(x):
            half_lap_gamma += (w / mx) * (gam[y] - gx)
        gx_lap = gx @ lap
        gamma2 = 0.5 * half_lap_gamma - 0.5 * (gx_lap + gx_lap.T)
        row = lap[idx[x]]
        A = gamma2 - D.inv * np.outer(row, row)

        self.vertices = verts
        self.dimension = D
        self.max_degree = max(
            (sum(w for _, w in graph.neighbors(y)) / graph.measure_at(y) for y in inner),
            default=0.0,
        )
        self._A_full, self._G_full = A, gx
        basis = _mean_free_basis(size) if size > 1 else np.zeros((1, 0))
        self._A = basis.T @ A @ basis
        self._G = basis.T @ gx @ basis
        self.unconstrained = not np.any(np.abs(self._G) > 0)

    def matrix(self, K):
        return self._A - K * self._G

    def evaluate(self, f, K=0.0):
        """``Q(f)`` for a function given by its values on :attr:`vertices`."""
        v = np.asarray(f, dtype=float)
        return float(v @ (self._A_full - K * self._G_full) @ v)

    def min_eigenvalue(self, K):
        Q = self.matrix(K)
        if Q.size == 0:
            return 0.0
        return float(np.linalg.eigvalsh(0.5 * (Q + Q.T))[0])

    def holds(self, K, threshold=PSD_THRESHOLD):
        Q = self.matrix(K)
        if Q.size == 0:
            return True
        scale = max(1.0, float(np.max(np.abs(Q))))
        return float(np.linalg.eigvalsh(0.5 * (Q + Q.T))[0]) >= -threshold * scale

    def optimal(self, tol=BISECTION_TOL):
        if self.unconstrained:
            return math.inf
        span = max(10.0 * self.max_degree, 1.0)
        lo, hi = -span, span
        def holds(K):
            return self.holds(K, OPTIMUM_THRESHOLD)

        for _ in range(200):
            if holds(lo):
                break
            lo -= 2 * (hi - lo)
        else:
            raise CurvelabError("could not bracket the optimal curvature from below")
        for _ in range(200):
            if not holds(hi):
                break
            lo, hi = hi, hi + 2 * (hi - lo)
        else:
            return math.inf
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            if holds(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def cd_oracle_psd(graph, x, K, D) -> bool:
    """Decide ``CD(K, D, x)`` by the minimum eigenvalue of the local form."""
    graph.check_vertex(x)
    return LocalCDForm(graph, x, D).holds(K)


def optimal_curvature_psd(graph, x, D, tol=BISECTION_TOL) -> float:
    """Optimal curvature by bisection over :func:`cd_oracle_psd`."""
    graph.check_vertex(x)
    return LocalCDForm(graph, x, D).optimal(tol)


# --------------------------------------------------------------------------
# Ollivier curvature
# --------------------------------------------------------------------------


def ollivier(G: LinearGraph, n: int) -> float:
    """``κ(n, n+1) = d_-(n+1) - d_+(n+1) - d_-(n) + d_+(n)``."""
    if not G.has_edge(n):
        raise EdgeOutOfSupport(f"edge ({n}, {n + 1}) is not in the graph")
    dm0, dp0, _, _ = degrees(G, n)
    dm1, dp1, _, _ = degrees(G, n + 1)
    return dm1 - dp1 - dm0 + dp0


def ollivier_cd_bound(G: LinearGraph, n: int) -> Optional[float]:
    """Curvature lower bound ``min(κ(n, n±1))/2`` under a log-concave measure.

    Returns ``None`` when ``m(n-1) m(n+1) > m(n)²`` or a neighbour is missing.
    """
    if not (G.has_edge(n - 1) and G.has_edge(n)):
        return None
    if G.m(n - 1) * G.m(n + 1) > G.m(n) ** 2:
        return None
    return 0.5 * min(ollivier(G, n), ollivier(G, n - 1))


# --------------------------------------------------------------------------
# Ratio contraction for physical graphs
# --------------------------------------------------------------------------


def phi(x: float) -> float:
    if not x > 0:
        raise NonPositiveArgument("phi is defined on (0, inf)")
    if x <= 0.25:
        return -math.inf
    return 0.25 * (7.0 - 9.0 / (4.0 * x - 1.0))


def ratio_chain_check(G: LinearGraph, n: int, tol: float = 1e-12) -> bool:
    """``w_{n+1}/w_n <= phi(w_{n-1}/w_{n-2})`` on a physical graph, ``n >= 2``."""
    if not G.is_physical:
        raise CurvelabError("ratio_chain_check needs a physical graph")
    if n < 2 + (G.support.lo or 0) and G.support.lo is not None:
        raise EdgeOutOfSupport("ratio_chain_check needs w_{n-2}")
    lhs = G.w(n + 1) / G.w(n)
    rhs = phi(G.w(n - 1) / G.w(n - 2))
    return lhs <= rhs + tol * max(1.0, abs(rhs))


def max_continuation(prefix, length, K=0.0):
    """Extend physical weights on ``N_0`` greedily, each new weight maximal.

    At vertex ``n`` the weight ``w_{n+1}`` is set to the largest value keeping
    ``CD(K, inf, n)``. Returns ``(weights, vertex)`` where ``vertex`` is the first
    ``n`` admitting no positive continuation (``None`` if ``length`` weights
    were produced).
    """
    w = [float(v) for v in prefix]
    if len(w) < 2:
        raise CurvelabError("need at least w_0 and w_1")

    def at(i):
        return w[i] if i >= 0 else 0.0

    n = len(w) - 1
    while len(w) < length:
        two_w_minus = 4.0 * at(n - 1) - at(n - 2) - at(n) - 2.0 * K
        cross4 = 4.0 * at(n - 1) * at(n)
        if two_w_minus <= 0.0:
            return w, n
        d_max = 4.0 * at(n) - at(n - 1) - 2.0 * K - cross4 / two_w_minus
        if d_max <= 0.0:
            return w, n
        w.append(d_max)
        n += 1
    return w, None


# --------------------------------------------------------------------------
# Normalized graphs: growth-rate characterisation
# --------------------------------------------------------------------------


def F_fn(a, b, K, D) -> float:
    D = as_dimension(D)
    return D.c * (0.5 - b) + 2.0 * a - K


def G_fn(a, b, K, D) -> float:
    """Threshold for ``2p(n+1)``.

    A zero numerator makes the fraction 0; a zero denominator with non-zero
    numerator makes the whole value ``-inf`` (the CD condition then fails).
    """
    D = as_dimension(D)
    num = D.c * D.c * (0.5 - b)
    if num == 0.0:
        frac = 0.0
    else:
        den = F_fn(a, b, K, D)
        if den == 0.0:
            return -math.inf
        frac = num / den
    return (0.5 + b) * (D.c - frac) - K


def _growth_rate(G, n):
    return degrees(G, n)[2]


def _normalized_args(G, n):
    if not G.is_normalized:
        raise NotNormalized("graph measure is not normalized")
    if not G.has_edge(n):
        raise EdgeOutOfSupport(f"need vertices {n} and {n + 1}")
    a = _growth_rate(G, n - 1) if G.has_edge(n - 1) else None
    return a, _growth_rate(G, n), _growth_rate(G, n + 1)


def cd_holds_normalized(G: LinearGraph, n: int, K: float, D, tol: float = CD_TOL) -> bool:
    a, b, p_next = _normalized_args(G, n)
    if a is not None and F_fn(a, b, K, D) < -tol:
        return False
    return 2.0 * p_next <= G_fn(0.0 if a is None else a, b, K, D) + tol


def optimal_curvature_normalized(G: LinearGraph, n: int, D, tol: float = 1e-13) -> float:
    """Solve ``2p(n+1) = G(p(n-1), p(n), K, D)`` for ``K`` by bisection."""
    a, b, _ = _normalized_args(G, n)
    D = as_dimension(D)
    if a is not None:
        hi = F_fn(a, b, 0.0, D) + 1.0
    else:
        hi = D.c + 2.0
    lo = -1.0
    while not cd_holds_normalized(G, n, lo, D, tol=0.0):
        lo *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if cd_holds_normalized(G, n, mid, D, tol=0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# Scans
# --------------------------------------------------------------------------


def _optimal_any(G, n, D):
    D = as_dimension(D)
    if D.value < 2:
        return optimal_curvature_psd(G, n, D)
    return optimal_curvature(G, n, D)


def find_cd_violation(G: LinearGraph, K: float, D, lo: int, hi: int):
    """First ``n`` in ``[lo, hi]`` where ``CD(K, D, n)`` fails, with slack ``K*(n) - K``."""
    lo, hi = G.support.clip(lo, hi)
    for n in range(lo, hi + 1):
        if not cd_holds(G, n, K, D):
            return n, _optimal_any(G, n, D) - K
    return None


@dataclass(frozen=True)
class ProfileRow:
    n: int
    d_minus: float
    d_plus: float
    p: float
    kappa_right: float
    k_star: float


@dataclass(frozen=True)
class CurvatureProfile:
    dimension: DimensionParam
    rows: tuple

    COLUMNS = ("n", "d_minus", "d_plus", "p", "kappa_right", "k_star")

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for r in self.rows:
            writer.writerow([r.n] + [_fmt(getattr(r, c)) for c in self.COLUMNS[1:]])
        return buf.getvalue()


def _fmt(x):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _profile_row(G, n, D):
    dm, dp, p, _ = degrees(G, n)
    kappa = ollivier(G, n) if G.has_edge(n) else math.nan
    return ProfileRow(n, dm, dp, p, kappa, _optimal_any(G, n, D))


def curvature_profile(G: LinearGraph, lo: int, hi: int, D, threads: int = 1) -> CurvatureProfile:
    D = as_dimension(D)
    lo, hi = G.support.clip(lo, hi)
    verts = list(range(lo, hi + 1))
    if threads > 1 and len(verts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda n: _profile_row(G, n, D), verts))
    else:
        rows = [_profile_row(G, n, D) for n in verts]
    return CurvatureProfile(D, tuple(rows))
