"""Sphere and volume doubling, Cheeger constants, spectral gaps, Poincaré constants
and ellipticity for linear and rooted graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import eigh, null_space

from .errors import (
    CurvelabError,
    Disconnected,
    GraphTooLarge,
    NotNormalized,
    RadiusExceedsSupport,
    WeightUndefined,
)
from .graph_core import LinearGraph, degrees

__all__ = [
    "MAX_DENSE",
    "DoublingReport",
    "sphere_measures",
    "doubling_constants",
    "doubling_table",
    "cheeger",
    "cheeger_bruteforce",
    "laplacian_matrix",
    "spectrum",
    "spectral_gap",
    "poincare_best_constant",
    "ellipticity",
    "SDProductReport",
    "sd_product_check",
]

MAX_DENSE = 4096


# --------------------------------------------------------------------------
# Doubling
# --------------------------------------------------------------------------


def sphere_measures(graph, x0, radius: int) -> np.ndarray:
    """``m(S_k(x0))`` for ``k = 0..radius`` (zero where the sphere is empty)."""
    out = np.zeros(radius + 1)
    if isinstance(graph, LinearGraph):
        graph.check_vertex(x0)
        try:
            for k in range(radius + 1):
                pts = {x0 - k, x0 + k}
                out[k] = math.fsum(graph.m(p) for p in pts if p in graph)
        except WeightUndefined as exc:
            raise RadiusExceedsSupport(f"measure unknown within radius {radius} of {x0}") from exc
        return out
    sm = graph.sphere_measures(x0)
    n = min(sm.size, radius + 1)
    out[:n] = sm[:n]
    return out


@dataclass
class DoublingReport:
    C_SD: float
    C_VD: float
    centers: tuple
    Rmax: int
    sd_argmax: tuple = ()
    vd_argmax: tuple = ()
    excluded: list = field(default_factory=list)

    def to_dict(self):
        return {
            "C_SD": self.C_SD,
            "C_VD": self.C_VD,
            "centers": list(self.centers),
            "Rmax": self.Rmax,
            "sd_argmax": list(self.sd_argmax),
            "vd_argmax": list(self.vd_argmax),
            "excluded": [list(e) for e in self.excluded],
        }


def _sd_vd_at(sm, Rmax):
    """SD and VD maxima from one center's sphere measures ``sm[0..2Rmax+1]``."""
    c_sd, sd_arg, excluded = 0.0, (), []
    for i in range(Rmax + 1):
        if sm[i] == 0.0:
            excluded.append(i)
            continue
        j_top = 2 * i + 1
        j = int(np.argmax(sm[: j_top + 1]))
        ratio = sm[j] / sm[i]
        if ratio > c_sd:
            c_sd, sd_arg = ratio, (i, j)
    balls = np.cumsum(sm)
    c_vd, vd_arg = 0.0, ()
    # B_R = B_r, B_2R = B_k with r = floor(R), k = floor(2R) in {2r, 2r+1}
    for k in range(1, 2 * Rmax + 1):
        r = k // 2
        ratio = balls[k] / balls[r]
        if ratio > c_vd:
            c_vd, vd_arg = ratio, (r, k)
    return c_sd, sd_arg, c_vd, vd_arg, excluded


def doubling_constants(graph, centers: Iterable, Rmax: int) -> DoublingReport:
    """Exhaustive SD and VD constants over ``centers`` and radii up to ``Rmax``.

    SD scans ``i <= Rmax`` and ``j <= 2i + 1``; VD scans real ``R <= Rmax``,
    where only ``floor(R)`` and ``floor(2R)`` matter. Empty spheres ``S_i`` are
    excluded from the SD maximum and listed in ``excluded``.
    """
    centers = tuple(centers)
    if Rmax < 0:
        raise CurvelabError("Rmax must be non-negative")
    c_sd = c_vd = 0.0
    sd_arg = vd_arg = ()
    excluded = []
    for x0 in centers:
        if isinstance(graph, LinearGraph) and x0 not in graph:
            raise RadiusExceedsSupport(f"center {x0} is outside the support")
        sm = sphere_measures(graph, x0, 2 * Rmax + 1)
        a, aa, b, ba, ex = _sd_vd_at(sm, Rmax)
        excluded.extend((x0, i) for i in ex)
        if a > c_sd:
            c_sd, sd_arg = a, (x0,) + aa
        if b > c_vd:
            c_vd, vd_arg = b, (x0,) + ba
    return DoublingReport(float(c_sd), float(c_vd), centers, Rmax, sd_arg, vd_arg, excluded)


def doubling_table(graph, x0, Rmax: int):
    """Per-radius rows ``(R, sd, vd)`` at one center.

    ``sd`` is ``max_{j <= 2R+1} m(S_j)/m(S_R)`` (``nan`` when ``S_R`` is
    empty) and ``vd`` is the worst ratio ``m(B_{2R'})/m(B_{R'})`` over real
    ``R'`` in ``[R, R+1)``, capped at radius ``2 Rmax``.
    """
    sm = sphere_measures(graph, x0, 2 * Rmax + 1)
    balls = np.cumsum(sm)
    rows = []
    for R in range(Rmax + 1):
        sd = float(np.max(sm[: 2 * R + 2]) / sm[R]) if sm[R] > 0 else math.nan
        ks = [k for k in (2 * R, 2 * R + 1) if k <= 2 * Rmax]
        vd = max(float(balls[k] / balls[R]) for k in ks)
        rows.append((R, sd, vd))
    return rows


# --------------------------------------------------------------------------
# Cheeger constant and spectrum of finite paths
# --------------------------------------------------------------------------


def _finite_path(Gr: LinearGraph):
    if not Gr.support.is_finite:
        raise CurvelabError("a finite (restricted) linear graph is required")
    lo, hi = Gr.support.lo, Gr.support.hi
    if hi == lo:
        raise Disconnected("a single vertex has no cut")
    if hi - lo + 1 > MAX_DENSE:
        raise GraphTooLarge(f"more than {MAX_DENSE} vertices")
    w = Gr.weight_array(lo, hi)
    if np.any(w <= 0):
        raise Disconnected("path has a zero-weight edge")
    m = np.array([Gr.m(n) for n in range(lo, hi + 1)])
    return w, m


def cheeger(Gr: LinearGraph) -> float:
    """Exact Cheeger constant of a finite path by scanning its prefix cuts."""
    w, m = _finite_path(Gr)
    left = np.cumsum(m)[:-1]
    right = m.sum() - left
    return float(np.min(w / np.minimum(left, right)))


def cheeger_bruteforce(w: Sequence[float], m: Sequence[float]) -> float:
    """Cheeger constant of a path by enumerating all proper subsets."""
    w = np.asarray(w, dtype=float)
    m = np.asarray(m, dtype=float)
    n = m.size
    if n > 20:
        raise GraphTooLarge("subset enumeration is limited to 20 vertices")
    total = m.sum()
    best = math.inf
    for mask in range(1, 2**n - 1):
        bits = np.array([(mask >> k) & 1 for k in range(n)], dtype=bool)
        cut = w[bits[:-1] != bits[1:]].sum()
        mA = m[bits].sum()
        best = min(best, cut / min(mA, total - mA))
    return float(best)


def laplacian_matrix(w: np.ndarray) -> np.ndarray:
    """Matrix of ``f ↦ sum_edges w (f(x) - f(y))^2`` on a path."""
    n = w.size + 1
    L = np.zeros((n, n))
    idx = np.arange(w.size)
    L[idx, idx] += w
    L[idx + 1, idx + 1] += w
    L[idx, idx + 1] -= w
    L[idx + 1, idx] -= w
    return L


def spectrum(Gr: LinearGraph) -> np.ndarray:
    """Eigenvalues of ``L f = λ m f`` in increasing order."""
    w, m = _finite_path(Gr)
    return eigh(laplacian_matrix(w), np.diag(m), eigvals_only=True)


def spectral_gap(Gr: LinearGraph) -> float:
    """Smallest non-zero eigenvalue ``λ_1`` of the weighted path Laplacian."""
    return float(spectrum(Gr)[1])


# --------------------------------------------------------------------------
# Poincaré constant
# --------------------------------------------------------------------------


def poincare_best_constant(G: LinearGraph, x0: int, R: float) -> float:
    """Best ``C`` with ``sum_{B_R} m (f - f_B)^2 <= C R^2 sum_{x,y in B_2R} w (f(x) - f(y))^2``.

    The right-hand sum runs over ordered pairs. Computed as the largest
    generalized eigenvalue of the centred mass on ``B_R`` against the
    Dirichlet form on ``B_2R``, both restricted to functions orthogonal to
    constants.
    """
    if not R > 0:
        raise CurvelabError("R must be positive")
    G.check_vertex(x0)
    r1, r2 = int(math.floor(R)), int(math.floor(2 * R))
    # balls are intersected with the support
    lo, hi = G.support.clip(x0 - r2, x0 + r2)
    size = hi - lo + 1
    if size > MAX_DENSE:
        raise GraphTooLarge(f"more than {MAX_DENSE} vertices")
    if r1 == 0:
        return 0.0
    try:
        w = G.weight_array(lo, hi)
        m = G.measure_array(lo, hi)
    except WeightUndefined as exc:
        raise RadiusExceedsSupport("B_2R is not tabulated") from exc
    L = 2.0 * laplacian_matrix(w)
    inner = np.zeros(size, dtype=bool)
    b_lo, b_hi = G.support.clip(x0 - r1, x0 + r1)
    inner[b_lo - lo : b_hi - lo + 1] = True
    mb = np.where(inner, m, 0.0)
    P = np.diag(mb) - np.outer(mb, mb) / mb.sum()
    Q = null_space(np.ones((1, size)))
    Lr = Q.T @ L @ Q
    Pr = Q.T @ P @ Q
    top = eigh(Pr, Lr, eigvals_only=True)[-1]
    return float(max(top, 0.0) / (R * R))


# --------------------------------------------------------------------------
# Ellipticity
# --------------------------------------------------------------------------


def ellipticity(G: LinearGraph, lo: int, hi: int) -> float:
    """``min w(x, y)/m(x)`` over edges at vertices ``x`` in ``[lo, hi]``."""
    if not G.is_normalized:
        raise NotNormalized("ellipticity is evaluated on normalized graphs")
    lo, hi = G.support.clip(lo, hi)
    best = math.inf
    for x in range(lo, hi + 1):
        dm, dp, _, _ = degrees(G, x)
        if G.has_edge(x - 1):
            best = min(best, dm)
        if G.has_edge(x):
            best = min(best, dp)
    return best


# --------------------------------------------------------------------------
# Sphere doubling of products
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SDProductReport:
    C1: float
    C2: float
    C_product: float
    bound: float
    ok: bool


def _as_rooted(G, x, radius):
    from .symmetric import RootedGraph, linear_to_rooted

    if isinstance(G, RootedGraph):
        if G.root != x:
            return RootedGraph(x, G.adjacency, G.measure, G.labels)
        return G
    return linear_to_rooted(G, x - radius, x + radius, x)


def sd_product_check(G1, G2, x1, x2, Rmax: int, tol: float = 1e-12) -> SDProductReport:
    """Exhaustive ``C_SD(G1 × G2) <= 2 C_SD(G1) C_SD(G2)`` at the center ``(x1, x2)``."""
    from .symmetric import cartesian_product

    radius = 2 * Rmax + 1
    A = _as_rooted(G1, x1, radius)
    B = _as_rooted(G2, x2, radius)
    c1 = doubling_constants(A, [x1], Rmax).C_SD
    c2 = doubling_constants(B, [x2], Rmax).C_SD
    P = cartesian_product(A, B)
    cp = doubling_constants(P, [P.root], Rmax).C_SD
    bound = 2.0 * c1 * c2
    return SDProductReport(float(c1), float(c2), float(cp), float(bound), bool(cp <= bound + tol))
