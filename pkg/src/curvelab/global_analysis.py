"""Global properties of linear graphs on ``N_0``.

Series criteria (completeness, stochastic completeness, recurrence, Feller,
finite volume) are decided symbolically from the tail models: every tail
exposes an asymptotic class ``β^n n^γ`` and a positive series of that class
converges iff ``β < 1`` or ``β = 1, γ < -1``. Partial sums are reported for
transparency only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .curvature import cd_holds, optimal_curvature
from .errors import (
    CdHypothesisFailed,
    CurvelabError,
    HypothesisFailed,
    MeasureKindUnsupported,
    NotComplete,
    NotConcave,
    NotPositive,
    ParameterOrderViolated,
    RadiusExceedsSupport,
    UnsupportedSupport,
    WeightUndefined,
)
from .graph_core import (
    Affine,
    Constant,
    Exponential,
    LinearGraph,
    LocalFunction,
    MeasureKind,
    Power,
    Support,
    Undecidable,
    WeightModel,
    as_dimension,
    degrees,
)

__all__ = [
    "TRUNCATION",
    "PROPERTIES",
    "SeriesVerdict",
    "series_tests",
    "cutoff_functions",
    "MetricTable",
    "intrinsic_sigma",
    "is_intrinsic",
    "ball_volume",
    "second_difference_check",
    "weight_growth_check",
    "GrowthClass",
    "Envelopes",
    "concave_envelopes",
    "classify_volume_growth",
    "DecayReport",
    "sc_from_curvature_decay",
    "concave_function",
    "build_from_concave",
    "exp_family",
    "family_F",
    "product_identity",
    "positive_certificate",
    "resistance",
]

TRUNCATION = 10**6
PROPERTIES = ("Complete", "StochasticallyComplete", "Recurrent", "Feller", "FiniteVolume")
_PHYSICAL_ONLY = ("Complete", "StochasticallyComplete", "Recurrent")
TOL = 1e-9


# --------------------------------------------------------------------------
# Series verdicts
# --------------------------------------------------------------------------


def _converges(cls):
    beta, gamma = cls
    return beta < 1.0 or (beta == 1.0 and gamma < -1.0)


def _tail_sum_class(cls):
    """Class of ``sum_{k>n} a_k`` for a convergent ``a`` of class ``cls``."""
    beta, gamma = cls
    if beta < 1.0:
        return beta, gamma
    return 1.0, gamma + 1.0


def _inverse(cls, power=1.0):
    """Class of ``a_n^{-power}``."""
    beta, gamma = cls
    return beta ** (-power), -gamma * power


def _times(c1, c2):
    return c1[0] * c2[0], c1[1] + c2[1]


@dataclass(frozen=True)
class SeriesVerdict:
    property: str
    verdict: str
    partial_sum: float
    rule: str

    def to_dict(self):
        return {
            "property": self.property,
            "verdict": self.verdict,
            "partial_sum": _json_float(self.partial_sum),
            "rule": self.rule,
        }


def _json_float(x):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _measure_class(G):
    kind = G.measure.kind
    if kind == "physical":
        return (1.0, 0.0)
    if kind == "normalized":
        tail = G.weights.tail
        return tail.asymptotic() if tail is not None else None
    tail = G.measure.model.tail
    return tail.asymptotic() if tail is not None else None


def _psum(arr):
    """Compensated sum that reports overflow as ``inf``."""
    arr = np.nan_to_num(np.asarray(arr, dtype=float), nan=np.inf)
    try:
        return math.fsum(arr)
    except OverflowError:
        return math.inf


def _safe_values(fetch, T):
    """Values on ``0..T-1``; falls back to the tabulated part when the tail is unknown."""
    try:
        return fetch(T), False
    except WeightUndefined:
        return None, True


def series_tests(G: LinearGraph, properties: Optional[Sequence[str]] = None, T: int = TRUNCATION):
    """Decide the series criteria for a linear graph on ``N_0``.

    Complete: ``sum w_n^{-1/2} = inf``. Stochastically complete:
    ``sum n/w_n = inf``. Recurrent: ``sum 1/w_n = inf``. Finite volume:
    ``sum m(n) < inf``. Not Feller: finite volume and
    ``sum_n (sum_{k>n} m(k))/w_n < inf``.
    """
    if G.support.kind != "half_line":
        raise UnsupportedSupport("series criteria are decided on N_0")
    if properties is None:
        properties = PROPERTIES if G.is_physical else ("Feller", "FiniteVolume")
    for prop in properties:
        if prop not in PROPERTIES:
            raise CurvelabError(f"unknown property {prop!r}")
        if prop in _PHYSICAL_ONLY and not G.is_physical:
            raise MeasureKindUnsupported(f"{prop} is decided for physical graphs only")

    wcls = G.weights.tail.asymptotic() if G.weights.tail is not None else None
    mcls = _measure_class(G)

    w, w_partial = _safe_values(lambda T: G.weight_array(0, T), T)
    if w is None:
        w = np.asarray(G.weights.prefix)
    m, m_partial = _safe_values(lambda T: G.measure_array(0, T - 1), T)
    if m is None:
        m = G.measure_array(0, G.weights.end - 1) if G.weights.end > 0 else np.empty(0)
    n_idx = np.arange(w.size, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        inv_w = 1.0 / w
        sums = {
            "Complete": _psum(inv_w**0.5),
            "StochasticallyComplete": _psum(n_idx * inv_w),
            "Recurrent": _psum(inv_w),
            "FiniteVolume": _psum(m),
        }
        tail_m = np.cumsum(m[::-1])[::-1]
        k = min(tail_m.size - 1, w.size)
        head = tail_m[1 : k + 1]
        sums["Feller"] = _psum(np.where(head == 0.0, 0.0, head / w[:k])) if k > 0 else 0.0
    note = f" (partial sum over the first {w.size} terms)" if (w_partial or m_partial) else ""

    out = []
    for prop in properties:
        psum = sums[prop]
        if prop == "Complete":
            rule = "sum w_n^(-1/2) diverges"
            cls = None if wcls is None else _inverse(wcls, 0.5)
            verdict = None if cls is None else not _converges(cls)
        elif prop == "StochasticallyComplete":
            rule = "sum n/w_n diverges"
            cls = None if wcls is None else _times((1.0, 1.0), _inverse(wcls))
            verdict = None if cls is None else not _converges(cls)
        elif prop == "Recurrent":
            rule = "sum 1/w_n diverges"
            cls = None if wcls is None else _inverse(wcls)
            verdict = None if cls is None else not _converges(cls)
        elif prop == "FiniteVolume":
            rule = "sum m(n) converges"
            verdict = None if mcls is None else _converges(mcls)
        else:
            rule = "not Feller iff m(V) < inf and sum_n m((n, inf))/w_n < inf"
            verdict = None
            if mcls is not None:
                if not _converges(mcls):
                    verdict = True
                elif wcls is not None:
                    cls = _times(_tail_sum_class(mcls), _inverse(wcls))
                    verdict = not _converges(cls)
        label = "Undecided" if verdict is None else ("Yes" if verdict else "No")
        out.append(SeriesVerdict(prop, label, psum, rule + note))
    return out


def _verdict(verdicts, prop):
    for v in verdicts:
        if v.property == prop:
            return v
    raise KeyError(prop)


# --------------------------------------------------------------------------
# Cutoff functions
# --------------------------------------------------------------------------


def _require_physical_half_line(G):
    if not G.is_physical:
        raise MeasureKindUnsupported("a physical graph is required")
    if G.support.kind != "half_line":
        raise UnsupportedSupport("a graph on N_0 is required")


def cutoff_functions(G: LinearGraph, k: int, max_steps: int = 10**7) -> LocalFunction:
    """Cutoff ``η_k`` with ``η_k(0) = 1`` and ``Γ(η_k) <= 1/k``.

    ``η_k`` decreases by ``1/sqrt(k w_n)`` across odd edges ``n`` (even edges if
    the odd subseries of ``sum w_n^{-1/2}`` converges) until it reaches 0.
    """
    _require_physical_half_line(G)
    if k < 1:
        raise CurvelabError("k must be a positive integer")
    cls = G.weights.tail.asymptotic() if G.weights.tail is not None else None
    if cls is not None and _converges(_inverse(cls, 0.5)):
        raise NotComplete("sum w_n^(-1/2) converges on both parities")
    for parity in (1, 0):
        vals = [1.0]
        eta = 1.0
        n = 0
        while eta > 0.0 and n < max_steps:
            if n % 2 == parity:
                step = 1.0 / math.sqrt(k * G.w(n))
                eta = eta - step
                if eta <= 1e-12:
                    eta = 0.0
            vals.append(eta)
            n += 1
        if eta == 0.0:
            return LocalFunction(0, tuple(vals))
    raise NotComplete(f"cutoff did not reach 0 within {max_steps} steps")


# --------------------------------------------------------------------------
# Intrinsic metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricTable:
    """Edge lengths ``ℓ(n, n+1)`` for ``start <= n < start + len(lengths)``."""

    start: int
    lengths: tuple

    @property
    def rho(self) -> np.ndarray:
        """Distances ``ρ(start, n)`` for ``n = start .. start + len(lengths)``."""
        return np.concatenate(([0.0], np.cumsum(self.lengths)))

    @property
    def end(self):
        return self.start + len(self.lengths)

    def inflate(self, n, factor):
        lengths = list(self.lengths)
        lengths[n - self.start] *= factor
        return MetricTable(self.start, tuple(lengths))


def intrinsic_sigma(G: LinearGraph, length: int, start: Optional[int] = None) -> MetricTable:
    """Path metric ``σ(n, n+1) = max(Deg(n), Deg(n+1))^{-1/2}``."""
    if length < 1:
        raise CurvelabError("length must be >= 1")
    if start is None:
        start = G.support.lo if G.support.lo is not None else 0
    lens = []
    for n in range(start, start + length):
        if not G.has_edge(n):
            break
        deg = max(degrees(G, n)[3], degrees(G, n + 1)[3])
        lens.append(deg**-0.5)
    return MetricTable(start, tuple(lens))


def is_intrinsic(G: LinearGraph, table: MetricTable, tol: float = 1e-12) -> bool:
    """``sum_y w(x,y) ℓ(x,y)^2 <= m(x)`` at every vertex whose edges are all tabulated."""
    lens = table.lengths
    for x in range(table.start, table.end + 1):
        total = 0.0
        complete = True
        for y, w in G.neighbors(x):
            e = min(x, y) - table.start
            if 0 <= e < len(lens):
                total += w * lens[e] ** 2
            else:
                complete = False
        if complete and total > G.m(x) * (1.0 + tol):
            return False
    return True


def ball_volume(G: LinearGraph, table: MetricTable, r: float) -> float:
    """``m({n : ρ(start, n) <= r})`` for the metric ``table`` rooted at its start."""
    rho = table.rho
    inside = rho <= r
    if inside[-1] and G.has_edge(table.end):
        raise RadiusExceedsSupport("ball reaches the end of the metric table")
    count = int(np.count_nonzero(inside))
    return float(np.sum(G.measure_array(table.start, table.start + count - 1)))


# --------------------------------------------------------------------------
# Finite-scale checks of the physical CD(K, inf) consequences
# --------------------------------------------------------------------------


def _check_cd_range(G, K, vertices):
    for n in vertices:
        if not cd_holds(G, n, K, "inf"):
            raise CdHypothesisFailed(f"CD({K}, inf) fails at n={n}", vertex=n)


def second_difference_check(G: LinearGraph, K: float, lo: int, hi: int, bound: Optional[float] = None) -> bool:
    """``w_{n-2} - 2w_n + w_{n+2} <= -6K`` for ``n`` in ``[lo, hi]``.

    Each ``n`` must have ``CD(K, inf)`` at ``n`` and ``n+1``. ``bound``
    overrides the right-hand side.
    """
    if not G.is_physical:
        raise MeasureKindUnsupported("a physical graph is required")
    if K > 0:
        raise CurvelabError("K must be non-positive")
    base = G.support.lo if G.support.lo is not None else lo
    lo = max(lo, base + 2)
    rhs = -6.0 * K if bound is None else bound
    ok = True
    for n in range(lo, hi + 1):
        if not G.has_edge(n + 2):
            break
        _check_cd_range(G, K, (n, n + 1))
        diff = G.w(n - 2) - 2.0 * G.w(n) + G.w(n + 2)
        ok &= diff <= rhs + TOL
    return bool(ok)


def weight_growth_check(G: LinearGraph, K: float, lo: int, hi: int):
    """``(max w_n/(n+1), max w_n/(n+1)^2)`` over edges in ``[lo, hi]``."""
    if not G.is_physical:
        raise MeasureKindUnsupported("a physical graph is required")
    lo, hi = G.support.clip(lo, hi)
    _check_cd_range(G, K, range(lo, hi + 1))
    if not G.has_edge(hi):
        hi -= 1
    n = np.arange(max(lo, 0), hi + 1)
    w = G.weight_array(n[0], n[-1] + 1)
    return float(np.max(w / (n + 1.0))), float(np.max(w / (n + 1.0) ** 2))


# --------------------------------------------------------------------------
# Volume growth
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Envelopes:
    n: np.ndarray
    f: np.ndarray
    g: np.ndarray
    A_G: float
    gap: np.ndarray
    gap_bound: np.ndarray

    @property
    def oneconcave_ok(self):
        return bool(np.all(self.gap <= self.gap_bound + TOL))


def concave_envelopes(G: LinearGraph, lo: int, hi: int) -> Envelopes:
    """Even and odd linear interpolants ``f_G``, ``g_G`` sampled at ``lo..hi``.

    ``gap[n] = |w_n - f(n)|`` and ``gap_bound`` is three times the largest odd
    slope on ``[n-2, n+2]``, the finite form of the closeness estimate.
    """
    _require_physical_half_line(G)
    lo = max(lo, 1)
    top = hi + 4
    w = G.weight_array(0, top + 1)
    idx = np.arange(top + 1)
    ev, od = idx[::2], idx[1::2]
    n = np.arange(lo, hi + 1)
    f = np.interp(n, ev, w[ev])
    g = np.interp(n, od, w[od])
    g_slope = 0.5 * np.diff(w[od])  # slope of g on (2j+1, 2j+3]
    gap = np.abs(w[n] - f)
    bound = np.empty(n.size)
    for i, k in enumerate(n):
        j = (k - 1) // 2  # odd knot 2j+1 <= k
        js = [t for t in (j - 1, j, j + 1) if 0 <= t < g_slope.size]
        bound[i] = 3.0 * max(g_slope[js]) if js else math.inf
    last = (top - 2) // 2
    A = 0.5 * (w[2 * last + 2] - w[2 * last]) if 2 * last + 2 <= top else 0.0
    return Envelopes(n, f, g, float(A), gap, bound)


@dataclass(frozen=True)
class GrowthClass:
    label: str
    A_G: float
    A_G_exact: bool
    oneconcave_ok: bool

    def to_dict(self):
        return {
            "label": self.label,
            "A_G": self.A_G,
            "A_G_exact": self.A_G_exact,
            "oneconcave_ok": self.oneconcave_ok,
        }


def classify_volume_growth(G: LinearGraph, check_range: Optional[int] = None) -> GrowthClass:
    """Linear / Intermediate / Quadratic volume growth of a CD(0, inf) physical graph."""
    _require_physical_half_line(G)
    top = check_range if check_range is not None else max(G.weights.end + 8, 16)
    tail = G.weights.tail
    try:
        _check_cd_range(G, 0.0, range(0, top + 1))
    except WeightUndefined:
        _check_cd_range(G, 0.0, range(0, G.weights.end - 1))
        top = G.weights.end - 4
    env = concave_envelopes(G, 1, max(top - 4, 2)) if top >= 6 else None
    A_est = env.A_G if env is not None else 0.0
    ok = env.oneconcave_ok if env is not None else True

    def growth(label, A, exact=True):
        return GrowthClass(label, float(A), exact, ok)

    if isinstance(tail, Constant):
        return growth("Linear", 0.0)
    if isinstance(tail, Affine):
        return growth("Quadratic", tail.slope) if tail.slope > 0 else growth("Linear", 0.0)
    if isinstance(tail, Power):
        if tail.gamma <= 0:
            return growth("Linear", 0.0)
        if tail.gamma < 1:
            return growth("Intermediate", 0.0)
        if tail.gamma == 1:
            return growth("Quadratic", tail.c)
        raise CdHypothesisFailed("CD(0, inf) forces w_n = O(n); the power tail grows faster")
    if isinstance(tail, Exponential):
        if tail.base <= 1:
            return growth("Linear", 0.0)
        raise CdHypothesisFailed("CD(0, inf) forces w_n = O(n); the exponential tail grows faster")
    return growth("Undecided", A_est, exact=False)


# --------------------------------------------------------------------------
# Stochastic completeness from curvature decay
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    constant: float
    first_half_max: float
    second_half_max: float
    hypothesis_ok: bool
    verdict: SeriesVerdict
    assertion_ok: bool

    def to_dict(self):
        return {
            "constant": _json_float(self.constant),
            "first_half_max": _json_float(self.first_half_max),
            "second_half_max": _json_float(self.second_half_max),
            "hypothesis_ok": self.hypothesis_ok,
            "verdict": self.verdict.to_dict(),
            "assertion_ok": self.assertion_ok,
        }


def sc_from_curvature_decay(G: LinearGraph, metric: MetricTable, lo: int, hi: int) -> DecayReport:
    """Finite-range surrogate of ``K(n)_- = O(ρ(n, 0)^2)``.

    The ratio ``K*(n, inf)_- / (1 + ρ(0, n)^2)`` is scanned on ``[lo, hi]``; the
    hypothesis is accepted when its maximum over the second half of the range
    does not exceed the maximum over the first half.
    """
    _require_physical_half_line(G)
    if not is_intrinsic(G, metric):
        raise HypothesisFailed("metric is not intrinsic")
    hi = min(hi, metric.end)
    rho = metric.rho
    ratios = []
    for n in range(lo, hi + 1):
        k = optimal_curvature(G, n, "inf")
        r = rho[n - metric.start]
        ratios.append(max(0.0, -k) / (1.0 + r * r))
    ratios = np.asarray(ratios)
    half = max(ratios.size // 2, 1)
    first = float(np.max(ratios[:half])) if ratios.size else 0.0
    second = float(np.max(ratios[half:])) if ratios.size > half else 0.0
    hyp = second <= first * (1.0 + TOL) + 1e-300
    verdict = _verdict(series_tests(G, ("StochasticallyComplete",)), "StochasticallyComplete")
    assertion_ok = not (hyp and verdict.verdict == "No")
    const = float(np.max(ratios)) if ratios.size else 0.0
    return DecayReport(const, first, second, bool(hyp), verdict, assertion_ok)


# --------------------------------------------------------------------------
# Concave construction
# --------------------------------------------------------------------------


def concave_function(xs, ys, tail_slope):
    """Validate a piecewise-linear concave positive function and return it as a callable."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or xs.size != ys.size:
        raise CurvelabError("need at least two samples with matching lengths")
    if xs[0] != 0.0 or np.any(np.diff(xs) <= 0):
        raise CurvelabError("sample abscissae must start at 0 and increase")
    if np.any(ys <= 0):
        raise NotPositive("samples must be positive")
    slopes = np.append(np.diff(ys) / np.diff(xs), tail_slope)
    if np.any(np.diff(slopes) > 1e-12 * np.maximum(1.0, np.abs(slopes[:-1]))):
        raise NotConcave("slopes must be non-increasing")
    if tail_slope < 0:
        raise NotPositive("a negative final slope makes the function eventually negative")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= xs[-1], np.interp(x, xs, ys), ys[-1] + tail_slope * (x - xs[-1]))

    return f


def build_from_concave(xs, ys, tail_slope) -> LinearGraph:
    """Physical graph ``w_n = f(n + N)`` on ``N_0`` from a concave positive ``f``.

    ``N >= 2`` is the smallest integer with ``f(N+1) <= 4f(N)``; beyond the
    samples the weights continue affinely with ``tail_slope``.
    """
    f = concave_function(xs, ys, tail_slope)
    N = 2
    while not f(N + 1) <= 4.0 * f(N):
        N += 1
    x_last, y_last = float(xs[-1]), float(ys[-1])
    count = max(int(math.floor(x_last)) - N + 1, 1)
    prefix = f(np.arange(count) + N)
    intercept = y_last + tail_slope * (N - x_last)
    tail = Affine(float(tail_slope), float(intercept)) if tail_slope > 0 else Constant(y_last)
    return LinearGraph(Support.half_line(), WeightModel(tuple(prefix), tail, 0), MeasureKind.physical())


# --------------------------------------------------------------------------
# Exponential family with positive curvature
# --------------------------------------------------------------------------


def _check_order(omega, mu):
    if not (1.0 < omega < mu):
        raise ParameterOrderViolated("need 1 < omega < mu")


def exp_family(omega: float, mu: float, length: Optional[int] = None, two_sided: bool = False) -> LinearGraph:
    """``w(n, n+1) = ω^{-n}``, ``m(n) = μ^{-n}``.

    Restricted to ``N_0`` by default (to ``{0..length}`` when ``length`` is
    given); ``two_sided=True`` keeps the full line.
    """
    _check_order(omega, mu)
    w_left = Exponential(omega, omega) if two_sided else None
    m_left = Exponential(mu, mu) if two_sided else None
    weights = WeightModel((), Exponential(1.0, 1.0 / omega), 0, w_left)
    measure = MeasureKind.explicit((), Exponential(1.0, 1.0 / mu), 0, m_left)
    if two_sided:
        support = Support.line()
    elif length is None:
        support = Support.half_line()
    else:
        support = Support.interval(0, length)
    return LinearGraph(support, weights, measure)


def family_F(alpha, omega, D, K):
    """``(F_-, F_+)``: the rescaled diagonal entries ``2 W_± / α^n`` of the family."""
    D = as_dimension(D)
    f_minus = -omega / alpha + 3.0 / alpha + D.c4 * omega - 1.0 - 2.0 * K
    f_plus = -alpha + 3.0 * omega * alpha + D.c4 - omega - 2.0 * K
    return f_minus, f_plus


def product_identity(alpha, omega):
    """Both sides of ``F_- F_+ - 4ω = (α-1)(ω-1)(3 - ω + α(3ω - 1))/α`` at ``D = inf, K = 0``."""
    fm, fp = family_F(alpha, omega, "inf", 0.0)
    lhs = fm * fp - 4.0 * omega
    rhs = (alpha - 1.0) * (omega - 1.0) * (3.0 - omega + alpha * (3.0 * omega - 1.0)) / alpha
    return lhs, rhs


def _family_ok(alpha, omega, D, K):
    D = as_dimension(D)
    fm, fp = family_F(alpha, omega, D, K)
    return fm > 0 and fp > 0 and 0.25 * fm * fp >= omega * D.c**2


def positive_certificate(omega: float, mu: float, tol: float = 1e-12):
    """Certified ``(K, D)`` with ``K > 0``, ``D < inf`` and ``CD(K α^n, D, n)`` for all ``n``."""
    _check_order(omega, mu)
    alpha = mu / omega
    lhs, rhs = product_identity(alpha, omega)
    if not math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-12):
        raise CurvelabError(f"product identity fails: {lhs} != {rhs}")
    if not rhs > 0:
        raise CurvelabError("product identity is not positive")

    lo, hi = 0.0, 0.5 * min(family_F(alpha, omega, "inf", 0.0))
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _family_ok(alpha, omega, "inf", mid):
            lo = mid
        else:
            hi = mid
    K = 0.5 * lo

    # 1/D is searched in (0, 1/2); the pair is re-verified after halving
    lo, hi = 0.0, 0.5
    if _family_ok(alpha, omega, 1.0 / hi, K):
        lo = hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _family_ok(alpha, omega, 1.0 / mid, K):
            lo = mid
        else:
            hi = mid
    inv_D = 0.5 * lo
    while inv_D > 0 and not _family_ok(alpha, omega, 1.0 / inv_D, K):
        inv_D *= 0.5
    if not inv_D > 0:
        raise CurvelabError("no finite dimension found")
    return K, 1.0 / inv_D


# --------------------------------------------------------------------------
# Resistance
# --------------------------------------------------------------------------


def resistance(G: LinearGraph, n: int) -> float:
    """``R(0, n) = sum_{k<n} 1/w_k``."""
    if n < 1:
        raise CurvelabError("n must be >= 1")
    return math.fsum(1.0 / G.weight_array(0, n))
