"""Model spaces and Bishop-Gromov type comparison for normalized linear graphs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .curvature import G_fn, cd_holds, optimal_curvature
from .errors import (
    CdHypothesisFailed,
    CurvelabError,
    DimensionBelowFour,
    DimensionNotAboveTwo,
    HypothesisFailed,
    NotNormalized,
    UnsupportedSupport,
)
from .graph_core import (
    DimensionParam,
    LinearGraph,
    MeasureKind,
    Power,
    Support,
    WeightModel,
    as_dimension,
    degrees,
)

__all__ = [
    "DOMINANCE_TOL",
    "DimensionFunction",
    "p_model",
    "model_space",
    "normalized_from_rates",
    "cd_rate_sequence",
    "is_model_space",
    "DPlusRow",
    "MeasureRatioRow",
    "ComparisonReport",
    "compare",
    "growth_rate_bound",
    "measure_ratio",
    "measure_growth_bound",
    "nonneg_p_check",
]

DOMINANCE_TOL = 1e-12
MODEL_CURVATURE_TOL = 1e-9


@dataclass(frozen=True)
class DimensionFunction:
    """Map ``N_0 -> [2, inf]`` given by a tabulated prefix and a constant tail."""

    prefix: tuple = ()
    tail: float = math.inf

    def __post_init__(self):
        vals = tuple(float(v) for v in self.prefix)
        if any(not v >= 2 for v in vals + (float(self.tail),)):
            raise CurvelabError("dimension function values must lie in [2, inf]")
        object.__setattr__(self, "prefix", vals)
        object.__setattr__(self, "tail", float(self.tail))

    @classmethod
    def constant(cls, D):
        return cls((), as_dimension(D).value)

    def __call__(self, x: int) -> DimensionParam:
        if 0 <= x < len(self.prefix):
            return DimensionParam(self.prefix[x])
        return DimensionParam(self.tail)

    @classmethod
    def parse(cls, text: str):
        """``"4"``, ``"inf"`` or ``"3,4,5;6"`` (prefix, then tail after ``;``)."""
        text = text.strip()
        if ";" in text:
            head, tail = text.split(";", 1)
            prefix = [as_dimension(t).value for t in head.split(",") if t.strip()]
            return cls(tuple(prefix), as_dimension(tail).value)
        return cls.constant(text)


def p_model(D, n):
    """Growth rate ``(D-2)/(2D + 4(n-1))`` of the model space ``G_D``."""
    D = as_dimension(D).value
    n = np.asarray(n, dtype=float)
    return (D - 2.0) / (2.0 * D + 4.0 * (n - 1.0))


def _weights_from_rates(p):
    """Weights ``w_0..w_{L-1}`` of a normalized half-line with ``m(0) = 1``."""
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        return np.empty(0)
    if abs(p[0] - 0.5) > 1e-15:
        raise CurvelabError("a normalized half-line has p(0) = 1/2")
    if np.any(np.abs(p[1:]) >= 0.5):
        raise CurvelabError("interior growth rates must lie in (-1/2, 1/2)")
    w = np.empty(p.size)
    w[0] = 1.0
    for k in range(1, p.size):
        w[k] = w[k - 1] * (0.5 + p[k]) / (0.5 - p[k])
    return w


def normalized_from_rates(p: Sequence[float], tail=None) -> LinearGraph:
    """Normalized graph on ``N_0`` with prescribed growth rates ``p(0..L-1)``.

    Without ``tail`` the graph lives on ``{0..L}`` (the last vertex is a
    right boundary); with a tail it is a half-line.
    """
    w = _weights_from_rates(p)
    model = WeightModel(tuple(w), tail, 0)
    support = Support.half_line() if tail is not None else Support.interval(0, len(w))
    return LinearGraph(support, model, MeasureKind.normalized())


def model_space(D, length: int = 200) -> LinearGraph:
    """Model space ``G_D`` on ``N_0``.

    The weights ``w_0..w_{length+1}`` follow the growth-rate recursion, so
    every quantity at vertices ``n <= length`` is exact. Beyond that the
    weights continue with the power tail ``(n+1)^{D-2}/Γ(D-1)``, which has the
    model's asymptotic growth and is used only for asymptotic decisions.
    """
    D = as_dimension(D)
    if D.is_infinite or not D.value > 2:
        raise DimensionNotAboveTwo("model space needs 2 < D < inf")
    if length < 0:
        raise CurvelabError("length must be non-negative")
    n = np.arange(length + 2)
    p = p_model(D, n)
    p[0] = 0.5
    tail = Power(1.0 / math.gamma(D.value - 1.0), D.value - 2.0, 1)
    return normalized_from_rates(p, tail)


def cd_rate_sequence(D, length: int, theta=1.0, rng=None) -> np.ndarray:
    """Growth rates obeying ``2p(n+1) = θ G(p(n-1), p(n), 0, D)``.

    ``theta`` in ``[0, 1]`` may be a scalar or is drawn per step from ``rng``
    when ``theta`` is ``None``. Non-positive thresholds are used as is, since
    scaling them up would break the CD inequality.
    """
    D = as_dimension(D)
    p = np.empty(length)
    p[0] = 0.5
    for n in range(length - 1):
        a = p[n - 1] if n >= 1 else 0.0
        g = G_fn(a, p[n], 0.0, D)
        t = rng.uniform(0.0, 1.0) if theta is None else theta
        nxt = 0.5 * (t * g if g > 0 else g)
        if not -0.5 < nxt < 0.5:
            raise CurvelabError(f"growth-rate recursion left (-1/2, 1/2) at n={n + 1}")
        p[n + 1] = nxt
    return p


def _require_normalized(G):
    if not G.is_normalized:
        raise NotNormalized("graph measure is not normalized")


def is_model_space(G0: LinearGraph, N: DimensionFunction, length: int) -> bool:
    _require_normalized(G0)
    lo, hi = G0.support.clip(0, length)
    return all(
        optimal_curvature(G0, x, N(x)) <= MODEL_CURVATURE_TOL for x in range(lo, hi + 1)
    )


@dataclass(frozen=True)
class DPlusRow:
    x: int
    d_plus_model: float
    d_plus_G: float
    k_model: float
    k_G: float
    hypothesis: bool
    backed: bool
    dominance: bool


@dataclass(frozen=True)
class MeasureRatioRow:
    x: int
    y: int
    ratio_model: float
    ratio_G: float
    backed: bool
    dominance: bool


@dataclass
class ComparisonReport:
    d_plus_rows: list = field(default_factory=list)
    measure_ratio_rows: list = field(default_factory=list)
    hypothesis_failures: list = field(default_factory=list)

    @property
    def counterexamples(self):
        """Rows where the hypothesis held up to the row but dominance failed."""
        bad = [r for r in self.d_plus_rows if r.backed and not r.dominance]
        bad += [r for r in self.measure_ratio_rows if r.backed and not r.dominance]
        return bad

    @property
    def ok(self):
        return not self.counterexamples

    def to_dict(self):
        return {
            "d_plus_rows": [r.__dict__ for r in self.d_plus_rows],
            "measure_ratio_rows": [r.__dict__ for r in self.measure_ratio_rows],
            "hypothesis_failures": list(self.hypothesis_failures),
            "tolerance": DOMINANCE_TOL,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def compare(
    G0: LinearGraph,
    G: LinearGraph,
    N: DimensionFunction,
    hi: int,
    strict: bool = False,
) -> ComparisonReport:
    """Compare ``G`` against the model ``G0`` on vertices ``0..hi``.

    A row is theorem-backed when the curvature hypothesis
    ``K*(G0, x, N(x)) <= K*(G, x, N(x))`` held at every vertex ``0..x-1`` (for
    ``d_+`` at ``x``) or ``0..y-1`` (for the ratio ``m(y)/m(x)``). Hypothesis
    failures are listed in the report; with ``strict=True`` the first one is
    raised as :class:`HypothesisFailed`.
    """
    _require_normalized(G)
    _require_normalized(G0)
    if G.support.lo is not None and G.support.lo > 0:
        raise UnsupportedSupport("comparison needs inf V <= 0")
    if not is_model_space(G0, N, hi):
        raise HypothesisFailed("G0 is not a model space for N on the range")
    _, hi_g = G.support.clip(0, hi)
    _, hi_0 = G0.support.clip(0, hi)
    hi = min(hi_g, hi_0)

    report = ComparisonReport()
    d0 = np.empty(hi + 1)
    dg = np.empty(hi + 1)
    hyp_prefix = np.empty(hi + 2, dtype=bool)
    hyp_prefix[0] = True
    for x in range(hi + 1):
        k0 = optimal_curvature(G0, x, N(x))
        kg = optimal_curvature(G, x, N(x))
        hyp = k0 <= kg + MODEL_CURVATURE_TOL
        if not hyp:
            report.hypothesis_failures.append(x)
            if strict:
                raise HypothesisFailed(f"curvature hypothesis fails at x={x}", vertex=x)
        hyp_prefix[x + 1] = hyp_prefix[x] and hyp
        d0[x] = degrees(G0, x)[1]
        dg[x] = degrees(G, x)[1]
        report.d_plus_rows.append(
            DPlusRow(x, d0[x], dg[x], k0, kg, hyp, bool(hyp_prefix[x]), bool(d0[x] >= dg[x] - DOMINANCE_TOL))
        )

    m0 = G0.measure_array(0, hi)
    mg = G.measure_array(0, hi)
    for x in range(hi + 1):
        for y in range(x + 1, hi + 1):
            r0 = m0[y] / m0[x]
            rg = mg[y] / mg[x]
            report.measure_ratio_rows.append(
                MeasureRatioRow(x, y, r0, rg, bool(hyp_prefix[y]), bool(r0 >= rg - DOMINANCE_TOL * max(1.0, rg)))
            )
    return report


def _check_cd(G, D, lo, hi):
    for x in range(lo, hi + 1):
        if not cd_holds(G, x, 0.0, D):
            raise CdHypothesisFailed(f"CD(0, {D}) fails at n={x}", vertex=x)


def growth_rate_bound(G: LinearGraph, D, lo: int, hi: int) -> bool:
    """``p(n) <= p_D(n)`` on ``[lo, hi]`` for a normalized CD(0, D) graph."""
    _require_normalized(G)
    D = as_dimension(D)
    if G.support.lo is not None and G.support.lo > 0:
        raise UnsupportedSupport("growth-rate comparison needs inf V <= 0")
    lo, hi = G.support.clip(max(lo, 0), hi)
    _check_cd(G, D, *G.support.clip(0, hi - 1))
    if D.is_infinite:
        return True
    p = np.array([degrees(G, n)[2] for n in range(lo, hi + 1)])
    bound = p_model(D, np.arange(lo, hi + 1))
    if lo == 0 and bound.size:
        bound[0] = 0.5
    return bool(np.all(p <= bound + DOMINANCE_TOL))


def measure_ratio(G: LinearGraph, i: int, j: int) -> float:
    return G.m(j) / G.m(i)


def measure_growth_bound(G: LinearGraph, D, i: int, j: int) -> bool:
    """``m(j)/m(i) <= ((j+1)/(i+1))^{D-2}`` for a normalized CD(0, D) graph, ``D >= 4``."""
    _require_normalized(G)
    D = as_dimension(D)
    if D.value < 4:
        raise DimensionBelowFour("the measure growth bound needs D >= 4")
    if not 0 <= i < j:
        raise CurvelabError("need 0 <= i < j")
    if G.support.hi is not None:
        raise UnsupportedSupport("the measure growth bound needs sup V = inf")
    if G.support.lo is not None and G.support.lo > 0:
        raise UnsupportedSupport("the measure growth bound needs inf V <= 0")
    _check_cd(G, D, *G.support.clip(0, j))
    if D.is_infinite:
        return True
    bound = ((j + 1.0) / (i + 1.0)) ** (D.value - 2.0)
    return measure_ratio(G, i, j) <= bound * (1.0 + DOMINANCE_TOL)


def nonneg_p_check(G: LinearGraph, lo: int, hi: int, D=None) -> bool:
    """``p(n) >= 0`` (up to ``1e-12``) on ``[lo, hi]``.

    With ``D`` given, CD(0, D) with ``D >= 4`` is verified on the range first.
    """
    _require_normalized(G)
    lo, hi = G.support.clip(lo, hi)
    if D is not None:
        D = as_dimension(D)
        if D.value < 4:
            raise DimensionBelowFour("non-negativity of p needs D >= 4")
        _check_cd(G, D, lo, hi)
    return all(degrees(G, n)[2] >= -DOMINANCE_TOL for n in range(lo, hi + 1))
