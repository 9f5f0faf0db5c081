"""Weighted linear graphs and their Gamma-calculus.

A linear graph lives on ``Z ∩ I`` for an interval ``I`` and carries edge
weights ``w(n, n+1)`` and a vertex measure ``m``. Weights are given as a finite
tabulated prefix followed by a symbolic tail so that questions about infinite
series (completeness, stochastic completeness, ...) can be decided exactly.

The Gamma-calculus functions (:func:`laplacian`, :func:`gamma`,
:func:`gamma2`) only need ``graph.neighbors(x)`` and ``graph.measure_at(x)``,
so they work unchanged on :class:`~curvelab.symmetric.RootedGraph`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    CurvelabError,
    EdgeOutOfSupport,
    EmptyInterval,
    NotNormalized,
    VertexOutOfSupport,
    WeightUndefined,
)

__all__ = [
    "Support",
    "Constant",
    "Affine",
    "Power",
    "Exponential",
    "Undecidable",
    "WeightModel",
    "MeasureKind",
    "LinearGraph",
    "DimensionParam",
    "LocalFunction",
    "as_dimension",
    "degrees",
    "laplacian",
    "gamma",
    "gamma_operator",
    "gamma2",
    "restrict",
    "physical_graph",
    "normalized_graph",
    "graph_to_dict",
    "graph_from_dict",
    "load_graph",
    "dump_graph",
]

# Relative tolerance for equality checks on weights and degrees.
DEFAULT_RTOL = 1e-9


# --------------------------------------------------------------------------
# Supports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Support:
    """Vertex set of a linear graph: ``N_0``, ``Z`` or a finite interval."""

    kind: str
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        if self.kind == "half_line":
            object.__setattr__(self, "lo", 0)
            object.__setattr__(self, "hi", None)
        elif self.kind == "line":
            object.__setattr__(self, "lo", None)
            object.__setattr__(self, "hi", None)
        elif self.kind == "interval":
            if self.lo is None or self.hi is None:
                raise CurvelabError("interval support needs lo and hi")
            if self.lo > self.hi:
                raise EmptyInterval(f"interval [{self.lo}, {self.hi}] is empty")
            object.__setattr__(self, "lo", int(self.lo))
            object.__setattr__(self, "hi", int(self.hi))
        else:
            raise CurvelabError(f"unknown support kind {self.kind!r}")

    @classmethod
    def half_line(cls):
        return cls("half_line")

    @classmethod
    def line(cls):
        return cls("line")

    @classmethod
    def interval(cls, lo, hi):
        return cls("interval", lo, hi)

    @property
    def is_finite(self):
        return self.kind == "interval"

    def __contains__(self, n):
        if self.lo is not None and n < self.lo:
            return False
        if self.hi is not None and n > self.hi:
            return False
        return True

    def clip(self, lo, hi):
        """Intersect the integer range ``[lo, hi]`` with the support."""
        if self.lo is not None:
            lo = max(lo, self.lo)
        if self.hi is not None:
            hi = min(hi, self.hi)
        return lo, hi


# --------------------------------------------------------------------------
# Tail models
# --------------------------------------------------------------------------
#
# Each tail exposes ``__call__(n)`` (vectorised over numpy arrays) and
# ``asymptotic()``, returning ``(base, power)`` such that the tail is
# comparable to ``base**n * n**power``; ``None`` means no symbolic class.


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise CurvelabError("Constant tail needs c > 0")

    def __call__(self, n):
        return self.c + 0.0 * np.asarray(n, dtype=float)

    def asymptotic(self):
        return (1.0, 0.0)


@dataclass(frozen=True)
class Affine:
    slope: float
    intercept: float

    def __post_init__(self):
        if self.slope < 0 or not self.intercept > 0:
            raise CurvelabError("Affine tail needs slope >= 0 and intercept > 0")

    def __call__(self, n):
        return self.slope * np.asarray(n, dtype=float) + self.intercept

    def asymptotic(self):
        return (1.0, 1.0 if self.slope > 0 else 0.0)


@dataclass(frozen=True)
class Power:
    """``c * (n + shift) ** gamma``."""

    c: float
    gamma: float
    shift: int = 0

    def __post_init__(self):
        if not self.c > 0 or self.shift < 0:
            raise CurvelabError("Power tail needs c > 0 and shift >= 0")

    def __call__(self, n):
        return self.c * (np.asarray(n, dtype=float) + self.shift) ** self.gamma

    def asymptotic(self):
        return (1.0, float(self.gamma))


@dataclass(frozen=True)
class Exponential:
    """``c * base ** n``."""

    c: float
    base: float

    def __post_init__(self):
        if not (self.c > 0 and self.base > 0):
            raise CurvelabError("Exponential tail needs c > 0 and base > 0")

    def __call__(self, n):
        with np.errstate(over="ignore", under="ignore"):
            return self.c * np.power(self.base, np.asarray(n, dtype=float))

    def asymptotic(self):
        return (float(self.base), 0.0)


@dataclass(frozen=True)
class Undecidable:
    """Tail without a symbolic growth class.

    ``fn`` optionally supplies values (``fn(n) -> float``); without it the
    weights beyond the prefix are unknown and requesting them raises
    :class:`WeightUndefined`.
    """

    fn: Optional[Callable[[int], float]] = field(default=None, compare=False)

    def __call__(self, n):
        if self.fn is None:
            raise WeightUndefined("undecidable tail has no values")
        arr = np.asarray(n)
        if arr.ndim == 0:
            return float(self.fn(int(arr)))
        return np.fromiter((self.fn(int(k)) for k in arr), dtype=float, count=arr.size)

    def asymptotic(self):
        return None


TailModel = Union[Constant, Affine, Power, Exponential, Undecidable]


# --------------------------------------------------------------------------
# Weight / measure sequences
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightModel:
    """Positive sequence indexed by integers.

    ``prefix[i]`` is the value at ``start + i``. At ``n >= start + len(prefix)``
    the ``tail`` is evaluated at the absolute index ``n``. Left of ``start``
    the ``left`` tail is evaluated at the distance ``start - 1 - n``; without
    one, the first value is continued as a constant.
    """

    prefix: tuple = ()
    tail: Optional[TailModel] = None
    start: int = 0
    left: Optional[TailModel] = None

    def __post_init__(self):
        prefix = tuple(float(v) for v in self.prefix)
        if any(not (v > 0 and math.isfinite(v)) for v in prefix):
            raise CurvelabError("prefix values must be positive and finite")
        object.__setattr__(self, "prefix", prefix)
        if isinstance(self.tail, Power) and self.tail.shift + self.end <= 0:
            raise CurvelabError("Power tail would be evaluated at a non-positive base")

    @property
    def end(self):
        """First index handled by the tail."""
        return self.start + len(self.prefix)

    def value(self, n):
        n = int(n)
        if self.start <= n < self.end:
            return self.prefix[n - self.start]
        if n >= self.end:
            if self.tail is None:
                raise WeightUndefined(f"no value at index {n}")
            return float(self.tail(n))
        if self.left is not None:
            return float(self.left(self.start - 1 - n))
        if self.prefix:
            return self.prefix[0]
        if self.tail is not None:
            return float(self.tail(self.start))
        raise WeightUndefined(f"no value at index {n}")

    def values(self, lo, hi):
        """Vectorised values on ``lo <= n < hi``."""
        out = np.empty(max(hi - lo, 0), dtype=float)
        if out.size == 0:
            return out
        idx = np.arange(lo, hi)
        pre = (idx >= self.start) & (idx < self.end)
        if pre.any():
            out[pre] = np.asarray(self.prefix)[idx[pre] - self.start]
        right = idx >= self.end
        if right.any():
            if self.tail is None:
                raise WeightUndefined(f"no value beyond index {self.end - 1}")
            out[right] = self.tail(idx[right])
        leftm = idx < self.start
        if leftm.any():
            if self.left is not None:
                out[leftm] = self.left(self.start - 1 - idx[leftm])
            else:
                out[leftm] = self.value(self.start - 1)
        return out


@dataclass(frozen=True)
class MeasureKind:
    """Vertex measure: ``physical`` (m = 1), ``normalized`` or ``explicit``."""

    kind: str
    model: Optional[WeightModel] = None

    def __post_init__(self):
        if self.kind not in ("physical", "normalized", "explicit"):
            raise CurvelabError(f"unknown measure kind {self.kind!r}")
        if (self.kind == "explicit") != (self.model is not None):
            raise CurvelabError("explicit measure needs a model (and only it does)")

    @classmethod
    def physical(cls):
        return cls("physical")

    @classmethod
    def normalized(cls):
        return cls("normalized")

    @classmethod
    def explicit(cls, prefix=(), tail=None, start=0, left=None):
        if isinstance(prefix, WeightModel):
            return cls("explicit", prefix)
        return cls("explicit", WeightModel(tuple(prefix), tail, start, left))


# --------------------------------------------------------------------------
# Dimension parameter
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionParam:
    """Dimension ``D`` in ``(0, inf]``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not v > 0:
            raise CurvelabError("dimension must be positive")
        object.__setattr__(self, "value", v)

    @property
    def is_infinite(self):
        return math.isinf(self.value)

    @property
    def inv(self):
        return 0.0 if self.is_infinite else 1.0 / self.value

    @property
    def c(self):
        """``1 - 2/D``."""
        return 1.0 - 2.0 * self.inv

    @property
    def c4(self):
        """``1 - 4/D``."""
        return 1.0 - 4.0 * self.inv

    def __str__(self):
        return "inf" if self.is_infinite else repr(self.value)


def as_dimension(D) -> DimensionParam:
    if isinstance(D, DimensionParam):
        return D
    if isinstance(D, str):
        D = math.inf if D.strip().lower() in ("inf", "infinity", "∞") else float(D)
    return DimensionParam(D)


# --------------------------------------------------------------------------
# Linear graph
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearGraph:
    """Weighted linear graph ``(V, w, m)``.

    ``weights.value(n)`` is the weight of the edge ``(n, n+1)``.
    """

    support: Support
    weights: WeightModel
    measure: MeasureKind = field(default_factory=MeasureKind.physical)

    def __post_init__(self):
        s = self.support
        if self.measure.kind == "normalized" and s.is_finite and s.lo == s.hi:
            raise NotNormalized("a single vertex has no normalized measure")

    # -- structure ---------------------------------------------------------

    def __contains__(self, n):
        return n in self.support

    def check_vertex(self, n):
        if n not in self.support:
            raise VertexOutOfSupport(f"vertex {n} is not in the support")

    def has_edge(self, n):
        """Whether ``(n, n+1)`` is an edge."""
        return n in self.support and (n + 1) in self.support

    def w(self, n):
        """Weight of the edge ``(n, n+1)``."""
        if not self.has_edge(n):
            raise EdgeOutOfSupport(f"edge ({n}, {n + 1}) is not in the graph")
        return self.weights.value(n)

    def edge_weight(self, x, y):
        if abs(x - y) != 1:
            return 0.0
        n = min(x, y)
        return self.w(n) if self.has_edge(n) else 0.0

    def m(self, n):
        self.check_vertex(n)
        kind = self.measure.kind
        if kind == "physical":
            return 1.0
        if kind == "explicit":
            return self.measure.model.value(n)
        total = 0.0
        if self.has_edge(n - 1):
            total += self.weights.value(n - 1)
        if self.has_edge(n):
            total += self.weights.value(n)
        return total

    measure_at = m

    def neighbors(self, x):
        self.check_vertex(x)
        out = []
        if self.has_edge(x - 1):
            out.append((x - 1, self.weights.value(x - 1)))
        if self.has_edge(x):
            out.append((x + 1, self.weights.value(x)))
        return out

    def ball(self, x, r):
        lo, hi = self.support.clip(x - r, x + r)
        return list(range(lo, hi + 1))

    @property
    def is_normalized(self):
        return self.measure.kind == "normalized"

    @property
    def is_physical(self):
        return self.measure.kind == "physical"

    # -- vectorised windows ------------------------------------------------

    def weight_array(self, lo, hi):
        """Weights of edges ``(n, n+1)`` for ``lo <= n < hi``."""
        return self.weights.values(lo, hi)

    def measure_array(self, lo, hi):
        """Measures of vertices ``lo <= n <= hi`` (all inside the support)."""
        if self.measure.kind == "physical":
            return np.ones(hi - lo + 1)
        if self.measure.kind == "explicit":
            return self.measure.model.values(lo, hi + 1)
        # w[k] holds the weight of edge (lo - 1 + k, lo + k), zero if absent
        w = np.zeros(hi - lo + 2)
        e_lo = lo - 1 if self.has_edge(lo - 1) else lo
        e_hi = hi if self.has_edge(hi) else hi - 1
        if e_hi >= e_lo:
            w[e_lo - lo + 1 : e_hi - lo + 2] = self.weights.values(e_lo, e_hi + 1)
        return w[:-1] + w[1:]

    def default_range(self):
        """A finite window of vertices whose two-step balls only touch tabulated edges."""
        s = self.support
        if s.is_finite:
            return s.lo, s.hi
        lo = s.lo if s.lo is not None else self.weights.start
        hi = max(self.weights.end - 2, lo + 1)
        return lo, hi


# --------------------------------------------------------------------------
# Finitely supported functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalFunction:
    """Function on the integers vanishing outside ``[support_lo, support_hi]``."""

    support_lo: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def support_hi(self):
        return self.support_lo + len(self.values) - 1

    def __call__(self, n):
        i = n - self.support_lo
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0.0

    @classmethod
    def from_callable(cls, fn, lo, hi):
        return cls(lo, tuple(fn(n) for n in range(lo, hi + 1)))


def _as_callable(f):
    if callable(f):
        return f
    if isinstance(f, dict):
        return lambda x: f.get(x, 0.0)
    raise TypeError("function must be callable or a dict")


# --------------------------------------------------------------------------
# Degrees and Gamma-calculus
# --------------------------------------------------------------------------


def degrees(G: LinearGraph, n: int):
    """Return ``(d_minus, d_plus, p, Deg)`` at vertex ``n``.

    ``p = d_plus - 1/2`` is the local growth rate and ``Deg = d_minus + d_plus``.
    """
    G.check_vertex(n)
    m = G.m(n)
    d_minus = G.w(n - 1) / m if G.has_edge(n - 1) else 0.0
    d_plus = G.w(n) / m if G.has_edge(n) else 0.0
    return d_minus, d_plus, d_plus - 0.5, d_minus + d_plus


def laplacian(G, f, x):
    """``Δf(x) = (1/m(x)) Σ_y w(x,y) (f(y) - f(x))``."""
    f = _as_callable(f)
    fx = f(x)
    s = sum(w * (f(y) - fx) for y, w in G.neighbors(x))
    return s / G.measure_at(x)


def gamma(G, f, x, g=None):
    """Carré du champ ``Γ(f, g)(x)`` (``g`` defaults to ``f``), edge form."""
    f = _as_callable(f)
    g = f if g is None else _as_callable(g)
    fx, gx = f(x), g(x)
    s = sum(w * (f(y) - fx) * (g(y) - gx) for y, w in G.neighbors(x))
    return 0.5 * s / G.measure_at(x)


def gamma_operator(G, f, g, x):
    """``Γ(f, g)(x)`` through ``½(Δ(fg) - fΔg - gΔf)``; cross-check of :func:`gamma`."""
    f = _as_callable(f)
    g = _as_callable(g)
    fg = lambda y: f(y) * g(y)  # noqa: E731
    return 0.5 * (laplacian(G, fg, x) - f(x) * laplacian(G, g, x) - g(x) * laplacian(G, f, x))


def gamma2(G, f, x):
    """Iterated carré du champ ``Γ₂(f)(x) = ½ΔΓ(f)(x) - Γ(f, Δf)(x)``."""
    f = _as_callable(f)
    nbrs = G.neighbors(x)
    m = G.measure_at(x)
    gam_x = gamma(G, f, x)
    lap_x = laplacian(G, f, x)
    half_lap_gamma = 0.0
    cross = 0.0
    fx = f(x)
    for y, w in nbrs:
        half_lap_gamma += w * (gamma(G, f, y) - gam_x)
        cross += w * (f(y) - fx) * (laplacian(G, f, y) - lap_x)
    return 0.5 * half_lap_gamma / m - 0.5 * cross / m


# --------------------------------------------------------------------------
# Restriction
# --------------------------------------------------------------------------


def restrict(G: LinearGraph, A: int, B: int, renormalize=False) -> LinearGraph:
    """Restriction ``G_{A,B}`` to the vertices ``A..B``.

    Only edges inside ``[A, B]`` survive and the measure keeps the parent
    values (so the result is generally *not* normalized). Pass
    ``renormalize=True`` to rebuild a normalized measure instead.
    """
    if A == B:
        raise EmptyInterval("restriction needs A < B")
    if A > B:
        raise EmptyInterval(f"restriction interval [{A}, {B}] is reversed")
    G.check_vertex(A)
    G.check_vertex(B)
    weights = WeightModel(tuple(G.weight_array(A, B)), None, A)
    if renormalize:
        measure = MeasureKind.normalized()
    else:
        measure = MeasureKind.explicit(WeightModel(tuple(G.measure_array(A, B)), None, A))
    return LinearGraph(Support.interval(A, B), weights, measure)


# --------------------------------------------------------------------------
# Convenience constructors
# --------------------------------------------------------------------------


def _support_for(support, n_weights, start):
    if isinstance(support, Support):
        return support
    if support in (None, "interval"):
        return Support.interval(start, start + n_weights)
    return Support(support)


def physical_graph(weights: Sequence[float], tail=None, support=None, start=0) -> LinearGraph:
    """Physical graph from a weight list; finite interval unless ``support`` is given."""
    model = WeightModel(tuple(weights), tail, start)
    return LinearGraph(_support_for(support, len(model.prefix), start), model, MeasureKind.physical())


def normalized_graph(weights: Sequence[float], tail=None, support=None, start=0) -> LinearGraph:
    model = WeightModel(tuple(weights), tail, start)
    return LinearGraph(_support_for(support, len(model.prefix), start), model, MeasureKind.normalized())


# --------------------------------------------------------------------------
# JSON graph specs
# --------------------------------------------------------------------------


def tail_to_dict(tail):
    if tail is None:
        return None
    if isinstance(tail, Constant):
        return {"kind": "constant", "c": tail.c}
    if isinstance(tail, Affine):
        return {"kind": "affine", "slope": tail.slope, "intercept": tail.intercept}
    if isinstance(tail, Power):
        return {"kind": "power", "c": tail.c, "gamma": tail.gamma, "shift": tail.shift}
    if isinstance(tail, Exponential):
        return {"kind": "exponential", "c": tail.c, "base": tail.base}
    return {"kind": "undecidable"}


def tail_from_dict(d):
    if d is None:
        return None
    if not isinstance(d, dict) or "kind" not in d:
        raise CurvelabError(f"malformed tail model: {d!r}")
    kind = d["kind"]
    try:
        if kind == "constant":
            return Constant(float(d["c"]))
        if kind == "affine":
            return Affine(float(d["slope"]), float(d["intercept"]))
        if kind == "power":
            return Power(float(d["c"]), float(d["gamma"]), int(d.get("shift", 0)))
        if kind == "exponential":
            return Exponential(float(d["c"]), float(d["base"]))
        if kind == "undecidable":
            return Undecidable()
    except KeyError as exc:
        raise CurvelabError(f"tail model {kind!r} is missing field {exc}") from None
    raise CurvelabError(f"unknown tail kind {kind!r}")


def _model_to_dict(model: WeightModel):
    d = {"prefix": list(model.prefix), "tail": tail_to_dict(model.tail)}
    if model.start != 0:
        d["start"] = model.start
    if model.left is not None:
        d["left"] = tail_to_dict(model.left)
    return d


def _model_from_dict(d, default_start=0):
    if not isinstance(d, dict):
        raise CurvelabError("weight model must be an object")
    return WeightModel(
        tuple(d.get("prefix", ())),
        tail_from_dict(d.get("tail")),
        int(d.get("start", default_start)),
        tail_from_dict(d.get("left")),
    )


def graph_to_dict(G: LinearGraph) -> dict:
    s = G.support
    support = {"kind": s.kind}
    if s.is_finite:
        support.update(lo=s.lo, hi=s.hi)
    if G.measure.kind == "explicit":
        measure = {"explicit": _model_to_dict(G.measure.model)}
    else:
        measure = G.measure.kind
    return {"support": support, "measure": measure, "weights": _model_to_dict(G.weights)}


def graph_from_dict(d) -> LinearGraph:
    if not isinstance(d, dict):
        raise CurvelabError("graph spec must be a JSON object")
    try:
        sd = d["support"]
        kind = sd["kind"]
        support = Support(kind, sd.get("lo"), sd.get("hi"))
        default_start = support.lo if support.lo is not None else 0
        weights = _model_from_dict(d["weights"], default_start)
        md = d.get("measure", "physical")
        if isinstance(md, str):
            measure = MeasureKind(md)
        elif isinstance(md, dict) and "explicit" in md:
            measure = MeasureKind.explicit(_model_from_dict(md["explicit"], default_start))
        else:
            raise CurvelabError(f"malformed measure: {md!r}")
    except (KeyError, TypeError) as exc:
        raise CurvelabError(f"malformed graph spec: {exc}") from None
    return LinearGraph(support, weights, measure)


def load_graph(path) -> LinearGraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurvelabError(f"{path}: invalid JSON ({exc})") from None
    return graph_from_dict(data)


def dump_graph(G: LinearGraph, fh=None, **kwargs):
    text = json.dumps(graph_to_dict(G), indent=2, sort_keys=True, **kwargs)
    if fh is None:
        return text
    fh.write(text + "\n")
