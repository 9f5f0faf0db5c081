import math
import sys

import numpy as np
import pytest

from curvelab.curvature import find_cd_violation
from curvelab.graph_core import (
    Constant,
    LinearGraph,
    MeasureKind,
    Support,
    WeightModel,
    physical_graph,
)


def random_graph(rng, kind=None, size=None):
    """Random finite linear graph; the measure kind is drawn unless ``kind`` is given."""
    kind = kind or rng.choice(["physical", "normalized", "explicit"])
    size = size or int(rng.integers(2, 9))
    start = int(rng.integers(-3, 4))
    w = np.exp(rng.normal(0.0, 0.8, size))
    weights = WeightModel(tuple(w), None, start)
    support = Support.interval(start, start + size)
    if kind == "physical":
        measure = MeasureKind.physical()
    elif kind == "normalized":
        measure = MeasureKind.normalized()
    else:
        measure = MeasureKind.explicit(tuple(np.exp(rng.normal(0.0, 0.8, size + 1))), None, start)
    return LinearGraph(support, weights, measure)


def random_dimension(rng):
    r = rng.random()
    if r < 0.2:
        return math.inf
    if r < 0.3:
        return 2.0
    return float(rng.uniform(2.0, 30.0))


def _step_max(w, n, K):
    """Largest ``w_{n+1}`` keeping CD(K, inf) at vertex ``n`` of a physical path."""
    a = w[n - 2] if n >= 2 else 0.0
    b, c = w[n - 1], w[n]
    A = 4 * b - a - c - 2 * K
    if A <= 0:
        return -1.0
    return 4 * c - b - 2 * K - 4 * b * c / A


def random_cd_physical(K, length, rng, tries=2000):
    """Random physical path on ``{0..length}`` sampled vertex by vertex under CD(K, inf).

    Only candidates passing ``find_cd_violation`` on the whole path are returned;
    ``None`` means every attempt dead-ended.
    """
    for _ in range(tries):
        w = [1.0, float(rng.uniform(1.0, 3.0))]
        ok = True
        for n in range(1, length - 1):
            top = _step_max(w, n, K)
            if top <= 0:
                ok = False
                break
            lo = min(w[n], top)
            w.append(lo + (top - lo) * rng.uniform() ** 2)
        if ok:
            G = physical_graph(w)
            if find_cd_violation(G, K, "inf", 0, length) is None:
                return G
    return None


def constant_line(c=1.0, kind="physical"):
    return LinearGraph(Support.line(), WeightModel((), Constant(c)), MeasureKind(kind))


def constant_half_line(c=1.0, kind="physical"):
    return LinearGraph(Support.half_line(), WeightModel((), Constant(c)), MeasureKind(kind))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        title, status, detail = results[num]
        line = f"criterion {num:2d}: {status}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
