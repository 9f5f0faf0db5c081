import math

import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import constant_line
from curvelab.comparison import model_space
from curvelab.errors import (
    CurvelabError,
    Disconnected,
    GraphTooLarge,
    NotNormalized,
    RadiusExceedsSupport,
)
from curvelab.graph_core import (
    LinearGraph,
    MeasureKind,
    Support,
    WeightModel,
    physical_graph,
    restrict,
)
from curvelab.inequalities import (
    cheeger,
    cheeger_bruteforce,
    doubling_constants,
    doubling_table,
    ellipticity,
    poincare_best_constant,
    sd_product_check,
    spectral_gap,
    spectrum,
)
from curvelab.symmetric import RootedGraph


def path(w, m):
    n = len(w)
    return LinearGraph(Support.interval(0, n), WeightModel(tuple(map(float, w)), None, 0),
                       MeasureKind.explicit(tuple(map(float, m)), None, 0))


class TestCheeger:
    def test_hand_example(self):
        assert cheeger(path([1, 1, 1], [1, 2, 2, 2])) == pytest.approx(1 / 3)

    def test_two_vertices(self):
        G = path([1], [1, 1])
        assert cheeger(G) == 1.0
        assert spectral_gap(G) == pytest.approx(2.0)

    def test_prefix_cuts_match_bruteforce(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 12))
            w = rng.integers(1, 10, size=n - 1).astype(float)
            m = rng.integers(1, 10, size=n).astype(float)
            assert cheeger(path(w, m)) == cheeger_bruteforce(w, m)

    def test_spectral_bound(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 30))
            w = np.exp(rng.normal(size=n - 1))
            m = np.exp(rng.normal(size=n))
            G = path(w, m)
            h = cheeger(G)
            lam = spectral_gap(G)
            deg = np.max((np.r_[0.0, w] + np.r_[w, 0.0]) / m)
            assert 0.5 * h * h / deg <= lam * (1 + 1e-10)
            # Rayleigh quotient of the indicator of the optimal side bounds lam_1 by 2h
            assert lam <= 2 * h * (1 + 1e-10)

    def test_spectrum_of_unit_path(self):
        # unit weights and unit measure on N vertices: 2 - 2 cos(k pi / N)
        N = 8
        lam = spectrum(restrict(constant_line(), 0, N - 1))
        assert lam == pytest.approx(2 - 2 * np.cos(np.arange(N) * np.pi / N), abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(Disconnected):
            cheeger(LinearGraph(Support.interval(0, 0), WeightModel(()), MeasureKind.explicit((1.0,), None, 0)))
        with pytest.raises(GraphTooLarge):
            cheeger(physical_graph(np.ones(5000)))
        with pytest.raises(CurvelabError):
            cheeger(constant_line())


def poincare_oracle(G, x0, R, starts=8, seed=0):
    """Maximise the Poincaré ratio directly with a local optimiser."""
    r1, r2 = int(R), int(2 * R)
    lo, hi = G.support.clip(x0 - r2, x0 + r2)
    w = G.weight_array(lo, hi)
    m = G.measure_array(lo, hi)
    a, b = G.support.clip(x0 - r1, x0 + r1)
    inner = slice(a - lo, b - lo + 1)

    def neg_ratio(f):
        g = f[inner]
        mb = m[inner]
        num = float(mb @ (g - (mb @ g) / mb.sum()) ** 2)
        den = 2.0 * float(w @ np.diff(f) ** 2)
        return -num / (R * R * den)

    rng = np.random.default_rng(seed)
    return max(-minimize(neg_ratio, rng.normal(size=hi - lo + 1), method="BFGS").fun for _ in range(starts))


class TestPoincare:
    def test_single_vertex_ball(self):
        assert poincare_best_constant(constant_line(), 0, 0.5) == 0.0

    @pytest.mark.parametrize("R", [1, 1.5, 2, 3])
    def test_matches_optimiser(self, R):
        G = constant_line()
        C = poincare_best_constant(G, 0, R)
        assert C == pytest.approx(poincare_oracle(G, 0, R), rel=1e-6)

    def test_random_functions_below_constant(self, rng):
        G = model_space(4, length=60)
        for x0, R in [(0, 2), (5, 3), (10, 4)]:
            C = poincare_best_constant(G, x0, R)
            lo, hi = G.support.clip(x0 - 2 * R, x0 + 2 * R)
            w, m = G.weight_array(lo, hi), G.measure_array(lo, hi)
            a, b = G.support.clip(x0 - R, x0 + R)
            for _ in range(200):
                f = rng.normal(size=hi - lo + 1)
                g, mb = f[a - lo : b - lo + 1], m[a - lo : b - lo + 1]
                lhs = mb @ (g - (mb @ g) / mb.sum()) ** 2
                rhs = C * R * R * 2.0 * (w @ np.diff(f) ** 2)
                assert lhs <= rhs * (1 + 1e-10)

    def test_model_space_bounded(self):
        G = model_space(4, length=200)
        vals = [poincare_best_constant(G, x, R) for x in range(0, 11) for R in (1, 2, 3, 4, 5)]
        assert max(vals) < 1.0

    def test_rejects_nonpositive_radius(self):
        G = physical_graph([1.0, 1.0, 1.0])
        with pytest.raises(CurvelabError):
            poincare_best_constant(G, 0, -1)


def model_ball(r):
    # m_n = (n + 1)^2 on the D = 4 model space
    return sum((k + 1) ** 2 for k in range(r + 1))


class TestDoubling:
    def test_model_space_sd(self):
        rep = doubling_constants(model_space(4, length=200), [0], 16)
        # m(S_{2i+1}) / m(S_i) = 4 exactly
        assert rep.C_SD == pytest.approx(4.0, abs=1e-9)

    def test_model_space_vd(self):
        rep = doubling_constants(model_space(4, length=200), range(0, 21), 16)
        assert rep.C_VD == pytest.approx(model_ball(31) / model_ball(15), rel=1e-12)
        assert rep.vd_argmax[1:] == (15, 31)

    def test_constant_line_vd(self):
        rep = doubling_constants(constant_line(), [0], 50)
        # |B_{2R+1}| / |B_R| = (4R + 3) / (2R + 1) <= 3 at R = 0
        assert rep.C_VD == pytest.approx(3.0)
        assert rep.C_SD == pytest.approx(2.0)
        rows = doubling_table(constant_line(), 0, 50)
        assert rows[-1][2] == pytest.approx((4 * 50 + 1) / (2 * 50 + 1))

    def test_empty_spheres_excluded(self):
        G = physical_graph([1.0, 1.0])
        rep = doubling_constants(G, [0], 3)
        assert (0, 3) in rep.excluded
        assert math.isnan(doubling_table(G, 0, 3)[3][1])

    def test_out_of_support(self):
        with pytest.raises(RadiusExceedsSupport):
            doubling_constants(model_space(4, length=5), [-1], 2)
        with pytest.raises(RadiusExceedsSupport):
            doubling_constants(physical_graph([1.0, 2.0]), [7], 2)


class TestEllipticity:
    def test_model_space(self):
        # d_-(n) = n / (2 (n + 1)) is smallest at n = 1
        assert ellipticity(model_space(4, length=100), 0, 50) == pytest.approx(0.25)

    def test_constant_line(self):
        assert ellipticity(constant_line(kind="normalized"), -10, 10) == 0.5

    def test_needs_normalized(self):
        with pytest.raises(NotNormalized):
            ellipticity(constant_line(), 0, 3)


class TestSdProduct:
    def test_model_space_square(self):
        G = model_space(4, length=100)
        rep = sd_product_check(G, G, 0, 0, 16)
        assert rep.ok and rep.bound == pytest.approx(32.0)
        assert rep.C_product <= rep.bound

    def test_with_point(self):
        G = model_space(4, length=100)
        point = RootedGraph(0, {0: {}}, {0: 1.0})
        rep = sd_product_check(G, point, 0, 0, 10)
        assert rep.C_product == pytest.approx(rep.C1)
        assert rep.C2 == 1.0

    def test_random_lines(self, rng):
        for _ in range(10):
            w = np.exp(rng.normal(size=40))
            G1 = physical_graph(w[:20])
            G2 = physical_graph(w[20:])
            rep = sd_product_check(G1, G2, 10, 10, 4)
            assert rep.ok
