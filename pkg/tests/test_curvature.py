import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import constant_half_line, constant_line, random_dimension, random_graph
from curvelab.comparison import model_space, p_model
from curvelab.curvature import (
    F_fn,
    G_fn,
    LocalCDForm,
    cd_holds,
    cd_holds_normalized,
    cd_oracle_psd,
    curvature_profile,
    find_cd_violation,
    max_continuation,
    ollivier,
    ollivier_cd_bound,
    optimal_curvature,
    optimal_curvature_normalized,
    optimal_curvature_psd,
    phi,
    ratio_chain_check,
    w_terms,
)
from curvelab.errors import DimensionBelowTwo, EdgeOutOfSupport, NonPositiveArgument, NotNormalized
from curvelab.global_analysis import exp_family
from curvelab.graph_core import (
    LinearGraph,
    MeasureKind,
    Support,
    WeightModel,
    gamma2,
    physical_graph,
)
from curvelab.symmetric import symmetric_tree

INF = "inf"
K_G24 = 2.625 - math.sqrt(5.515625)


def g24():
    return exp_family(2.0, 4.0, two_sided=True)


class TestWTerms:
    @pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
    def test_constant_line(self, c):
        t = w_terms(constant_line(c), 0, 0.0, INF)
        assert (t.W_minus, t.W_plus, t.cross) == pytest.approx((c, c, c * c), abs=1e-14)

    def test_left_boundary_drops_cross(self):
        t = w_terms(constant_half_line(), 0, 0.0, INF)
        assert t.W_minus == 0.0 and t.a == 0.0 and t.cross == 0.0 and not t.has_left

    def test_exponential_family_at_zero(self):
        t = w_terms(g24(), 0, 0.0, INF)
        assert (t.a, t.b, t.cross) == pytest.approx((0.75, 4.5, 2.0), abs=1e-14)

    def test_k_shift(self):
        t0 = w_terms(g24(), 0, 0.0, 4)
        t1 = w_terms(g24(), 0, 0.3, 4)
        assert t1.W_minus == pytest.approx(t0.W_minus - 0.3)
        assert t1.W_plus == pytest.approx(t0.W_plus - 0.3)


class TestCdHolds:
    def test_constant_line_zero(self):
        assert cd_holds(constant_line(), 0, 0.0, INF)

    def test_constant_line_positive_fails(self):
        assert not cd_holds(constant_line(), 0, 0.01, INF)

    def test_model_space_all_vertices(self):
        G = model_space(4, length=200)
        assert all(cd_holds(G, n, 0.0, 4) for n in range(201))

    def test_below_two_uses_oracle(self, rng):
        for _ in range(30):
            G = random_graph(rng)
            n = int(rng.integers(G.support.lo, G.support.hi + 1))
            D = float(rng.uniform(0.3, 1.99))
            K = float(rng.normal())
            assert cd_holds(G, n, K, D) == cd_oracle_psd(G, n, K, D)


class TestOptimalCurvature:
    @pytest.mark.parametrize("D", [2, 3, 4.5, 10, INF])
    def test_constant_line_is_flat(self, D):
        assert optimal_curvature(constant_line(2.0), 5, D) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("D", [3, 4, 6])
    def test_model_space_is_flat(self, D):
        G = model_space(D, length=60)
        assert max(abs(optimal_curvature(G, n, D)) for n in range(61)) <= 1e-9

    def test_exponential_family_value(self):
        k = optimal_curvature(g24(), 0, INF)
        assert k == pytest.approx(K_G24, abs=1e-14)
        # bisection on the decision procedure lands on the same value
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if cd_holds(g24(), 0, mid, INF, tol=0.0) else (lo, mid)
        assert lo == pytest.approx(K_G24, abs=1e-12)

    def test_boundary_values(self):
        G = physical_graph([1.0, 2.0, 1.5])
        assert optimal_curvature(G, 0, INF) == pytest.approx(w_terms(G, 0, 0.0, INF).b)
        assert optimal_curvature(G, 3, INF) == pytest.approx(w_terms(G, 3, 0.0, INF).a)

    def test_isolated_vertex(self):
        G = physical_graph([], support=Support.interval(0, 0))
        assert optimal_curvature(G, 0, INF) == math.inf
        assert optimal_curvature_psd(G, 0, INF) == math.inf

    def test_rejects_small_dimension(self):
        with pytest.raises(DimensionBelowTwo):
            optimal_curvature(constant_line(), 0, 1.5)

    def test_bounded_by_a_and_b(self, rng):
        for _ in range(100):
            G = random_graph(rng)
            n = int(rng.integers(G.support.lo + 1, G.support.hi)) if G.support.hi - G.support.lo > 1 else G.support.lo
            t = w_terms(G, n, 0.0, INF)
            k = optimal_curvature(G, n, INF)
            if t.has_left and t.has_right:
                assert k <= min(t.a, t.b) + 1e-12


class TestPsdOracle:
    def test_agrees_with_closed_form(self, rng):
        # 1000 random decisions, K drawn around the optimum
        mismatches = 0
        for _ in range(1000):
            G = random_graph(rng)
            n = int(rng.integers(G.support.lo, G.support.hi + 1))
            D = random_dimension(rng)
            kstar = optimal_curvature(G, n, D)
            K = kstar + float(rng.choice([-1.0, 1.0])) * 10 ** float(rng.uniform(-6, 0))
            mismatches += cd_holds(G, n, K, D) != cd_oracle_psd(G, n, K, D)
        assert mismatches == 0

    def test_optimum_matches(self, rng):
        for _ in range(150):
            G = random_graph(rng)
            n = int(rng.integers(G.support.lo, G.support.hi + 1))
            D = random_dimension(rng)
            k = optimal_curvature(G, n, D)
            assert optimal_curvature_psd(G, n, D) == pytest.approx(k, abs=1e-8 * max(1.0, abs(k)))

    def test_far_from_optimum(self):
        G = g24()
        k = optimal_curvature(G, 0, 4)
        assert cd_oracle_psd(G, 0, k - 10, 4)
        assert not cd_oracle_psd(G, 0, k + 1, 4)

    def test_binary_tree_root(self):
        # unit binary tree: form at the root against brute-force basis evaluation
        T = symmetric_tree([2, 2, 2], [1.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0])
        form = LocalCDForm(T, T.root, INF)

        n = len(form.vertices)
        Q = np.empty((n, n))
        basis = np.eye(n)
        for i in range(n):
            for j in range(n):
                f = dict(zip(form.vertices, basis[i] + basis[j]))
                g = dict(zip(form.vertices, basis[i] - basis[j]))
                Q[i, j] = 0.25 * (gamma2(T, f, T.root) - gamma2(T, g, T.root))
        assert np.allclose(Q, form._A_full, atol=1e-12)
        k = optimal_curvature_psd(T, T.root, INF)
        assert math.isfinite(k)
        assert cd_oracle_psd(T, T.root, k - 1e-6, INF)
        assert not cd_oracle_psd(T, T.root, k + 1e-6, INF)


class TestMonotonicity:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_in_k(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng)
        n = int(rng.integers(G.support.lo, G.support.hi + 1))
        D = random_dimension(rng)
        k = optimal_curvature(G, n, D)
        for K in k - np.array([1e-6, 0.1, 1.0, 10.0]):
            assert cd_holds(G, n, K, D)
        for K in k + np.array([1e-6, 0.1, 1.0]):
            assert not cd_holds(G, n, K, D)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6))
    def test_monotone_in_dimension(self, seed):
        rng = np.random.default_rng(seed)
        G = random_graph(rng)
        n = int(rng.integers(G.support.lo, G.support.hi + 1))
        ks = [optimal_curvature(G, n, D) for D in (2, 2.5, 3, 5, 10, 100, INF)]
        assert all(b >= a - 1e-12 * max(1, abs(a)) for a, b in zip(ks, ks[1:]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.01, 100.0))
    def test_scaling_invariance(self, seed, lam):
        rng = np.random.default_rng(seed)
        G = random_graph(rng, kind="explicit")
        w = G.weights
        m = G.measure.model
        H = LinearGraph(
            G.support,
            WeightModel(tuple(lam * v for v in w.prefix), None, w.start),
            MeasureKind.explicit(tuple(lam * v for v in m.prefix), None, m.start),
        )
        for n in range(G.support.lo, G.support.hi + 1):
            a, b = optimal_curvature(G, n, INF), optimal_curvature(H, n, INF)
            assert b == pytest.approx(a, abs=1e-12 * max(1.0, abs(a)), rel=1e-12)


class TestOllivier:
    def test_constant(self):
        G = constant_line(3.0)
        assert ollivier(G, 4) == 0.0

    def test_affine_physical(self):
        G = physical_graph([n + 1.0 for n in range(10)])
        assert all(ollivier(G, n) == pytest.approx(0.0, abs=1e-14) for n in range(1, 9))

    def test_explicit_value(self):
        assert ollivier(physical_graph([1.0, 3.0, 4.0]), 1) == 1.0

    def test_missing_edge(self):
        with pytest.raises(EdgeOutOfSupport):
            ollivier(physical_graph([1.0]), 1)

    def test_bridge_constant(self):
        assert ollivier_cd_bound(constant_line(), 0) == 0.0

    def test_bridge_concave(self):
        G = physical_graph([math.sqrt(n + 3.0) for n in range(12)])
        K = ollivier_cd_bound(G, 5)
        assert K is not None and K >= 0 and cd_holds(G, 5, K, INF)

    def test_bridge_inapplicable(self):
        G = LinearGraph(
            Support.interval(3, 7),
            WeightModel((1.0, 1.0, 1.0, 1.0), None, 3),
            MeasureKind.explicit((1.0, 1.0, 1.0, 2.0, 1.0), None, 3),
        )
        assert ollivier_cd_bound(G, 5) is None

    def test_bridge_property(self, rng):
        hits = 0
        for _ in range(300):
            G = random_graph(rng)
            for n in range(G.support.lo + 1, G.support.hi):
                K = ollivier_cd_bound(G, n)
                if K is not None:
                    hits += 1
                    assert cd_holds(G, n, K, INF)
        assert hits > 50


class TestPhi:
    def test_values(self):
        assert phi(1.0) == 1.0
        assert phi(0.2) == -math.inf
        assert phi(0.25) == -math.inf
        assert phi(0.9) == pytest.approx(0.25 * (7 - 9 / 2.6), abs=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveArgument):
            phi(0.0)

    def test_ratio_chain_on_cd_graphs(self):
        G = physical_graph([math.sqrt(n + 3.0) for n in range(20)])
        assert all(ratio_chain_check(G, n) for n in range(2, 19))

    def test_max_continuation_breaks(self):
        w, bad = max_continuation([1.0, 0.9], 200)
        assert bad is not None and bad <= 200
        G = physical_graph(w)
        assert find_cd_violation(G, 0.0, INF, 0, len(w)) is not None


class TestFG:
    def test_top_corner(self):
        assert F_fn(0.5, 0.5, 0.0, INF) == 1.0
        assert G_fn(0.5, 0.5, 0.0, INF) == 1.0

    def test_model_value(self):
        assert G_fn(0.5, 0.25, 0.0, 4) == pytest.approx(1 / 3, abs=1e-12)
        assert G_fn(0.5, 0.25, 0.0, 4) == pytest.approx(2 * p_model(4, 2), abs=1e-12)

    def test_zero_numerator(self):
        assert F_fn(0.0, 0.5, 0.0, 4) == 0.0
        assert math.isfinite(G_fn(0.0, 0.5, 0.0, 4))

    def test_independent_of_a_at_half(self):
        vals = {G_fn(a, 0.5, 0.1, 6) for a in (-0.5, -0.1, 0.2, 0.5)}
        assert len(vals) == 1

    def test_decreasing_in_k(self):
        # monotone on the region F >= 0, which ends at K = 0.38 here
        ks = np.linspace(-2, 0.379, 30)
        assert F_fn(0.1, 0.2, ks[-1], 5) > 0
        g = [G_fn(0.1, 0.2, k, 5) for k in ks]
        assert all(y < x for x, y in zip(g, g[1:]))


class TestNormalizedRoute:
    def test_model_space(self):
        G = model_space(4, length=20)
        assert optimal_curvature_normalized(G, 1, 4) == pytest.approx(0.0, abs=1e-10)

    def test_constant_normalized_line(self):
        G = constant_line(kind="normalized")
        assert optimal_curvature_normalized(G, 3, INF) == pytest.approx(0.0, abs=1e-12)
        assert cd_holds_normalized(G, 3, 0.0, INF)

    def test_requires_normalized(self):
        with pytest.raises(NotNormalized):
            cd_holds_normalized(constant_line(), 0, 0.0, INF)

    def test_agrees_with_closed_form(self, rng):
        for _ in range(300):
            G = random_graph(rng, kind="normalized")
            n = int(rng.integers(G.support.lo, G.support.hi))
            D = random_dimension(rng)
            k = optimal_curvature(G, n, D)
            assert optimal_curvature_normalized(G, n, D) == pytest.approx(k, abs=1e-8 * max(1.0, abs(k)))
            K = k + float(rng.choice([-1.0, 1.0])) * 10 ** float(rng.uniform(-6, 0))
            assert cd_holds_normalized(G, n, K, D) == cd_holds(G, n, K, D)


class TestScanAndProfile:
    def test_constant_line_no_violation(self):
        assert find_cd_violation(constant_line(), 0.0, INF, -50, 50) is None

    def test_bump_is_found_nearby(self):
        w = [1.0] * 100
        w[50] = 1.1  # edge (0, 1) after the shift below
        G = physical_graph(w, start=-50)
        n, slack = find_cd_violation(G, 0.0, INF, -48, 48)
        assert abs(n) <= 2 and slack < 0

    def test_model_space_profile(self):
        prof = curvature_profile(model_space(5, length=40), 0, 40, 5)
        assert np.max(np.abs(prof.column("k_star"))) <= 1e-9

    def test_exponential_profile_ratio(self):
        prof = curvature_profile(g24(), 0, 30, INF)
        k = prof.column("k_star")
        assert np.allclose(k[1:] / k[:-1], 2.0, rtol=1e-9, atol=0)

    def test_empty_profile(self):
        prof = curvature_profile(physical_graph([1.0, 2.0]), 5, 9, INF)
        assert len(prof) == 0
        assert prof.to_csv() == "n,d_minus,d_plus,p,kappa_right,k_star\n"

    def test_threads_give_identical_csv(self):
        G = model_space(4, length=80)
        assert curvature_profile(G, 0, 80, 4, threads=4).to_csv() == curvature_profile(G, 0, 80, 4).to_csv()
