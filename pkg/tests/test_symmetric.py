import json

import numpy as np
import pytest

from conftest import constant_line
from curvelab.errors import CurvelabError, Disconnected, InconsistentSpec, NotWeaklySymmetric
from curvelab.graph_core import degrees
from curvelab.inequalities import sd_product_check, sphere_measures
from curvelab.symmetric import (
    RootedGraph,
    cartesian_product,
    check_weak_symmetry,
    linear_to_rooted,
    project,
    projection_curvature_transfer,
    projection_flags,
    symmetric_tree,
)


def binary_tree(depth=3):
    return symmetric_tree([2] * depth, [1.0] * depth, [1.0] * (depth + 1))


def random_tree(rng, depth=None):
    depth = depth or int(rng.integers(1, 5))
    branching = [int(b) for b in rng.integers(1, 4, size=depth)]
    weights = np.exp(rng.normal(size=depth))
    measures = np.exp(rng.normal(size=depth + 1))
    return symmetric_tree(branching, weights, measures)


class TestSymmetry:
    def test_binary_tree(self):
        rep = check_weak_symmetry(binary_tree())
        assert rep.ok
        assert [row[1] for row in rep.rows[:-1]] == [2.0, 2.0, 2.0]

    def test_bumped_edge(self):
        T = binary_tree()
        edges = [(x, y, 5.0 if (x, y) == (1, 3) else w) for x, y, w in T.edges()]
        bumped = RootedGraph.from_edges(0, edges, T.measure)
        rep = check_weak_symmetry(bumped)
        assert not rep.ok and rep.witness[0] in ("d_plus", "d_minus")
        with pytest.raises(NotWeaklySymmetric):
            project(bumped)

    def test_path_rooted_at_end(self):
        G = linear_to_rooted(constant_line(), 0, 6, 0)
        assert check_weak_symmetry(G).ok

    def test_path_rooted_in_middle(self):
        # two branches with different weights break the symmetry
        G = RootedGraph.from_edges(0, [(0, 1, 1.0), (0, 2, 2.0)], {0: 1.0, 1: 1.0, 2: 1.0})
        assert not check_weak_symmetry(G).ok

    def test_inconsistent(self):
        with pytest.raises(InconsistentSpec):
            RootedGraph(0, {0: {1: 1.0}, 1: {0: 2.0}}, {0: 1.0, 1: 1.0})
        with pytest.raises(Disconnected):
            RootedGraph.from_edges(0, [], {0: 1.0, 1: 1.0})


class TestProjection:
    def test_binary_tree(self):
        G = project(binary_tree())
        assert [G.m(n) for n in range(4)] == [1.0, 2.0, 4.0, 8.0]
        assert [G.w(n) for n in range(3)] == [2.0, 4.0, 8.0]

    def test_physical_projection(self):
        T = symmetric_tree([2, 2, 2], [1.0, 0.5, 0.25], [1.0, 0.5, 0.25, 0.125])
        assert projection_flags(T)["physical_symmetric"]
        assert project(T).measure.kind == "physical"

    def test_normalized_projection(self):
        # measures equal the vertex degrees
        T = symmetric_tree([2, 2], [1.0, 1.0], [2.0, 3.0, 1.0])
        assert projection_flags(T)["normalized_symmetric"]
        G = project(T)
        assert G.measure.kind == "normalized"
        assert [G.m(n) for n in range(3)] == [2.0, 6.0, 4.0]

    def test_degrees_agree(self, rng):
        for _ in range(20):
            T = random_tree(rng)
            G = project(T)
            for n, sphere in enumerate(T.spheres()):
                y = sphere[0]
                out = sum(w for z, w in T.adjacency[y].items() if T.distances[z] > n) / T.measure[y]
                assert degrees(G, n)[1] == pytest.approx(out, rel=1e-12)

    def test_single_vertex(self):
        with pytest.raises(CurvelabError):
            project(RootedGraph(0, {0: {}}, {0: 1.0}))


class TestTransfer:
    @pytest.mark.parametrize("D", [4, "inf"])
    def test_binary_tree(self, D):
        assert all(row.ok for row in projection_curvature_transfer(binary_tree(), D))

    def test_branching_pattern(self):
        T = symmetric_tree([3, 1, 3], [1.0, 2.0, 1.5], [1.0, 0.5, 2.0, 1.0])
        for D in (4, "inf"):
            assert all(row.ok for row in projection_curvature_transfer(T, D))

    def test_random_trees(self, rng):
        for _ in range(15):
            T = random_tree(rng)
            rows = projection_curvature_transfer(T, 4)
            assert all(r.ok for r in rows), rows


class TestProduct:
    def test_sphere_convolution(self):
        A = linear_to_rooted(constant_line(), -25, 25, 0)
        B = binary_tree(4)
        P = cartesian_product(A, B)
        sa, sb = A.sphere_measures(), B.sphere_measures()
        sp = P.sphere_measures()
        conv = np.convolve(sa, sb)
        assert np.allclose(sp[:21], conv[:21], rtol=1e-13)

    def test_labels(self):
        P = cartesian_product(binary_tree(1), binary_tree(1))
        assert len(P) == 9 and P.labels[P.root] == (0, 0)

    def test_sd_bound_on_trees(self, rng):
        for _ in range(5):
            rep = sd_product_check(random_tree(rng, 3), random_tree(rng, 3), 0, 0, 4)
            assert rep.ok


class TestSerialisation:
    def test_round_trip(self, rng):
        T = random_tree(rng)
        assert RootedGraph.from_dict(json.loads(T.to_json())) == T

    def test_malformed(self):
        with pytest.raises(CurvelabError):
            RootedGraph.from_dict({"root": 0})

    def test_sphere_measures_helper(self):
        T = binary_tree()
        assert sphere_measures(T, 0, 5).tolist() == [1.0, 2.0, 4.0, 8.0, 0.0, 0.0]
