import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearcrit.analytic import ModelParams
from nearcrit.decompose import (
    StructureError,
    contract_to_kernel,
    decompose,
    extract_bushes,
    strip_disjoint_cycles,
    two_core,
)
from nearcrit.models import sample_gnp
from nearcrit.multigraph import (
    Multigraph,
    bfs_distances,
    largest_component,
    subdivide_edges,
)
from nearcrit.selftest import _two_core_subset_oracle, random_multigraph
from nearcrit._core import pure

from conftest import make_graph, theta_graph


class TestTwoCore:
    def test_tree_empty(self):
        g = make_graph(4, [(0, 1), (1, 2), (1, 3)])
        assert two_core(g).tolist() == []

    def test_triangle_with_pendant(self):
        g = make_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
        assert two_core(g).tolist() == [0, 1, 2]

    def test_loop_counts_two(self):
        g = make_graph(2, [(0, 0), (0, 1)])
        assert two_core(g).tolist() == [0]

    def test_special_loop_counts_one(self):
        g = make_graph(2, [(0, 0, True), (0, 1)])
        assert two_core(g).tolist() == []

    def test_exhaustive_oracle(self, rng):
        for _ in range(200):
            g = random_multigraph(rng, n_max=12)
            assert np.array_equal(two_core(g), _two_core_subset_oracle(g))

    def test_idempotent_and_order_independent(self, rng):
        for _ in range(100):
            g = random_multigraph(rng, n_max=20, mean_degree=2.5)
            core = two_core(g)
            sub, _ = g.induced(core)
            assert np.array_equal(two_core(sub), np.arange(len(core)))
            # FIFO vs LIFO peeling must agree (the 2-core is unique)
            indptr, nbr, eid = g.incidence()
            lifo = pure.peel_two_core(indptr, nbr, eid, g.degrees(), g.m)
            fifo = pure.peel_two_core(indptr, nbr, eid, g.degrees(), g.m, fifo=True)
            assert np.array_equal(lifo, fifo)


class TestStripCycles:
    def test_lone_cycle(self):
        g = make_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        stripped, kept, lengths = strip_disjoint_cycles(g)
        assert stripped.n == 0 and lengths == [5]

    def test_theta_untouched(self):
        stripped, kept, lengths = strip_disjoint_cycles(theta_graph())
        assert stripped.n == 8 and lengths == []

    def test_loop_is_length_one_cycle(self):
        g = make_graph(1, [(0, 0)])
        _, _, lengths = strip_disjoint_cycles(g)
        assert lengths == [1]

    def test_double_edge_is_length_two_cycle(self):
        g = make_graph(2, [(0, 1), (0, 1)])
        _, _, lengths = strip_disjoint_cycles(g)
        assert lengths == [2]

    def test_mixture(self):
        edges = [(0, 1), (1, 2), (0, 2),  # triangle glued to a theta below
                 (0, 3), (3, 1),
                 (4, 5), (5, 6), (6, 4),  # disjoint triangle
                 (7, 7)]                  # disjoint loop
        g = make_graph(8, edges)
        stripped, kept, lengths = strip_disjoint_cycles(g)
        assert lengths == [1, 3]
        assert stripped.n == 4

    def test_requires_min_degree_two(self):
        with pytest.raises(StructureError):
            strip_disjoint_cycles(make_graph(2, [(0, 1)]))


class TestContract:
    def test_theta_graph(self):
        kernel, lengths, kmap = contract_to_kernel(theta_graph())
        assert kernel.n == 2 and kernel.m == 3
        assert sorted(lengths.tolist()) == [2, 3, 4]
        assert kmap.tolist() == [0, 1]
        assert kernel.degrees().tolist() == [3, 3]

    def test_cycle_reattached_as_loop(self):
        # theta graph plus a 5-cycle sharing vertex 0: kernel gains a loop
        g = theta_graph()
        extra = [(0, 8), (8, 9), (9, 10), (10, 11), (11, 0)]
        g2 = make_graph(12, list(zip(g.eu.tolist(), g.ev.tolist())) + extra)
        kernel, lengths, kmap = contract_to_kernel(g2)
        assert kernel.n == 2
        loops = [(u, v) for u, v, _ in kernel.edge_multiset() if u == v]
        assert len(loops) == 1
        assert sorted(lengths.tolist()) == [2, 3, 4, 5]

    def test_bare_cycle_rejected(self):
        g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
        with pytest.raises(StructureError):
            contract_to_kernel(g)

    def test_length_one_edges(self):
        g = make_graph(4, [(0, 1), (0, 1), (0, 2), (2, 1), (0, 3), (3, 1)])
        kernel, lengths, _ = contract_to_kernel(g)
        assert sorted(lengths.tolist()) == [1, 1, 2, 2]

    def test_reexpansion_roundtrip(self, rng):
        done = 0
        while done < 100:
            n = int(rng.integers(20, 301))
            g = sample_gnp(ModelParams.from_p(n, float(rng.uniform(1.1, 1.7)) / n), rng)
            comp = largest_component(g)
            if len(comp) < 4:
                continue
            sub, _ = g.induced(comp)
            core = two_core(sub)
            if len(core) < 4:
                continue
            core_g, _ = sub.induced(core)
            stripped, _, _ = strip_disjoint_cycles(core_g)
            if stripped.n == 0:
                continue
            kernel, lengths, kmap = contract_to_kernel(stripped)
            redone = subdivide_edges(kernel, lengths)
            assert redone.n == stripped.n and redone.m == stripped.m
            assert sorted(redone.degrees().tolist()) == sorted(stripped.degrees().tolist())
            for k in range(kernel.n):
                assert np.array_equal(
                    np.sort(bfs_distances(redone, k)),
                    np.sort(bfs_distances(stripped, int(kmap[k]))),
                )
            done += 1


class TestBushes:
    def test_core_only_component(self):
        g = theta_graph()
        b = extract_bushes(g, np.arange(8))
        assert b.sizes().tolist() == [1] * 8

    def test_pendant_path(self):
        # triangle 0-1-2 with path 0-3-4-5 hanging off vertex 0
        g = make_graph(6, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (4, 5)])
        b = extract_bushes(g, np.array([0, 1, 2]))
        assert b.sizes().tolist() == [4, 1, 1]
        t = b.tree(0)
        t.validate()
        assert t.size == 4

    def test_partition_and_forest(self, rng):
        for _ in range(100):
            g = random_multigraph(rng, n_max=12)
            comp = largest_component(g)
            if len(comp) == 0:
                continue
            sub, _ = g.induced(comp)
            core = two_core(sub)
            if len(core) == 0:
                continue
            b = extract_bushes(sub, core)
            assert int(b.sizes().sum()) == sub.n
            owners = b.owner[b.owner >= 0]
            assert len(owners) == sub.n

    def test_detects_broken_core(self):
        # square with a chord endpoint missing from the "core" -> not a forest
        g = make_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        with pytest.raises(StructureError):
            extract_bushes(g, np.array([0]))


class TestDecompose:
    def test_theta_plus_pendants(self):
        g = theta_graph()
        extra = [(2, 8), (8, 9)]
        g2 = make_graph(10, list(zip(g.eu.tolist(), g.ev.tolist())) + extra)
        d = decompose(g2)
        d.validate()
        assert d.core_size == 8
        assert d.kernel.n == 2 and d.kernel.m == 3
        assert sorted(d.path_lengths.tolist()) == [2, 3, 4]
        assert sorted(d.bush_sizes().tolist())[-1] == 3
        assert d.summary()["bush_sizes"].count(1) == 7

    def test_bare_triangle_plus_pendant(self):
        g = make_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
        d = decompose(g)
        assert d.core_size == 3
        assert d.stripped_cycle_lengths == [3]
        assert d.kernel.n == 0 and d.kernel.m == 0

    def test_random_invariants(self, rng):
        for _ in range(60):
            g = random_multigraph(rng, n_max=40, mean_degree=2.6)
            if g.n == 0:
                continue
            d = decompose(g)
            d.validate()
            # invariant: sum of path lengths = stripped core edge count and
            # vertex bookkeeping closes
            assert int(d.path_lengths.sum()) == d.stripped_core.m
            assert d.stripped_core.n == d.kernel.n + int((d.path_lengths - 1).sum())


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=10),
    edges=st.lists(
        st.tuples(st.integers(min_value=0, max_value=9),
                  st.integers(min_value=0, max_value=9)),
        max_size=18,
    ),
)
def test_two_core_idempotence_property(n, edges):
    used = [(u % n, v % n) for u, v in edges]
    g = Multigraph(n, used)
    core = two_core(g)
    sub, _ = g.induced(core)
    assert np.array_equal(two_core(sub), np.arange(len(core)))
    if len(core):
        assert sub.degrees().min() >= 2
