import numpy as np
import pytest
from conftest import brute_counts, brute_hom, random_graph
from hypothesis import given
from hypothesis import strategies as st

from ergmlab.graph import (DenseGraph, RunningCounts, count_statistics, dump_edge_list, flip_edge, hamiltonian,
                           hom_count, hom_count_rooted, load_edge_list, partial_hamiltonian)
from ergmlab.model import EDGE, TRIANGLE, TWO_STAR, ErgmParams, SubgraphSpec

SHAPES = [EDGE, TWO_STAR, TRIANGLE, SubgraphSpec.named("path3"), SubgraphSpec.named("square"),
          SubgraphSpec([(0, 1), (1, 2), (0, 2), (2, 3)])]


def test_bitset_roundtrip_across_word_boundary():
    n = 130
    g = random_graph(n, 0.1, 1)
    a = g.adjacency()
    assert np.array_equal(DenseGraph.from_adjacency(a).adjacency(), a)
    assert g.edge_count == len(g.edges()) == a.sum() // 2
    assert np.array_equal(g.degrees, a.sum(1))
    i, j = 3, 127
    assert g.common_neighbors(i, j) == int((a[i] & a[j]).sum())
    g.check()


def test_toggle_and_copy():
    g = DenseGraph(70)
    h = g.copy()
    assert g.toggle(5, 66) is True and g.has_edge(66, 5)
    assert not h.has_edge(5, 66)
    assert g.toggle(66, 5) is False and g == h


def test_edge_list_io(tmp_path):
    g = random_graph(9, 0.4, 2)
    path = tmp_path / "g.txt"
    dump_edge_list(g, path)
    assert load_edge_list(path) == g


@pytest.mark.parametrize("seed", range(5))
def test_counts_match_brute_force(seed):
    g = random_graph(9, 0.45, seed)
    assert count_statistics(g).as_tuple() == brute_counts(g.adjacency())


@pytest.mark.parametrize("h", SHAPES, ids=repr)
@pytest.mark.parametrize("seed", range(3))
def test_hom_count_matches_injective_maps(h, seed):
    g = random_graph(7, 0.5, seed)
    assert hom_count(h, g) == brute_hom(h, g.adjacency())
    assert hom_count(h, g, method="backtrack") == brute_hom(h, g.adjacency())


@pytest.mark.parametrize("h", SHAPES, ids=repr)
@pytest.mark.parametrize("method", ["auto", "backtrack"])
def test_rooted_count_is_hom_difference(h, method):
    g = random_graph(7, 0.5, 9)
    for i, j in [(0, 1), (2, 5), (3, 6), (1, 4)]:
        plus, minus = g.copy(), g.copy()
        if not plus.has_edge(i, j):
            plus.toggle(i, j)
        if minus.has_edge(i, j):
            minus.toggle(i, j)
        want = brute_hom(h, plus.adjacency()) - brute_hom(h, minus.adjacency())
        assert hom_count_rooted(h, g, (i, j), method=method) == want


def test_hom_identities():
    g = random_graph(12, 0.3, 4)
    E, V, T = count_statistics(g).as_tuple()
    assert hom_count(EDGE, g) == 2 * E
    assert hom_count(TWO_STAR, g) == 2 * V
    assert hom_count(TRIANGLE, g) == 6 * T


def test_partial_hamiltonian_is_difference():
    par = ErgmParams.build(8, -0.4, (0.2, TWO_STAR), (0.3, TRIANGLE), (0.1, SubgraphSpec.named("square")))
    g = random_graph(8, 0.5, 5)
    for e in [(0, 1), (2, 7), (4, 5)]:
        plus, minus = g.copy(), g.copy()
        if not plus.has_edge(*e):
            plus.toggle(*e)
        if minus.has_edge(*e):
            minus.toggle(*e)
        assert partial_hamiltonian(par, g, e) == pytest.approx(hamiltonian(par, plus) - hamiltonian(par, minus),
                                                               rel=1e-12)
    with pytest.raises(ValueError):
        partial_hamiltonian(par.with_n(9), g, (0, 1))


def test_hamiltonian_edge_two_star_triangle():
    n = 10
    par = ErgmParams.build(n, 0.5, (0.2, TWO_STAR), (0.3, TRIANGLE))
    g = random_graph(n, 0.4, 6)
    E, V, T = count_statistics(g).as_tuple()
    want = 0.5 * n**2 * 2 * E / n**2 + 0.2 * n**2 * 2 * V / n**3 + 0.3 * n**2 * 6 * T / n**3
    assert hamiltonian(par, g) == pytest.approx(want, rel=1e-12)


def test_many_flips_keep_counts_exact():
    rng = np.random.default_rng(0)
    n = 30
    g = DenseGraph(n)
    counts = count_statistics(g)
    pairs = rng.integers(0, n, size=(100_000, 2))
    for i, j in pairs:
        if i != j:
            flip_edge(g, counts, (int(i), int(j)))
    assert counts == count_statistics(g)
    g.check()


@given(edges=st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=30),
       e=st.tuples(st.integers(0, 7), st.integers(0, 7)).filter(lambda t: t[0] != t[1]))
def test_flip_is_involution(edges, e):
    g = DenseGraph.from_edges(8, [(a, b) for a, b in edges if a != b])
    counts = count_statistics(g)
    before_g, before_c = g.copy(), RunningCounts(*counts.as_tuple())
    flip_edge(g, counts, e)
    assert counts == count_statistics(g)
    flip_edge(g, counts, e)
    assert g == before_g and counts == before_c
