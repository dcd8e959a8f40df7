import itertools

import numpy as np
import pytest
from hypothesis import settings

from ergmlab.graph import DenseGraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    a = np.triu(rng.random((n, n)) < p, 1)
    return DenseGraph.from_adjacency(a | a.T)


def brute_counts(adj):
    """E, V, T by looping over vertex tuples."""
    n = len(adj)
    E = sum(adj[i][j] for i, j in itertools.combinations(range(n), 2))
    V = sum(adj[c][a] and adj[c][b] for c in range(n) for a, b in itertools.combinations(range(n), 2)
            if c not in (a, b))
    T = sum(adj[a][b] and adj[a][c] and adj[b][c] for a, b, c in itertools.combinations(range(n), 3))
    return int(E), int(V), int(T)


def brute_hom(h, adj):
    """Injective edge-preserving maps of ``h`` into ``adj``."""
    n = len(adj)
    return sum(all(adj[m[u]][m[w]] for u, w in h.edge_list)
               for m in itertools.permutations(range(n), h.v))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
