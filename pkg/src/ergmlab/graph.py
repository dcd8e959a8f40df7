"""Dense graph state, subgraph statistics and single-edge flip updates.

Adjacency is stored as packed ``uint64`` bit rows so the common-neighbourhood
size of a pair is a popcount of ``row_i & row_j``.  ``Hom`` follows the
injective convention: a homomorphism of ``H`` into ``G`` is an injective vertex
map sending every edge of ``H`` to an edge of ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import UnsupportedSize
from .model import ErgmParams, SubgraphSpec

MAX_N = 512


def _words(n: int) -> int:
    return (n + 63) // 64


class DenseGraph:
    """Simple graph on vertices ``0..n-1`` with bit-row adjacency and degrees."""

    __slots__ = ("n", "bits", "degrees")

    def __init__(self, n: int):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"n must be in [1, {MAX_N}], got {n}")
        self.n = int(n)
        self.bits = np.zeros((n, _words(n)), dtype=np.uint64)
        self.degrees = np.zeros(n, dtype=np.int64)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "DenseGraph":
        g = cls(n)
        for i, j in edges:
            if not g.has_edge(i, j):
                g.toggle(i, j)
        return g

    @classmethod
    def from_adjacency(cls, adj) -> "DenseGraph":
        adj = np.asarray(adj)
        n = adj.shape[0]
        iu, ju = np.nonzero(np.triu(adj, 1))
        return cls.from_edges(n, zip(iu.tolist(), ju.tolist()))

    @classmethod
    def complete(cls, n: int) -> "DenseGraph":
        return cls.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))

    def copy(self) -> "DenseGraph":
        g = DenseGraph.__new__(DenseGraph)
        g.n = self.n
        g.bits = self.bits.copy()
        g.degrees = self.degrees.copy()
        return g

    def has_edge(self, i: int, j: int) -> bool:
        return bool((int(self.bits[i, j >> 6]) >> (j & 63)) & 1)

    def toggle(self, i: int, j: int) -> bool:
        """Flip the indicator of pair ``(i, j)``; returns the new value."""
        if i == j:
            raise ValueError("self-loops are not allowed")
        present = self.has_edge(i, j)
        self.bits[i, j >> 6] ^= np.uint64(1 << (j & 63))
        self.bits[j, i >> 6] ^= np.uint64(1 << (i & 63))
        step = -1 if present else 1
        self.degrees[i] += step
        self.degrees[j] += step
        return not present

    def neighbors(self, i: int) -> list[int]:
        out = []
        for w in range(self.bits.shape[1]):
            word = int(self.bits[i, w])
            while word:
                low = word & -word
                out.append(64 * w + low.bit_length() - 1)
                word ^= low
        return out

    def common_neighbors(self, i: int, j: int) -> int:
        return sum((int(a) & int(b)).bit_count() for a, b in zip(self.bits[i], self.bits[j]))

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix."""
        bytes_ = self.bits.view(np.uint8)
        unpacked = np.unpackbits(bytes_, axis=1, bitorder="little")
        return unpacked[:, : self.n].astype(bool)

    def edges(self) -> list[tuple[int, int]]:
        a = self.adjacency()
        iu, ju = np.nonzero(np.triu(a, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def __eq__(self, other):
        return isinstance(other, DenseGraph) and self.n == other.n and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"DenseGraph(n={self.n}, E={self.edge_count})"

    def check(self) -> None:
        """Assert the adjacency/degree invariants."""
        a = self.adjacency()
        assert np.array_equal(a, a.T), "adjacency not symmetric"
        assert not a.diagonal().any(), "self-loop present"
        assert np.array_equal(a.sum(axis=1), self.degrees), "degree array out of sync"


def dump_edge_list(g: DenseGraph, path: str | Path) -> None:
    """Write ``# n=<n>`` followed by one ``u v`` line per edge (0-indexed, u < v)."""
    lines = [f"# n={g.n}"] + [f"{i} {j}" for i, j in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_edge_list(path: str | Path, n: int | None = None) -> DenseGraph:
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if n is None and line[1:].strip().startswith("n="):
                n = int(line[1:].strip()[2:])
            continue
        u, v = (int(x) for x in line.split())
        edges.append((min(u, v), max(u, v)))
    if n is None:
        n = 1 + max((v for _, v in edges), default=0)
    return DenseGraph.from_edges(n, edges)


@dataclass
class RunningCounts:
    """Edge, two-star and triangle counts of the current graph."""

    E: int = 0
    V: int = 0
    T: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.E, self.V, self.T)


def count_statistics(g: DenseGraph) -> RunningCounts:
    a = g.adjacency().astype(np.int64)
    deg = a.sum(axis=1)
    tri = int(np.einsum("ij,jk,ki->", a, a, a)) // 6
    return RunningCounts(int(deg.sum()) // 2, int((deg * (deg - 1) // 2).sum()), tri)


def flip_edge(g: DenseGraph, counts: RunningCounts, e) -> tuple[DenseGraph, RunningCounts]:
    """Toggle pair ``e`` in place and update ``counts`` in O(n / 64)."""
    i, j = e
    if i == j:
        raise ValueError("self-loops are not allowed")
    present = g.has_edge(i, j)
    cn = g.common_neighbors(i, j)
    if present:
        g.toggle(i, j)
        counts.E -= 1
        counts.V -= int(g.degrees[i] + g.degrees[j])
        counts.T -= cn
    else:
        counts.E += 1
        counts.V += int(g.degrees[i] + g.degrees[j])
        counts.T += cn
        g.toggle(i, j)
    return g, counts


# ---------------------------------------------------------------------------
# homomorphism counts


def _search_order(h: SubgraphSpec, pinned=()):
    adj = {x: set() for x in range(h.v)}
    for a, b in h.edge_list:
        adj[a].add(b)
        adj[b].add(a)
    order = list(pinned)
    placed = set(order)
    while len(order) < h.v:
        # prefer the vertex with most already-placed neighbours
        best = max((x for x in range(h.v) if x not in placed),
                   key=lambda x: (len(adj[x] & placed), len(adj[x])))
        order.append(best)
        placed.add(best)
    back = [[y for y in adj[x] if order.index(y) < k] for k, x in enumerate(order)]
    return order, back, adj


def _count_extensions(h, a, nbrs, deg, n, order, back, adj, start, image, skip_edge=None):
    """Depth-first count of injective extensions of ``image`` (a dict H->G)
    over ``order[start:]``.  ``skip_edge`` is an H-edge whose image is not
    required to be present."""
    used = set(image.values())

    def rec(k):
        if k == len(order):
            return 1
        x = order[k]
        earlier = back[k]
        if earlier:
            anchor = image[earlier[0]]
            cands = nbrs[anchor]
        else:
            cands = range(n)
        need = len(adj[x])
        total = 0
        for c in cands:
            if c in used or deg[c] < need:
                continue
            if all(a[image[y], c] for y in earlier[1:]):
                image[x] = c
                used.add(c)
                total += rec(k + 1)
                used.discard(c)
                del image[x]
        return total

    # verify the pinned part before descending
    for k in range(start):
        x = order[k]
        for y in back[k]:
            if skip_edge is not None and {x, y} == set(skip_edge):
                continue
            if not a[image[x], image[y]]:
                return 0
    return rec(start)


def _hom_backtrack(h: SubgraphSpec, g: DenseGraph) -> int:
    a = g.adjacency()
    nbrs = [np.flatnonzero(a[i]).tolist() for i in range(g.n)]
    order, back, adj = _search_order(h)
    return _count_extensions(h, a, nbrs, g.degrees, g.n, order, back, adj, 0, {})


def _hom_rooted_backtrack(h: SubgraphSpec, g: DenseGraph, e) -> int:
    i, j = e
    a = g.adjacency()
    nbrs = [np.flatnonzero(a[x]).tolist() for x in range(g.n)]
    total = 0
    for u, w in h.edge_list:
        order, back, adj = _search_order(h, pinned=(u, w))
        # non-pinned vertices never land on i or j, so G-degree pruning is
        # still valid for them; pinned degrees are irrelevant
        deg = g.degrees
        for x, y in ((i, j), (j, i)):
            total += _count_extensions(h, a, nbrs, deg, g.n, order, back, adj, 2,
                                       {u: x, w: y}, skip_edge=(u, w))
    return total


def hom_count(h: SubgraphSpec, g: DenseGraph, *, method: str = "auto") -> int:
    """Number of injective edge-preserving maps ``V(H) -> V(G)``."""
    if h.v > g.n:
        return 0
    kind = h.kind if method == "auto" else None
    if kind == "edge":
        return 2 * g.edge_count
    if kind == "two-star":
        d = g.degrees
        return int((d * (d - 1)).sum())
    if kind == "triangle":
        return 6 * count_statistics(g).T
    return _hom_backtrack(h, g)


def hom_count_rooted(h: SubgraphSpec, g: DenseGraph, e, *, method: str = "auto") -> int:
    """Homomorphisms of ``H`` that send some edge of ``H`` onto pair ``e``.

    The pair ``e`` itself need not be present; every other edge of ``H`` must
    land on a present edge.  Equals ``Hom(H, G + e) - Hom(H, G - e)``.
    """
    i, j = e
    if i == j:
        raise ValueError("e must join two distinct vertices")
    if h.v > g.n:
        return 0
    kind = h.kind if method == "auto" else None
    if kind == "edge":
        return 2
    if kind == "two-star":
        y = int(g.has_edge(i, j))
        return 2 * int(g.degrees[i] + g.degrees[j] - 2 * y)
    if kind == "triangle":
        return 6 * g.common_neighbors(i, j)
    return _hom_rooted_backtrack(h, g, e)


def hamiltonian(params: ErgmParams, g: DenseGraph) -> float:
    """``n^2 * sum_l beta_l t(H_l, G) = sum_l beta_l n^(2 - v_l) Hom(H_l, G)``."""
    n = params.n
    return sum(beta * float(n) ** (2 - h.v) * hom_count(h, g) for beta, h in params.terms)


def partial_hamiltonian(params: ErgmParams, g: DenseGraph, e) -> float:
    """``H(y with e present) - H(y with e absent)``, computed from rooted counts."""
    if params.n != g.n:
        raise ValueError(f"model has n={params.n} but graph has n={g.n}")
    n = params.n
    return sum(beta * float(n) ** (2 - h.v) * hom_count_rooted(h, g, e) for beta, h in params.terms)


def automorphism_count(h: SubgraphSpec) -> int:
    if h.v > 8:
        raise UnsupportedSize(f"automorphism count limited to v <= 8, got v={h.v}")
    return h.aut
