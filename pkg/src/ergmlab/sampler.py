"""Glauber dynamics, the fixed-edge-count swap chain, and exact enumeration.

Both chains have a pure-Python single-step form (``glauber_step``,
``conditional_swap_step``) that works for any subgraph ``H`` and a compiled
path used by ``run_chain`` when every term is an edge, two-star or triangle.
The two paths draw random numbers in the same order, so for such models they
produce identical trajectories from the same generator state.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64 seeded
through ``SeedSequence``); parallel chain ``c`` uses ``seed + c``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .errors import UnsupportedSize
from .graph import (DenseGraph, RunningCounts, count_statistics, flip_edge,
                    hom_count, hom_count_rooted, partial_hamiltonian)
from .model import ErgmParams, solve_fixed_point


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of pair index ``0..N-1`` in lexicographic ``(i < j)`` order."""
    iu, ju = np.triu_indices(n, 1)
    return iu.astype(np.int64), ju.astype(np.int64)


def closed_form_coefficients(params: ErgmParams) -> np.ndarray | None:
    """``[c_edge, c_star, c_tri]`` such that the change statistic of pair
    (i, j) is ``c_edge + c_star (d_i' + d_j') + c_tri |N(i) & N(j)|``, or
    None when some term is not an edge, two-star or triangle."""
    coef = np.zeros(3)
    n = params.n
    for beta, h in params.terms:
        kind = h.kind
        if kind == "edge":
            coef[0] += 2.0 * beta
        elif kind == "two-star":
            coef[1] += 2.0 * beta / n
        elif kind == "triangle":
            coef[2] += 6.0 * beta / n
        else:
            return None
    return coef


def _logistic(h: float) -> float:
    if h >= 0.0:
        return 1.0 / (1.0 + math.exp(-h))
    z = math.exp(h)
    return z / (1.0 + z)


# ---------------------------------------------------------------------------
# single steps


def glauber_step(params: ErgmParams, g: DenseGraph, counts: RunningCounts, rng,
                 *, coef=None) -> tuple[DenseGraph, RunningCounts]:
    """Resample one uniformly chosen pair from its conditional law."""
    n = g.n
    npairs = n * (n - 1) // 2
    idx = int(rng.integers(0, npairs))
    u = rng.random()
    i, j = _pair_from_index(n, idx)
    if coef is None:
        coef = closed_form_coefficients(params)
    if coef is not None:
        y = int(g.has_edge(i, j))
        h = coef[0] + coef[1] * int(g.degrees[i] + g.degrees[j] - 2 * y) + coef[2] * g.common_neighbors(i, j)
    else:
        h = partial_hamiltonian(params, g, (i, j))
    new = u < _logistic(h)
    if new != g.has_edge(i, j):
        flip_edge(g, counts, (i, j))
    return g, counts


def _pair_from_index(n: int, idx: int) -> tuple[int, int]:
    # row i holds n - 1 - i pairs
    i = 0
    while idx >= n - 1 - i:
        idx -= n - 1 - i
        i += 1
    return i, i + 1 + idx


def _pair_index(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass
class SwapState:
    """Present and absent pair indices for the swap chain."""

    present: np.ndarray
    absent: np.ndarray

    @classmethod
    def from_graph(cls, g: DenseGraph) -> "SwapState":
        iu, ju = pair_arrays(g.n)
        adj = g.adjacency()
        mask = adj[iu, ju]
        idx = np.arange(len(iu), dtype=np.int64)
        return cls(idx[mask].copy(), idx[~mask].copy())


def _change_without_edge_terms(params: ErgmParams, g: DenseGraph, e) -> float:
    n = params.n
    return sum(beta * float(n) ** (2 - h.v) * hom_count_rooted(h, g, e)
               for beta, h in params.terms[1:])


def conditional_swap_step(params: ErgmParams, g: DenseGraph, counts: RunningCounts, rng,
                          state: SwapState | None = None, *, coef=None):
    """Propose moving a uniformly chosen present edge to a uniformly chosen
    absent pair; accept with probability ``min(1, exp(H(g') - H(g)))``.

    Returns ``(g, counts, status)`` with status ``"accepted"``, ``"rejected"``
    or ``"degenerate"`` (empty or complete graph: nothing to move).
    """
    if state is None:
        state = SwapState.from_graph(g)
    k, m = len(state.present), len(state.absent)
    if k == 0 or m == 0:
        return g, counts, "degenerate"
    a = int(rng.integers(0, k))
    b = int(rng.integers(0, m))
    u = rng.random()
    n = g.n
    f = _pair_from_index(n, int(state.present[a]))
    h = _pair_from_index(n, int(state.absent[b]))
    if coef is None:
        coef = closed_form_coefficients(params)
    g.toggle(*f)
    if coef is not None:
        ds_f = int(g.degrees[f[0]] + g.degrees[f[1]])
        ds_h = int(g.degrees[h[0]] + g.degrees[h[1]])
        cn_f = g.common_neighbors(*f)
        cn_h = g.common_neighbors(*h)
        dh = coef[1] * (ds_h - ds_f) + coef[2] * (cn_h - cn_f)
    else:
        dh = _change_without_edge_terms(params, g, h) - _change_without_edge_terms(params, g, f)
    g.toggle(*f)
    if dh >= 0.0 or u < math.exp(dh):
        flip_edge(g, counts, f)
        flip_edge(g, counts, h)
        state.present[a], state.absent[b] = state.absent[b], state.present[a]
        return g, counts, "accepted"
    return g, counts, "rejected"


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class ChainConfig:
    """One sweep is N = n(n-1)/2 proposed updates."""

    seed: int = 0
    burn_in_sweeps: int = 200
    samples: int = 1000
    thinning_sweeps: int = 5
    initial_state: str = "empty"  # "empty", "complete" or "iid"
    p0: float = 0.5

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.thinning_sweeps < 1:
            raise ValueError("thinning_sweeps must be >= 1")
        if self.burn_in_sweeps < 0:
            raise ValueError("burn_in_sweeps must be >= 0")
        if self.initial_state not in ("empty", "complete", "iid"):
            raise ValueError(f"unknown initial_state {self.initial_state!r}")
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError("p0 must lie in [0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def replace(self, **kw) -> "ChainConfig":
        d = asdict(self)
        d.update(kw)
        return ChainConfig(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SampleRecord:
    E: int
    V: int
    T: int
    sweep_index: int


@dataclass
class ChainResult:
    kind: str
    k: int | None
    config: ChainConfig
    sweep: np.ndarray
    E: np.ndarray
    V: np.ndarray
    T: np.ndarray
    final_graph: DenseGraph
    acceptance_rate: float | None = None
    states: np.ndarray | None = None
    events: list = field(default_factory=list)
    observed: dict = field(default_factory=dict)

    def records(self) -> Iterator[SampleRecord]:
        for s, e, v, t in zip(self.sweep, self.E, self.V, self.T):
            yield SampleRecord(int(e), int(v), int(t), int(s))

    def __len__(self):
        return len(self.E)

    def write_csv(self, path: str | Path) -> None:
        write_samples_csv(path, self.sweep, self.E, self.V, self.T)


def write_samples_csv(path, sweep, E, V, T) -> None:
    lines = ["sweep,E,V,T"]
    lines += [f"{int(s)},{int(e)},{int(v)},{int(t)}" for s, e, v, t in zip(sweep, E, V, T)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_samples_csv(path) -> dict:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    header = Path(path).read_text().splitlines()[0].strip()
    if header != "sweep,E,V,T":
        raise ValueError(f"unexpected header {header!r}")
    return {"sweep": data[:, 0], "E": data[:, 1], "V": data[:, 2], "T": data[:, 3]}


def _state_mask(g: DenseGraph) -> int:
    iu, ju = np.triu_indices(g.n, 1)
    bits = g.adjacency()[iu, ju]
    return int(np.sum(bits.astype(np.int64) << np.arange(len(bits), dtype=np.int64)))


def initial_graph(n: int, config: ChainConfig, rng) -> DenseGraph:
    if config.initial_state == "empty":
        return DenseGraph(n)
    if config.initial_state == "complete":
        return DenseGraph.complete(n)
    iu, ju = pair_arrays(n)
    on = rng.random(len(iu)) < config.p0
    return DenseGraph.from_edges(n, zip(iu[on].tolist(), ju[on].tolist()))


def _adjust_to_k(g: DenseGraph, k: int, rng) -> None:
    st = SwapState.from_graph(g)
    if len(st.present) > k:
        drop = rng.choice(st.present, len(st.present) - k, replace=False)
        for idx in np.sort(drop):
            g.toggle(*_pair_from_index(g.n, int(idx)))
    elif len(st.present) < k:
        add = rng.choice(st.absent, k - len(st.present), replace=False)
        for idx in np.sort(add):
            g.toggle(*_pair_from_index(g.n, int(idx)))


def run_chain(params: ErgmParams, config: ChainConfig, kind: str = "unconditional",
              k: int | None = None, *, record_states: bool = False,
              observe: dict | None = None, compiled: bool | None = None) -> ChainResult:
    """Run a chain and record (E, V, T) every ``thinning_sweeps`` sweeps after
    ``burn_in_sweeps`` sweeps of burn-in.

    ``kind="conditional"`` runs the swap chain on graphs with exactly ``k``
    edges.  ``compiled=None`` uses the compiled kernels whenever the model
    allows it.  ``observe`` maps names to functions of the current graph,
    evaluated at every record.  The output depends only on
    ``(params, config, kind, k)``.
    """
    n, N = params.n, params.N
    if kind not in ("unconditional", "conditional"):
        raise ValueError(f"unknown chain kind {kind!r}")
    if kind == "conditional":
        if k is None or isinstance(k, bool) or int(k) != k or not 0 <= k <= N:
            raise ValueError(f"conditional chain needs 0 <= k <= N={N}, got {k!r}")
        k = int(k)
    rng = np.random.default_rng(int(config.seed))
    g = initial_graph(n, config, rng)
    if kind == "conditional":
        _adjust_to_k(g, k, rng)
    counts = count_statistics(g)
    coef = closed_form_coefficients(params)
    use_kernel = coef is not None if compiled is None else compiled
    if use_kernel and coef is None:
        raise ValueError("compiled path needs edge/two-star/triangle terms only")

    pair_i, pair_j = pair_arrays(n)
    carr = np.array(counts.as_tuple(), dtype=np.int64)
    state = SwapState.from_graph(g) if kind == "conditional" else None
    events = []
    if kind == "conditional" and (k == 0 or k == N):
        events.append("degenerate-slice: no edge can move")
    accepted = 0
    proposed = 0

    def advance(steps):
        nonlocal accepted, proposed
        if steps == 0:
            return
        if kind == "unconditional":
            if use_kernel:
                _kernels.glauber_steps(g.bits, g.degrees, carr, coef, pair_i, pair_j, steps, rng)
            else:
                c = RunningCounts(*carr.tolist())
                for _ in range(steps):
                    glauber_step(params, g, c, rng, coef=coef)
                carr[:] = c.as_tuple()
        else:
            if use_kernel:
                accepted += _kernels.swap_steps(g.bits, g.degrees, carr, coef, pair_i, pair_j,
                                                state.present, state.absent, steps, rng)
            else:
                c = RunningCounts(*carr.tolist())
                for _ in range(steps):
                    _, _, status = conditional_swap_step(params, g, c, rng, state, coef=coef)
                    accepted += status == "accepted"
                carr[:] = c.as_tuple()
            proposed += steps

    advance(config.burn_in_sweeps * N)
    S = config.samples
    sweep = np.empty(S, dtype=np.int64)
    out = np.empty((S, 3), dtype=np.int64)
    states = np.empty(S, dtype=np.int64) if record_states else None
    observed = {name: np.empty(S) for name in (observe or {})}
    t = config.burn_in_sweeps
    for s in range(S):
        advance(config.thinning_sweeps * N)
        t += config.thinning_sweeps
        sweep[s] = t
        out[s] = carr
        if record_states:
            states[s] = _state_mask(g)
        for name, fn in (observe or {}).items():
            observed[name][s] = fn(g)
    rate = accepted / proposed if proposed else None
    return ChainResult(kind, k, config, sweep, out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(),
                       g, rate, states, events, observed)


def run_chains(params: ErgmParams, config: ChainConfig, n_chains: int, kind="unconditional",
               k=None, workers: int = 1) -> list[ChainResult]:
    """Independent chains with seeds ``seed + c``; results ordered by chain index."""
    configs = [config.replace(seed=config.seed + c) for c in range(n_chains)]
    if workers <= 1:
        return [run_chain(params, c, kind, k) for c in configs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(run_chain, params, c, kind, k) for c in configs]
        return [f.result() for f in futs]


def estimate_ptilde(params: ErgmParams, config: ChainConfig) -> tuple[float, float]:
    """Batch-means estimate of E(E_n)/N from an unconditional chain and its
    standard error."""
    from .stats import batch_means

    if not solve_fixed_point(params).is_subcritical:
        warnings.warn("parameters are not subcritical; the chain may mix slowly", RuntimeWarning)
    res = run_chain(params, config, "unconditional")
    mean, se = batch_means(res.E / params.N)
    return mean, se


# ---------------------------------------------------------------------------
# exact enumeration (tiny n)


@dataclass
class ExactTable:
    """All graphs on ``n`` vertices (or one edge-count slice) with their
    probabilities.  Graph ``masks[r]`` has bit ``b`` set iff pair ``b`` (in
    ``pair_arrays`` order) is present."""

    n: int
    masks: np.ndarray
    prob: np.ndarray
    H: np.ndarray
    E: np.ndarray
    V: np.ndarray
    T: np.ndarray

    def graph(self, r: int) -> DenseGraph:
        return mask_to_graph(self.n, int(self.masks[r]))

    def mean(self, stat: str) -> float:
        return float(np.dot(self.prob, getattr(self, stat)))

    def pmf(self, stat: str) -> dict:
        vals = getattr(self, stat)
        out: dict = {}
        for v, p in zip(vals.tolist(), self.prob.tolist()):
            out[v] = out.get(v, 0.0) + p
        return dict(sorted(out.items()))


def mask_to_graph(n: int, mask: int) -> DenseGraph:
    iu, ju = pair_arrays(n)
    on = [(int(iu[b]), int(ju[b])) for b in range(len(iu)) if (mask >> b) & 1]
    return DenseGraph.from_edges(n, on)


def _enumerate(n: int):
    if n > 6:
        raise UnsupportedSize(f"exact enumeration limited to n <= 6, got n={n}")
    N = n * (n - 1) // 2
    masks = np.arange(2**N, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(N)) & 1).astype(np.int64)
    iu, ju = pair_arrays(n)
    adj = np.zeros((len(masks), n, n), dtype=np.int64)
    adj[:, iu, ju] = bits
    adj[:, ju, iu] = bits
    deg = adj.sum(axis=2)
    E = bits.sum(axis=1)
    V = (deg * (deg - 1) // 2).sum(axis=1)
    T = np.einsum("mij,mjk,mki->m", adj, adj, adj) // 6
    return masks, E, V, T, deg


def _hamiltonians(params: ErgmParams, masks, E, V, T, deg) -> np.ndarray:
    n = params.n
    H = np.zeros(len(masks))
    for beta, h in params.terms:
        kind = h.kind
        if kind == "edge":
            hom = 2 * E
        elif kind == "two-star":
            hom = (deg * (deg - 1)).sum(axis=1)
        elif kind == "triangle":
            hom = 6 * T
        else:
            hom = np.array([hom_count(h, mask_to_graph(n, int(m))) for m in masks])
        H += beta * float(n) ** (2 - h.v) * hom
    return H


def exact_distribution(params: ErgmParams) -> ExactTable:
    """Exact ERGM law for ``n <= 6`` by summing over all 2^N graphs."""
    masks, E, V, T, deg = _enumerate(params.n)
    H = _hamiltonians(params, masks, E, V, T, deg)
    prob = np.exp(H - logsumexp(H))
    return ExactTable(params.n, masks, prob, H, E, V, T)


def exact_conditional(params: ErgmParams, k: int) -> ExactTable:
    """Exact law restricted to graphs with ``k`` edges."""
    masks, E, V, T, deg = _enumerate(params.n)
    keep = E == k
    if not keep.any():
        raise ValueError(f"no graphs with k={k} edges on n={params.n} vertices")
    masks, E, V, T, deg = masks[keep], E[keep], V[keep], T[keep], deg[keep]
    H = _hamiltonians(params, masks, E, V, T, deg)
    prob = np.exp(H - logsumexp(H))
    return ExactTable(params.n, masks, prob, H, E, V, T)


def glauber_transition_matrix(params: ErgmParams) -> np.ndarray:
    """Dense one-step transition matrix of ``glauber_step`` over all 2^N
    graphs (``n <= 5``), built from rooted homomorphism counts."""
    n = params.n
    if n > 5:
        raise UnsupportedSize(f"transition matrix limited to n <= 5, got n={n}")
    N = params.N
    S = 2**N
    P = np.zeros((S, S))
    iu, ju = pair_arrays(n)
    for x in range(S):
        g = mask_to_graph(n, x)
        for b in range(N):
            h = partial_hamiltonian(params, g, (int(iu[b]), int(ju[b])))
            up = _logistic(h)
            P[x, x | (1 << b)] += up / N
            P[x, x & ~(1 << b)] += (1.0 - up) / N
    return P


def swap_transition_matrix(params: ErgmParams, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Transition matrix of ``conditional_swap_step`` on the k-edge slice
    (``n <= 5``).  Returns ``(masks, P)`` with rows indexed like ``masks``."""
    n = params.n
    if n > 5:
        raise UnsupportedSize(f"transition matrix limited to n <= 5, got n={n}")
    N = params.N
    masks = np.array([m for m in range(2**N) if bin(m).count("1") == k], dtype=np.int64)
    where = {int(m): r for r, m in enumerate(masks)}
    P = np.zeros((len(masks), len(masks)))
    if k == 0 or k == N:
        return masks, np.eye(len(masks))
    norm = 1.0 / (k * (N - k))
    iu, ju = pair_arrays(n)
    for r, x in enumerate(masks.tolist()):
        g = mask_to_graph(n, x)
        on = [b for b in range(N) if (x >> b) & 1]
        off = [b for b in range(N) if not (x >> b) & 1]
        for bf in on:
            f = (int(iu[bf]), int(ju[bf]))
            g.toggle(*f)
            base = _change_without_edge_terms(params, g, f)
            for bh in off:
                h = (int(iu[bh]), int(ju[bh]))
                dh = _change_without_edge_terms(params, g, h) - base
                acc = min(1.0, math.exp(dh))
                y = (x & ~(1 << bf)) | (1 << bh)
                P[r, where[y]] += norm * acc
                P[r, r] += norm * (1.0 - acc)
            g.toggle(*f)
    return masks, P
