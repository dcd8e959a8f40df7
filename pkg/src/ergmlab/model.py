"""ERGM parameterisations and mean-field fixed-point analysis.

An ERGM on ``n`` labelled vertices puts weight ``exp(n^2 * sum_l beta_l * t(H_l, G))``
on each simple graph ``G``, where ``t(H, G) = Hom(H, G) / n^{v(H)}`` and ``Hom``
counts *injective* edge-preserving vertex maps.  The first term is always a
single edge.

The mean-field functions are

    Phi(a) = sum_l beta_l * e_l * a^(e_l - 1)
    phi(a) = exp(2 Phi(a)) / (1 + exp(2 Phi(a)))

and a parameter vector is subcritical when ``phi(a) = a`` has a unique root
``p`` in (0, 1) with ``phi'(p) < 1``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml
from scipy.special import expit

from .errors import ConfigError

#: grid spacing used to bracket roots of phi(a) - a
GRID_STEP = 1e-4
#: half-width of the band around phi'(p) = 1 reported as Indeterminate
TOL_MARGIN = 1e-6

NAMED_GRAPHS = {
    "edge": [(0, 1)],
    "two-star": [(0, 1), (0, 2)],
    "triangle": [(0, 1), (1, 2), (0, 2)],
    "path3": [(0, 1), (1, 2), (2, 3)],
    "square": [(0, 1), (1, 2), (2, 3), (0, 3)],
}


def _permutation_automorphisms(v: int, edges: frozenset) -> int:
    count = 0
    for perm in itertools.permutations(range(v)):
        if all(frozenset((perm[a], perm[b])) in edges for a, b in edges):
            count += 1
    return count


@dataclass(frozen=True)
class SubgraphSpec:
    """A small simple graph ``H`` without isolated vertices.

    Vertices are relabelled to ``0..v-1`` in order of first appearance, so
    ``SubgraphSpec([(3, 7)])`` is the single edge ``(0, 1)``.
    """

    edge_list: tuple
    v: int = field(init=False)
    e: int = field(init=False)
    s: int = field(init=False)
    t: int = field(init=False)

    def __init__(self, edges: Iterable[Sequence[int]]):
        relabel: dict = {}
        seen = set()
        out = []
        for pair in edges:
            if len(pair) != 2:
                raise ValueError(f"edge {pair!r} is not a vertex pair")
            a, b = pair
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            for x in (a, b):
                if x not in relabel:
                    relabel[x] = len(relabel)
            u, w = sorted((relabel[a], relabel[b]))
            if (u, w) in seen:
                raise ValueError(f"repeated edge {pair!r}")
            seen.add((u, w))
            out.append((u, w))
        if not out:
            raise ValueError("subgraph needs at least one edge")
        v = len(relabel)
        deg = [0] * v
        for u, w in out:
            deg[u] += 1
            deg[w] += 1
        adj = {x: set() for x in range(v)}
        for u, w in out:
            adj[u].add(w)
            adj[w].add(u)
        tri = sum(1 for a, b, c in itertools.combinations(range(v), 3)
                  if b in adj[a] and c in adj[a] and c in adj[b])
        object.__setattr__(self, "edge_list", tuple(sorted(out)))
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "e", len(out))
        object.__setattr__(self, "s", sum(d * (d - 1) // 2 for d in deg))
        object.__setattr__(self, "t", tri)

    @classmethod
    def named(cls, name: str) -> "SubgraphSpec":
        try:
            return cls(NAMED_GRAPHS[name])
        except KeyError:
            raise ValueError(f"unknown graph name {name!r}; known: {sorted(NAMED_GRAPHS)}") from None

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(frozenset(p) for p in self.edge_list)

    @cached_property
    def aut(self) -> int:
        """Automorphism count (brute force over vertex permutations, v <= 8)."""
        from .errors import UnsupportedSize

        if self.v > 8:
            raise UnsupportedSize(f"automorphism count limited to v <= 8, got v={self.v}")
        return _permutation_automorphisms(self.v, self.edge_set)

    @property
    def kind(self) -> str | None:
        """'edge', 'two-star' or 'triangle' when ``H`` is one of those, else None."""
        if (self.v, self.e) == (2, 1):
            return "edge"
        if (self.v, self.e) == (3, 2):
            return "two-star"
        if (self.v, self.e) == (3, 3):
            return "triangle"
        return None

    def without_edge(self, k: int) -> tuple[int, int]:
        """Two-star and triangle counts of ``H`` with its ``k``-th edge deleted
        (vertices kept)."""
        rest = [p for i, p in enumerate(self.edge_list) if i != k]
        deg = [0] * self.v
        adj = {x: set() for x in range(self.v)}
        for u, w in rest:
            deg[u] += 1
            deg[w] += 1
            adj[u].add(w)
            adj[w].add(u)
        s = sum(d * (d - 1) // 2 for d in deg)
        t = sum(1 for a, b, c in itertools.combinations(range(self.v), 3)
                if b in adj[a] and c in adj[a] and c in adj[b])
        return s, t

    def __repr__(self):
        name = self.kind
        return f"SubgraphSpec({name or list(self.edge_list)})"


EDGE = SubgraphSpec([(0, 1)])
TWO_STAR = SubgraphSpec(NAMED_GRAPHS["two-star"])
TRIANGLE = SubgraphSpec(NAMED_GRAPHS["triangle"])


@dataclass(frozen=True)
class ErgmParams:
    """Model of the form ``(n, [(beta_1, edge), (beta_2, H_2), ...])``.

    ``beta_1`` is unrestricted; every later ``beta_l`` must be non-negative and
    ``H_l`` must have at least two edges.
    """

    n: int
    terms: tuple

    def __post_init__(self):
        terms = tuple((float(b), h if isinstance(h, SubgraphSpec) else SubgraphSpec(h))
                      for b, h in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("model needs at least the edge term")
        if terms[0][1].e != 1:
            raise ValueError("first term must be a single edge")
        for l, (beta, h) in enumerate(terms[1:], start=2):
            if h.e < 2:
                raise ValueError(f"term {l}: H must have at least two edges")
            if beta < 0:
                raise ValueError(f"term {l}: beta must be non-negative, got {beta}")
        if int(self.n) != self.n or self.n < max(h.v for _, h in terms):
            raise ValueError(f"n={self.n} smaller than the largest H")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def edge_only(cls, n: int, beta1: float = 0.0) -> "ErgmParams":
        return cls(n, ((beta1, EDGE),))

    @classmethod
    def build(cls, n: int, beta1: float, *extra: tuple) -> "ErgmParams":
        """``ErgmParams.build(20, -0.3, (0.2, TWO_STAR))``."""
        return cls(n, ((beta1, EDGE),) + tuple(extra))

    @property
    def N(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def beta(self) -> np.ndarray:
        return np.array([b for b, _ in self.terms])

    @property
    def is_edge_only(self) -> bool:
        return all(b == 0 for b, _ in self.terms[1:])

    def with_n(self, n: int) -> "ErgmParams":
        return ErgmParams(n, self.terms)

    def with_beta1(self, beta1: float) -> "ErgmParams":
        return ErgmParams(self.n, ((beta1, self.terms[0][1]),) + self.terms[1:])

    def to_config(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"beta": b, "edges": [list(p) for p in h.edge_list]} for b, h in self.terms],
        }

    @classmethod
    def from_config(cls, cfg: dict, n: int | None = None) -> "ErgmParams":
        """Parse ``{n, terms: [{beta, edges | graph}, ...]}``.

        The compact form ``{n, beta: [...], graphs: [...]}`` is accepted too,
        where each graph is an edge list or a name from ``NAMED_GRAPHS``.
        ``n`` overrides the file value.
        """
        if not isinstance(cfg, dict):
            raise ConfigError("configuration must be a mapping", key="<root>")
        if n is None:
            if "n" not in cfg:
                raise ConfigError("missing vertex count", key="n")
            n = cfg["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError(f"expected an integer >= 2, got {n!r}", key="n")
        if "terms" in cfg:
            raw = cfg["terms"]
            if not isinstance(raw, list) or not raw:
                raise ConfigError("expected a non-empty list", key="terms")
            pairs = []
            for i, t in enumerate(raw):
                if not isinstance(t, dict) or "beta" not in t:
                    raise ConfigError("each term needs a beta", key=f"terms[{i}].beta")
                g = t.get("edges", t.get("graph"))
                if g is None:
                    raise ConfigError("each term needs edges or graph", key=f"terms[{i}].edges")
                pairs.append((t["beta"], g, f"terms[{i}].beta", f"terms[{i}].edges"))
        elif "beta" in cfg:
            betas, graphs = cfg["beta"], cfg.get("graphs")
            if not isinstance(betas, list):
                raise ConfigError("expected a list", key="beta")
            if graphs is None:
                graphs = ["edge"] if len(betas) == 1 else None
            if not isinstance(graphs, list) or len(graphs) != len(betas):
                raise ConfigError("need one graph per beta", key="graphs")
            pairs = [(b, g, f"beta[{i}]", f"graphs[{i}]") for i, (b, g) in enumerate(zip(betas, graphs))]
        else:
            raise ConfigError("missing model terms", key="terms")
        terms = []
        for beta, g, beta_key, key in pairs:
            if isinstance(beta, bool) or not isinstance(beta, (int, float)):
                raise ConfigError(f"beta must be a number, got {beta!r}", key=beta_key)
            try:
                h = SubgraphSpec.named(g) if isinstance(g, str) else SubgraphSpec(g)
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc), key=key) from None
            terms.append((float(beta), h))
        try:
            return cls(n, tuple(terms))
        except ValueError as exc:
            raise ConfigError(str(exc), key="terms") from None


def load_config(path: str | Path) -> dict:
    """Read a YAML/JSON configuration file into a dict."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}", key="--config") from None
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}", key="<root>") from None
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a mapping", key="<root>")
    return cfg


def save_params(params: ErgmParams, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(params.to_config(), sort_keys=False))


# ---------------------------------------------------------------------------
# mean-field functions


def big_phi(params: ErgmParams, a):
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    for beta, h in params.terms:
        out = out + beta * h.e * a ** (h.e - 1)
    return out if out.ndim else float(out)


def big_phi_prime(params: ErgmParams, a):
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    for beta, h in params.terms:
        if h.e >= 2:
            out = out + beta * h.e * (h.e - 1) * a ** (h.e - 2)
    return out if out.ndim else float(out)


def small_phi(params: ErgmParams, a):
    val = expit(2.0 * np.asarray(big_phi(params, a)))
    return val if np.ndim(val) else float(val)


def small_phi_prime(params: ErgmParams, a):
    """phi'(a) = 2 phi(a) (1 - phi(a)) Phi'(a); at a fixed point this is
    2 p (1 - p) Phi'(p)."""
    f = small_phi(params, a)
    return 2.0 * f * (1.0 - f) * big_phi_prime(params, a)


class Region(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    DOBRUSHIN = "DobrushinSubcritical"
    NOT_SUBCRITICAL = "NotSubcritical"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class RegionReport:
    p: float | None
    classification: Region
    phi_prime_at_p: float
    Phi_prime_at_one: float
    root_count_on_grid: int
    roots: tuple = ()

    @property
    def is_subcritical(self) -> bool:
        return self.classification in (Region.SUBCRITICAL, Region.DOBRUSHIN)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "classification": self.classification.value,
            "phi_prime_at_p": self.phi_prime_at_p,
            "Phi_prime_at_one": self.Phi_prime_at_one,
            "root_count_on_grid": self.root_count_on_grid,
            "roots": list(self.roots),
        }


def _bisect(g, lo, hi, tol, max_iter=200):
    glo = g(lo)
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return mid


def solve_fixed_point(params: ErgmParams, tol: float = 1e-12) -> RegionReport:
    """Locate the roots of ``phi(a) = a`` in (0, 1) and classify the parameters.

    Roots are bracketed by sign changes of ``phi(a) - a`` on a grid of spacing
    ``GRID_STEP`` and refined by bisection until ``|phi(p) - p| <= tol``.
    Parameters with ``|phi'(p) - 1| <= TOL_MARGIN`` are reported Indeterminate;
    tangential roots that produce no sign change are not detected.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    Phi1 = float(big_phi_prime(params, 1.0))

    def g(a):
        return small_phi(params, a) - a

    if params.is_edge_only:
        # phi is constant, the root is phi(0) in closed form
        p = float(small_phi(params, 0.0))
        roots = [p]
    else:
        grid = np.linspace(0.0, 1.0, int(round(1.0 / GRID_STEP)) + 1)
        vals = g(grid)
        roots = []
        for i in range(len(grid) - 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0:
                roots.append(float(grid[i]))
            elif a * b < 0:
                roots.append(_bisect(g, grid[i], grid[i + 1], tol))
        if vals[-1] == 0.0:
            roots.append(1.0)
    roots = [float(r) for r in roots if 0.0 < r < 1.0]
    count = len(roots)
    if count != 1:
        dphi = float(small_phi_prime(params, roots[0])) if roots else float("nan")
        return RegionReport(None, Region.NOT_SUBCRITICAL, dphi, Phi1, count, tuple(roots))
    p = roots[0]
    dphi = 2.0 * p * (1.0 - p) * float(big_phi_prime(params, p))
    if abs(dphi - 1.0) <= TOL_MARGIN:
        return RegionReport(None, Region.INDETERMINATE, dphi, Phi1, 1, (p,))
    if dphi > 1.0:
        return RegionReport(None, Region.NOT_SUBCRITICAL, dphi, Phi1, 1, (p,))
    cls = Region.DOBRUSHIN if Phi1 < 2.0 else Region.SUBCRITICAL
    return RegionReport(p, cls, dphi, Phi1, 1, (p,))
