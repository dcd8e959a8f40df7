"""Closed-form moments for conditional subgraph counts and edge counts.

Naming: ``p_tilde`` is a conditioned edge density ``k / N``; ``p`` is the
mean-field fixed point.  Formulas for conditional two-star and triangle
counts take ``p_tilde``; the edge-count variance and the ``c_star`` density
correction take ``p``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateParameters
from .model import ErgmParams, SubgraphSpec, big_phi_prime, solve_fixed_point


@dataclass(frozen=True)
class MomentSet:
    p_tilde: float
    mu_V: float
    sigma2_V: float
    mu_Vt: float
    mu_Tt: float
    sigma2_Tt: float
    denom: float

    def to_dict(self) -> dict:
        return asdict(self)


def _two_star_sums(params: ErgmParams, x: float) -> tuple[float, float]:
    """sum_{l>=2} beta_l s_l x^{e_l} and sum_{l>=2} beta_l s_l x^{e_l - 1}."""
    a = b = 0.0
    for beta, h in params.terms[1:]:
        a += beta * h.s * x ** h.e
        b += beta * h.s * x ** (h.e - 1)
    return a, b


def two_star_moments(params: ErgmParams, p_tilde: float) -> MomentSet:
    """Mean and variance of the two-star count given ``E_n = N * p_tilde``.

        denom    = 1 - 2 q sum_{l>=2} beta_l s_l p^{e_l - 1}
        mu_Vt    = 2 N q^2 sum_{l>=2} beta_l s_l p^{e_l} / denom
        mu_V     = N (n - 2) p^2 + mu_Vt
        sigma2_V = N n p^2 q^2 / denom^2

    with ``p = p_tilde`` and ``q = 1 - p_tilde``.  Triangle moments are
    filled in from ``triangle_moments``.
    """
    if not 0.0 < p_tilde < 1.0:
        raise ValueError(f"p_tilde must lie in (0, 1), got {p_tilde}")
    n, N = params.n, params.N
    q = 1.0 - p_tilde
    s_pe, s_pe1 = _two_star_sums(params, p_tilde)
    denom = 1.0 - 2.0 * q * s_pe1
    if denom <= 0.0:
        raise DegenerateParameters(f"two-star denominator {denom:.6g} <= 0")
    mu_vt = 2.0 * N * q * q * s_pe / denom
    mu_v = N * (n - 2) * p_tilde**2 + mu_vt
    sigma2_v = N * n * p_tilde**2 * q**2 / denom**2
    mu_tt, sigma2_tt = triangle_moments(params, p_tilde)
    return MomentSet(p_tilde, mu_v, sigma2_v, mu_vt, mu_tt, sigma2_tt, denom)


def triangle_moments(params: ErgmParams, p_tilde: float) -> tuple[float, float]:
    """Mean and variance of the centred triangle count (each indicator
    replaced by ``Y - p_tilde``) given the edge count.  The variance does
    not depend on the parameters."""
    if not 0.0 < p_tilde < 1.0:
        raise ValueError(f"p_tilde must lie in (0, 1), got {p_tilde}")
    n, N = params.n, params.N
    q = 1.0 - p_tilde
    # edge term has t = 0, so summing from l = 1 changes nothing
    tsum = sum(beta * h.t * p_tilde ** h.e for beta, h in params.terms)
    return 2.0 * N * q**3 * tsum, N * n * p_tilde**3 * q**3 / 3.0


def falling_factorial(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); 1 for k = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1
    for i in range(k):
        out *= n - i
    return out


@dataclass(frozen=True)
class SubgraphMoments:
    mu_F: float
    sigma2_F: float
    conjecture: bool = True


def general_subgraph_moments(h: SubgraphSpec, params: ErgmParams, p_tilde: float) -> SubgraphMoments:
    """Conjectured mean and variance of the number of copies of ``H`` given
    the edge count.

    Only the two-star and triangle content of ``H`` (``s``, ``t``) enters
    the fluctuation terms.  For ``v(H) < 3`` there are no two-stars or
    triangles and the correction terms are zero.
    """
    if h.v < 2:
        raise ValueError("H needs at least two vertices")
    n = params.n
    pt = p_tilde
    base = falling_factorial(n, h.v) / h.aut * pt**h.e
    if h.s == 0 and h.t == 0:
        return SubgraphMoments(base, 0.0)
    m = two_star_moments(params, pt)
    pref = falling_factorial(n - 3, h.v - 3) / h.aut
    mu = base + pref * (2 * h.s * pt ** (h.e - 2) * m.mu_Vt + 6 * h.t * pt ** (h.e - 3) * m.mu_Tt)
    var = pref**2 * (4 * h.s**2 * pt ** (2 * h.e - 4) * m.sigma2_V
                     + 36 * h.t**2 * pt ** (2 * h.e - 6) * m.sigma2_Tt)
    return SubgraphMoments(mu, var)


def edge_clt_parameters(params: ErgmParams) -> tuple[float, float]:
    """Fixed point ``p`` and ``sigma_n^2 = N p (1-p) / (1 - phi'(p))`` for the
    edge count, where ``phi'(p) = sum_{l>=2} beta_l e_l (e_l - 1) 2 p^{e_l - 1} (1 - p)``."""
    rep = solve_fixed_point(params)
    if rep.p is None:
        raise DegenerateParameters(f"no subcritical fixed point ({rep.classification.value})")
    p = rep.p
    return p, edge_count_variance(params, p)


def edge_count_variance(params: ErgmParams, p: float) -> float:
    dphi = sum(beta * h.e * (h.e - 1) * 2.0 * p ** (h.e - 1) * (1.0 - p) for beta, h in params.terms[1:])
    den = 1.0 - dphi
    if den <= 0.0:
        raise DegenerateParameters(f"edge-count variance denominator {den:.6g} <= 0")
    return params.N * p * (1.0 - p) / den


def _cstar_parts(params: ErgmParams, p: float):
    q = 1.0 - p
    terms = params.terms
    ss_pe = sum(b * h.s * p ** h.e for b, h in terms[1:])
    ts_pe = sum(b * h.t * p ** h.e for b, h in terms[1:])
    D = 1.0 - 2.0 * sum(b * h.s * p ** (h.e - 1) for b, h in terms[1:]) * q
    if D <= 0.0:
        raise DegenerateParameters(f"two-star denominator {D:.6g} <= 0")
    A = sum(b * h.s * p ** (h.e - 2) for b, h in terms[1:])
    B = sum(b * h.t * p ** (h.e - 2) for b, h in terms[1:])
    dphi = 2.0 * p * q * float(big_phi_prime(params, p))
    if dphi >= 1.0:
        raise DegenerateParameters(f"phi'(p) = {dphi:.6g} >= 1")
    return q, ss_pe, ts_pe, D, A, B, dphi


def _deleted_edge_sums(params: ErgmParams, p: float):
    """sum_l beta_l sum_j s(H_l - k_j) p^{e_l - 3} and the triangle analogue
    with p^{e_l - 4}; only terms with a non-zero count contribute."""
    s_sum = t_sum = 0.0
    for beta, h in params.terms:
        for j in range(h.e):
            s_del, t_del = h.without_edge(j)
            if s_del:
                s_sum += beta * s_del * p ** (h.e - 3)
            if t_del:
                t_sum += beta * t_del * p ** (h.e - 4)
    return s_sum, t_sum


def c_star(params: ErgmParams, p: float) -> float:
    """First-order coefficient in ``E(E_n)/N = p + c_star / n + O(n^{-3/2})``.

    Three contributions, all multiplied by ``p q / (1 - phi'(p))``:

    * two-star/triangle covariances inside each ``H_l`` minus one edge,
    * the second-order logistic term ``(1 - 2p) Var(dH) / 2``,
    * the finite-size factor ``(n-2)_{(v-2)} / n^{v-2} - 1 ~ -(v-2)(v+1) / (2n)``
      from counting injective placements of the remaining ``v - 2`` vertices.

    ``c_star_alternative`` evaluates a variant that uses ``t_r`` -> ``s_r`` in
    the triangle covariance, drops the factor 1/2 and uses ``(v-2)(v-3)``;
    Monte Carlo runs of the chain agree with this function, not with that one.
    """
    q, ss_pe, ts_pe, D, A, B, dphi = _cstar_parts(params, p)
    s_sum, t_sum = _deleted_edge_sums(params, p)
    cov_part = 4.0 * s_sum * q * q * ss_pe / D + 12.0 * t_sum * q**3 * ts_pe
    var_part = 0.5 * (1.0 - 2.0 * p) * (8.0 * A * A * p * q / D + 36.0 * B * B * q * q)
    size_part = sum(b * h.e * p ** (h.e - 1) * (h.v - 2) * (h.v + 1) for b, h in params.terms[1:])
    return p * q / (1.0 - dphi) * (cov_part + var_part - size_part)


def c_star_alternative(params: ErgmParams, p: float) -> float:
    """Variant of ``c_star`` kept for comparison (see there for the
    differences)."""
    q, ss_pe, ts_pe, D, A, B, dphi = _cstar_parts(params, p)
    s_sum, t_sum = _deleted_edge_sums(params, p)
    cov_part = 4.0 * s_sum * q * q * ss_pe / D + 12.0 * t_sum * q**3 * ss_pe
    var_part = (1.0 - 2.0 * p) * (8.0 * A * A * p * q / D + 36.0 * B * B * q * q)
    size_part = sum(b * h.e * p ** (h.e - 1) * (h.v - 2) * (h.v - 3) for b, h in params.terms[1:])
    return p * q / (1.0 - dphi) * (cov_part + var_part - size_part)


def discretized_normal_pmf(mu: float, sigma2: float, k) -> float:
    """``P(k - 1/2 < Z <= k + 1/2)`` for ``Z ~ N(mu, sigma2)``.

    Uses ``scipy.special.ndtr``; differences are taken on whichever tail
    keeps both terms small, so far-tail values keep full relative accuracy.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    s = math.sqrt(sigma2)
    k = np.asarray(k, dtype=float)
    lo = (k - 0.5 - mu) / s
    hi = (k + 0.5 - mu) / s
    upper = lo > 0
    val = np.where(upper, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))
    return val if val.ndim else float(val)
