import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from ergmlab.errors import DegenerateParameters
from ergmlab.model import EDGE, TRIANGLE, TWO_STAR, ErgmParams, SubgraphSpec, solve_fixed_point
from ergmlab.sampler import ChainConfig, run_chain
from ergmlab.stats import batch_means
from ergmlab.theory import (c_star, c_star_alternative, discretized_normal_pmf, edge_clt_parameters,
                            edge_count_variance, falling_factorial, general_subgraph_moments, triangle_moments,
                            two_star_moments)


def test_edge_only_moments_exact():
    m = two_star_moments(ErgmParams.edge_only(40), 0.5)
    assert m.mu_V == 780 * 38 * 0.25
    assert m.sigma2_V == 780 * 40 * 0.25 * 0.25
    assert m.mu_Vt == 0.0 and m.mu_Tt == 0.0 and m.denom == 1.0
    assert m.sigma2_Tt == pytest.approx(780 * 40 * 0.125**2 / 3, rel=1e-15)


def test_two_star_moments_rational_oracle():
    # exact rational arithmetic with two-star and triangle terms
    n, pt = 30, Fraction(2, 5)
    b2, b3 = Fraction(1, 10), Fraction(1, 5)
    N = n * (n - 1) // 2
    q = 1 - pt
    den = 1 - 2 * q * (b2 * 1 * pt + b3 * 3 * pt**2)
    mu_vt = 2 * N * q**2 * (b2 * pt**2 + b3 * 3 * pt**3) / den
    par = ErgmParams.build(n, -0.1, (0.1, TWO_STAR), (0.2, TRIANGLE))
    m = two_star_moments(par, 0.4)
    assert m.denom == pytest.approx(float(den), rel=1e-14)
    assert m.mu_Vt == pytest.approx(float(mu_vt), rel=1e-13)
    assert m.mu_V == pytest.approx(float(N * (n - 2) * pt**2 + mu_vt), rel=1e-13)
    assert m.sigma2_V == pytest.approx(float(N * n * pt**2 * q**2 / den**2), rel=1e-13)
    assert m.mu_Tt == pytest.approx(float(2 * N * q**3 * b3 * pt**3), rel=1e-13)


def test_degenerate_denominator_and_bad_density():
    par = ErgmParams.build(10, 0.0, (10.0, TWO_STAR))
    with pytest.raises(DegenerateParameters):
        two_star_moments(par, 0.5)
    with pytest.raises(ValueError):
        two_star_moments(par, 1.0)
    with pytest.raises(ValueError):
        triangle_moments(par, 0.0)


def test_falling_factorial():
    assert falling_factorial(7, 3) == 210
    assert falling_factorial(7, 0) == 1
    assert falling_factorial(2, 3) == 0
    with pytest.raises(ValueError):
        falling_factorial(3, -1)


@given(n=st.integers(5, 200), pt=st.floats(0.01, 0.99), b2=st.floats(0.0, 0.9))
def test_general_moments_reduce_to_two_star(n, pt, b2):
    par = ErgmParams.build(n, 0.0, (b2, TWO_STAR))
    m = two_star_moments(par, pt)
    g = general_subgraph_moments(TWO_STAR, par, pt)
    assert g.mu_F == pytest.approx(m.mu_V, rel=1e-12)
    assert g.sigma2_F == pytest.approx(m.sigma2_V, rel=1e-12)
    e = general_subgraph_moments(EDGE, par, pt)
    assert e.sigma2_F == 0.0
    assert e.mu_F == pytest.approx(par.N * pt, rel=1e-14)


def test_general_moments_triangle_reduction():
    par = ErgmParams.build(25, -0.3, (0.3, TRIANGLE))
    pt = 0.43
    m = two_star_moments(par, pt)
    g = general_subgraph_moments(TRIANGLE, par, pt)
    assert g.mu_F == pytest.approx(falling_factorial(25, 3) * pt**3 / 6 + pt * m.mu_Vt + m.mu_Tt, rel=1e-13)
    assert g.sigma2_F == pytest.approx(pt**2 * m.sigma2_V + m.sigma2_Tt, rel=1e-13)
    assert g.conjecture


def test_edge_count_variance():
    par = ErgmParams.edge_only(20, 0.4)
    p, s2 = edge_clt_parameters(par)
    assert s2 == pytest.approx(par.N * p * (1 - p), rel=1e-15)
    par = ErgmParams.build(20, 0.2, (0.3, TWO_STAR))
    p = solve_fixed_point(par).p
    assert edge_count_variance(par, p) == pytest.approx(par.N * p * (1 - p) / (1 - 2 * 0.3 * 2 * p * (1 - p)))
    with pytest.raises(DegenerateParameters):
        edge_clt_parameters(ErgmParams.build(20, -3.0, (2.0, TRIANGLE)))


def test_c_star_hand_values():
    assert c_star(ErgmParams.edge_only(10, 0.7), 0.3) == 0.0
    # two-star at p = 1/2: only the finite-size term survives, pq / (1 - 1/2) * (-2)
    par = ErgmParams.build(10, -0.5, (0.5, TWO_STAR))
    assert solve_fixed_point(par).p == pytest.approx(0.5, abs=1e-12)
    assert c_star(par, 0.5) == pytest.approx(-1.0, abs=1e-14)
    assert c_star_alternative(par, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_c_star_triangle_terms():
    # every piece written out by hand for one triangle term
    b1, b3 = -0.3, 0.3
    par = ErgmParams.build(10, b1, (b3, TRIANGLE))
    p = solve_fixed_point(par).p
    q = 1 - p
    D = 1 - 2 * b3 * 3 * p**2 * q
    dphi = 2 * p * q * b3 * 6 * p
    cov = 4 * (b3 * 3 * 1 * p**0) * q * q * (b3 * 3 * p**3) / D
    var = 0.5 * (1 - 2 * p) * (8 * (b3 * 3 * p) ** 2 * p * q / D + 36 * (b3 * p) ** 2 * q * q)
    size = b3 * 3 * p**2 * 1 * 4
    want = p * q / (1 - dphi) * (cov + var - size)
    assert c_star(par, p) == pytest.approx(want, rel=1e-13)


@pytest.mark.slow
def test_c_star_against_chain():
    par = ErgmParams.build(32, -0.3, (0.3, TRIANGLE))
    p = solve_fixed_point(par).p
    res = run_chain(par, ChainConfig(seed=9, burn_in_sweeps=100, samples=20000, thinning_sweeps=1))
    mean, se = batch_means(res.E / par.N)
    assert abs(32 * (mean - p) - c_star(par, p)) < 4 * 32 * se + 0.02


def test_discretized_normal_pmf():
    assert discretized_normal_pmf(0.0, 1.0, 0) == pytest.approx(0.382924922548, abs=1e-12)
    k = np.arange(-40, 41)
    assert discretized_normal_pmf(0.3, 4.0, k).sum() == pytest.approx(1.0, abs=1e-14)
    far = discretized_normal_pmf(0.0, 1.0, 30)
    assert far == pytest.approx(norm.sf(29.5) - norm.sf(30.5), rel=1e-10)
    assert far > 0
    with pytest.raises(ValueError):
        discretized_normal_pmf(0.0, 0.0, 1)


def test_general_moments_square_has_no_corrections():
    sq = SubgraphSpec.named("square")
    par = ErgmParams.build(12, 0.0, (0.2, TWO_STAR))
    g = general_subgraph_moments(sq, par, 0.3)
    base = falling_factorial(12, 4) / 8 * 0.3**4
    m = two_star_moments(par, 0.3)
    assert g.mu_F == pytest.approx(base + falling_factorial(9, 1) / 8 * 2 * 4 * 0.3**2 * m.mu_Vt, rel=1e-13)
    assert math.isfinite(g.sigma2_F) and g.sigma2_F > 0
