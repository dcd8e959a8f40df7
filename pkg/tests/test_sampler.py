import numpy as np
import pytest
from conftest import random_graph

from ergmlab.graph import count_statistics, hamiltonian
from ergmlab.model import TRIANGLE, TWO_STAR, ErgmParams, SubgraphSpec, solve_fixed_point
from ergmlab.sampler import (ChainConfig, SwapState, conditional_swap_step, exact_conditional, exact_distribution,
                             glauber_step, glauber_transition_matrix, read_samples_csv, run_chain, run_chains,
                             swap_transition_matrix)
from ergmlab.stats import batch_means, chi_square_gof, dkw_epsilon, kolmogorov_distance, Pmf

MODEL5 = ErgmParams.build(5, -0.2, (0.1, TWO_STAR))
MIXED = ErgmParams.build(5, -0.3, (0.4, TWO_STAR), (0.5, TRIANGLE))


def test_exact_distribution_normalised_and_consistent():
    par = ErgmParams.build(5, -0.3, (0.4, TWO_STAR), (0.2, SubgraphSpec.named("square")))
    tab = exact_distribution(par)
    assert abs(tab.prob.sum() - 1) < 1e-12
    for r in [0, 17, 300, 1023]:
        assert tab.H[r] == pytest.approx(hamiltonian(par, tab.graph(r)), rel=1e-12, abs=1e-12)
        assert count_statistics(tab.graph(r)).as_tuple() == (tab.E[r], tab.V[r], tab.T[r])


def test_edge_only_exact_law_is_product():
    par = ErgmParams.edge_only(4, 0.3)
    p = solve_fixed_point(par).p
    tab = exact_distribution(par)
    want = p ** tab.E * (1 - p) ** (par.N - tab.E)
    assert np.allclose(tab.prob, want, atol=1e-14)


@pytest.mark.parametrize("par", [MODEL5, MIXED], ids=["two-star", "mixed"])
def test_glauber_detailed_balance(par):
    pi = exact_distribution(par).prob
    P = glauber_transition_matrix(par)
    assert np.allclose(P.sum(1), 1, atol=1e-12)
    flow = pi[:, None] * P
    assert np.abs(flow - flow.T).max() < 1e-10
    assert np.abs(pi @ P - pi).max() < 1e-12


def test_glauber_edge_only_acceptance_is_p():
    par = ErgmParams.edge_only(4, 0.35)
    p = solve_fixed_point(par).p
    P = glauber_transition_matrix(par)
    N = par.N
    for x in [0, 5, 63]:
        for b in range(N):
            y = x | (1 << b)
            if y != x:
                assert P[x, y] == pytest.approx(p / N, abs=1e-15)


@pytest.mark.parametrize("k", [1, 4, 7])
def test_swap_chain_detailed_balance(k):
    cond = exact_conditional(MIXED, k)
    masks, P = swap_transition_matrix(MIXED, k)
    assert np.array_equal(masks, cond.masks)
    assert np.allclose(P.sum(1), 1, atol=1e-12)
    flow = cond.prob[:, None] * P
    assert np.abs(flow - flow.T).max() < 1e-10
    # edge parameter drops out of the swap chain too
    _, P2 = swap_transition_matrix(MIXED.with_beta1(1.7), k)
    assert np.abs(P - P2).max() < 1e-12


@pytest.mark.parametrize("k", [0, 3, 5, 10])
def test_sufficiency_of_edge_count(k):
    a = exact_conditional(MODEL5, k).prob
    b = exact_conditional(MODEL5.with_beta1(2.5), k).prob
    assert np.abs(a - b).max() < 1e-12


def test_chain_is_deterministic():
    cfg = ChainConfig(seed=7, burn_in_sweeps=5, samples=50, thinning_sweeps=1)
    for kind, k in [("unconditional", None), ("conditional", 20)]:
        a = run_chain(MIXED.with_n(10), cfg, kind, k)
        b = run_chain(MIXED.with_n(10), cfg, kind, k)
        assert np.array_equal(a.E, b.E) and np.array_equal(a.V, b.V) and np.array_equal(a.T, b.T)
        assert a.final_graph == b.final_graph


@pytest.mark.parametrize("kind,k", [("unconditional", None), ("conditional", 30)])
@pytest.mark.parametrize("init", ["empty", "complete", "iid"])
def test_compiled_matches_python(kind, k, init):
    par = MIXED.with_n(12)
    cfg = ChainConfig(seed=11, burn_in_sweeps=2, samples=20, thinning_sweeps=1, initial_state=init)
    a = run_chain(par, cfg, kind, k, compiled=True)
    b = run_chain(par, cfg, kind, k, compiled=False)
    assert np.array_equal(a.V, b.V) and np.array_equal(a.T, b.T)
    assert a.final_graph == b.final_graph
    assert a.acceptance_rate == b.acceptance_rate
    assert count_statistics(a.final_graph).as_tuple() == (a.E[-1], a.V[-1], a.T[-1])


def test_general_term_step_matches_closed_form():
    # the generic path (rooted counts) and the closed-form path draw identically
    par = MIXED.with_n(9)
    for kind in ("glauber", "swap"):
        rng1, rng2 = np.random.default_rng(3), np.random.default_rng(3)
        g1, g2 = random_graph(9, 0.4, 1), random_graph(9, 0.4, 1)
        c1, c2 = count_statistics(g1), count_statistics(g2)
        s1, s2 = SwapState.from_graph(g1), SwapState.from_graph(g2)
        for _ in range(500):
            if kind == "glauber":
                glauber_step(par, g1, c1, rng1)
                glauber_step(par, g2, c2, rng2, coef=np.array([-0.6, 0.8 / 9, 3.0 / 9]))
            else:
                conditional_swap_step(par, g1, c1, rng1, s1)
                conditional_swap_step(par, g2, c2, rng2, s2, coef=np.array([-0.6, 0.8 / 9, 3.0 / 9]))
        assert g1 == g2 and c1 == c2 == count_statistics(g1)


def test_swap_step_keeps_edge_count():
    par = ErgmParams.build(9, 0.0, (0.3, SubgraphSpec.named("path3")))
    g = random_graph(9, 0.3, 2)
    c = count_statistics(g)
    E0 = c.E
    rng = np.random.default_rng(0)
    state = SwapState.from_graph(g)
    statuses = set()
    for _ in range(300):
        _, _, status = conditional_swap_step(par, g, c, rng, state)
        statuses.add(status)
        assert c.E == E0
    assert c == count_statistics(g)
    assert statuses <= {"accepted", "rejected"}


def test_conditional_chain_validation():
    par = MIXED.with_n(6)
    cfg = ChainConfig(samples=3, burn_in_sweeps=1)
    with pytest.raises(ValueError):
        run_chain(par, cfg, "conditional", None)
    with pytest.raises(ValueError):
        run_chain(par, cfg, "conditional", par.N + 1)
    res = run_chain(par, cfg, "conditional", 0)
    assert res.events and (res.E == 0).all()
    with pytest.raises(ValueError):
        run_chain(par, cfg, "sideways")
    with pytest.raises(ValueError):
        ChainConfig(samples=0)


def _state_frequencies(res, masks):
    where = {int(m): r for r, m in enumerate(masks)}
    counts = np.zeros(len(masks))
    for s in res.states:
        counts[where[int(s)]] += 1
    return counts


def test_glauber_chain_matches_exact_law():
    par = ErgmParams.build(4, -0.2, (0.3, TWO_STAR), (0.4, TRIANGLE))
    tab = exact_distribution(par)
    res = run_chain(par, ChainConfig(seed=1, burn_in_sweeps=10, samples=20000, thinning_sweeps=4),
                    record_states=True)
    _, pval, _ = chi_square_gof(_state_frequencies(res, tab.masks), tab.prob)
    assert pval > 1e-3


def test_swap_chain_matches_exact_conditional():
    par = ErgmParams.build(4, -0.2, (0.3, TWO_STAR), (0.6, TRIANGLE))
    cond = exact_conditional(par, 3)
    res = run_chain(par, ChainConfig(seed=2, burn_in_sweeps=10, samples=20000, thinning_sweeps=4),
                    "conditional", 3, record_states=True)
    _, pval, _ = chi_square_gof(_state_frequencies(res, cond.masks), cond.prob)
    assert pval > 1e-3


def test_conditional_mean_matches_enumeration():
    par = ErgmParams.build(5, -0.2, (0.3, TWO_STAR), (0.5, TRIANGLE))
    cond = exact_conditional(par, 5)
    res = run_chain(par, ChainConfig(seed=4, burn_in_sweeps=10, samples=8000, thinning_sweeps=2),
                    "conditional", 5)
    mean, se = batch_means(res.V)
    assert abs(mean - cond.mean("V")) < 3 * se


def test_edge_only_edge_count_is_binomial():
    par = ErgmParams.edge_only(10, 0.2)
    p = solve_fixed_point(par).p
    res = run_chain(par, ChainConfig(seed=5, burn_in_sweeps=5, samples=3000, thinning_sweeps=6))
    d = kolmogorov_distance(Pmf.from_samples(res.E), Pmf.binomial(par.N, p))
    assert d < dkw_epsilon(3000, 0.999)


def test_gnm_two_star_mean():
    n = 20
    N = n * (n - 1) // 2
    k = N // 3
    pt = k / N
    res = run_chain(ErgmParams.edge_only(n), ChainConfig(seed=6, burn_in_sweeps=20, samples=3000,
                                                         thinning_sweeps=2), "conditional", k)
    exact = N * (n - 2) * pt * (N * pt - 1) / (N - 1)
    mean, se = batch_means(res.V)
    assert abs(mean - exact) < 3 * se
    assert res.acceptance_rate == 1.0


def test_samples_csv_roundtrip(tmp_path):
    res = run_chain(MIXED.with_n(7), ChainConfig(samples=10, burn_in_sweeps=1))
    res.write_csv(tmp_path / "s.csv")
    back = read_samples_csv(tmp_path / "s.csv")
    assert np.array_equal(back["E"], res.E) and np.array_equal(back["sweep"], res.sweep)


def test_run_chains_seeds_and_workers():
    cfg = ChainConfig(seed=20, samples=5, burn_in_sweeps=1)
    par = MIXED.with_n(8)
    serial = run_chains(par, cfg, 3)
    pooled = run_chains(par, cfg, 3, workers=2)
    for c, (a, b) in enumerate(zip(serial, pooled)):
        assert a.config.seed == 20 + c
        assert np.array_equal(a.V, b.V)
