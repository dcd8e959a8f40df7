"""Tiny graphs can be enumerated, which gives exact answers to check the
samplers against.

For n = 4 we compare state frequencies of the Glauber chain with the exact
law, and show that conditioning on the edge count removes beta1.
"""
import numpy as np

from ergmlab import TRIANGLE, TWO_STAR, ChainConfig, ErgmParams, exact_conditional, exact_distribution, run_chain
from ergmlab.stats import chi_square_gof

par = ErgmParams.build(4, -0.2, (0.3, TWO_STAR), (0.4, TRIANGLE))
tab = exact_distribution(par)
print(f"{len(tab.masks)} graphs, E[E] = {tab.mean('E'):.4f}, E[T] = {tab.mean('T'):.4f}")

res = run_chain(par, ChainConfig(seed=1, samples=20000, thinning_sweeps=4), record_states=True)
where = {int(m): r for r, m in enumerate(tab.masks)}
freq = np.bincount([where[int(s)] for s in res.states], minlength=len(tab.masks))
stat, pval, dof = chi_square_gof(freq, tab.prob)
print(f"chain vs exact: chi2 = {stat:.1f} on {dof} dof, p = {pval:.3f}")

for b1 in (-1.0, 0.0, 2.0):
    cond = exact_conditional(par.with_beta1(b1), 3)
    print(f"beta1 = {b1:+.1f}: P(triangle | 3 edges) = {cond.pmf('T').get(1, 0.0):.6f}")
