"""Local distance between the edge count and a discretised normal.

In the edge-only model the edge count is exactly binomial, so d_loc needs
no sampling; with a two-star term we fall back on a chain, and sampling
noise of order 1/sqrt(samples) quickly dominates.
"""
import sys
from pathlib import Path

from ergmlab import TWO_STAR, ErgmParams
from ergmlab.experiments import cmd_verify_lclt

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output") / "lclt"
exact = cmd_verify_lclt(ErgmParams.edge_only(16, 0.2), [16, 32, 64, 128], out=out / "binomial")
print("binomial d_loc:", [f"{exact.empirical[f'n={n}']['d_loc']:.2e}" for n in (16, 32, 64, 128)])
print("slope", round(exact.rate_fits["d_loc_vs_n"]["slope"], 3), "(upper-bound rate -1.125)")

chain = cmd_verify_lclt(ErgmParams.build(16, 0.2, (0.3, TWO_STAR)), [16, 24, 32], samples=20000, seed=3,
                        out=out / "two_star")
print("chain d_loc:", [f"{chain.empirical[f'n={n}']['d_loc']:.2e}" for n in (16, 24, 32)])
