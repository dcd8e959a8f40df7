"""Copies of a general subgraph given the edge count, against the
conjectured mean and variance, and the correlation of the centred
two-star and triangle counts."""
import sys
from pathlib import Path

from ergmlab import TRIANGLE, ErgmParams, SubgraphSpec
from ergmlab.experiments import cmd_verify_conjecture

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output") / "conjecture"
par = ErgmParams.build(20, -0.3, (0.3, TRIANGLE))
for name in ("triangle", "path3", "square"):
    h = SubgraphSpec.named(name)
    rep = cmd_verify_conjecture(par, h, 20, samples=1000, seed=4, out=out / name)
    th, em = rep.theory, rep.empirical
    print(f"{name:8s} mu_F {th['mu_F']:9.2f}  mean {em['mean_F']:9.2f} +- {em['mean_F_se']:.2f}  "
          f"var ratio {em.get('var_ratio', float('nan')):.3f}  r(V~, T~) {em['pearson_Vt_Tt']:+.3f}")
