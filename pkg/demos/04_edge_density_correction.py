"""The average edge density differs from the mean-field fixed point by
about c*/n.  This runs the Glauber chain at three sizes and prints
n (p_tilde - p) next to c*."""
import sys
from pathlib import Path

from ergmlab import TWO_STAR, ErgmParams
from ergmlab.experiments import cmd_verify_ptilde, write_report

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output") / "ptilde"
par = ErgmParams.build(16, 0.2, (0.3, TWO_STAR))
rep = cmd_verify_ptilde(par, [16, 32, 64], samples=10000, seed=2, out=out)
write_report(rep, out)
print(f"p = {rep.theory['p']:.6f}, c* = {rep.theory['c_star']:.4f}")
for n in (16, 32, 64):
    e = rep.empirical[f"n={n}"]
    print(f"n={n:3d}: n (p_tilde - p) = {n * e['diff']:+.4f} +- {n * e['se']:.4f}")
print("slope", round(rep.rate_fits["abs_diff_vs_n"]["slope"], 3))
