"""Where is the edge+triangle model subcritical?

Scans (beta1, beta2), solves the mean-field equation at each point and
draws the classification.  Three roots show up for strongly negative
beta1 and large beta2.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ergmlab import TRIANGLE, ErgmParams, solve_fixed_point

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

b1s = np.linspace(-4, 1, 51)
b2s = np.linspace(0, 3, 31)
codes = {"DobrushinSubcritical": 0, "Subcritical": 1, "NotSubcritical": 2, "Indeterminate": 3}
grid = np.zeros((len(b2s), len(b1s)))
for i, b2 in enumerate(b2s):
    for j, b1 in enumerate(b1s):
        rep = solve_fixed_point(ErgmParams.build(10, b1, (b2, TRIANGLE)))
        grid[i, j] = codes[rep.classification.value]

fig, ax = plt.subplots(figsize=(5, 4))
ax.imshow(grid, origin="lower", aspect="auto", extent=(b1s[0], b1s[-1], b2s[0], b2s[-1]), cmap="viridis",
          vmin=0, vmax=3)
ax.set_xlabel("beta1 (edge)")
ax.set_ylabel("beta2 (triangle)")
ax.set_title("0 Dobrushin, 1 subcritical, 2 not subcritical")
fig.savefig(out / "phase_diagram.svg")

for b1, b2 in [(-0.3, 0.3), (0.0, 2.0), (-3.0, 2.0)]:
    rep = solve_fixed_point(ErgmParams.build(10, b1, (b2, TRIANGLE)))
    print(f"beta=({b1}, {b2}): {rep.classification.value}, roots {[round(r, 6) for r in rep.roots]}")
