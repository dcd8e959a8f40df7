"""Standalone SVG figures plus the CSV of plotted points."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy import stats as sps  # noqa: E402

plt.rcParams["svg.hashsalt"] = "ergmlab"


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _write_csv(path: Path, header: str, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [header] + [",".join(repr(float(x)) if not isinstance(x, (int, np.integer)) else str(int(x))
                                 for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def cdf_overlay(z, path, title=""):
    """Empirical cdf of standardised samples against Phi."""
    path = Path(path)
    z = np.sort(np.asarray(z, dtype=float))
    ecdf = np.arange(1, len(z) + 1) / len(z)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(z, ecdf, where="post", label="empirical", lw=1)
    grid = np.linspace(min(z.min(), -4), max(z.max(), 4), 400)
    ax.plot(grid, sps.norm.cdf(grid), "k--", lw=1, label="N(0,1)")
    ax.set_xlabel("standardised value")
    ax.set_ylabel("cdf")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    _save(fig, path)
    _write_csv(path.with_suffix(".csv"), "z,ecdf,normal_cdf", zip(z, ecdf, sps.norm.cdf(z)))


def rate_plot(ns, errs, path, fit=None, reference=None, title="", ylabel="error"):
    """Log-log plot of errors against n with the fitted line and an optional
    reference slope ``(label, slope)``."""
    path = Path(path)
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ns, errs, "o-", label="measured")
    if fit is not None:
        ax.loglog(ns, np.exp(fit.intercept) * ns**fit.slope, "k--", lw=1,
                  label=f"fit slope {fit.slope:.2f}")
    if reference is not None:
        label, slope = reference
        ax.loglog(ns, errs[0] * (ns / ns[0]) ** slope, ":", color="gray", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    _save(fig, path)
    _write_csv(path.with_suffix(".csv"), "n,err", zip(ns, errs))


def pmf_overlay(support, emp, ref, path, title=""):
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(support, emp, drawstyle="steps-mid", lw=1, label="empirical")
    ax.plot(support, ref, "k--", lw=1, label="discretised normal")
    ax.set_xlabel("k")
    ax.set_ylabel("P(X = k)")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8)
    _save(fig, path)
    _write_csv(path.with_suffix(".csv"), "k,empirical,reference", zip(support, emp, ref))
