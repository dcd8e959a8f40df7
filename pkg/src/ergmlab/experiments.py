"""End-to-end verification experiments producing ``ExperimentReport`` records.

Every empirical value carries a standard error and every check names its
threshold.  Chains for the ``i``-th entry of an n-list use seeds
``seed + 2 i`` (unconditional) and ``seed + 2 i + 1`` (conditional), so the
output does not depend on how runs are scheduled.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import plots
from .errors import PreconditionError
from .graph import hom_count
from .model import ErgmParams, SubgraphSpec, solve_fixed_point
from .sampler import ChainConfig, ChainResult, run_chain
from .stats import (Pmf, batch_means, dkw_epsilon, fit_rate, kolmogorov_distance, local_distance,
                    pearson_correlation, smoothing_bound_check, smoothness_D, standardized_sample_tests)
from .theory import (c_star, c_star_alternative, edge_count_variance, general_subgraph_moments,
                     two_star_moments)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: str

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "value": _num(self.value),
                "threshold": self.threshold}


@dataclass
class ExperimentReport:
    experiment_name: str
    params: dict
    seed: int
    theory: dict = field(default_factory=dict)
    empirical: dict = field(default_factory=dict)
    rate_fits: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    conjecture: bool = False
    wall_clock_seconds: float = 0.0
    artifacts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return _clean({
            "experiment_name": self.experiment_name,
            "params": self.params,
            "seed": self.seed,
            "conjecture": self.conjecture,
            "theory": self.theory,
            "empirical": self.empirical,
            "rate_fits": self.rate_fits,
            "checks": [c.to_dict() for c in self.checks],
            "all_passed": self.passed,
            "wall_clock_seconds": self.wall_clock_seconds,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _num(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _num(obj)


def params_hash(params: ErgmParams) -> str:
    blob = json.dumps(params.to_config(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_chain_sidecar(path: Path, params: ErgmParams, result: ChainResult) -> None:
    meta = {
        "params_hash": params_hash(params),
        "params": params.to_config(),
        "kind": result.kind,
        "k": result.k,
        "config": result.config.to_dict(),
        "acceptance_rate": result.acceptance_rate,
        "events": list(result.events),
    }
    path.write_text(yaml.safe_dump(meta, sort_keys=False))


def _save_samples(out: Path | None, tag: str, params: ErgmParams, res: ChainResult, artifacts: dict):
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    csv = out / f"samples_{tag}.csv"
    res.write_csv(csv)
    write_chain_sidecar(out / f"samples_{tag}.meta.yaml", params, res)
    artifacts[tag] = csv.name


def _require_subcritical(params: ErgmParams):
    rep = solve_fixed_point(params)
    if not rep.is_subcritical:
        raise PreconditionError(f"parameters are {rep.classification.value}; experiment needs a subcritical model")
    return rep


def centered_counts(E, V, T, n: int, p_tilde: float):
    """Centred two-star and triangle counts (indicators replaced by Y - p_tilde).

        V~ = V - 2 p (n-2) E + p^2 N (n-2)
        T~ = T - p V + p^2 (n-2) E - p^3 C(n, 3)
    """
    E = np.asarray(E, dtype=float)
    V = np.asarray(V, dtype=float)
    T = np.asarray(T, dtype=float)
    N = n * (n - 1) / 2
    p = p_tilde
    vt = V - 2 * p * (n - 2) * E + p * p * N * (n - 2)
    tt = T - p * V + p * p * (n - 2) * E - p**3 * math.comb(n, 3)
    return vt, tt


def _estimate_k(params: ErgmParams, chain: ChainConfig, seed: int, ptilde_samples: int):
    cfg = chain.replace(seed=seed, samples=ptilde_samples, thinning_sweeps=1)
    res = run_chain(params, cfg, "unconditional")
    ph, se = batch_means(res.E / params.N)
    k = int(round(params.N * ph))
    return ph, se, min(max(k, 1), params.N - 1)


# ---------------------------------------------------------------------------


def cmd_analyze(params: ErgmParams) -> dict:
    return solve_fixed_point(params).to_dict()


def cmd_moments(params: ErgmParams, p_tilde: float | None = None) -> dict:
    rep = solve_fixed_point(params)
    out = {"region": rep.to_dict()}
    if p_tilde is None:
        if rep.p is None:
            raise PreconditionError("no subcritical fixed point; pass p_tilde explicitly")
        p_tilde = rep.p
    out["moments"] = two_star_moments(params, p_tilde).to_dict()
    if rep.p is not None:
        p = rep.p
        out["edge_clt"] = {"p": p, "sigma2_n": edge_count_variance(params, p)}
        out["c_star"] = c_star(params, p)
        out["c_star_alternative"] = c_star_alternative(params, p)
    out["conjecture_moments"] = {
        str(h.edge_list): {**general_subgraph_moments(h, params, p_tilde).__dict__}
        for _, h in params.terms
    }
    return _clean(out)


def _map(fn, jobs, workers: int):
    """Run ``fn`` over ``jobs`` in input order, optionally in processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, *j) for j in jobs]
        return [f.result() for f in futs]


def _clt_point(params, i, n, samples, seed, chain, out, ptilde_samples, ks_confidence, var_tol):
    par = params.with_n(n)
    ph, ph_se, k = _estimate_k(par, chain, seed + 2 * i, ptilde_samples)
    res = run_chain(par, chain.replace(seed=seed + 2 * i + 1, samples=samples), "conditional", k)
    artifacts = {}
    _save_samples(out, f"n{n}", par, res, artifacts)
    pt = k / par.N
    m = two_star_moments(par, pt)
    sig = math.sqrt(m.sigma2_V)
    tests = standardized_sample_tests(res.V, m.mu_V, sig)
    self_std = standardized_sample_tests(res.V, res.V.mean(), res.V.std(ddof=1))
    mean_v, mean_se = batch_means(res.V)
    var_ratio = float(res.V.var(ddof=1) / m.sigma2_V)
    eps = dkw_epsilon(samples, ks_confidence)
    theory = {"k": k, **m.to_dict()}
    emp = {
        "p_tilde_hat": ph, "p_tilde_hat_se": ph_se,
        "mean_V": mean_v, "mean_V_se": mean_se,
        "var_ratio": var_ratio, "var_ratio_se": tests.variance_se,
        "acceptance_rate": res.acceptance_rate,
        "standardized": tests.to_dict(),
        "self_standardized_ks": self_std.ks_stat,
    }
    checks = [Check(f"ks n={n}", tests.ks_stat <= eps, tests.ks_stat,
                    f"<= DKW({ks_confidence}) band {eps:.4f}"),
              Check(f"variance n={n}", abs(var_ratio - 1) <= var_tol, var_ratio,
                    f"|ratio - 1| <= {var_tol}")]
    if out is not None:
        plots.cdf_overlay((res.V - m.mu_V) / sig, out / "plots" / f"cdf_V_n{n}.svg",
                          title=f"conditional two-star count, n={n}, k={k}")
    return theory, emp, checks, tests.ks_stat, artifacts


def cmd_verify_conditional_clt(params: ErgmParams, n_list, samples: int = 5000, seed: int = 0,
                               chain: ChainConfig | None = None, out: Path | None = None,
                               ptilde_samples: int = 4000, ks_confidence: float = 0.999,
                               var_tol: float = 0.15, workers: int = 1) -> ExperimentReport:
    """Conditional two-star CLT: theory-standardised V against N(0, 1)."""
    t0 = time.perf_counter()
    _require_subcritical(params)
    chain = chain or ChainConfig()
    rep = ExperimentReport("verify-conditional-clt", params.to_config(), seed)
    jobs = [(params, i, n, samples, seed, chain, out, ptilde_samples, ks_confidence, var_tol)
            for i, n in enumerate(n_list)]
    ks_pairs = []
    for n, (theory, emp, checks, ks, arts) in zip(n_list, _map(_clt_point, jobs, workers)):
        rep.theory[f"n={n}"] = theory
        rep.empirical[f"n={n}"] = emp
        rep.checks.extend(checks)
        rep.artifacts.update(arts)
        ks_pairs.append((n, ks))
    if len(ks_pairs) >= 3:
        fit = fit_rate(ks_pairs)
        rep.rate_fits["ks_vs_n"] = {**fit.to_dict(), "target_slope": -0.5}
        if out is not None:
            plots.rate_plot(*zip(*ks_pairs), out / "plots" / "ks_rate.svg", fit=fit,
                            reference=("n^-1/2", -0.5), ylabel="KS distance")
    rep.wall_clock_seconds = time.perf_counter() - t0
    return rep


def _lclt_point(params, i, n, p, samples, seed, chain, out):
    par = params.with_n(n)
    s2 = edge_count_variance(par, p)
    artifacts = {}
    if par.is_edge_only:
        law = Pmf.binomial(par.N, p)
        mu, mu_se, source = par.N * p, 0.0, "exact-binomial"
    else:
        res = run_chain(par, chain.replace(seed=seed + 2 * i, samples=samples), "unconditional")
        _save_samples(out, f"n{n}", par, res, artifacts)
        law = Pmf.from_samples(res.E)
        mu, mu_se = batch_means(res.E)
        source = "chain"
    ref = Pmf.discretized_normal(mu, s2)
    dloc = local_distance(law, ref)
    dk = kolmogorov_distance(law, ref)
    lhs, rhs = smoothing_bound_check(law, ref)
    theory = {"p": p, "sigma2_n": s2, "D_normal": smoothness_D(ref)}
    emp = {"source": source, "mu_n": mu, "mu_n_se": mu_se, "d_loc": dloc, "d_K": dk,
           "D_law": smoothness_D(law), "smoothing_ratio": lhs / rhs if rhs > 0 else 0.0}
    if out is not None:
        lo = int(max(law.support_offset, mu - 5 * math.sqrt(s2)))
        hi = int(mu + 5 * math.sqrt(s2))
        plots.pmf_overlay(np.arange(lo, hi + 1), law.on_range(lo, hi), ref.on_range(lo, hi),
                          out / "plots" / f"pmf_E_n{n}.svg", title=f"edge count, n={n}")
    return theory, emp, dloc, artifacts


def cmd_verify_lclt(params: ErgmParams, n_list, samples: int = 20000, seed: int = 0,
                    chain: ChainConfig | None = None, out: Path | None = None,
                    workers: int = 1) -> ExperimentReport:
    """Local distance between the edge-count law and the discretised normal.

    Edge-only models use the exact Binomial(N, p) law; other models use the
    empirical pmf of a chain (whose sampling noise bounds what can be seen).
    """
    t0 = time.perf_counter()
    region = _require_subcritical(params)
    chain = chain or ChainConfig(thinning_sweeps=1)
    rep = ExperimentReport("verify-lclt", params.to_config(), seed)
    jobs = [(params, i, n, region.p, samples, seed, chain, out) for i, n in enumerate(n_list)]
    rows = []
    for n, (theory, emp, dloc, arts) in zip(n_list, _map(_lclt_point, jobs, workers)):
        rep.theory[f"n={n}"] = theory
        rep.empirical[f"n={n}"] = emp
        rep.artifacts.update(arts)
        rows.append((n, dloc))
    ns = [r[0] for r in rows]
    dl = [r[1] for r in rows]
    monotone = all(b < a for a, b in zip(dl, dl[1:]))
    rep.checks.append(Check("d_loc decreasing in n", monotone, float(monotone), "strictly decreasing"))
    c = dl[0] * ns[0] ** (9 / 8)
    under = all(d <= c * m ** (-9 / 8) * (1 + 1e-12) for m, d in zip(ns, dl))
    rep.checks.append(Check("d_loc <= c n^(-9/8), c fitted at first n", under, c, "c = d_loc(n0) n0^(9/8)"))
    if len(rows) >= 3 and min(dl) > 0:
        fit = fit_rate(rows)
        rep.rate_fits["d_loc_vs_n"] = {**fit.to_dict(), "target_slope": -9 / 8}
        if out is not None:
            plots.rate_plot(ns, dl, out / "plots" / "dloc_rate.svg", fit=fit,
                            reference=("n^-9/8", -9 / 8), ylabel="d_loc")
    rep.wall_clock_seconds = time.perf_counter() - t0
    return rep


def _ptilde_point(params, i, n, samples, seed, chain, out):
    par = params.with_n(n)
    res = run_chain(par, chain.replace(seed=seed + 2 * i, samples=samples), "unconditional")
    artifacts = {}
    _save_samples(out, f"n{n}", par, res, artifacts)
    ph, se = batch_means(res.E / par.N)
    return ph, se, artifacts


def cmd_verify_ptilde(params: ErgmParams, n_list, samples: int = 20000, seed: int = 0,
                      chain: ChainConfig | None = None, out: Path | None = None,
                      slope_range=(-1.4, -0.6), workers: int = 1) -> ExperimentReport:
    """Average edge density against the fixed point and its 1/n correction."""
    t0 = time.perf_counter()
    region = _require_subcritical(params)
    chain = chain or ChainConfig(thinning_sweeps=1)
    rep = ExperimentReport("verify-ptilde", params.to_config(), seed)
    p = region.p
    cs = c_star(params, p)
    cp = c_star_alternative(params, p)
    rep.theory = {"p": p, "c_star": cs, "c_star_alternative": cp}
    jobs = [(params, i, n, samples, seed, chain, out) for i, n in enumerate(n_list)]
    rows = []
    for n, (ph, se, arts) in zip(n_list, _map(_ptilde_point, jobs, workers)):
        rep.artifacts.update(arts)
        diff = ph - p
        resid = ph - p - cs / n
        rep.empirical[f"n={n}"] = {"p_tilde_hat": ph, "se": se, "diff": diff, "c_star_over_n": cs / n,
                                   "residual": resid, "residual_alternative": ph - p - cp / n}
        rows.append((n, abs(diff)))
        if se < abs(diff) / 3:
            rep.checks.append(Check(f"c_star improves n={n}", abs(resid) < abs(diff), abs(resid),
                                    f"< |p_tilde_hat - p| = {abs(diff):.6g}"))
    fit = fit_rate(rows)
    rep.rate_fits["abs_diff_vs_n"] = {**fit.to_dict(), "target_slope": -1.0}
    lo, hi = slope_range
    rep.checks.append(Check("slope of |p_tilde_hat - p|", lo <= fit.slope <= hi, fit.slope, f"in [{lo}, {hi}]"))
    if out is not None:
        plots.rate_plot([r[0] for r in rows], [r[1] for r in rows], out / "plots" / "ptilde_rate.svg",
                        fit=fit, reference=("n^-1", -1.0), ylabel="|p_tilde - p|")
    rep.wall_clock_seconds = time.perf_counter() - t0
    return rep


class _CopyCounter:
    """Number of copies of ``h`` in a graph (picklable, unlike a lambda)."""

    def __init__(self, h: SubgraphSpec):
        self.h = h

    def __call__(self, g) -> float:
        return hom_count(self.h, g) / self.h.aut


def cmd_verify_conjecture(params: ErgmParams, h: SubgraphSpec, n: int, samples: int = 5000,
                          seed: int = 0, chain: ChainConfig | None = None, out: Path | None = None,
                          ptilde_samples: int = 4000) -> ExperimentReport:
    """Conditional copies of ``H`` against the conjectured moments, plus the
    correlation of the centred two-star and triangle counts."""
    t0 = time.perf_counter()
    _require_subcritical(params)
    chain = chain or ChainConfig()
    par = params.with_n(n)
    rep = ExperimentReport("verify-conjecture", par.to_config(), seed, conjecture=True)
    ph, ph_se, k = _estimate_k(par, chain, seed, ptilde_samples)
    kind = h.kind
    observe = {} if kind in ("edge", "two-star", "triangle") else {"F": _CopyCounter(h)}
    res = run_chain(par, chain.replace(seed=seed + 1, samples=samples), "conditional", k, observe=observe)
    _save_samples(out, f"n{n}", par, res, rep.artifacts)
    pt = k / par.N
    if kind == "edge":
        F = res.E.astype(float)
    elif kind == "two-star":
        F = res.V.astype(float)
    elif kind == "triangle":
        F = res.T.astype(float)
    else:
        F = res.observed["F"]
    mom = general_subgraph_moments(h, par, pt)
    m = two_star_moments(par, pt)
    vt, tt = centered_counts(res.E, res.V, res.T, n, pt)
    f_mean, f_se = batch_means(F)
    rep.theory = {"k": k, "p_tilde": pt, "H": [list(e) for e in h.edge_list], "s": h.s, "t": h.t,
                  "aut": h.aut, "mu_F": mom.mu_F, "sigma2_F": mom.sigma2_F,
                  "mu_Vt": m.mu_Vt, "sigma2_V": m.sigma2_V, "mu_Tt": m.mu_Tt, "sigma2_Tt": m.sigma2_Tt}
    vt_mean, vt_se = batch_means(vt)
    tt_mean, tt_se = batch_means(tt)
    emp = {"p_tilde_hat": ph, "p_tilde_hat_se": ph_se, "mean_F": f_mean, "mean_F_se": f_se,
           "var_F": float(F.var(ddof=1)),
           "mean_Vt": vt_mean, "mean_Vt_se": vt_se, "var_Vt": float(vt.var(ddof=1)),
           "mean_Tt": tt_mean, "mean_Tt_se": tt_se, "var_Tt": float(tt.var(ddof=1)),
           "pearson_Vt_Tt": pearson_correlation(vt, tt),
           "pearson_se": 1.0 / math.sqrt(samples)}
    if mom.sigma2_F > 0:
        tests = standardized_sample_tests(F, mom.mu_F, math.sqrt(mom.sigma2_F))
        emp["standardized"] = tests.to_dict()
        emp["var_ratio"] = float(F.var(ddof=1) / mom.sigma2_F)
        if out is not None:
            plots.cdf_overlay((F - mom.mu_F) / math.sqrt(mom.sigma2_F), out / "plots" / f"cdf_F_n{n}.svg",
                              title=f"copies of H (conjectured law), n={n}")
    rep.empirical = emp
    rep.wall_clock_seconds = time.perf_counter() - t0
    return rep


def write_report(rep: ExperimentReport, out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    path.write_text(rep.to_json() + "\n")
    # the largest-n sample file doubles as samples.csv
    if rep.artifacts:
        last = list(rep.artifacts.values())[-1]
        (out / "samples.csv").write_text((out / last).read_text())
    return path
