"""Distances between integer laws, normality diagnostics and rate fits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

from .theory import discretized_normal_pmf


@dataclass(frozen=True)
class Pmf:
    """Law on the integers ``support_offset .. support_offset + len - 1``."""

    support_offset: int
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.ndim != 1 or len(probs) == 0:
            raise ValueError("probabilities must be a non-empty 1-d array")
        if (probs < 0).any():
            raise ValueError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "support_offset", int(self.support_offset))

    @classmethod
    def from_samples(cls, samples) -> "Pmf":
        x = np.asarray(samples)
        if x.size == 0:
            raise ValueError("need at least one sample")
        xi = np.rint(x).astype(np.int64)
        if not np.array_equal(xi, x):
            raise ValueError("samples must be integer valued")
        lo = int(xi.min())
        counts = np.bincount(xi - lo)
        return cls(lo, counts / counts.sum())

    @classmethod
    def from_dict(cls, table: dict) -> "Pmf":
        lo, hi = min(table), max(table)
        probs = np.zeros(hi - lo + 1)
        for k, v in table.items():
            probs[k - lo] += v
        return cls(lo, probs / probs.sum())

    @classmethod
    def point_mass(cls, k: int) -> "Pmf":
        return cls(k, np.array([1.0]))

    @classmethod
    def binomial(cls, n: int, p: float) -> "Pmf":
        k = np.arange(n + 1)
        return cls(0, sps.binom.pmf(k, n, p))

    @classmethod
    def discretized_normal(cls, mu: float, sigma2: float, width: float = 12.0) -> "Pmf":
        """Truncated to ``mu +- width * sigma``; the lost mass is below 1e-30
        for the default width and the rest is renormalised."""
        s = math.sqrt(sigma2)
        lo = int(math.floor(mu - width * s))
        hi = int(math.ceil(mu + width * s))
        k = np.arange(lo, hi + 1)
        probs = discretized_normal_pmf(mu, sigma2, k)
        return cls(lo, probs / probs.sum())

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_offset, self.support_offset + len(self.probabilities))

    def mean(self) -> float:
        return float(np.dot(self.support, self.probabilities))

    def var(self) -> float:
        m = self.mean()
        return float(np.dot((self.support - m) ** 2, self.probabilities))

    def on_range(self, lo: int, hi: int) -> np.ndarray:
        """Probabilities on ``lo..hi`` (zero outside the support)."""
        out = np.zeros(hi - lo + 1)
        a = max(lo, self.support_offset)
        b = min(hi, self.support_offset + len(self.probabilities) - 1)
        if a <= b:
            out[a - lo: b - lo + 1] = self.probabilities[a - self.support_offset: b - self.support_offset + 1]
        return out

    def shift(self, k: int) -> "Pmf":
        return Pmf(self.support_offset + k, self.probabilities)


def _as_pmf(x) -> Pmf:
    return x if isinstance(x, Pmf) else Pmf.from_samples(x)


def _aligned(a, b):
    a, b = _as_pmf(a), _as_pmf(b)
    lo = min(a.support_offset, b.support_offset)
    hi = max(a.support_offset + len(a.probabilities), b.support_offset + len(b.probabilities)) - 1
    return a.on_range(lo, hi), b.on_range(lo, hi)


def kolmogorov_distance(a, b) -> float:
    """Largest absolute cdf difference; ``a`` may be an integer sample."""
    pa, pb = _aligned(a, b)
    return float(np.max(np.abs(np.cumsum(pa) - np.cumsum(pb))))


def local_distance(a, b) -> float:
    """Largest absolute pmf difference over the union of supports."""
    pa, pb = _aligned(a, b)
    return float(np.max(np.abs(pa - pb)))


def smoothness_D(a) -> float:
    """Sum over i of |P(i+2) - 2 P(i+1) + P(i)|."""
    p = _as_pmf(a).probabilities
    padded = np.concatenate(([0.0, 0.0], p, [0.0, 0.0]))
    return float(np.abs(np.diff(padded, 2)).sum())


def smoothing_bound_check(U, V) -> tuple[float, float]:
    """``(d_loc(U, V), sqrt(d_K(U, V) * (D(U) + D(V))))``.  The first is at
    most a universal constant times the second."""
    return local_distance(U, V), math.sqrt(kolmogorov_distance(U, V) * (smoothness_D(U) + smoothness_D(V)))


@dataclass(frozen=True)
class NormalityReport:
    ks_stat: float
    wasserstein_estimate: float
    mean: float
    variance: float
    skewness: float
    mean_se: float
    variance_se: float
    skewness_se: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def standardized_sample_tests(samples, mu: float, sigma: float) -> NormalityReport:
    """Standardise by ``(x - mu) / sigma`` and compare with N(0, 1).

    The Wasserstein-1 distance is estimated by quantile coupling,
    ``mean |z_(i) - Phi^{-1}((i - 1/2) / n)|``.  Standard errors assume
    independent samples.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(samples, dtype=float)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two samples")
    z = np.sort((x - mu) / sigma)
    ks = float(sps.kstest(z, "norm").statistic)
    q = sps.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    w1 = float(np.mean(np.abs(z - q)))
    mean = float(z.mean())
    var = float(z.var(ddof=1))
    m4 = float(np.mean((z - mean) ** 4))
    skew = float(sps.skew(z)) if var > 0 else 0.0
    return NormalityReport(
        ks_stat=ks,
        wasserstein_estimate=w1,
        mean=mean,
        variance=var,
        skewness=skew,
        mean_se=math.sqrt(var / n),
        variance_se=math.sqrt(max(m4 - var**2, 0.0) / n),
        skewness_se=math.sqrt(6.0 / n),
        n=n,
    )


def dkw_epsilon(n: int, confidence: float = 0.999) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band for ``n`` samples."""
    alpha = 1.0 - confidence
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    slope_se: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return asdict(self)


def fit_rate(pairs, level: float = 0.95) -> RateFit:
    """Least squares of ``log err`` on ``log n``; the slope interval uses the
    Student-t quantile with ``len(pairs) - 2`` degrees of freedom."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError("need at least three (n, err) pairs")
    n = np.array([p[0] for p in pairs], dtype=float)
    err = np.array([p[1] for p in pairs], dtype=float)
    if (n <= 0).any() or (err <= 0).any():
        raise ValueError("n and err must be positive")
    res = sps.linregress(np.log(n), np.log(err))
    se = float(res.stderr)
    t = float(sps.t.ppf(0.5 + level / 2, len(pairs) - 2))
    r2 = float(res.rvalue**2) if np.isfinite(res.rvalue) else 1.0
    return RateFit(float(res.slope), float(res.intercept), r2, se,
                   float(res.slope) - t * se, float(res.slope) + t * se)


def pearson_correlation(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two samples of equal length >= 2")
    return float(np.corrcoef(x, y)[0, 1])


def batch_means(x, batch_size: int | None = None) -> tuple[float, float]:
    """Mean of a chain output and its batch-means standard error
    (default batch size ``floor(sqrt(len(x)))``)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 4:
        raise ValueError("need at least four samples")
    b = batch_size or int(math.sqrt(n))
    a = n // b
    if a < 2:
        raise ValueError("need at least two batches")
    means = x[: a * b].reshape(a, b).mean(axis=1)
    return float(x.mean()), float(means.std(ddof=1) / math.sqrt(a))


def chi_square_gof(observed, expected_prob, min_expected: float = 5.0) -> tuple[float, float, int]:
    """Pearson chi-square of counts against probabilities, pooling cells with
    expected count below ``min_expected`` into one.  Returns
    ``(statistic, p_value, dof)``."""
    obs = np.asarray(observed, dtype=float)
    prob = np.asarray(expected_prob, dtype=float)
    exp = prob / prob.sum() * obs.sum()
    small = exp < min_expected
    if small.any():
        obs = np.append(obs[~small], obs[small].sum())
        exp = np.append(exp[~small], exp[small].sum())
        if exp[-1] == 0:
            obs, exp = obs[:-1], exp[:-1]
    stat, pval = sps.chisquare(obs, exp)
    return float(stat), float(pval), len(obs) - 1
