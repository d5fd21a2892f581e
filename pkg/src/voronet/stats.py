"""Empirical distribution machinery: ECDFs, KS distance, moments, correlations.

Everything here is oracle-comparison plumbing: samples come in, summary
statistics with standard errors come out. All containers are immutable after
construction and accumulators are mergeable, so parallel reductions stay
deterministic as long as chunks are merged in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EmpiricalDistribution",
    "Estimate",
    "MomentAccumulator",
    "correlation",
    "ecdf",
    "ks_distance",
    "moment",
    "ratio_mean",
]


@dataclass(frozen=True)
class Estimate:
    """A point estimate with its standard error."""

    value: float
    se: float

    def __iter__(self):
        return iter((self.value, self.se))


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample collection supporting ECDF, moments, and KS distance."""

    samples: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("samples must be a non-empty 1-d array")
        if np.any(np.isnan(arr)):
            raise ValueError("samples contain NaN")
        arr = np.sort(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "n", int(arr.size))

    def ecdf(self, t):
        """P_hat(X <= t), right-continuous, evaluated at scalar or array t."""
        idx = np.searchsorted(self.samples, t, side="right")
        out = idx / self.n
        return float(out) if np.isscalar(t) else out

    def ks_distance(self, cdf) -> float:
        """Sup-norm distance between the ECDF and a monotone reference cdf.

        Both one-sided gaps are evaluated at the sample points, which is where
        the supremum of |F_n - F| is attained for a continuous F.
        """
        f = np.asarray(cdf(self.samples), dtype=float)
        i = np.arange(1, self.n + 1)
        d_plus = np.max(i / self.n - f)
        d_minus = np.max(f - (i - 1) / self.n)
        return float(max(d_plus, d_minus))

    def moment(self, k: int) -> Estimate:
        """Sample k-th raw moment with its standard error (n >= 2)."""
        if self.n < 2:
            raise ValueError("need at least 2 samples for a standard error")
        x = self.samples if k == 1 else self.samples**k
        m = float(np.mean(x))
        var = float(np.var(x, ddof=1))
        return Estimate(m, math.sqrt(var / self.n))

    @property
    def min(self) -> float:
        return float(self.samples[0])

    @property
    def max(self) -> float:
        return float(self.samples[-1])


def ecdf(dist: EmpiricalDistribution, t):
    return dist.ecdf(t)


def ks_distance(dist: EmpiricalDistribution, cdf) -> float:
    return dist.ks_distance(cdf)


def moment(dist: EmpiricalDistribution, k: int) -> Estimate:
    return dist.moment(k)


def correlation(xs, ys) -> Estimate:
    """Pearson correlation with the normal-approximation standard error.

    The standard error is the delta-method value (1 - r^2)/sqrt(n - 3).
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    n = x.size
    if n < 4:
        raise ValueError("need at least 4 pairs")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / math.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    se = (1.0 - r * r) / math.sqrt(n - 3)
    return Estimate(r, se)


def ratio_mean(numer, denom, trim_quantile: float = 1e-5):
    """Mean of numer/denom, reported raw and with small-denominator trimming.

    The ratio can be heavy-tailed when the denominator has mass near zero, so
    both the raw mean (the unbiased target) and a mean over samples whose
    denominator exceeds its ``trim_quantile`` quantile are returned.
    """
    num = np.asarray(numer, dtype=float)
    den = np.asarray(denom, dtype=float)
    if num.shape != den.shape:
        raise ValueError("numer and denom must have equal shape")
    ratio = num / den
    raw = Estimate(float(np.mean(ratio)), float(np.std(ratio, ddof=1) / math.sqrt(ratio.size)))
    cut = np.quantile(den, trim_quantile)
    kept = ratio[den > cut]
    trimmed = Estimate(float(np.mean(kept)), float(np.std(kept, ddof=1) / math.sqrt(kept.size)))
    return raw, trimmed


class MomentAccumulator:
    """Mergeable first/second-moment accumulator with compensated summation.

    Batch sums are computed with numpy's pairwise summation and folded into
    the running totals with Neumaier compensation, so the merged result does
    not depend on how replicates were chunked across workers beyond a single
    deterministic ordering.
    """

    __slots__ = ("n", "_s1", "_c1", "_s2", "_c2")

    def __init__(self):
        self.n = 0
        self._s1 = 0.0
        self._c1 = 0.0
        self._s2 = 0.0
        self._c2 = 0.0

    @staticmethod
    def _neumaier(s, c, term):
        t = s + term
        if abs(s) >= abs(term):
            c += (s - t) + term
        else:
            c += (term - t) + s
        return t, c

    def add(self, values):
        values = np.asarray(values, dtype=float)
        self.n += values.size
        self._s1, self._c1 = self._neumaier(self._s1, self._c1, float(np.sum(values)))
        self._s2, self._c2 = self._neumaier(self._s2, self._c2, float(np.sum(values * values)))

    def add_presummed(self, s1: float, s2: float, count: int):
        """Fold a chunk's precomputed sum and sum of squares."""
        self.n += count
        self._s1, self._c1 = self._neumaier(self._s1, self._c1, float(s1))
        self._s2, self._c2 = self._neumaier(self._s2, self._c2, float(s2))

    def merge(self, other: "MomentAccumulator"):
        self.n += other.n
        self._s1, self._c1 = self._neumaier(self._s1, self._c1, other._s1 + other._c1)
        self._s2, self._c2 = self._neumaier(self._s2, self._c2, other._s2 + other._c2)

    @property
    def sum(self) -> float:
        return self._s1 + self._c1

    def mean(self) -> Estimate:
        if self.n < 2:
            raise ValueError("need at least 2 values")
        m = self.sum / self.n
        sq = self._s2 + self._c2
        var = max(sq - self.n * m * m, 0.0) / (self.n - 1)
        return Estimate(m, math.sqrt(var / self.n))
