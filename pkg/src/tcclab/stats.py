"""Significance testing for model comparisons.

One-tailed paired t-tests with Benjamini-Hochberg adjustment and Cohen's d
effect sizes for baseline-vs-challenger comparisons; one-way ANOVA with Tukey
HSD post hoc tests for frame-selection studies. Distribution tail
probabilities come from scipy's numeric evaluations (Student t, F,
studentized range); the statistics themselves are computed here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps


class StatsError(ValueError):
    """Raised on malformed statistical inputs."""


@dataclass(frozen=True)
class PairedTResult:
    t: float
    df: int
    p: float
    degenerate: bool = False


@dataclass(frozen=True)
class TukeyComparison:
    group_a: int
    group_b: int
    mean_diff: float
    q: float
    p_adjusted: float


@dataclass(frozen=True)
class AnovaResult:
    f_stat: float
    p: float
    pairwise: tuple[TukeyComparison, ...]
    degenerate: bool = False


def _paired_differences(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise StatsError("paired samples must be equal-length 1-D collections")
    if a.size < 2:
        raise StatsError("paired tests need at least 2 pairs")
    return a - b


def paired_t_one_tailed(a, b) -> PairedTResult:
    """Upper-tail paired t-test of mean(a - b) > 0 (a baseline, b challenger).

    Zero-variance differences cannot produce a t statistic; the result is then
    the degenerate limit p in {0, 0.5, 1} keyed on the sign of the mean, with
    the ``degenerate`` flag set.
    """
    d = _paired_differences(a, b)
    n = d.size
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        p = 0.5 if mean == 0.0 else (0.0 if mean > 0.0 else 1.0)
        t = math.inf if mean > 0.0 else (-math.inf if mean < 0.0 else 0.0)
        return PairedTResult(t=t, df=n - 1, p=p, degenerate=True)
    t = mean / (sd / math.sqrt(n))
    p = float(sps.t.sf(t, df=n - 1))
    return PairedTResult(t=t, df=n - 1, p=p)


def benjamini_hochberg(p_values) -> list[float]:
    """Step-up false-discovery-rate adjustment, returned in input order."""
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise StatsError("p-values must be a non-empty 1-D collection")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise StatsError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted_sorted = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted_sorted = np.minimum(adjusted_sorted, 1.0)
    adjusted = np.empty(m, dtype=np.float64)
    adjusted[order] = adjusted_sorted
    return [float(v) for v in adjusted]


def cohens_d_paired(a, b) -> float:
    """Paired Cohen's d: mean difference over its sample standard deviation.

    Zero-variance differences are a flagged sentinel: signed infinity for a
    nonzero mean shift, 0.0 when the samples are identical.
    """
    d = _paired_differences(a, b)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
    return mean / sd


def effect_size_label(d: float) -> str:
    """Magnitude label: large if |d| >= 0.8, medium if |d| >= 0.6, else small."""
    magnitude = abs(d)
    if magnitude >= 0.8:
        return "large"
    if magnitude >= 0.6:
        return "medium"
    return "small"


def anova_tukey(groups) -> AnovaResult:
    """One-way ANOVA with Tukey HSD post hoc pairwise comparisons.

    Pairwise p-values use the studentized-range distribution with the
    Tukey-Kramer standard error for unequal group sizes. All-constant data
    (zero within-group variance everywhere) yields a flagged result.
    """
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2:
        raise StatsError("ANOVA needs at least 2 groups")
    if any(g.ndim != 1 or g.size < 2 for g in arrays):
        raise StatsError("each group needs at least 2 elements")

    k = len(arrays)
    n_total = sum(g.size for g in arrays)
    grand = sum(float(g.sum()) for g in arrays) / n_total
    means = [float(g.mean()) for g in arrays]
    ssb = sum(g.size * (m - grand) ** 2 for g, m in zip(arrays, means))
    ssw = sum(float(((g - m) ** 2).sum()) for g, m in zip(arrays, means))
    df_between = k - 1
    df_within = n_total - k

    if ssw == 0.0:
        if ssb == 0.0:
            pairwise = tuple(
                TukeyComparison(i, j, means[j] - means[i], 0.0, 1.0)
                for i, j in itertools.combinations(range(k), 2)
            )
            return AnovaResult(f_stat=0.0, p=1.0, pairwise=pairwise, degenerate=True)
        pairwise = tuple(
            TukeyComparison(
                i, j, means[j] - means[i],
                math.inf if means[i] != means[j] else 0.0,
                0.0 if means[i] != means[j] else 1.0,
            )
            for i, j in itertools.combinations(range(k), 2)
        )
        return AnovaResult(f_stat=math.inf, p=0.0, pairwise=pairwise, degenerate=True)

    msb = ssb / df_between
    msw = ssw / df_within
    f_stat = msb / msw
    p = float(sps.f.sf(f_stat, df_between, df_within))

    pairwise = []
    for i, j in itertools.combinations(range(k), 2):
        ni, nj = arrays[i].size, arrays[j].size
        diff = means[j] - means[i]
        se = math.sqrt(msw / 2.0 * (1.0 / ni + 1.0 / nj))
        q = abs(diff) / se
        p_pair = float(sps.studentized_range.sf(q, k, df_within))
        pairwise.append(TukeyComparison(i, j, diff, q, p_pair))
    return AnovaResult(f_stat=f_stat, p=p, pairwise=tuple(pairwise))
