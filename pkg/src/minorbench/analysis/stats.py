"""Aggregates, intervals and rank tests over per-problem results."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as sps

from ..errors import DegenerateTable, EmptyCategory, InvalidCounts, InvalidParams, TooFewPairs
from ..rng import make_rng

P_FLOOR = 1e-300
EXACT_WILCOXON_MAX_N = 25
MIN_PAIRS = 5


def macro_average(groups: Mapping[str, Sequence[float]]) -> float:
    """Mean of per-category means, each category weighted equally."""
    if not groups:
        raise EmptyCategory("no categories to average")
    means = []
    for name, values in groups.items():
        if len(values) == 0:
            raise EmptyCategory(f"category {name!r} has no values")
        means.append(math.fsum(values) / len(values))
    return math.fsum(means) / len(means)


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes in ``n`` trials."""
    if n < 1 or not 0 <= k <= n:
        raise InvalidCounts(f"need 0 <= k <= n and n >= 1, got k={k}, n={n}")
    if not 0 < confidence < 1:
        raise InvalidParams(f"confidence must be in (0, 1), got {confidence}")
    z = float(sps.norm.ppf(0.5 + confidence / 2))
    p = k / n
    z2n = z * z / n
    centre = (p + z2n / 2) / (1 + z2n)
    half = z * math.sqrt(p * (1 - p) / n + z2n / (4 * n)) / (1 + z2n)
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """Ranks starting at 1, ties sharing the mean of the ranks they span."""
    return sps.rankdata(np.asarray(values, dtype=float), method="average")


@dataclass(frozen=True)
class RankTable:
    """Problems x algorithms ranks; lower is better."""

    ranks: np.ndarray
    algorithms: tuple[str, ...]
    problems: tuple = ()

    def mean_ranks(self) -> dict[str, float]:
        return {a: float(m) for a, m in zip(self.algorithms, self.ranks.mean(axis=0))}


def rank_row(values: Sequence[float | None], success: Sequence[bool] | None = None) -> np.ndarray:
    """Rank one problem's values ascending; failures share the last ranks.

    A failure is a ``None`` or NaN value, or a ``False`` entry in ``success``.
    """
    k = len(values)
    failed = [v is None or (isinstance(v, float) and math.isnan(v)) for v in values]
    if success is not None:
        failed = [f or not s for f, s in zip(failed, success)]
    ok = [i for i in range(k) if not failed[i]]
    ranks = np.empty(k)
    if ok:
        ranks[ok] = average_ranks([values[i] for i in ok])
    bad = [i for i in range(k) if failed[i]]
    if bad:
        ranks[bad] = (len(ok) + 1 + k) / 2
    return ranks


def rank_with_failures_last(rows: Sequence[Sequence[float | None]], algorithms: Sequence[str],
                            problems: Sequence | None = None, drop_all_failed: bool = True) -> RankTable:
    """Build a :class:`RankTable` from per-problem metric rows (``None`` = failure)."""
    out, kept = [], []
    problems = list(problems) if problems is not None else list(range(len(rows)))
    for prob, row in zip(problems, rows):
        if len(row) != len(algorithms):
            raise InvalidParams(f"row for {prob!r} has {len(row)} values, expected {len(algorithms)}")
        if drop_all_failed and all(v is None or (isinstance(v, float) and math.isnan(v)) for v in row):
            continue
        out.append(rank_row(row))
        kept.append(prob)
    ranks = np.array(out, dtype=float).reshape(len(out), len(algorithms))
    return RankTable(ranks, tuple(algorithms), tuple(kept))


@dataclass(frozen=True)
class FriedmanResult:
    chi2: float
    p: float
    kendall_w: float
    mean_ranks: dict[str, float]
    n: int
    k: int


def friedman(table: RankTable) -> FriedmanResult:
    """Tie-corrected Friedman test and Kendall's W = chi2 / (N (k - 1))."""
    r = np.asarray(table.ranks, dtype=float)
    n, k = r.shape
    if n < 2 or k < 2:
        raise InvalidParams(f"friedman needs at least 2 problems and 2 algorithms, got {n}x{k}")
    col = r.sum(axis=0)
    # this form already carries the tie correction: the denominator is the
    # observed within-row rank variance rather than its no-ties value
    numerator = (k - 1) * float(np.sum((col - n * (k + 1) / 2) ** 2))
    denominator = float(np.sum(r ** 2)) - n * k * (k + 1) ** 2 / 4
    if denominator <= 1e-12:
        raise DegenerateTable("every row is fully tied; the Friedman statistic is undefined")
    chi2 = numerator / denominator
    p = float(sps.chi2.sf(chi2, k - 1))
    w = chi2 / (n * (k - 1))
    return FriedmanResult(chi2, p, min(max(w, 0.0), 1.0), table.mean_ranks(), n, k)


class _NoEvidence:
    """Marker for a comparison with no non-zero differences."""

    def __repr__(self):
        return "NoEvidence"

    def __bool__(self):
        return False


NoEvidence = _NoEvidence()


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float | None  # sum of ranks of positive differences
    p: float | _NoEvidence
    n: int  # pairs used after dropping zero differences
    zeros_dropped: int
    method: str  # "exact", "normal" or "none"
    floored: bool = False


def _exact_tails(ranks: np.ndarray, observed: float) -> tuple[float, float]:
    """P(W+ >= observed) and P(W+ <= observed) over all 2^n equally likely sign vectors."""
    doubled = np.rint(ranks * 2).astype(int)  # average ranks are multiples of 1/2
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.int64)  # at most 2**25
    counts[0] = 1
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:total + 1 - r]
        counts = counts + shifted
    obs = int(round(observed * 2))
    denom = 2 ** len(doubled)
    upper = int(counts[obs:].sum()) / denom
    lower = int(counts[:obs + 1].sum()) / denom
    return float(upper), float(lower)


def wilcoxon(x: Sequence[float], y: Sequence[float], alternative: str = "two-sided") -> WilcoxonResult:
    """Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped before ranking and their number reported.
    With at most 25 remaining pairs the p-value comes from the exact
    distribution of the statistic (ties included); otherwise from the
    normal approximation with tie-corrected variance and no continuity
    correction. ``alternative`` is ``"two-sided"``, ``"greater"`` (x tends
    to exceed y) or ``"less"``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InvalidParams(f"paired samples differ in length: {x.size} vs {y.size}")
    if x.size < MIN_PAIRS:
        raise TooFewPairs(f"need at least {MIN_PAIRS} pairs, got {x.size}")
    if alternative not in ("two-sided", "greater", "less"):
        raise InvalidParams(f"unknown alternative {alternative!r}")
    d = x - y
    nonzero = d[d != 0]
    zeros = int(d.size - nonzero.size)
    n = int(nonzero.size)
    if n == 0:
        return WilcoxonResult(None, NoEvidence, 0, zeros, "none")
    ranks = average_ranks(np.abs(nonzero))
    w_plus = float(ranks[nonzero > 0].sum())
    if n <= EXACT_WILCOXON_MAX_N:
        upper, lower = _exact_tails(ranks, w_plus)
        method = "exact"
    else:
        mean = n * (n + 1) / 4
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24 - float(np.sum(tie_counts ** 3 - tie_counts)) / 48
        z = (w_plus - mean) / math.sqrt(var)
        upper, lower = float(sps.norm.sf(z)), float(sps.norm.cdf(z))
        method = "normal"
    if alternative == "greater":
        p = upper
    elif alternative == "less":
        p = lower
    else:
        p = min(1.0, 2 * min(upper, lower))
    floored = p < P_FLOOR
    return WilcoxonResult(w_plus, max(p, P_FLOOR), n, zeros, method, floored)


def holm(pvalues: Sequence[float]) -> list[float]:
    """Holm step-down adjusted p-values, in the input order."""
    p = [float(v) for v in pvalues]
    m = len(p)
    order = sorted(range(m), key=lambda i: (p[i], i))
    adjusted = [0.0] * m
    running = 0.0
    for step, i in enumerate(order):
        running = max(running, min(1.0, (m - step) * p[i]))
        adjusted[i] = running
    return adjusted


def wilcoxon_holm(pairs: Mapping[str, tuple[Sequence[float], Sequence[float]]],
                  alternative: str = "two-sided") -> dict[str, tuple[WilcoxonResult, float | _NoEvidence]]:
    """Wilcoxon per named pair, then Holm over the pairs that have a p-value.

    Pairs with no non-zero differences keep the ``NoEvidence`` marker and
    are not counted in the family size.
    """
    results = {name: wilcoxon(x, y, alternative) for name, (x, y) in pairs.items()}
    tested = [name for name, r in results.items() if r.p is not NoEvidence]
    adjusted = dict(zip(tested, holm([results[name].p for name in tested])))
    return {name: (r, adjusted.get(name, NoEvidence)) for name, r in results.items()}


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average ranks; NaN when either side is constant."""
    if len(x) != len(y) or len(x) < 2:
        raise InvalidParams("spearman needs two samples of equal length >= 2")
    rx = average_ranks(x) - (len(x) + 1) / 2
    ry = average_ranks(y) - (len(y) + 1) / 2
    denom = math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry)))
    if denom == 0:
        return float("nan")
    return float(np.dot(rx, ry)) / denom


def bootstrap_median_ci(samples: Sequence[float], resamples: int = 2000, confidence: float = 0.95,
                        seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for the median."""
    data = np.asarray(samples, dtype=float)
    if data.size < 2:
        raise InvalidParams(f"bootstrap needs at least 2 samples, got {data.size}")
    rng = make_rng(seed, "bootstrap")
    idx = rng.integers(0, data.size, size=(int(resamples), data.size))
    medians = np.median(data[idx], axis=1)
    tail = (1 - confidence) / 2
    lo, hi = np.quantile(medians, [tail, 1 - tail])
    return float(lo), float(hi)
