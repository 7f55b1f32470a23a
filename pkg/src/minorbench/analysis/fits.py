"""Scaling fits: chain length against problem size, success against edge count."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InvalidParams

LOGISTIC_TOL = 1e-8
LOGISTIC_MAX_ITER = 100
# a slope this steep (per unit of log edges) means the classes are separated in practice
_DIVERGED_SLOPE = 1e4


@dataclass(frozen=True)
class FitResult:
    model: str
    coefficients: dict[str, float]
    goodness: float  # R^2, or McFadden's pseudo-R^2 for the logistic model
    n: int
    flags: dict[str, bool] = field(default_factory=dict)

    def __getitem__(self, name: str) -> float:
        return self.coefficients[name]


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, intercept and R^2 of ``y`` on ``x``; R^2 is 0 when ``y`` is constant."""
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise InvalidParams("all x values are equal; the slope is undefined")
    syy = float(np.sum((y - ym) ** 2))
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = float(ym - slope * xm)
    if syy == 0:
        return 0.0, float(ym), 0.0
    resid = y - (slope * x + intercept)
    r2 = 1.0 - float(np.sum(resid ** 2)) / syy
    return slope, intercept, min(max(r2, 0.0), 1.0)


def fit_sqrt_linear(edges: Sequence[float], acl: Sequence[float]) -> FitResult:
    """Least squares ``acl = a * sqrt(edges) + b``."""
    x = np.sqrt(np.asarray(edges, dtype=float))
    y = np.asarray(acl, dtype=float)
    if x.size != y.size or x.size < 3:
        raise InvalidParams("need at least 3 paired points")
    a, b, r2 = _least_squares(x, y)
    return FitResult("sqrt_linear", {"a": a, "b": b}, r2, int(x.size))


def fit_powerlaw(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least squares in log-log space: ``y = prefactor * x**exponent``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise InvalidParams("need at least 3 paired points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidParams("power-law fit needs strictly positive x and y")
    slope, intercept, r2 = _least_squares(np.log(x), np.log(y))
    return FitResult("powerlaw", {"exponent": slope, "prefactor": math.exp(intercept)}, r2, int(x.size))


def _log_likelihood(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-300, 1 - 1e-16)
    return float(np.sum(y * np.log(p) + (1 - y) * np.log1p(-p)))


def fit_logistic_success(edges: Sequence[float], success: Sequence[bool]) -> FitResult:
    """Logistic regression of success on ``log(edges)`` by IRLS.

    Coefficients are ``intercept`` and ``slope`` on the log scale plus
    ``midpoint``, the edge count at 50% predicted success. When the classes
    are separated (every success on one side of every failure) the flag
    ``separated`` is set, no slope is reported and ``midpoint`` is the
    geometric mean of the two edge counts bounding the gap.
    """
    e = np.asarray(edges, dtype=float)
    y = np.asarray(success, dtype=float)
    if e.size != y.size or e.size == 0:
        raise InvalidParams("edges and success must be non-empty and of equal length")
    if np.any(e <= 0):
        raise InvalidParams("edge counts must be positive")
    if y.min() == y.max():
        raise InvalidParams("logistic fit needs both successes and failures")
    x = np.log(e)
    n = int(x.size)
    if x.min() == x.max():
        raise InvalidParams("all edge counts are equal; no threshold can be fitted")

    gap = _separating_gap(x, y)
    if gap is not None:
        lo, hi = gap
        return FitResult("logistic", {"midpoint": math.exp((lo + hi) / 2)}, 1.0, n,
                         {"separated": True, "converged": False})

    X = np.column_stack([np.ones(n), x])
    beta = np.zeros(2)
    converged = False
    for _ in range(LOGISTIC_MAX_ITER):
        eta = X @ beta
        p = 1 / (1 + np.exp(-eta))
        w = np.maximum(p * (1 - p), 1e-12)
        z = eta + (y - p) / w
        try:
            new = np.linalg.solve(X.T @ (w[:, None] * X), X.T @ (w * z))
        except np.linalg.LinAlgError as exc:
            raise InvalidParams(f"logistic fit is numerically singular: {exc}") from exc
        step = float(np.max(np.abs(new - beta)))
        beta = new
        if step < LOGISTIC_TOL:
            converged = True
            break
    intercept, slope = float(beta[0]), float(beta[1])
    if not converged and abs(slope) > _DIVERGED_SLOPE:
        # quasi-separation: classes overlap only at a tie, the likelihood has no maximum
        boundary = float(x[np.argmin(np.abs(x * slope + intercept))])
        return FitResult("logistic", {"midpoint": math.exp(boundary)}, 1.0, n,
                         {"separated": True, "converged": False})
    p = 1 / (1 + np.exp(-(X @ beta)))
    ll = _log_likelihood(y, p)
    p0 = np.full(n, y.mean())
    ll0 = _log_likelihood(y, p0)
    pseudo = 1 - ll / ll0 if ll0 < 0 else 0.0
    midpoint = math.exp(-intercept / slope) if slope != 0 else float("nan")
    return FitResult("logistic", {"intercept": intercept, "slope": slope, "midpoint": midpoint},
                     min(max(pseudo, 0.0), 1.0), n, {"separated": False, "converged": converged})


def _separating_gap(x: np.ndarray, y: np.ndarray) -> tuple[float, float] | None:
    """Bounds of the gap between the classes when one lies wholly below the other."""
    succ, fail = x[y == 1], x[y == 0]
    if succ.max() < fail.min():
        return float(succ.max()), float(fail.min())
    if fail.max() < succ.min():
        return float(fail.max()), float(succ.min())
    return None
