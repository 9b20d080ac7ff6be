"""Welch's t-test and Pearson correlation with two-sided p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import betainc


def t_two_sided_p(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t via the regularized
    incomplete beta function: ``I_{df/(df+t^2)}(df/2, 1/2)``."""
    if math.isinf(t):
        return 0.0
    if t == 0:
        return 1.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


@dataclass(frozen=True)
class TTest:
    t: float
    df: float
    p: float
    degenerate: bool = False  # both groups had zero variance


def welch_t_test(group_a: Sequence[float], group_b: Sequence[float]) -> TTest:
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least 2 values")
    na, nb = len(a), len(b)
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1), b.var(ddof=1)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    if se2 == 0:
        if ma == mb:
            return TTest(0.0, float(na + nb - 2), 1.0, degenerate=True)
        return TTest(math.copysign(math.inf, ma - mb), float(na + nb - 2), 0.0, degenerate=True)
    t = (ma - mb) / math.sqrt(se2)
    df = se2 * se2 / (sa * sa / (na - 1) + sb * sb / (nb - 1))
    return TTest(float(t), float(df), t_two_sided_p(t, df))


@dataclass(frozen=True)
class Correlation:
    r: Optional[float]
    p: Optional[float]
    k: int  # complete pairs used
    reason: str = ""  # why r is undefined

    @property
    def defined(self) -> bool:
        return self.r is not None


def pearson(x: Sequence[Optional[float]], y: Sequence[Optional[float]]) -> Correlation:
    """Product-moment correlation over pairs where both values are present."""
    xa = np.asarray([np.nan if v is None else v for v in x], dtype=float)
    ya = np.asarray([np.nan if v is None else v for v in y], dtype=float)
    if xa.shape != ya.shape:
        raise ValueError("x and y must have the same length")
    keep = ~(np.isnan(xa) | np.isnan(ya))
    xa, ya = xa[keep], ya[keep]
    k = len(xa)
    if k < 3:
        return Correlation(None, None, k, f"only {k} complete pairs")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        return Correlation(None, None, k, "zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return Correlation(r, 0.0, k)
    df = k - 2
    t = r * math.sqrt(df / (1 - r * r))
    return Correlation(r, t_two_sided_p(t, df), k)
