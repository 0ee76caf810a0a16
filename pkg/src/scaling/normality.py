"""Shapiro-Wilk test with Royston's approximation of the coefficients and of the p-value."""

import math
from typing import NamedTuple

import numpy as np
from scipy.stats import norm

from src.errors import DegenerateSample, TooFewSamples

MAX_SAMPLES = 5000
SUBSAMPLE_SEED = 0
SMALL = 1e-19

# polynomial coefficients, highest degree first (np.polyval)
C1 = [-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0]
C2 = [-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0]
C3 = [-0.0006714, 0.025054, -0.39978, 0.544]
C4 = [-0.0020322, 0.062767, -0.77857, 1.3822]
C5 = [0.0038915, -0.083751, -0.31082, -1.5861]
C6 = [0.0030302, -0.082676, -0.4803]
G = [0.459, -2.273]


class ShapiroResult(NamedTuple):
    statistic: float
    pvalue: float


def _coefficients(n: int) -> np.ndarray:
    if n == 3:
        return np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    summ2 = float(m @ m)
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a_n = np.polyval(C1, rsn) + m[-1] / ssumm2
    if n > 5:
        a_n1 = np.polyval(C2, rsn) + m[-2] / ssumm2
        phi = (summ2 - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a_n**2 - 2 * a_n1**2)
        a = m / math.sqrt(phi)
        a[-2], a[1] = a_n1, -a_n1
    else:
        phi = (summ2 - 2 * m[-1] ** 2) / (1 - 2 * a_n**2)
        a = m / math.sqrt(phi)
    a[-1], a[0] = a_n, -a_n
    return a


def _pvalue(w: float, n: int) -> float:
    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(max(p, 0.0), 1.0)
    w1 = 1.0 - w
    if w1 <= 0.0:
        return 1.0
    y = math.log(w1)
    if n <= 11:
        gamma = np.polyval(G, n)
        if y >= gamma:
            return SMALL
        y = -math.log(gamma - y)
        mean, std = np.polyval(C3, n), math.exp(np.polyval(C4, n))
    else:
        log_n = math.log(n)
        mean, std = np.polyval(C5, log_n), math.exp(np.polyval(C6, log_n))
    return float(norm.sf((y - mean) / std))


def shapiro_wilk(x: np.ndarray) -> ShapiroResult:
    """Shapiro-Wilk W statistic and p-value. Samples larger than 5000 are subsampled (without
    replacement, fixed seed) to 5000 values."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 3:
        raise TooFewSamples(f"shapiro-wilk needs at least 3 values, got {x.size}")
    if x.size > MAX_SAMPLES:
        rng = np.random.default_rng(SUBSAMPLE_SEED)
        x = rng.choice(x, size=MAX_SAMPLES, replace=False)
    x = np.sort(x)
    n = x.size
    if x[-1] - x[0] < SMALL * max(1.0, abs(x[0])):
        raise DegenerateSample("shapiro-wilk is undefined for a sample with zero variance")
    centered = x - x.mean()
    ssq = float(centered @ centered)
    if ssq == 0.0:
        raise DegenerateSample("shapiro-wilk is undefined for a sample with zero variance")
    w = min(float(_coefficients(n) @ centered) ** 2 / ssq, 1.0)
    return ShapiroResult(statistic=w, pvalue=_pvalue(w, n))
