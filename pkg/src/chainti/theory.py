"""Closed-form distribution theory for TI_n on a 0MP random chain.

With ``alpha_i = TI(G_3^i) - TI(G_2)``, ``alpha = sum(alpha_i p_i)`` and
``beta = sum(alpha_i**2 p_i)``::

    E[TI_n] = TI_2 + alpha (n - 2)
    V[TI_n] = (beta - alpha**2) (n - 2)
    TI_n    = TI_2 + a . X,   X ~ Multinomial(n - 2, p)

The raw martingale normalisation ``(TI_n - alpha (n - 2)) / sqrt(n)`` tends
to N(0, beta - alpha**2); :func:`clt_statistic` uses the equivalent mean and
variance standardisation, which tends to N(0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .chains import LinkDistribution
from .indices import IndexFunction

MERGE_TOL = 1e-9
MAX_COMPOSITIONS = 10**7


class TheoryError(ValueError):
    pass


class DegenerateVarianceError(TheoryError):
    """Variance is zero: TI_n = B n + C is deterministic."""


def _as_dist(probs) -> LinkDistribution:
    return probs if isinstance(probs, LinkDistribution) else LinkDistribution(probs)


def _check(alpha_vec, probs, n):
    probs = _as_dist(probs)
    alpha_vec = np.asarray(alpha_vec, dtype=float)
    if alpha_vec.shape != (probs.m,):
        raise TheoryError(f"alpha vector has {alpha_vec.size} entries but {probs.m} link probabilities given")
    if n < 2:
        raise TheoryError(f"n must be >= 2, got {n}")
    return alpha_vec, probs


@dataclass(frozen=True)
class MomentSummary:
    alpha_vec: tuple
    alpha: float
    beta: float
    n: int
    mean: float
    variance: float

    @property
    def degenerate(self) -> bool:
        return self.variance == 0.0


def moments(alpha_vec, probs, ti2: float, n: int) -> MomentSummary:
    alpha_vec, probs = _check(alpha_vec, probs, n)
    p = probs.as_array()
    alpha = math.fsum(alpha_vec * p)
    beta = math.fsum(alpha_vec**2 * p)
    # sum p_i (alpha_i - alpha)^2 equals beta - alpha^2 but cannot go negative
    spread = math.fsum(p * (alpha_vec - alpha) ** 2)
    variance = spread * (n - 2)
    if variance < 1e-12 * (n - 2) * max(1.0, beta):
        variance = 0.0
    return MomentSummary(tuple(alpha_vec.tolist()), alpha, beta, n, ti2 + alpha * (n - 2), variance)


@dataclass(frozen=True)
class AbcConstants:
    A: float
    B: float
    C: float

    def ti(self, x1, n):
        """``A x_1 + B n + C``."""
        return self.A * x1 + self.B * n + self.C


def abc_constants(family_name: str, f: IndexFunction) -> AbcConstants:
    """Constants of ``TI_n = A X + B n + C`` for the three classical chains."""
    h22, h23, h33 = f(2, 2), f(2, 3), f(3, 3)
    if family_name == "phenylene":
        return AbcConstants(2 * h23 - h22 - h33, h22 + 2 * h23 + 5 * h33, 4 * h22 - 6 * h33)
    if family_name == "polyphenyl":
        return AbcConstants(h22 - 2 * h23 + h33, 2 * h22 + 4 * h23 + h33, 4 * h22 - 4 * h23 - h33)
    if family_name == "cyclooctane":
        return AbcConstants(h22 - 2 * h23 + h33, 4 * h22 + 4 * h23 + h33, 4 * h22 - 4 * h23 - h33)
    raise TheoryError(f"no closed-form A, B, C for family {family_name!r}")


@dataclass(frozen=True)
class ExactDistribution:
    support: np.ndarray
    probs: np.ndarray

    @property
    def mean(self) -> float:
        return math.fsum(self.support * self.probs)

    @property
    def variance(self) -> float:
        mu = self.mean
        return math.fsum(self.probs * (self.support - mu) ** 2)

    def mgf(self, t: float) -> float:
        return math.fsum(self.probs * np.exp(t * self.support))


def merge_atoms(values, weights, tol: float = MERGE_TOL) -> ExactDistribution:
    """Sort atoms by value and merge neighbours closer than ``tol``."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(values, kind="stable")
    support, probs = [], []
    group_v, group_w = [], []
    for v, w in zip(values[order], weights[order]):
        if group_v and v - group_v[0] > tol:
            support.append(group_v[0])
            probs.append(math.fsum(group_w))
            group_v, group_w = [], []
        group_v.append(v)
        group_w.append(w)
    if group_v:
        support.append(group_v[0])
        probs.append(math.fsum(group_w))
    support = np.array(support)
    probs = np.array(probs)
    keep = probs > 0
    return ExactDistribution(support[keep], probs[keep])


def compositions(total: int, parts: int):
    """All non-negative integer vectors of length ``parts`` summing to ``total``."""
    # stars and bars: choose the bar positions among total + parts - 1 slots
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield out


def exact_distribution(alpha_vec, probs, ti2: float, n: int) -> ExactDistribution:
    """Law of ``TI_2 + a . X`` with ``X ~ Multinomial(n - 2, p)``."""
    alpha_vec, probs = _check(alpha_vec, probs, n)
    steps = n - 2
    m = probs.m
    count = math.comb(steps + m - 1, m - 1)
    if count > MAX_COMPOSITIONS:
        raise TheoryError(f"{count} compositions exceed the limit of {MAX_COMPOSITIONS}")
    p = probs.as_array()
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    log_fact = [math.lgamma(k + 1) for k in range(steps + 1)]
    values, weights = [], []
    for x in compositions(steps, m):
        logw = log_fact[steps]
        impossible = False
        for xi, lp in zip(x, logp):
            if xi:
                if lp == -math.inf:
                    impossible = True
                    break
                logw += xi * lp - log_fact[xi]
        if impossible:
            continue
        values.append(ti2 + math.fsum(a * xi for a, xi in zip(alpha_vec, x)))
        weights.append(math.exp(logw))
    return merge_atoms(values, weights)


def mgf(alpha_vec, probs, ti2: float, n: int, t: float) -> float:
    """``exp(t TI_2) * (sum_i p_i exp(t alpha_i)) ** (n - 2)``."""
    alpha_vec, probs = _check(alpha_vec, probs, n)
    if t == 0:
        return 1.0
    # evaluated in log space; overflow is reported rather than returned as inf
    p = probs.as_array()
    mask = p > 0
    exponents = t * alpha_vec[mask] + np.log(p[mask])
    top = exponents.max()
    log_inner = top + math.log(math.fsum(np.exp(exponents - top)))
    log_m = t * ti2 + (n - 2) * log_inner
    if log_m > math.log(np.finfo(float).max):
        raise OverflowError(f"MGF at t={t} exceeds the double range (log value {log_m:.6g})")
    return math.exp(log_m)


def martingale_value(ti_n: float, n: int, alpha: float) -> float:
    """``M_n = TI_n - alpha (n - 2)``, a martingale with constant mean TI_2."""
    if n < 2:
        raise TheoryError(f"n must be >= 2, got {n}")
    return ti_n - alpha * (n - 2)


def clt_statistic(ti_n: float, n: int, summary: MomentSummary) -> float:
    """``(TI_n - E[TI_n]) / sqrt(V[TI_n])``, asymptotically N(0, 1)."""
    if summary.variance <= 0:
        raise DegenerateVarianceError(
            "variance is zero: all links with positive probability have the same "
            "increment, so TI_n = B n + C is deterministic and cannot be standardised"
        )
    return (ti_n - summary.mean) / math.sqrt(summary.variance)


def martingale_statistic(ti_n: float, n: int, alpha: float) -> float:
    """``(TI_n - alpha (n - 2)) / sqrt(n)``, which tends to N(0, beta - alpha**2)."""
    return martingale_value(ti_n, n, alpha) / math.sqrt(n)
