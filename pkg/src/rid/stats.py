"""Exponents, Lebesgue invariance, synchronization and Kolmogorov-Smirnov statistics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import fiber_maps as fm
from ._validation import DomainError, check_open_unit
from .metric import lift, lift_array, unlift_array


# --- Kolmogorov-Smirnov ----------------------------------------------------

def ks_critical(n, m=None, coef=1.63):
    """Asymptotic critical value at level 0.01 (``coef`` = 1.63)."""
    if m is None:
        return coef / math.sqrt(n)
    return coef * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class KSResult:
    statistic: float
    n: int
    critical_001: float
    m: int | None = None

    @property
    def passed(self):
        return self.statistic <= self.critical_001


def ks_statistic(samples):
    """One-sample KS distance between the empirical law of ``samples`` and uniform(0, 1)."""
    u = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = u.size
    if n == 0:
        raise DomainError("ks_statistic needs at least one sample")
    i = np.arange(1, n + 1)
    stat = max(float(np.max(i / n - u)), float(np.max(u - (i - 1) / n)))
    return KSResult(stat, n, ks_critical(n))


def ks_two_sample(first, second):
    """Two-sample KS distance ``sup |F_1 - F_2|`` over the pooled sample."""
    x = np.sort(np.asarray(first, dtype=np.float64).ravel())
    y = np.sort(np.asarray(second, dtype=np.float64).ravel())
    if not x.size or not y.size:
        raise DomainError("ks_two_sample needs two non-empty samples")
    pooled = np.concatenate([x, y])
    gap = np.searchsorted(x, pooled, side="right") / x.size \
        - np.searchsorted(y, pooled, side="right") / y.size
    return KSResult(float(np.max(np.abs(gap))), x.size, ks_critical(x.size, y.size), y.size)


# --- exponents ---------------------------------------------------------------

@dataclass(frozen=True)
class ExponentEstimate:
    estimate: float
    n: int
    std_error: float
    closed_form: float | None
    breakpoint_hits: int = 0

    @property
    def z(self):
        if self.closed_form is None or self.std_error == 0.0:
            return math.nan
        return (self.estimate - self.closed_form) / self.std_error

    @property
    def within_3se(self):
        return self.closed_form is not None and abs(self.estimate - self.closed_form) <= 3.0 * self.std_error


def fiber_exponent_closed_form(fam):
    """``-(1-c) log(1-c) - c log c - log 2``, the exponent under Lebesgue measure."""
    c = fam.c
    return -(1.0 - c) * math.log1p(-c) - c * math.log(c) - math.log(2.0)


def _two_valued(n, n_b, log_a, log_b, closed_form, hits=0):
    # per-step log-derivatives take only the values log_a and log_b
    p = n_b / n
    estimate = (n - n_b) / n * log_a + p * log_b
    var = p * (1.0 - p) * (log_b - log_a) ** 2 * (n / (n - 1) if n > 1 else 0.0)
    return ExponentEstimate(estimate, n, math.sqrt(var / n), closed_form, hits)


def _closed_or_warn(sampler, value):
    if sampler.p0 != 0.5:
        warnings.warn("closed forms assume fair coins; omitted for p0 != 1/2", stacklevel=3)
        return None
    return value


def fiber_lyapunov(fam, sampler, x0=None, n=1_000_000):
    """Birkhoff average of ``log f'`` along one forward orbit.

    ``x0=None`` draws the start from Lebesgue measure using a stream derived
    from the sampler. Orbit points landing exactly on a breakpoint are counted
    in ``breakpoint_hits``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if x0 is None:
        x0 = np.random.default_rng(sampler.child(1).seed).random()
        x0 = min(max(float(x0), 2.0 ** -53), 1.0 - 2.0 ** -53)
    H = lift(float(x0)) if x0 in (0.0, 1.0) else lift(check_open_unit(x0, "x0"))
    word = sampler.symbols_at(0, n).tolist()
    la, lb, l1c = fam.log_a, fam.log_b, math.log1p(-fam.c)
    log1p, exp = math.log1p, math.exp
    n_b = hits = 0
    # inlined lift_apply / lift_log_derivative; this loop is the hot path
    for s in word:
        G = H if s == 0 else -H
        if G == lb:
            # left slope: a for f0 at 1-c, b for f1 at c
            hits += 1
            n_b += s
        if G > lb:
            n_b += 1
            G -= lb
        elif G <= 0.0:
            G += la
        else:
            G = -l1c + log1p(-0.5 * exp(-G))
        H = G if s == 0 else -G
    return _two_valued(n, n_b, la, lb, _closed_or_warn(sampler, fiber_exponent_closed_form(fam)), hits)


def level_exponent(fam, level):
    """Log-average slope at the fixed point 0 or 1: ``log(ab)/2`` for either level."""
    if level not in (0, 1):
        raise DomainError("level must be 0 or 1")
    return 0.5 * (fam.log_a + fam.log_b)


def level_exponent_mc(fam, sampler, level, n=1_000_000):
    """Birkhoff average of ``log f'(level)`` over ``n`` symbols."""
    if level not in (0, 1):
        raise DomainError("level must be 0 or 1")
    ones = int(np.count_nonzero(sampler.symbols_at(0, n)))
    # slope b at 0 comes from f1, at 1 from f0
    n_b = ones if level == 0 else n - ones
    return _two_valued(n, n_b, fam.log_a, fam.log_b, _closed_or_warn(sampler, level_exponent(fam, level)))


# --- Lebesgue invariance ----------------------------------------------------

def lebesgue_invariance_defect(fam, intervals):
    """Largest ``|(|f0^-1 A| + |f1^-1 A|)/2 - |A||`` over the given intervals.

    Each interval must sit inside ``[0, 1/2]`` or inside ``[1/2, 1]``.
    """
    worst = 0.0
    for lo, hi in intervals:
        lo, hi = float(lo), float(hi)
        if not (0.0 <= lo <= hi <= 1.0):
            raise DomainError(f"bad interval ({lo}, {hi})")
        if lo < 0.5 < hi:
            raise DomainError(f"interval ({lo}, {hi}) straddles 1/2; split it there first")
        pre = sum(fm.apply_inverse(fam, s, hi) - fm.apply_inverse(fam, s, lo) for s in (0, 1))
        worst = max(worst, abs(0.5 * pre - (hi - lo)))
    return worst


def random_admissible_intervals(rng, count):
    ends = np.sort(0.5 * rng.random((count, 2)), axis=1)
    upper = rng.random(count) < 0.5
    ends[upper] += 0.5
    return [tuple(map(float, row)) for row in ends]


# --- synchronization ----------------------------------------------------------

@dataclass
class SyncTrace:
    distances: np.ndarray  # d(x_k, y_k) for k = 0 .. n
    clamp_count: int = 0

    @property
    def max_increase(self):
        if self.distances.size < 2:
            return 0.0
        return float(np.max(np.diff(self.distances)))

    def first_below(self, level):
        idx = np.flatnonzero(self.distances < level)
        return int(idx[0]) if idx.size else -1


def synchronization_run(fam, sampler, x0, y0, n):
    """``d``-distance between two orbits driven by the same symbols.

    Runs in lifted coordinates, where no clamping is ever needed, so
    ``clamp_count`` stays 0. Once the two states coincide in floating point
    they coincide forever and the remaining distances are exactly 0.
    """
    Hx = lift(check_open_unit(x0, "x0"))
    Hy = lift(check_open_unit(y0, "y0"))
    out = np.zeros(n + 1)
    out[0] = abs(Hx - Hy)
    step = fm.lift_apply
    for k, s in enumerate(sampler.symbols_at(0, n).tolist()):
        if Hx == Hy:
            break
        Hx, Hy = step(fam, s, Hx), step(fam, s, Hy)
        out[k + 1] = abs(Hx - Hy)
    return SyncTrace(out)


def empirical_fiber_distribution(fam, sampler, x0, n, burn_in=1000, return_samples=False):
    """KS distance to uniform of ``x_burn_in .. x_{n-1}`` along one orbit.

    The samples are serially dependent; ``critical_001`` is reported for
    reference only.
    """
    if not (0 <= burn_in < n):
        raise DomainError("need 0 <= burn_in < n")
    H = lift(float(x0))
    word = sampler.symbols_at(0, n - 1).tolist()
    trail = np.empty(n)
    trail[0] = H
    step = fm.lift_apply
    for k, s in enumerate(word):
        H = step(fam, s, H)
        trail[k + 1] = H
    xs = unlift_array(trail[burn_in:])
    res = ks_statistic(xs)
    return (res, xs) if return_samples else res
